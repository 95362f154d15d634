#pragma once

// Built-in reference constructions with their stored tables: the mask
// listing, the indicator-sum form of phi-hat, and a hand-assigned wavelet
// mask family. `run_example` checks the computed tables against them.

#include "vilenkin/cli/driver.hpp"

namespace vilenkin::cli {

struct ListedCoset {
    int lowest;                 // position of the first digit
    std::vector<Digit> digits;  // positions lowest, lowest+1, ...
};

struct ExampleFixture {
    int id = 0;
    ConstructionConfig config;
    std::function<Complex(Digit, Digit, Digit)> listed_mask;             // m0(w1 w2 w3)
    std::vector<ListedCoset> listed_cosets;                             // phi-hat indicators besides Q
    std::vector<std::pair<Digit, Digit>> window_tails;                   // tails excluded from Q
    std::map<std::pair<Digit, Digit>, std::vector<Digit>> special_rows;  // tail -> l with m_nu(l tail) = 1
};

inline ExampleFixture example_fixture(int id)
{
    ExampleFixture f;
    f.id = id;
    f.config.n = 3;
    if (id == 1) {
        f.config.matrix = IntMatrix{{2, 0}, {1, 2}};
        f.config.dual_digits = std::vector<IntVector>{{0, 0}, {0, 1}, {1, 0}, {1, 1}};
        f.config.xi = {1, 1, 2, 1};
        f.config.r = 3;
        f.window_tails = {{1, 2}, {2, 1}};
        f.listed_mask = [](Digit l, Digit w1, Digit w2) {
            const bool special = (w1 == 1 && w2 == 2) || (w1 == 2 && w2 == 1);
            return Complex(special ? l == 1 : l == 0);
        };
        f.listed_cosets = {{0, {1, 1, 2}}, {-1, {1, 1, 2, 1}}};
        f.special_rows = {{{1, 2}, {1, 0, 2, 3}}, {{2, 1}, {1, 0, 2, 3}}};
    } else if (id == 2) {
        f.config.matrix = IntMatrix{{2, 1}, {-1, 1}};
        f.config.digits = std::vector<IntVector>{{0, 0}, {1, 0}, {2, 0}};
        f.config.dual_digits = std::vector<IntVector>{{0, 0}, {0, 1}, {1, 1}};
        f.config.xi = {1, 2, 2, 1, 1};
        f.config.r = 4;
        f.window_tails = {{2, 2}, {2, 1}, {1, 1}};
        f.listed_mask = [](Digit w1, Digit w2, Digit w3) {
            if (w1 == 0) {
                const bool excluded = (w2 == 2 && w3 == 2) || (w2 == 2 && w3 == 1) || (w2 == 1 && w3 == 1);
                return Complex(!excluded);
            }
            const bool listed = (w1 == 1 && w2 == 2 && w3 == 2) || (w1 == 2 && w2 == 2 && w3 == 1) ||
                                (w1 == 2 && w2 == 1 && w3 == 1);
            return Complex(listed);
        };
        f.listed_cosets = {{0, {1, 2, 2}}, {-1, {1, 2, 2, 1}}, {-2, {1, 2, 2, 1, 1}}};
        f.special_rows = {{{2, 2}, {1, 0, 2}}, {{2, 1}, {2, 1, 0}}, {{1, 1}, {2, 1, 0}}};
    } else {
        throw InputError("example", "unknown example id " + std::to_string(id) + " (expected 1 or 2)");
    }
    return f;
}

inline WalshPolynomial listed_mask(const ExampleFixture& f, const ContextPtr& ctx)
{
    const unsigned m = ctx->m();
    std::vector<Complex> values(vilenkin::detail::table_size(m, 3));
    for (Index p = 0; p < values.size(); ++p) {
        const auto d = pattern_digits(m, p, 3);
        values[p] = f.listed_mask(d[0], d[1], d[2]);
    }
    return WalshPolynomial::from_values(ctx, 3, std::move(values));
}

/// Sum of the listed coset indicators plus the Q term, all with weight 1.
inline TestFunction listed_phi_hat(const ExampleFixture& f, const ContextPtr& ctx)
{
    const int support = static_cast<int>(f.config.xi.size()) - 2; // r - n + 2 with n = 3
    auto out = TestFunction::zero(ctx, Side::dual, 2, support);
    for (const auto& coset : f.listed_cosets)
        out[*out.index_of(GroupElement::from_positions(Side::dual, coset.lowest, coset.digits))] = 1.0;
    for (Digit a = 0; a < ctx->m(); ++a)
        for (Digit b = 0; b < ctx->m(); ++b) {
            if (std::find(f.window_tails.begin(), f.window_tails.end(), std::make_pair(a, b)) != f.window_tails.end())
                continue;
            out[*out.index_of(GroupElement::from_positions(Side::dual, 1, {a, b}))] = 1.0;
        }
    return out;
}

/// The hand-assigned family: m_nu(l tail) = delta_{l nu} off the special
/// tails, the listed rows on them.
inline MaskFamily listed_family(const ExampleFixture& f, const ContextPtr& ctx)
{
    const unsigned m = ctx->m();
    const Index tails = vilenkin::detail::checked_pow(m, 2);
    std::vector<std::vector<Complex>> tables(m, std::vector<Complex>(tails * m));
    for (Index tail = 0; tail < tails; ++tail) {
        const std::pair<Digit, Digit> key{static_cast<Digit>(tail / m), static_cast<Digit>(tail % m)};
        const auto special = f.special_rows.find(key);
        for (unsigned nu = 0; nu < m; ++nu) {
            const Digit l = special == f.special_rows.end() ? nu : special->second[nu];
            tables[nu][l * tails + tail] = 1.0;
        }
    }
    std::vector<WalshPolynomial> masks;
    for (auto& t : tables)
        masks.push_back(WalshPolynomial::from_values(ctx, 3, std::move(t)));
    return MaskFamily::from_masks(std::move(masks));
}

// Each special-tail block of the listed family is a permutation matrix and
// its m0 row agrees with the constructed mask.
inline double permutation_defect(const ExampleFixture& f, const MaskFamily& family, const WalshPolynomial& m0)
{
    const unsigned m = m0.context().m();
    double defect = 0;
    for (const auto& [tail_digits, rows] : f.special_rows) {
        const Index tail = tail_digits.first * m + tail_digits.second;
        std::vector<int> column_hits(m, 0);
        for (unsigned nu = 0; nu < m; ++nu) {
            int hits = 0;
            for (Digit l = 0; l < m; ++l) {
                const Complex v = family.masks[nu].column_entry(l, tail);
                if (v == Complex(1.0)) {
                    ++hits;
                    ++column_hits[l];
                } else if (v != Complex(0.0)) {
                    defect = std::max(defect, std::abs(v));
                }
            }
            if (hits != 1)
                defect = std::max(defect, 1.0);
        }
        for (int hits : column_hits)
            if (hits != 1)
                defect = std::max(defect, 1.0);
        for (Digit l = 0; l < m; ++l)
            defect = std::max(defect, std::abs(family.masks[0].column_entry(l, tail) - m0.column_entry(l, tail)));
    }
    return defect;
}

inline RunResult run_example(int id, const fs::path& out, const RunOptions& options)
{
    ExampleFixture f;
    try {
        f = example_fixture(id);
    } catch (const InputError& e) {
        RunResult r;
        r.exit_code = kInputError;
        r.message = e.what();
        return r;
    }
    auto extra = [&](const Bundle& b, VerificationReport& report, const fs::path& dir) {
        auto record = [&](const std::string& name, double defect, double tol, std::string note) {
            report.checks.push_back({name, defect <= tol, defect, tol, 0.0, std::move(note)});
        };
        const WalshPolynomial listed = listed_mask(f, b.ctx);
        double mask_defect = 0;
        for (Index i = 0; i < listed.size(); ++i)
            mask_defect = std::max(mask_defect, std::abs(listed.value(i) - b.mask.value(i)));
        record("listed-mask", mask_defect, 0.0, "m0 table vs listed table");
        record("listed-phi-hat", sup_distance(listed_phi_hat(f, b.ctx), detail::need(b.phi_hat, "phi-hat")), 0.0,
               "phi-hat vs listed indicator sum");
        const MaskFamily family = listed_family(f, b.ctx);
        write_json_file(dir / "listed_family.json", mask_family_to_json(family));
        record("listed-family", family.polyphase_defect, 0.0, "hand-assigned wavelet masks");
        record("listed-permutations", permutation_defect(f, family, b.mask), 0.0,
               "special-tail blocks are permutation matrices");
    };
    return construct_from_config(f.config, out, options, "example " + std::to_string(id) + "\n", extra);
}

} // namespace vilenkin::cli
