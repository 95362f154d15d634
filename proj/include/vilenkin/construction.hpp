#pragma once

// Orthogonal masks from xi-sequences, and the refinable function they define.
//
// A xi-sequence xi_0 ... xi_r of nonzero dual digits with pairwise distinct
// length-(n-1) windows yields a mask b of order n with exactly one unimodular
// entry in every column b(. omega_2 ... omega_n); the refinable function's
// Fourier transform is then a finite sum of coset indicators.

#include "vilenkin/test_function.hpp"
#include "vilenkin/walsh.hpp"

#include <cmath>
#include <map>
#include <set>
#include <vector>

namespace vilenkin {

struct XiSequence {
    unsigned n = 2;
    std::vector<Digit> xi;
    /// Optional values for the free entries, keyed by mask pattern index.
    /// Defaults are +1; only +1/-1 unless allow_unimodular is set.
    std::map<Index, Complex> phases;
    bool allow_unimodular = false;

    unsigned r() const { return xi.empty() ? 0 : static_cast<unsigned>(xi.size() - 1); }
    /// Windows (xi_k ... xi_{k+n-2}) are referenced for k = 0 ... window_count()-1.
    unsigned window_count() const { return r() + 3 - n; }
};

inline constexpr double kTableTolerance = 1e-12;

namespace detail {

inline Index window_index(const XiSequence& seq, unsigned m, unsigned k)
{
    Index out = 0;
    for (unsigned i = 0; i + 1 < seq.n; ++i)
        out = out * m + seq.xi[k + i];
    return out;
}

// xi_l with xi_l = 0 for l < 0.
inline Digit xi_at(const XiSequence& seq, long l) { return l < 0 ? 0 : seq.xi[static_cast<std::size_t>(l)]; }

} // namespace detail

inline void validate_xi(const XiSequence& seq, const GroupContext& ctx)
{
    if (seq.n < 2)
        throw Error(ErrorCode::InvalidParameters, "mask order n must be at least 2, got " + std::to_string(seq.n));
    if (seq.xi.size() < seq.n + 1)
        throw Error(ErrorCode::InvalidParameters, "need r >= n, i.e. at least n+1 digits; got " +
                                                      std::to_string(seq.xi.size()));
    for (std::size_t k = 0; k < seq.xi.size(); ++k) {
        if (seq.xi[k] >= ctx.m())
            throw Error(ErrorCode::InvalidParameters, "xi_" + std::to_string(k) + " is not a digit index");
        if (seq.xi[k] == 0)
            throw Error(ErrorCode::ZeroDigitUsed, "xi_" + std::to_string(k) + " is the zero digit");
    }
    std::map<Index, unsigned> seen;
    for (unsigned k = 0; k < seq.window_count(); ++k) {
        const auto [it, fresh] = seen.emplace(detail::window_index(seq, ctx.m(), k), k);
        if (!fresh)
            throw Error(ErrorCode::WindowCollision,
                        "windows " + std::to_string(it->second) + " and " + std::to_string(k) + " coincide");
    }
}

/// max over tails of |sum_k |b(k tail)|^2 - 1|.
inline double mask_orthogonality_defect(const WalshPolynomial& mask)
{
    if (mask.order() < 1)
        throw Error(ErrorCode::InvalidParameters, "mask order must be >= 1");
    const unsigned m = mask.context().m();
    double defect = 0;
    for (Index tail = 0; tail < mask.tail_count(); ++tail) {
        double sum = 0;
        for (Digit k = 0; k < m; ++k)
            sum += std::norm(mask.column_entry(k, tail));
        defect = std::max(defect, std::abs(sum - 1.0));
    }
    return defect;
}

/// Every column sum <= 1 (+tolerance) and m0(theta) = 1.
inline bool mask_admissible(const WalshPolynomial& mask)
{
    const unsigned m = mask.context().m();
    for (Index tail = 0; tail < mask.tail_count(); ++tail) {
        double sum = 0;
        for (Digit k = 0; k < m; ++k)
            sum += std::norm(mask.column_entry(k, tail));
        if (sum > 1.0 + kTableTolerance)
            return false;
    }
    return std::abs(mask.value(0) - Complex(1.0)) <= kTableTolerance;
}

struct MaskReport {
    WalshPolynomial mask;
    double orthogonality_defect = 0;
    bool admissible = false;
    bool unimodular_phases = false; // some free entry is unimodular but not +-1
};

inline MaskReport build_mask_from_xi(const XiSequence& seq, const ContextPtr& ctx)
{
    validate_xi(seq, *ctx);
    const unsigned m = ctx->m();
    const unsigned n = seq.n;
    const Index tails = detail::checked_pow(m, n - 1);
    std::vector<Complex> values(detail::table_size(m, n));
    std::set<Index> free_entries;

    // b(xi_k ... xi_{k+n-1}) for k = 0 ... r-n+1
    for (unsigned k = 0; k + n <= seq.xi.size(); ++k) {
        Index pattern = 0;
        for (unsigned i = 0; i < n; ++i)
            pattern = pattern * m + seq.xi[k + i];
        values[pattern] = 1.0;
        free_entries.insert(pattern);
    }
    // b(0 tail) for tails matching none of the windows k = 1 ... r-n+2
    std::set<Index> window_tails;
    for (unsigned k = 1; k < seq.window_count(); ++k)
        window_tails.insert(detail::window_index(seq, m, k));
    for (Index tail = 0; tail < tails; ++tail) {
        if (window_tails.count(tail))
            continue;
        values[tail] = 1.0;
        if (tail != 0)
            free_entries.insert(tail);
    }

    bool unimodular_used = false;
    for (const auto& [pattern, phase] : seq.phases) {
        if (!free_entries.count(pattern))
            throw Error(ErrorCode::InvalidPhase, "pattern " + std::to_string(pattern) + " is not a free mask entry");
        if (std::abs(std::abs(phase) - 1.0) > kTableTolerance)
            throw Error(ErrorCode::InvalidPhase, "mask values must be unimodular");
        const bool sign = phase == Complex(1.0) || phase == Complex(-1.0);
        if (!sign && !seq.allow_unimodular)
            throw Error(ErrorCode::InvalidPhase, "only +1/-1 allowed unless unimodular phases are enabled");
        unimodular_used = unimodular_used || !sign;
        values[pattern] = phase;
    }

    MaskReport report;
    report.mask = WalshPolynomial::from_values(ctx, n, std::move(values));
    report.orthogonality_defect = mask_orthogonality_defect(report.mask);
    report.admissible = mask_admissible(report.mask);
    report.unimodular_phases = unimodular_used;
    return report;
}

/// Closed-form phi-hat in S_{n-1}^{(r-n+2)}(V*): one coset indicator per
/// window k = 1 ... r-n+2 weighted by a finite mask product, plus the cosets
/// theta, alpha_1 ... alpha_{n-1} whose fractional part matches no window.
inline TestFunction phi_hat_closed_form(const XiSequence& seq, const ContextPtr& ctx)
{
    const MaskReport report = build_mask_from_xi(seq, ctx);
    const WalshPolynomial& b = report.mask;
    const unsigned m = ctx->m();
    const long n = seq.n;
    const long windows = seq.window_count() - 1; // r - n + 2
    auto out = TestFunction::zero(ctx, Side::dual, static_cast<int>(n - 1), static_cast<int>(windows));

    auto b_at = [&](long first) { // b(xi_first ... xi_{first+n-1})
        Index pattern = 0;
        for (long i = 0; i < n; ++i)
            pattern = pattern * m + detail::xi_at(seq, first + i);
        return b.value(pattern);
    };

    std::set<Index> window_tails;
    for (long k = 1; k <= windows; ++k) {
        window_tails.insert(detail::window_index(seq, m, static_cast<unsigned>(k)));
        // omega_p = xi_{k-1+p} for p = -(k-1) ... n-1
        Complex weight = 1.0;
        for (long j = 1; j <= k + n - 1; ++j)
            weight *= b_at(k - j);
        std::vector<Digit> digits;
        for (long p = -(k - 1); p <= n - 1; ++p)
            digits.push_back(seq.xi[static_cast<std::size_t>(k - 1 + p)]);
        const auto omega = GroupElement::from_positions(Side::dual, static_cast<int>(-(k - 1)), std::move(digits));
        out[*out.index_of(omega)] = weight;
    }

    const Index tails = detail::checked_pow(m, n - 1);
    for (Index tail = 0; tail < tails; ++tail) {
        if (window_tails.count(tail))
            continue;
        const auto alpha = pattern_digits(m, tail, static_cast<unsigned>(n - 1));
        Complex weight = 1.0;
        for (long j = 1; j <= n - 1; ++j) {
            // b(0 ... 0 alpha_1 ... alpha_{n-j}) with j leading zeros
            Index pattern = 0;
            for (long i = 0; i < n; ++i)
                pattern = pattern * m + (i < j ? 0 : alpha[static_cast<std::size_t>(i - j)]);
            weight *= b.value(pattern);
        }
        const auto omega = GroupElement::from_positions(Side::dual, 1, alpha);
        out[*out.index_of(omega)] = weight;
    }
    return out;
}

/// phi-hat = prod_{j >= 1} m0(M*^{-j} .) on every coset of U*_{n-1} inside
/// M*^K(U*). Factors with j > K + n - 1 only see zero digits; the product is
/// evaluated through j = K + n + 2 and the tail factors are asserted to be 1.
inline TestFunction phi_hat_from_product(const WalshPolynomial& mask, int support)
{
    if (support < 0)
        throw Error(ErrorCode::InvalidParameters, "support exponent must be >= 0");
    const ContextPtr& ctx = mask.context_ptr();
    const unsigned m = ctx->m();
    const int n = static_cast<int>(mask.order());
    const int last_factor = support + n + 2;
    if (mask.value(0) != Complex(1.0))
        throw Error(ErrorCode::NonTerminatingProduct, "m0(theta) != 1, the infinite product does not settle");
    auto out = TestFunction::zero(ctx, Side::dual, n - 1, support);

    // positions -support+1 ... n-1 of the coset, stored at offset p + support - 1
    std::vector<Digit> omega(static_cast<std::size_t>(n - 1 + support));
    auto digit = [&](int p) -> Digit {
        const int offset = p + support - 1;
        return offset < 0 || offset >= static_cast<int>(omega.size()) ? 0 : omega[static_cast<std::size_t>(offset)];
    };
    for (Index k = 0; k < out.size(); ++k) {
        for (int p = -support + 1; p <= n - 1; ++p)
            omega[static_cast<std::size_t>(p + support - 1)] = out.digit_at(k, p);
        Complex product = 1.0;
        for (int j = 1; j <= last_factor; ++j) {
            Index pattern = 0;
            for (int t = 1; t <= n; ++t)
                pattern = pattern * m + digit(t - j);
            const Complex factor = mask.value(pattern);
            if (j > support + n - 1 && factor != Complex(1.0))
                throw Error(ErrorCode::NonTerminatingProduct,
                            "factor " + std::to_string(j) + " differs from 1 (m0(theta) != 1?)");
            product *= factor;
            if (product == Complex(0.0))
                break;
        }
        out[k] = product;
    }
    return out;
}

/// max over omega in U* (cosets of U*_n, n = smoothness) of
/// |sum_{h* in H*} |phi-hat(omega (+) h*)|^2 - 1|.
inline double shift_orthonormality_defect(const TestFunction& phi_hat)
{
    if (phi_hat.side() != Side::dual)
        throw Error(ErrorCode::SideMismatch, "expects a function on V*");
    const TestFunction f =
        refine(phi_hat, std::max(phi_hat.smoothness(), 0), std::max(phi_hat.support(), 0));
    const Index fractions = detail::checked_pow(f.context().m(), f.smoothness());
    const Index shifts = detail::checked_pow(f.context().m(), f.support());
    double defect = 0;
    for (Index frac = 0; frac < fractions; ++frac) {
        double sum = 0;
        for (Index h = 0; h < shifts; ++h)
            sum += std::norm(f[h * fractions + frac]);
        defect = std::max(defect, std::abs(sum - 1.0));
    }
    return defect;
}

} // namespace vilenkin
