#pragma once

// End-to-end driver behind the command-line tool: configuration parsing,
// construction, artifact export, and table-level verification.

#include "vilenkin/cli/serialization.hpp"

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <map>
#include <random>
#include <set>

namespace vilenkin::cli {

namespace fs = std::filesystem;

enum ExitCode : int { kPass = 0, kVerificationFailure = 1, kInputError = 2 };

struct Tolerances {
    double table = 1e-12;    // algebraic identities on value tables
    double exact = 0.0;      // quantities that must vanish exactly
    double gram = 1e-9;
    double cross_gram = 1e-10;
    double parseval = 1e-9;
    double filter_bank = 1e-10;

    Tolerances scaled(double s) const
    {
        Tolerances t = *this;
        t.table *= s;
        t.exact *= s;
        t.gram *= s;
        t.cross_gram *= s;
        t.parseval *= s;
        t.filter_bank *= s;
        return t;
    }

    Json to_json() const
    {
        return Json{{"table", table},         {"exact", exact},       {"gram", gram},
                    {"cross_gram", cross_gram}, {"parseval", parseval}, {"filter_bank", filter_bank}};
    }
};

struct CheckResult {
    std::string name;
    bool pass = false;
    double defect = 0;
    double tolerance = 0;
    double seconds = 0;
    std::string note;
};

struct VerificationReport {
    std::vector<CheckResult> checks;
    std::vector<std::string> errors;

    bool pass() const
    {
        return errors.empty() && std::all_of(checks.begin(), checks.end(), [](const auto& c) { return c.pass; });
    }

    int exit_code() const { return pass() ? kPass : kVerificationFailure; }

    // timings are left out of files so that reruns are byte-identical
    std::string to_text(bool with_times = true) const
    {
        std::ostringstream out;
        out << std::left;
        for (const auto& c : checks) {
            out << (c.pass ? "PASS " : "FAIL ") << std::setw(22) << c.name << " defect=" << std::scientific
                << std::setprecision(3) << c.defect << " tol=" << c.tolerance;
            if (with_times)
                out << " time=" << std::fixed << std::setprecision(3) << c.seconds << "s";
            if (!c.note.empty())
                out << "  (" << c.note << ")";
            out << "\n";
        }
        for (const auto& e : errors)
            out << "ERROR " << e << "\n";
        out << (pass() ? "overall: pass\n" : "overall: FAIL\n");
        return out.str();
    }

    Json to_json() const
    {
        Json out = Json::array();
        for (const auto& c : checks)
            out.push_back(Json{{"name", c.name}, {"pass", c.pass}, {"defect", canonical_double(c.defect)},
                               {"tolerance", c.tolerance}});
        return out;
    }
};

struct ParsevalSettings {
    int j0 = -1;
    int J = 1;
};

struct ConstructionConfig {
    IntMatrix matrix;
    std::optional<std::vector<IntVector>> digits;
    std::optional<std::vector<IntVector>> dual_digits;

    // xi path
    std::optional<unsigned> n;
    std::optional<long> r;
    std::vector<std::int64_t> xi;
    std::vector<std::pair<std::vector<std::int64_t>, Complex>> signs;
    bool unimodular = false;

    // direct-mask path
    std::optional<std::vector<Complex>> mask_values;
    unsigned mask_order = 0;
    int support = 0;

    std::vector<std::string> checks; // empty: all
    GramWindow gram;
    ParsevalSettings parseval;

    bool uses_xi() const { return !mask_values.has_value(); }
};

struct RunOptions {
    double tolerance_scale = 1.0;
    std::vector<std::string> checks; // overrides the configured list when non-empty
};

/// All check names in evaluation order.
inline const std::vector<std::string>& all_check_names()
{
    static const std::vector<std::string> names = {
        "mask-orthogonality", "admissibility", "closed-form",   "product-formula", "shift-orthonormality",
        "refinement",         "shape",         "fourier-pair", "polyphase",       "wavelet-definition",
        "wavelet-dc",         "gram",          "cross-gram",   "parseval",        "filter-bank"};
    return names;
}

inline std::vector<std::string> split_check_list(const std::string& text)
{
    std::vector<std::string> out;
    std::string item;
    std::istringstream in(text);
    while (std::getline(in, item, ','))
        if (!item.empty())
            out.push_back(item);
    return out;
}

inline void validate_check_names(const std::vector<std::string>& names, const std::string& where)
{
    const auto& known = all_check_names();
    for (const auto& name : names)
        if (std::find(known.begin(), known.end(), name) == known.end())
            throw InputError(where, "unknown check '" + name + "'");
}

inline ConstructionConfig parse_config(const Json& j, const std::string& name)
{
    static const std::set<std::string> known = {"matrix", "digits",     "dual_digits", "n",     "r",
                                                "xi",     "signs",      "unimodular",  "mask",  "checks",
                                                "gram",   "parseval",   "comment"};
    if (!j.is_object())
        throw InputError(name, "top level must be an object");
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw InputError(name + "." + key, "unknown field");

    ConstructionConfig c;
    c.matrix = detail::as_int_matrix(detail::field(j, "matrix", name), name + ".matrix");
    if (j.contains("digits"))
        c.digits = detail::as_digit_list(j.at("digits"), name + ".digits");
    if (j.contains("dual_digits"))
        c.dual_digits = detail::as_digit_list(j.at("dual_digits"), name + ".dual_digits");

    if (j.contains("mask")) {
        if (j.contains("xi") || j.contains("n"))
            throw InputError(name, "give either 'mask' or 'n'/'xi', not both");
        const Json& mask = j.at("mask");
        const std::string at = name + ".mask";
        const auto order = detail::as_int(detail::field(mask, "order", at), at + ".order");
        if (order < 1)
            throw InputError(at + ".order", "must be >= 1");
        c.mask_order = static_cast<unsigned>(order);
        c.mask_values = detail::as_complex_array(detail::field(mask, "values", at), at + ".values");
        c.support = static_cast<int>(detail::as_int(detail::field(mask, "support", at), at + ".support"));
    } else {
        const auto n = detail::as_int(detail::field(j, "n", name), name + ".n");
        if (n < 0)
            throw InputError(name + ".n", "must be nonnegative");
        c.n = static_cast<unsigned>(n);
        if (j.contains("r"))
            c.r = detail::as_int(j.at("r"), name + ".r");
        c.xi = detail::as_int_vector(detail::field(j, "xi", name), name + ".xi");
        if (c.r && *c.r + 1 != static_cast<long>(c.xi.size()))
            throw InputError(name + ".r", "r = " + std::to_string(*c.r) + " but xi has " +
                                              std::to_string(c.xi.size()) + " entries");
        if (j.contains("signs")) {
            const Json& signs = j.at("signs");
            if (!signs.is_array())
                throw InputError(name + ".signs", "expected a list of {pattern, value}");
            for (std::size_t i = 0; i < signs.size(); ++i) {
                const std::string at = name + ".signs[" + std::to_string(i) + "]";
                auto pattern = detail::as_int_vector(detail::field(signs[i], "pattern", at), at + ".pattern");
                if (pattern.size() != *c.n)
                    throw InputError(at + ".pattern", "needs n = " + std::to_string(*c.n) + " digits");
                c.signs.emplace_back(std::move(pattern), detail::as_complex(detail::field(signs[i], "value", at),
                                                                            at + ".value"));
            }
        }
        if (j.contains("unimodular")) {
            if (!j.at("unimodular").is_boolean())
                throw InputError(name + ".unimodular", "expected true or false");
            c.unimodular = j.at("unimodular").get<bool>();
        }
    }

    if (j.contains("checks")) {
        const Json& checks = j.at("checks");
        if (!checks.is_array())
            throw InputError(name + ".checks", "expected a list of check names");
        for (const auto& item : checks) {
            if (!item.is_string())
                throw InputError(name + ".checks", "expected strings");
            c.checks.push_back(item.get<std::string>());
        }
        validate_check_names(c.checks, name + ".checks");
    }
    if (j.contains("gram")) {
        const Json& g = j.at("gram");
        if (g.contains("max_scale"))
            c.gram.max_scale = static_cast<int>(detail::as_int(g.at("max_scale"), name + ".gram.max_scale"));
        if (g.contains("shift_digits"))
            c.gram.shift_digits =
                static_cast<unsigned>(detail::as_int(g.at("shift_digits"), name + ".gram.shift_digits"));
        if (c.gram.max_scale < 0)
            throw InputError(name + ".gram.max_scale", "must be nonnegative");
    }
    if (j.contains("parseval")) {
        const Json& p = j.at("parseval");
        if (p.contains("j0"))
            c.parseval.j0 = static_cast<int>(detail::as_int(p.at("j0"), name + ".parseval.j0"));
        if (p.contains("J"))
            c.parseval.J = static_cast<int>(detail::as_int(p.at("J"), name + ".parseval.J"));
        if (c.parseval.j0 >= c.parseval.J)
            throw InputError(name + ".parseval", "need j0 < J");
    }
    return c;
}

inline ConstructionConfig load_config(const fs::path& path) { return parse_config(read_json_file(path), path.string()); }

/// Everything the checks look at. Populated either by construction or by
/// loading artifact tables.
struct Bundle {
    ContextPtr ctx;
    WalshPolynomial mask;
    std::optional<TestFunction> closed_form;
    std::optional<TestFunction> phi_hat;
    std::optional<TestFunction> phi;
    std::optional<MaskFamily> family;
    std::vector<WaveletPair> wavelets; // nu = 1 ... R
    std::optional<std::pair<int, int>> expected_phi_hat_shape;
    GramWindow gram;
    ParsevalSettings parseval;
};

namespace detail {

// Portable deterministic uniform in [-1, 1).
inline double uniform(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-52 - 1.0; }

inline const TestFunction& need(const std::optional<TestFunction>& f, const char* what)
{
    if (!f)
        throw Error(ErrorCode::ArtifactError, std::string(what) + " is not available");
    return *f;
}

inline const MaskFamily& need_family(const Bundle& b)
{
    if (!b.family)
        throw Error(ErrorCode::ArtifactError, "mask family is not available");
    return *b.family;
}

inline std::vector<LocalizedFunction> wavelet_elements(const Bundle& b, int j_low, int j_high)
{
    if (b.wavelets.empty())
        throw Error(ErrorCode::ArtifactError, "wavelet functions are not available");
    const unsigned digits = b.gram.shift_digits ? b.gram.shift_digits : b.mask.order() + 1;
    const Index shifts = vilenkin::detail::checked_pow(b.ctx->m(), digits);
    std::vector<LocalizedFunction> out;
    for (int j = j_low; j <= j_high; ++j)
        for (const auto& w : b.wavelets)
            for (Index k = 0; k < shifts; ++k)
                out.push_back(system_element(w.psi, j, k));
    return out;
}

struct Measured {
    double defect = 0;
    std::string note;
};

using CheckFn = std::function<Measured(const Bundle&)>;

inline Measured check_mask_orthogonality(const Bundle& b) { return {mask_orthogonality_defect(b.mask), ""}; }

inline Measured check_admissibility(const Bundle& b)
{
    return {mask_admissible(b.mask) ? 0.0 : 1.0, "column sums <= 1 and m0(theta) = 1"};
}

inline Measured check_closed_form(const Bundle& b)
{
    if (!b.closed_form)
        throw Error(ErrorCode::ArtifactError, "closed form is only available for xi-constructions");
    return {sup_distance(*b.closed_form, need(b.phi_hat, "phi-hat")), "closed form vs product formula"};
}

inline Measured check_product_formula(const Bundle& b)
{
    const TestFunction& phi_hat = need(b.phi_hat, "phi-hat");
    // one layer past the table's support: if the product vanishes there it
    // vanishes everywhere outside (refinement maps each layer to the previous)
    const TestFunction product = phi_hat_from_product(b.mask, std::max(phi_hat.support(), 0) + 1);
    return {sup_distance(product, phi_hat), "phi-hat table vs infinite product of m0, support checked"};
}

inline Measured check_shift(const Bundle& b) { return {shift_orthonormality_defect(need(b.phi_hat, "phi-hat")), ""}; }

inline Measured check_refinement(const Bundle& b)
{
    const TestFunction& phi_hat = need(b.phi_hat, "phi-hat");
    const TestFunction rhs = multiply_by_mask(dilate_argument(phi_hat, -1), b.mask, 1);
    return {sup_distance(rhs, phi_hat), "m0(M*^-1 .) phi-hat(M*^-1 .) = phi-hat"};
}

// Declared shapes, plus the swapped-shape contract for the Fourier pair,
// checked on a grid one step finer and wider than needed.
inline Measured check_shape(const Bundle& b)
{
    const TestFunction& phi_hat = need(b.phi_hat, "phi-hat");
    const TestFunction& phi = need(b.phi, "phi");
    std::string failures;
    if (b.expected_phi_hat_shape) {
        const auto [n, K] = *b.expected_phi_hat_shape;
        if (!fits_shape(phi_hat, n, K, 0.0))
            failures += "phi-hat not in S*_" + std::to_string(n) + "^(" + std::to_string(K) + "); ";
    }
    auto contract = [&](const TestFunction& g, const std::string& label) {
        const TestFunction wide = refine(g, g.smoothness() + 1, g.support() + 1);
        const TestFunction inverse = inverse_fourier(wide);
        if (!fits_shape(inverse, g.support(), g.smoothness(), 1e-12))
            failures += label + " breaks the swapped-shape contract; ";
    };
    contract(phi_hat, "phi");
    if (phi.smoothness() != phi_hat.support() || phi.support() != phi_hat.smoothness())
        failures += "phi table shape is not the swap of phi-hat's; ";
    for (std::size_t nu = 0; nu < b.wavelets.size(); ++nu)
        contract(b.wavelets[nu].psi_hat, "psi_" + std::to_string(nu + 1));
    return {failures.empty() ? 0.0 : 1.0, failures};
}

inline Measured check_fourier_pair(const Bundle& b)
{
    double defect = sup_distance(inverse_fourier(need(b.phi_hat, "phi-hat")), need(b.phi, "phi"));
    for (const auto& w : b.wavelets)
        defect = std::max(defect, sup_distance(inverse_fourier(w.psi_hat), w.psi));
    return {defect, "tables are inverse Fourier pairs"};
}

inline Measured check_polyphase_family(const Bundle& b) { return {check_polyphase(need_family(b).masks), ""}; }

inline Measured check_wavelet_definition(const Bundle& b)
{
    const MaskFamily& family = need_family(b);
    if (family.masks.size() != b.wavelets.size() + 1)
        throw Error(ErrorCode::ArtifactError, "family size does not match the wavelet count");
    const TestFunction stretched = dilate_argument(need(b.phi_hat, "phi-hat"), -1);
    if (family.order() != b.mask.order())
        throw Error(ErrorCode::OrderMismatch, "family and m0 have different orders");
    double defect = 0;
    for (Index i = 0; i < b.mask.size(); ++i)
        defect = std::max(defect, std::abs(family.masks[0].value(i) - b.mask.value(i)));
    for (std::size_t nu = 0; nu < b.wavelets.size(); ++nu)
        defect = std::max(defect, sup_distance(multiply_by_mask(stretched, family.masks[nu + 1], 1),
                                               b.wavelets[nu].psi_hat));
    return {defect, "psi-hat = m_nu(M*^-1 .) phi-hat(M*^-1 .), family[0] = m0"};
}

inline Measured check_wavelet_dc(const Bundle& b)
{
    if (b.wavelets.empty())
        throw Error(ErrorCode::ArtifactError, "wavelet functions are not available");
    double defect = 0;
    for (const auto& w : b.wavelets)
        defect = std::max(defect, std::abs(w.psi_hat(GroupElement(Side::dual))));
    return {defect, "psi-hat(theta) = 0"};
}

inline Measured check_gram(const Bundle& b)
{
    const auto elements = wavelet_elements(b, -b.gram.max_scale, b.gram.max_scale);
    return {gram_identity_defect(elements), std::to_string(elements.size()) + " elements"};
}

inline Measured check_cross_gram(const Bundle& b)
{
    const auto wavelets = wavelet_elements(b, 0, b.gram.max_scale);
    const unsigned digits = b.gram.shift_digits ? b.gram.shift_digits : b.mask.order() + 1;
    const Index shifts = vilenkin::detail::checked_pow(b.ctx->m(), digits);
    std::vector<LocalizedFunction> scaling;
    for (Index k = 0; k < shifts; ++k)
        scaling.push_back(system_element(need(b.phi, "phi"), 0, k));
    return {cross_gram_max(scaling, wavelets), "phi_{0,k} against psi_{j,k}, j >= 0"};
}

// Deterministic member of span{phi_{J,k}} with m^2 random terms.
inline TestFunction parseval_probe(const TestFunction& phi, int J, std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    const Index terms = vilenkin::detail::checked_pow(phi.context().m(), 2);
    std::optional<TestFunction> f;
    for (Index k = 0; k < terms; ++k) {
        const Complex c(uniform(rng), uniform(rng));
        TestFunction term = c * system_element(phi, J, k).to_test_function();
        f = f ? *f + term : term;
    }
    return *f;
}

inline Measured check_parseval(const Bundle& b)
{
    const TestFunction& phi = need(b.phi, "phi");
    if (b.wavelets.empty() || !b.phi_hat || !b.family)
        throw Error(ErrorCode::ArtifactError, "wavelet system is not available");
    const TestFunction f = parseval_probe(phi, b.parseval.J, 20240917);
    // same identity as parseval_telescoping, but driven by the stored tables
    const LocalizedFunction local = LocalizedFunction::from(f);
    const unsigned m = b.ctx->m();
    auto energy = [&](const TestFunction& g, int j) {
        const Index count = relevant_shift_count(m, j, g.support(), f.support());
        double acc = 0;
        for (Index k = 0; k < count; ++k)
            acc += std::norm(inner_product(local, system_element(g, j, k)));
        return acc;
    };
    const double fine = energy(phi, b.parseval.J);
    double total = energy(phi, b.parseval.j0);
    for (int j = b.parseval.j0; j < b.parseval.J; ++j)
        for (const auto& w : b.wavelets)
            total += energy(w.psi, j);
    const double defect = std::max(std::abs(fine - total), std::abs(fine - f.norm_squared()));
    std::ostringstream note;
    note << "||f||^2=" << std::setprecision(12) << f.norm_squared() << " j0=" << b.parseval.j0
         << " J=" << b.parseval.J;
    return {defect, note.str()};
}

// Round trip, energy, and agreement with <f, phi_{0,l}> for f in span{phi_{1,k}}.
inline Measured check_filter_bank(const Bundle& b)
{
    const MaskFamily& family = need_family(b);
    const TestFunction& phi = need(b.phi, "phi");
    const FilterBank bank(family);
    const unsigned m = b.ctx->m();
    const unsigned Q = std::max(family.order(), 1u);
    const Index length = vilenkin::detail::checked_pow(m, Q);
    std::mt19937_64 rng(7);
    std::vector<Complex> fine(length);
    for (auto& c : fine)
        c = Complex(uniform(rng), uniform(rng));

    const FilterBankBands bands = bank.analyze(fine);
    const std::vector<Complex> back = bank.synthesize(bands);
    double defect = 0, energy_in = 0, energy_out = 0;
    for (Index i = 0; i < length; ++i) {
        defect = std::max(defect, std::abs(back[i] - fine[i]));
        energy_in += std::norm(fine[i]);
    }
    for (const auto& v : bands.lowpass)
        energy_out += std::norm(v);
    for (const auto& band : bands.details)
        for (const auto& v : band)
            energy_out += std::norm(v);
    defect = std::max(defect, std::abs(energy_in - energy_out));

    std::vector<LocalizedFunction> basis;
    for (Index k = 0; k < length; ++k)
        basis.push_back(system_element(phi, 1, k));
    for (Index l = 0; l < bands.lowpass.size(); ++l) {
        const LocalizedFunction coarse = system_element(phi, 0, l);
        Complex direct = 0;
        for (Index k = 0; k < length; ++k)
            direct += fine[k] * inner_product(basis[k], coarse);
        defect = std::max(defect, std::abs(direct - bands.lowpass[l]));
    }
    for (std::size_t nu = 0; nu < b.wavelets.size() && nu < bands.details.size(); ++nu)
        for (Index l = 0; l < bands.details[nu].size(); ++l) {
            const LocalizedFunction coarse = system_element(b.wavelets[nu].psi, 0, l);
            Complex direct = 0;
            for (Index k = 0; k < length; ++k)
                direct += fine[k] * inner_product(basis[k], coarse);
            defect = std::max(defect, std::abs(direct - bands.details[nu][l]));
        }
    return {defect, "length " + std::to_string(length)};
}

inline const std::vector<std::pair<std::string, CheckFn>>& check_table()
{
    static const std::vector<std::pair<std::string, CheckFn>> table = {
        {"mask-orthogonality", check_mask_orthogonality},
        {"admissibility", check_admissibility},
        {"closed-form", check_closed_form},
        {"product-formula", check_product_formula},
        {"shift-orthonormality", check_shift},
        {"refinement", check_refinement},
        {"shape", check_shape},
        {"fourier-pair", check_fourier_pair},
        {"polyphase", check_polyphase_family},
        {"wavelet-definition", check_wavelet_definition},
        {"wavelet-dc", check_wavelet_dc},
        {"gram", check_gram},
        {"cross-gram", check_cross_gram},
        {"parseval", check_parseval},
        {"filter-bank", check_filter_bank},
    };
    return table;
}

inline double tolerance_for(const std::string& name, const Tolerances& tol)
{
    if (name == "admissibility" || name == "shape" || name == "wavelet-dc")
        return tol.exact;
    if (name == "gram")
        return tol.gram;
    if (name == "cross-gram")
        return tol.cross_gram;
    if (name == "parseval")
        return tol.parseval;
    if (name == "filter-bank")
        return tol.filter_bank;
    return tol.table;
}

} // namespace detail

inline CheckResult run_check(const std::string& name, const Bundle& bundle, const Tolerances& tol)
{
    const auto& table = detail::check_table();
    const auto it = std::find_if(table.begin(), table.end(), [&](const auto& e) { return e.first == name; });
    if (it == table.end())
        throw InputError("checks", "unknown check '" + name + "'");
    CheckResult result;
    result.name = name;
    result.tolerance = detail::tolerance_for(name, tol);
    const auto start = std::chrono::steady_clock::now();
    try {
        const auto measured = it->second(bundle);
        result.defect = measured.defect;
        result.note = measured.note;
        result.pass = measured.defect <= result.tolerance;
    } catch (const std::exception& e) {
        result.defect = std::numeric_limits<double>::infinity();
        result.note = e.what();
        result.pass = false;
    }
    result.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return result;
}

inline VerificationReport run_checks(const Bundle& bundle, const std::vector<std::string>& names, const Tolerances& tol)
{
    VerificationReport report;
    for (const auto& name : names)
        report.checks.push_back(run_check(name, bundle, tol));
    return report;
}

inline std::vector<std::string> resolve_checks(const std::vector<std::string>& configured, const RunOptions& options,
                                               bool has_closed_form)
{
    std::vector<std::string> out = !options.checks.empty() ? options.checks : configured;
    if (out.empty())
        for (const auto& name : all_check_names())
            if (name != "closed-form" || has_closed_form)
                out.push_back(name);
    validate_check_names(out, "checks");
    return out;
}

/// Builds everything the configuration describes. Throws vilenkin::Error on
/// mathematical rejections (collisions, non-orthogonal masks, ...).
inline Bundle build_bundle(const ConstructionConfig& config)
{
    Bundle b;
    b.ctx = make_context(config.matrix, config.digits, config.dual_digits);
    b.gram = config.gram;
    b.parseval = config.parseval;
    const unsigned m = b.ctx->m();
    if (config.uses_xi()) {
        XiSequence seq;
        seq.n = *config.n;
        for (std::size_t k = 0; k < config.xi.size(); ++k) {
            if (config.xi[k] < 0 || config.xi[k] >= static_cast<std::int64_t>(m))
                throw Error(ErrorCode::InvalidParameters, "xi_" + std::to_string(k) + " is not a digit index");
            seq.xi.push_back(static_cast<Digit>(config.xi[k]));
        }
        seq.allow_unimodular = config.unimodular;
        for (const auto& [pattern, value] : config.signs) {
            Index index = 0;
            for (auto d : pattern) {
                if (d < 0 || d >= static_cast<std::int64_t>(m))
                    throw Error(ErrorCode::InvalidPhase, "sign pattern digit out of range");
                index = index * m + static_cast<Index>(d);
            }
            seq.phases[index] = value;
        }
        b.mask = build_mask_from_xi(seq, b.ctx).mask;
        b.closed_form = phi_hat_closed_form(seq, b.ctx);
        b.expected_phi_hat_shape = std::make_pair(static_cast<int>(seq.n) - 1, static_cast<int>(seq.window_count()) - 1);
        b.phi_hat = phi_hat_from_product(b.mask, static_cast<int>(seq.window_count()) - 1);
    } else {
        b.mask = WalshPolynomial::from_values(b.ctx, config.mask_order, *config.mask_values);
        b.phi_hat = phi_hat_from_product(b.mask, config.support);
    }
    b.phi = inverse_fourier(*b.phi_hat);
    // a rejected mask still yields mask and phi artifacts; wavelets need both
    // orthogonality conditions
    if (mask_orthogonality_defect(b.mask) <= kTableTolerance &&
        shift_orthonormality_defect(*b.phi_hat) <= kTableTolerance) {
        b.family = build_wavelet_masks(b.mask);
        auto pairs = build_wavelets(*b.family, *b.phi_hat);
        b.wavelets.assign(std::make_move_iterator(pairs.begin() + 1), std::make_move_iterator(pairs.end()));
    }
    return b;
}

inline Json construction_to_json(const ConstructionConfig& c)
{
    if (!c.uses_xi())
        return Json{{"kind", "mask"}, {"order", c.mask_order}, {"support", c.support}};
    Json signs = Json::array();
    for (const auto& [pattern, value] : c.signs)
        signs.push_back(Json{{"pattern", pattern}, {"value", complex_to_json(value)}});
    const bool unimodular_used = std::any_of(c.signs.begin(), c.signs.end(), [](const auto& s) {
        return s.second != Complex(1.0) && s.second != Complex(-1.0);
    });
    return Json{{"kind", "xi"},
                {"n", *c.n},
                {"r", static_cast<long>(c.xi.size()) - 1},
                {"xi", c.xi},
                {"signs", signs},
                {"unimodular_phases", unimodular_used}};
}

/// Writes every available table plus manifest.json; returns the file map.
inline Json write_artifacts(const fs::path& out, const Bundle& b)
{
    fs::create_directories(out);
    Json files;
    write_json_file(out / "mask_m0.json", walsh_polynomial_to_json(b.mask));
    files["mask"] = "mask_m0.json";
    if (b.phi_hat) {
        write_json_file(out / "phi_hat.json", test_function_to_json(*b.phi_hat));
        files["phi_hat"] = "phi_hat.json";
    }
    if (b.phi) {
        write_json_file(out / "phi.json", test_function_to_json(*b.phi));
        files["phi"] = "phi.json";
    }
    if (b.family) {
        write_json_file(out / "family.json", mask_family_to_json(*b.family));
        files["family"] = "family.json";
    }
    Json psi_hat = Json::array(), psi = Json::array();
    for (std::size_t nu = 0; nu < b.wavelets.size(); ++nu) {
        const std::string suffix = std::to_string(nu + 1) + ".json";
        write_json_file(out / ("psi_hat_" + suffix), test_function_to_json(b.wavelets[nu].psi_hat));
        write_json_file(out / ("psi_" + suffix), test_function_to_json(b.wavelets[nu].psi));
        psi_hat.push_back("psi_hat_" + suffix);
        psi.push_back("psi_" + suffix);
    }
    files["psi_hat"] = psi_hat;
    files["psi"] = psi;
    return files;
}

struct RunResult {
    int exit_code = kPass;
    VerificationReport report;
    std::string message; // input errors
};

inline void write_report(const fs::path& out, const std::string& header, const VerificationReport& report)
{
    fs::create_directories(out);
    write_text_file(out / "report.txt", header + report.to_text(false));
}

using ExtraChecks = std::function<void(const Bundle&, VerificationReport&, const fs::path&)>;

inline RunResult construct_from_config(const ConstructionConfig& config, const fs::path& out, const RunOptions& options,
                                       const std::string& header = "construct\n", const ExtraChecks& extra = {})
{
    RunResult result;
    const Tolerances tol = Tolerances{}.scaled(options.tolerance_scale);
    Bundle bundle;
    try {
        bundle = build_bundle(config);
    } catch (const Error& e) {
        // mathematical rejection of the input
        result.report.errors.push_back(e.what());
        result.exit_code = kInputError;
        result.message = e.what();
        write_report(out, header, result.report);
        return result;
    }
    const auto checks = resolve_checks(config.checks, options, bundle.closed_form.has_value());
    result.report = run_checks(bundle, checks, tol);
    fs::create_directories(out);
    if (extra)
        extra(bundle, result.report, out);

    Json manifest;
    manifest["format"] = 1;
    manifest["group"] = group_to_json(*bundle.ctx);
    manifest["construction"] = construction_to_json(config);
    manifest["files"] = write_artifacts(out, bundle);
    manifest["tolerances"] = tol.to_json();
    manifest["checks"] = checks;
    manifest["gram"] = Json{{"max_scale", bundle.gram.max_scale}, {"shift_digits", bundle.gram.shift_digits}};
    manifest["parseval"] = Json{{"j0", bundle.parseval.j0}, {"J", bundle.parseval.J}};
    manifest["results"] = result.report.to_json();
    write_json_file(out / "manifest.json", manifest);
    write_report(out, header, result.report);
    result.exit_code = result.report.exit_code();
    return result;
}

inline RunResult run_construct(const fs::path& config_path, const fs::path& out, const RunOptions& options)
{
    try {
        const ConstructionConfig config = load_config(config_path);
        return construct_from_config(config, out, options, "construct " + config_path.filename().string() + "\n");
    } catch (const InputError& e) {
        RunResult r;
        r.exit_code = kInputError;
        r.message = e.what();
        r.report.errors.push_back(e.what());
        return r;
    }
}

/// Loads the tables listed in a manifest. Nothing is reconstructed.
inline Bundle load_bundle(const fs::path& dir, const Json& manifest)
{
    const std::string where = (dir / "manifest.json").string();
    Bundle b;
    b.ctx = group_from_json(detail::field(manifest, "group", where), where + ".group");
    const Json& files = detail::field(manifest, "files", where);
    auto load = [&](const std::string& name) { return read_json_file(dir / name); };
    b.mask = walsh_polynomial_from_json(b.ctx, load(detail::field(files, "mask", where).get<std::string>()), "mask");
    if (files.contains("phi_hat"))
        b.phi_hat = test_function_from_json(b.ctx, load(files.at("phi_hat").get<std::string>()), "phi_hat");
    if (files.contains("phi"))
        b.phi = test_function_from_json(b.ctx, load(files.at("phi").get<std::string>()), "phi");
    if (files.contains("family"))
        b.family = mask_family_from_json(b.ctx, load(files.at("family").get<std::string>()), "family");
    const Json& psi_hat = detail::field(files, "psi_hat", where);
    const Json& psi = detail::field(files, "psi", where);
    if (!psi_hat.is_array() || !psi.is_array() || psi_hat.size() != psi.size())
        throw InputError(where, "psi and psi_hat lists differ");
    for (std::size_t nu = 0; nu < psi.size(); ++nu)
        b.wavelets.push_back({test_function_from_json(b.ctx, load(psi_hat[nu].get<std::string>()), "psi_hat"),
                              test_function_from_json(b.ctx, load(psi[nu].get<std::string>()), "psi")});
    const Json& construction = detail::field(manifest, "construction", where);
    if (construction.value("kind", "") == "xi") {
        const auto n = detail::as_int(detail::field(construction, "n", where), where + ".construction.n");
        const auto r = detail::as_int(detail::field(construction, "r", where), where + ".construction.r");
        b.expected_phi_hat_shape = std::make_pair(static_cast<int>(n - 1), static_cast<int>(r - n + 2));
    }
    if (manifest.contains("gram")) {
        b.gram.max_scale = static_cast<int>(detail::as_int(manifest["gram"].at("max_scale"), where + ".gram"));
        b.gram.shift_digits = static_cast<unsigned>(detail::as_int(manifest["gram"].at("shift_digits"), where + ".gram"));
    }
    if (manifest.contains("parseval")) {
        b.parseval.j0 = static_cast<int>(detail::as_int(manifest["parseval"].at("j0"), where + ".parseval"));
        b.parseval.J = static_cast<int>(detail::as_int(manifest["parseval"].at("J"), where + ".parseval"));
    }
    return b;
}

inline RunResult run_verify(const fs::path& dir, const RunOptions& options)
{
    RunResult result;
    try {
        const Json manifest = read_json_file(dir / "manifest.json");
        const Bundle bundle = load_bundle(dir, manifest);
        std::vector<std::string> checks;
        if (!options.checks.empty()) {
            checks = options.checks;
        } else if (manifest.contains("checks")) {
            for (const auto& c : manifest.at("checks"))
                if (c != "closed-form") // needs the construction, not just tables
                    checks.push_back(c.get<std::string>());
        }
        if (checks.empty())
            checks = resolve_checks({}, options, false);
        validate_check_names(checks, "checks");
        result.report = run_checks(bundle, checks, Tolerances{}.scaled(options.tolerance_scale));
        result.exit_code = result.report.exit_code();
    } catch (const InputError& e) {
        result.exit_code = kInputError;
        result.message = e.what();
        result.report.errors.push_back(e.what());
    } catch (const Json::exception& e) {
        result.exit_code = kInputError;
        result.message = std::string("malformed artifact: ") + e.what();
        result.report.errors.push_back(result.message);
    } catch (const Error& e) {
        result.exit_code = kInputError;
        result.message = e.what();
        result.report.errors.push_back(e.what());
    }
    return result;
}

} // namespace vilenkin::cli
