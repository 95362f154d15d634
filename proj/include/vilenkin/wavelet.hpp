#pragma once

// Wavelet masks by unitary completion, wavelet functions, the wavelet system
// psi_{jk}(x) = m^{j/2} psi(M^j x (+) gamma_[k]), and the one-level filter bank.

#include "vilenkin/construction.hpp"
#include "vilenkin/test_function.hpp"
#include "vilenkin/walsh.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace vilenkin {

struct ComplexMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<Complex> data;

    ComplexMatrix() = default;
    ComplexMatrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c) {}

    static ComplexMatrix identity(std::size_t d)
    {
        ComplexMatrix out(d, d);
        for (std::size_t i = 0; i < d; ++i)
            out(i, i) = 1.0;
        return out;
    }

    Complex& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    Complex operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// max |A A^H - I|.
inline double unitarity_defect(const ComplexMatrix& a)
{
    double out = 0;
    for (std::size_t i = 0; i < a.rows; ++i)
        for (std::size_t j = 0; j < a.rows; ++j) {
            Complex acc = 0;
            for (std::size_t c = 0; c < a.cols; ++c)
                acc += a(i, c) * std::conj(a(j, c));
            out = std::max(out, std::abs(acc - (i == j ? Complex(1.0) : Complex(0.0))));
        }
    return out;
}

/// Unitary matrix whose first row is `row`. e_0 completes to the identity;
/// otherwise a single Householder reflection H with H e_0 = lambda conj(row),
/// |lambda| = 1 chosen so the reflection vector's first entry is real and
/// positive, followed by rescaling row 0 by lambda.
inline ComplexMatrix unitary_complete(std::span<const Complex> row)
{
    const std::size_t m = row.size();
    if (m == 0)
        throw Error(ErrorCode::InvalidParameters, "empty row");
    double norm2 = 0;
    for (const auto& v : row)
        norm2 += std::norm(v);
    if (std::abs(std::sqrt(norm2) - 1.0) > kTableTolerance)
        throw Error(ErrorCode::NotUnitNorm, "row norm is " + std::to_string(std::sqrt(norm2)));

    const bool is_e0 = row[0] == Complex(1.0) &&
                       std::all_of(row.begin() + 1, row.end(), [](const Complex& v) { return v == Complex(0.0); });
    if (is_e0)
        return ComplexMatrix::identity(m);

    std::vector<Complex> u(m);
    for (std::size_t i = 0; i < m; ++i)
        u[i] = std::conj(row[i]);
    const double a0 = std::abs(u[0]);
    const Complex lambda = a0 > 0 ? -std::conj(u[0]) / a0 : Complex(-1.0);

    std::vector<Complex> v(m);
    for (std::size_t i = 0; i < m; ++i)
        v[i] = (i == 0 ? Complex(1.0) : Complex(0.0)) - lambda * u[i];
    v[0] = Complex(v[0].real(), 0.0);
    double vv = 0;
    for (const auto& x : v)
        vv += std::norm(x);

    ComplexMatrix out(m, m);
    for (std::size_t i = 0; i < m; ++i)
        for (std::size_t j = 0; j < m; ++j)
            out(i, j) = (i == j ? Complex(1.0) : Complex(0.0)) - 2.0 * v[i] * std::conj(v[j]) / vv;
    for (std::size_t j = 0; j < m; ++j)
        out(0, j) = row[j];
    return out;
}

/// max over tails and digit pairs (k, l) of
/// |sum_nu b_nu(k tail) conj(b_nu(l tail)) - delta_kl|. The k = l terms are
/// the column-sum condition on m0 extended to the whole family.
inline double check_polyphase(std::span<const WalshPolynomial> masks)
{
    if (masks.empty())
        throw Error(ErrorCode::InvalidParameters, "empty mask family");
    const unsigned order = masks.front().order();
    for (const auto& mask : masks) {
        if (mask.order() != order)
            throw Error(ErrorCode::OrderMismatch, "masks of orders " + std::to_string(order) + " and " +
                                                      std::to_string(mask.order()));
        if (!same_group(mask.context(), masks.front().context()))
            throw Error(ErrorCode::ContextMismatch, "masks belong to different groups");
    }
    const unsigned m = masks.front().context().m();
    double defect = 0;
    for (Index tail = 0; tail < masks.front().tail_count(); ++tail)
        for (Digit k = 0; k < m; ++k)
            for (Digit l = 0; l < m; ++l) {
                Complex acc = 0;
                for (const auto& mask : masks)
                    acc += mask.column_entry(k, tail) * std::conj(mask.column_entry(l, tail));
                defect = std::max(defect, std::abs(acc - (k == l ? Complex(1.0) : Complex(0.0))));
            }
    return defect;
}

struct MaskFamily {
    std::vector<WalshPolynomial> masks; // masks[0] is m0
    double polyphase_defect = 0;

    static MaskFamily from_masks(std::vector<WalshPolynomial> masks)
    {
        MaskFamily family;
        family.polyphase_defect = check_polyphase(masks);
        family.masks = std::move(masks);
        return family;
    }

    unsigned order() const { return masks.front().order(); }
    const ContextPtr& context_ptr() const { return masks.front().context_ptr(); }
};

/// Completes each column (b(k tail))_k of m0 to a unitary matrix; rows
/// 1 ... m-1 become the wavelet masks.
inline MaskFamily build_wavelet_masks(const WalshPolynomial& m0)
{
    const double defect = mask_orthogonality_defect(m0);
    if (defect > kTableTolerance)
        throw Error(ErrorCode::MaskNotOrthogonal, "column sums deviate from 1 by " + std::to_string(defect));
    const unsigned m = m0.context().m();
    std::vector<std::vector<Complex>> tables(m, std::vector<Complex>(m0.size()));
    std::vector<Complex> column(m);
    for (Index tail = 0; tail < m0.tail_count(); ++tail) {
        for (Digit k = 0; k < m; ++k)
            column[k] = m0.column_entry(k, tail);
        const ComplexMatrix unitary = unitary_complete(column);
        for (unsigned nu = 0; nu < m; ++nu)
            for (Digit k = 0; k < m; ++k)
                tables[nu][k * m0.tail_count() + tail] = unitary(nu, k);
    }
    std::vector<WalshPolynomial> masks;
    masks.push_back(m0);
    for (unsigned nu = 1; nu < m; ++nu)
        masks.push_back(WalshPolynomial::from_values(m0.context_ptr(), m0.order(), std::move(tables[nu])));
    return MaskFamily::from_masks(std::move(masks));
}

struct WaveletPair {
    TestFunction psi_hat; // on V*
    TestFunction psi;     // on V
};

/// psi-hat^nu = m_nu(M*^{-1} .) phi-hat(M*^{-1} .) for every mask of the
/// family; entry 0 reproduces phi-hat itself (refinement relation).
inline std::vector<WaveletPair> build_wavelets(const MaskFamily& family, const TestFunction& phi_hat)
{
    if (family.polyphase_defect > kTableTolerance)
        throw Error(ErrorCode::MaskNotOrthogonal, "family polyphase defect " + std::to_string(family.polyphase_defect));
    const double shift_defect = shift_orthonormality_defect(phi_hat);
    if (shift_defect > kTableTolerance)
        throw Error(ErrorCode::NotOrthogonal, "shift orthonormality defect " + std::to_string(shift_defect));
    const TestFunction stretched = dilate_argument(phi_hat, -1);
    std::vector<WaveletPair> out;
    for (const auto& mask : family.masks) {
        TestFunction psi_hat = multiply_by_mask(stretched, mask, 1);
        TestFunction psi = inverse_fourier(psi_hat);
        out.push_back({std::move(psi_hat), std::move(psi)});
    }
    return out;
}

/// A function supported on one coset origin (+) M^K(U), stored as m^{n+K}
/// values over that coset. Lets system elements at different scales and
/// shifts be compared without materialising a common global grid.
/// The origin only carries digits at positions <= -K.
class LocalizedFunction {
public:
    LocalizedFunction() = default;
    LocalizedFunction(ContextPtr ctx, Side side, int smoothness, int support, GroupElement origin,
                      std::vector<Complex> values)
        : ctx_(std::move(ctx)), side_(side), n_(smoothness), K_(support), origin_(std::move(origin)),
          values_(std::move(values))
    {
        if (n_ + K_ < 0)
            throw Error(ErrorCode::InvalidShape, "n + K < 0");
        if (values_.size() != detail::table_size(ctx_->m(), n_ + K_))
            throw Error(ErrorCode::BadLength, "localized function has the wrong number of values");
        if (origin_.side() != side_ || (!origin_.is_neutral() && origin_.highest_position() > -K_))
            throw Error(ErrorCode::InvalidParameters, "origin must only carry digits at positions <= -K");
    }

    static LocalizedFunction from(const TestFunction& f)
    {
        std::vector<Complex> values(f.values().begin(), f.values().end());
        return LocalizedFunction(f.context_ptr(), f.side(), f.smoothness(), f.support(), GroupElement(f.side()),
                                 std::move(values));
    }

    const GroupContext& context() const { return *ctx_; }
    const ContextPtr& context_ptr() const { return ctx_; }
    Side side() const noexcept { return side_; }
    int smoothness() const noexcept { return n_; }
    int support() const noexcept { return K_; }
    const GroupElement& origin() const noexcept { return origin_; }
    std::span<const Complex> values() const noexcept { return values_; }

    double norm_squared() const
    {
        double acc = 0;
        for (const auto& v : values_)
            acc += std::norm(v);
        return acc * std::pow(static_cast<double>(ctx_->m()), -n_);
    }

    TestFunction to_test_function() const
    {
        const int support = origin_.is_neutral() ? K_ : std::max(K_, 1 - origin_.lowest_position());
        auto out = TestFunction::zero(ctx_, side_, n_, support);
        Index base = 0;
        for (int p = -support + 1; p <= -K_; ++p)
            base = base * ctx_->m() + origin_.digit(p);
        base = detail::checked_mul(base, values_.size());
        for (Index i = 0; i < values_.size(); ++i)
            out[base + i] = values_[i];
        return out;
    }

private:
    ContextPtr ctx_;
    Side side_ = Side::primal;
    int n_ = 0;
    int K_ = 0;
    GroupElement origin_;
    std::vector<Complex> values_;
};

inline Complex inner_product(const LocalizedFunction& a, const LocalizedFunction& b)
{
    if (a.side() != b.side())
        throw Error(ErrorCode::SideMismatch, "functions live on different sides");
    if (a.support() < b.support())
        return std::conj(inner_product(b, a));

    // b's block is inside a's block iff the origins agree at positions <= -K_a
    const int bottom = std::min(a.origin().lowest_position(), b.origin().lowest_position());
    for (int p = bottom; p <= -a.support(); ++p)
        if (a.origin().digit(p) != b.origin().digit(p))
            return 0.0;

    const unsigned m = a.context().m();
    const int fine = std::max(a.smoothness(), b.smoothness());
    Index base = 0;
    for (int p = -a.support() + 1; p <= -b.support(); ++p)
        base = base * m + b.origin().digit(p);
    const Index count = detail::checked_pow(m, fine + b.support());
    base *= count;
    const Index qa = detail::checked_pow(m, fine - a.smoothness());
    const Index qb = detail::checked_pow(m, fine - b.smoothness());
    const auto va = a.values();
    const auto vb = b.values();

    Complex acc = 0;
    if (qa == 1) {
        for (Index ib = 0; ib < vb.size(); ++ib) {
            Complex s = 0;
            const Index start = base + ib * qb;
            for (Index t = 0; t < qb; ++t)
                s += va[start + t];
            acc += s * std::conj(vb[ib]);
        }
    } else if (qb == 1 && base % qa == 0 && count % qa == 0) {
        for (Index i = 0; i < count; i += qa) {
            Complex s = 0;
            for (Index t = 0; t < qa; ++t)
                s += std::conj(vb[i + t]);
            acc += va[(base + i) / qa] * s;
        }
    } else {
        for (Index i = 0; i < count; ++i)
            acc += va[(base + i) / qa] * std::conj(vb[i / qb]);
    }
    return acc * std::pow(static_cast<double>(m), -fine);
}

/// x -> m^{j/2} g(M^j x (+) gamma_[k]) for a generator g on V.
inline LocalizedFunction system_element(const TestFunction& generator, int j, Index k)
{
    const GroupContext& ctx = generator.context();
    const unsigned m = ctx.m();
    const int s = generator.smoothness();
    const int t = generator.support();

    // digits of k inside the generator's support act as an index shift, the
    // rest move the block
    const auto kd = detail::base_digits(k, m);
    Index inner_shift = 0;
    std::vector<Digit> outer;
    int outer_low = 0;
    for (std::size_t i = 0; i < kd.size(); ++i) {
        const int position = -static_cast<int>(i);
        if (position > -t) {
            if (s + static_cast<int>(i) >= 0)
                inner_shift += detail::checked_pow(m, s + static_cast<long>(i)) * kd[i];
        }
    }
    if (static_cast<long>(kd.size()) > t) {
        const std::size_t first = static_cast<std::size_t>(std::max(t, 0));
        for (std::size_t i = kd.size(); i > first; --i)
            outer.push_back(kd[i - 1]);
        outer_low = 1 - static_cast<int>(kd.size());
    }
    const GroupElement moved = GroupElement::from_positions(generator.side(), outer_low, std::move(outer));
    GroupElement origin = dilate(negate(ctx, moved), -j);

    const double scale = std::pow(static_cast<double>(m), 0.5 * j);
    std::vector<Complex> values(generator.size());
    for (Index idx = 0; idx < values.size(); ++idx)
        values[idx] = scale * generator[gamma_add_index(ctx, generator.side(), idx, inner_shift)];
    return LocalizedFunction(generator.context_ptr(), generator.side(), s + j, t - j, std::move(origin),
                             std::move(values));
}

struct WaveletSystemElement {
    unsigned nu = 0; // 0 selects the scaling function
    int j = 0;
    Index k = 0;
    LocalizedFunction function;

    TestFunction as_test_function() const { return function.to_test_function(); }
};

class WaveletSystem {
public:
    WaveletSystem(MaskFamily family, TestFunction phi_hat)
        : family_(std::move(family)), phi_hat_(std::move(phi_hat)), phi_(inverse_fourier(phi_hat_)),
          wavelets_(build_wavelets(family_, phi_hat_))
    {
    }

    const MaskFamily& family() const noexcept { return family_; }
    const TestFunction& phi_hat() const noexcept { return phi_hat_; }
    const TestFunction& phi() const noexcept { return phi_; }
    const std::vector<WaveletPair>& wavelets() const noexcept { return wavelets_; }
    unsigned generator_count() const noexcept { return static_cast<unsigned>(wavelets_.size() - 1); }
    const ContextPtr& context_ptr() const { return phi_.context_ptr(); }

    const TestFunction& generator(unsigned nu) const { return nu == 0 ? phi_ : wavelets_.at(nu).psi; }

    WaveletSystemElement element(unsigned nu, int j, Index k) const
    {
        return {nu, j, k, system_element(generator(nu), j, k)};
    }

private:
    MaskFamily family_;
    TestFunction phi_hat_;
    TestFunction phi_;
    std::vector<WaveletPair> wavelets_;
};

inline ComplexMatrix gram_matrix(std::span<const LocalizedFunction> elements)
{
    ComplexMatrix out(elements.size(), elements.size());
    for (std::size_t i = 0; i < elements.size(); ++i)
        for (std::size_t j = i; j < elements.size(); ++j) {
            out(i, j) = inner_product(elements[i], elements[j]);
            out(j, i) = std::conj(out(i, j));
        }
    return out;
}

/// max |G - I| without storing G.
inline double gram_identity_defect(std::span<const LocalizedFunction> elements)
{
    double out = 0;
    for (std::size_t i = 0; i < elements.size(); ++i)
        for (std::size_t j = i; j < elements.size(); ++j) {
            const Complex g = inner_product(elements[i], elements[j]);
            out = std::max(out, std::abs(g - (i == j ? Complex(1.0) : Complex(0.0))));
        }
    return out;
}

/// max |<a_i, b_j>|.
inline double cross_gram_max(std::span<const LocalizedFunction> a, std::span<const LocalizedFunction> b)
{
    double out = 0;
    for (const auto& x : a)
        for (const auto& y : b)
            out = std::max(out, std::abs(inner_product(x, y)));
    return out;
}

/// Index window used for desk-scale orthonormality checks.
struct GramWindow {
    int max_scale = 2;           // |j| <= max_scale
    unsigned shift_digits = 0;   // k < m^shift_digits; 0 means order + 1
};

inline std::vector<LocalizedFunction> wavelet_window(const WaveletSystem& system, GramWindow window)
{
    const unsigned m = system.context_ptr()->m();
    const unsigned digits = window.shift_digits ? window.shift_digits : system.family().order() + 1;
    const Index shifts = detail::checked_pow(m, digits);
    std::vector<LocalizedFunction> out;
    for (int j = -window.max_scale; j <= window.max_scale; ++j)
        for (unsigned nu = 1; nu <= system.generator_count(); ++nu)
            for (Index k = 0; k < shifts; ++k)
                out.push_back(system_element(system.generator(nu), j, k));
    return out;
}

inline std::vector<LocalizedFunction> scaling_window(const WaveletSystem& system, int j, unsigned shift_digits)
{
    const Index shifts = detail::checked_pow(system.context_ptr()->m(), shift_digits);
    std::vector<LocalizedFunction> out;
    for (Index k = 0; k < shifts; ++k)
        out.push_back(system_element(system.phi(), j, k));
    return out;
}

/// Number of shifts k for which the scale-j element of a generator with
/// support exponent t can meet M^K(U).
inline Index relevant_shift_count(unsigned m, int j, int generator_support, int support)
{
    const long digits = std::max(0L, static_cast<long>(j) + std::max(support, generator_support - j));
    return detail::checked_pow(m, digits);
}

struct ParsevalReport {
    double norm_squared = 0;
    double fine_energy = 0;   // sum_k |<f, phi_{J,k}>|^2
    double coarse_energy = 0; // sum_k |<f, phi_{j0,k}>|^2
    std::vector<double> detail_energy; // j = j0 ... J-1, summed over nu and k
    double telescoping_deviation = 0;
    double norm_deviation = 0;
};

/// Finite surrogate of the Parseval identity for f in span{phi_{J,k}}:
/// energy at scale J equals the energy at j0 plus all detail energies in
/// between, and equals ||f||^2.
inline ParsevalReport parseval_telescoping(const WaveletSystem& system, const TestFunction& f, int j0, int J)
{
    if (f.side() != Side::primal)
        throw Error(ErrorCode::SideMismatch, "expects a function on V");
    if (j0 >= J)
        throw Error(ErrorCode::InvalidParameters, "need j0 < J");
    const TestFunction& phi = system.phi();
    if (!fits_shape(f, std::min(f.smoothness(), phi.smoothness() + J), f.support(), 1e-12))
        throw Error(ErrorCode::ShapeIncompatible, "f is not constant on cosets of U_" +
                                                      std::to_string(phi.smoothness() + J));
    const LocalizedFunction local = LocalizedFunction::from(f);
    const unsigned m = f.context().m();

    auto energy = [&](unsigned nu, int j) {
        const TestFunction& g = system.generator(nu);
        const Index count = relevant_shift_count(m, j, g.support(), f.support());
        if (count > detail::kMaxTableSize)
            throw Error(ErrorCode::TooLarge, "too many shifts at scale " + std::to_string(j));
        double acc = 0;
        for (Index k = 0; k < count; ++k)
            acc += std::norm(inner_product(local, system_element(g, j, k)));
        return acc;
    };

    ParsevalReport report;
    report.norm_squared = f.norm_squared();
    report.fine_energy = energy(0, J);
    report.coarse_energy = energy(0, j0);
    double total = report.coarse_energy;
    for (int j = j0; j < J; ++j) {
        double e = 0;
        for (unsigned nu = 1; nu <= system.generator_count(); ++nu)
            e += energy(nu, j);
        report.detail_energy.push_back(e);
        total += e;
    }
    report.telescoping_deviation = std::abs(report.fine_energy - total);
    report.norm_deviation = std::abs(report.fine_energy - report.norm_squared);
    return report;
}

struct FilterBankBands {
    std::vector<Complex> lowpass;
    std::vector<std::vector<Complex>> details; // nu = 1 ... R
};

/// One analysis/synthesis level on coefficient arrays of length m^Q:
///   c_j[l] = sqrt(m) sum_k conj(a_k) c_{j+1}[(m l) (+) k]
/// with a_k the Walsh coefficients of each mask. Taps beyond Q digits wrap
/// digit-wise, which keeps the analysis operator unitary.
class FilterBank {
public:
    explicit FilterBank(const MaskFamily& family) : ctx_(family.context_ptr()), order_(family.order())
    {
        if (family.polyphase_defect > kTableTolerance)
            throw Error(ErrorCode::MaskNotOrthogonal, "family is not polyphase unitary");
        for (const auto& mask : family.masks)
            taps_.push_back(mask.coefficients());
    }

    const std::vector<std::vector<Complex>>& taps() const noexcept { return taps_; }
    std::size_t band_count() const noexcept { return taps_.size(); }

    FilterBankBands analyze(std::span<const Complex> fine) const
    {
        const unsigned Q = levels(fine.size());
        const auto folded = folded_taps(Q);
        const unsigned m = ctx_->m();
        const Index coarse = fine.size() / m;
        const double root_m = std::sqrt(static_cast<double>(m));
        std::vector<std::vector<Complex>> bands(taps_.size(), std::vector<Complex>(coarse));
        for (Index l = 0; l < coarse; ++l) {
            const Index anchor = l * m;
            for (Index k = 0; k < folded.front().size(); ++k) {
                const Complex c = fine[gamma_add_index(*ctx_, Side::primal, anchor, k)];
                for (std::size_t nu = 0; nu < taps_.size(); ++nu)
                    bands[nu][l] += std::conj(folded[nu][k]) * c;
            }
            for (auto& band : bands)
                band[l] *= root_m;
        }
        FilterBankBands out;
        out.lowpass = std::move(bands.front());
        out.details.assign(std::make_move_iterator(bands.begin() + 1), std::make_move_iterator(bands.end()));
        return out;
    }

    std::vector<Complex> synthesize(const FilterBankBands& bands) const
    {
        if (bands.details.size() + 1 != taps_.size())
            throw Error(ErrorCode::BadLength, "expected " + std::to_string(taps_.size() - 1) + " detail bands");
        const unsigned m = ctx_->m();
        const std::size_t coarse = bands.lowpass.size();
        for (const auto& band : bands.details)
            if (band.size() != coarse)
                throw Error(ErrorCode::BadLength, "bands differ in length");
        const unsigned Q = levels(coarse * m);
        const auto folded = folded_taps(Q);
        const double root_m = std::sqrt(static_cast<double>(m));
        std::vector<Complex> fine(coarse * m);
        for (Index l = 0; l < coarse; ++l) {
            const Index anchor = l * m;
            for (Index k = 0; k < folded.front().size(); ++k) {
                Complex acc = folded[0][k] * bands.lowpass[l];
                for (std::size_t nu = 1; nu < taps_.size(); ++nu)
                    acc += folded[nu][k] * bands.details[nu - 1][l];
                fine[gamma_add_index(*ctx_, Side::primal, anchor, k)] += root_m * acc;
            }
        }
        return fine;
    }

private:
    unsigned levels(std::size_t length) const
    {
        const auto Q = detail::exact_log(ctx_->m(), length);
        if (!Q || *Q == 0)
            throw Error(ErrorCode::BadLength, "length " + std::to_string(length) + " is not a positive power of m = " +
                                                  std::to_string(ctx_->m()));
        return *Q;
    }

    // taps with digits at positions >= Q dropped (digit-wise wrap)
    std::vector<std::vector<Complex>> folded_taps(unsigned Q) const
    {
        const Index span = detail::checked_pow(ctx_->m(), std::min<long>(Q, order_));
        std::vector<std::vector<Complex>> out(taps_.size(), std::vector<Complex>(span));
        for (std::size_t nu = 0; nu < taps_.size(); ++nu)
            for (Index k = 0; k < taps_[nu].size(); ++k)
                out[nu][k % span] += taps_[nu][k];
        return out;
    }

    ContextPtr ctx_;
    unsigned order_ = 0;
    std::vector<std::vector<Complex>> taps_;
};

} // namespace vilenkin
