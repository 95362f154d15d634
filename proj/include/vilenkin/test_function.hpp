#pragma once

// Test functions: compactly supported functions constant on cosets of some
// U_n. A function in S_n^{(K)} is stored as m^{n+K} coset values.
//
// Coset index layout (every table in the project relies on it): the base-m
// digit j of the index k is the digit at position n - j, so digit 0 is the
// finest position n and digit n+K-1 is the coarsest position -K+1. Points
// with a nonzero digit at a position <= -K are outside the support.

#include "vilenkin/group.hpp"
#include "vilenkin/walsh.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace vilenkin {

inline bool same_group(const GroupContext& a, const GroupContext& b)
{
    return &a == &b || (a.pair().M == b.pair().M && a.digits(Side::primal).digits == b.digits(Side::primal).digits &&
                        a.digits(Side::dual).digits == b.digits(Side::dual).digits);
}

class TestFunction {
public:
    TestFunction() = default;

    TestFunction(ContextPtr ctx, Side side, int smoothness, int support, std::vector<Complex> values)
        : ctx_(std::move(ctx)), side_(side), n_(smoothness), K_(support), values_(std::move(values))
    {
        if (!ctx_)
            throw Error(ErrorCode::InvalidParameters, "null group context");
        if (n_ + K_ < 0)
            throw Error(ErrorCode::InvalidShape, "n + K = " + std::to_string(n_ + K_) + " < 0");
        if (values_.size() != detail::table_size(ctx_->m(), n_ + K_))
            throw Error(ErrorCode::BadLength, "S_" + std::to_string(n_) + "^(" + std::to_string(K_) + ") needs " +
                                                  std::to_string(detail::table_size(ctx_->m(), n_ + K_)) + " values, got " +
                                                  std::to_string(values_.size()));
    }

    static TestFunction zero(ContextPtr ctx, Side side, int smoothness, int support)
    {
        if (smoothness + support < 0)
            throw Error(ErrorCode::InvalidShape, "n + K < 0");
        const auto size = detail::table_size(ctx->m(), smoothness + support);
        return TestFunction(std::move(ctx), side, smoothness, support, std::vector<Complex>(size));
    }

    /// The indicator of U (or U*).
    static TestFunction unit_indicator(ContextPtr ctx, Side side)
    {
        return TestFunction(std::move(ctx), side, 0, 0, {Complex(1.0)});
    }

    const GroupContext& context() const { return *ctx_; }
    const ContextPtr& context_ptr() const { return ctx_; }
    Side side() const noexcept { return side_; }
    int smoothness() const noexcept { return n_; }
    int support() const noexcept { return K_; }
    unsigned digit_count() const noexcept { return static_cast<unsigned>(n_ + K_); }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const Complex> values() const noexcept { return values_; }
    std::vector<Complex>& mutable_values() noexcept { return values_; }
    Complex operator[](Index k) const { return values_[k]; }
    Complex& operator[](Index k) { return values_[k]; }

    double coset_measure() const { return std::pow(static_cast<double>(ctx_->m()), -n_); }

    double norm_squared() const
    {
        double acc = 0;
        for (const auto& v : values_)
            acc += std::norm(v);
        return acc * coset_measure();
    }
    double norm() const { return std::sqrt(norm_squared()); }

    /// Digit of coset index k at group position p (0 outside the grid).
    Digit digit_at(Index k, int position) const
    {
        const long j = static_cast<long>(n_) - position;
        if (j < 0 || j >= n_ + K_)
            return 0;
        for (long i = 0; i < j; ++i)
            k /= ctx_->m();
        return static_cast<Digit>(k % ctx_->m());
    }

    GroupElement representative(Index k) const { return coset_representative(*ctx_, {side_, n_, k}); }

    /// Coset index of x, or nullopt when x is outside M^K(U).
    std::optional<Index> index_of(const GroupElement& x) const
    {
        if (x.side() != side_)
            throw Error(ErrorCode::SideMismatch, "point and function live on different sides");
        if (!x.is_neutral() && x.lowest_position() <= -K_)
            return std::nullopt;
        Index k = 0;
        for (int p = -K_ + 1; p <= n_; ++p)
            k = k * ctx_->m() + x.digit(p);
        return k;
    }

    Complex operator()(const GroupElement& x) const
    {
        const auto k = index_of(x);
        return k ? values_[*k] : Complex(0.0);
    }

private:
    ContextPtr ctx_;
    Side side_ = Side::primal;
    int n_ = 0;
    int K_ = 0;
    std::vector<Complex> values_;
};

namespace detail {

inline void require_same_group(const TestFunction& f, const TestFunction& g)
{
    if (f.side() != g.side())
        throw Error(ErrorCode::SideMismatch, "functions live on different sides");
    if (!same_group(f.context(), g.context()))
        throw Error(ErrorCode::ContextMismatch, "functions belong to different groups");
}

} // namespace detail

/// Same function on the finer/wider grid S_{n'}^{(K')}.
inline TestFunction refine(const TestFunction& f, int smoothness, int support)
{
    if (smoothness < f.smoothness() || support < f.support())
        throw Error(ErrorCode::CoarseningRequested, "refine cannot coarsen; use coarsen()");
    if (smoothness == f.smoothness() && support == f.support())
        return f;
    const unsigned m = f.context().m();
    const Index split = detail::checked_pow(m, smoothness - f.smoothness());
    auto out = TestFunction::zero(f.context_ptr(), f.side(), smoothness, support);
    const Index limit = f.size();
    for (Index k = 0; k < out.size(); ++k) {
        const Index parent = k / split;
        if (parent < limit)
            out[k] = f[parent];
    }
    return out;
}

/// Re-express f on S_{n'}^{(K')} when f genuinely lies there (within tol);
/// throws ShapeIncompatible otherwise.
inline TestFunction coarsen(const TestFunction& f, int smoothness, int support, double tol = 0.0)
{
    if (smoothness + support < 0)
        throw Error(ErrorCode::InvalidShape, "n + K < 0");
    const TestFunction fine = refine(f, std::max(smoothness, f.smoothness()), std::max(support, f.support()));
    const unsigned m = f.context().m();
    const Index split = detail::checked_pow(m, fine.smoothness() - smoothness);
    const Index inside = detail::checked_pow(m, smoothness + support);
    for (Index k = 0; k < fine.size(); ++k) {
        const Index parent = k / split;
        if (parent >= inside) {
            if (std::abs(fine[k]) > tol)
                throw Error(ErrorCode::ShapeIncompatible, "nonzero value outside M^" + std::to_string(support) + "(U)");
        } else if (std::abs(fine[k] - fine[parent * split]) > tol) {
            throw Error(ErrorCode::ShapeIncompatible, "not constant on cosets of U_" + std::to_string(smoothness));
        }
    }
    auto out = TestFunction::zero(f.context_ptr(), f.side(), smoothness, support);
    for (Index c = 0; c < out.size(); ++c)
        out[c] = fine[c * split];
    return out;
}

inline bool fits_shape(const TestFunction& f, int smoothness, int support, double tol = 0.0)
{
    try {
        coarsen(f, smoothness, support, tol);
        return true;
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ShapeIncompatible || e.code() == ErrorCode::InvalidShape)
            return false;
        throw;
    }
}

/// Forward: f in S_n^{(K)}(V) to its Fourier transform in S_K^{(n)}(V*),
/// conjugating the character. Inverse: from V* back to V, no conjugation.
inline TestFunction fourier(const TestFunction& f, Direction direction = Direction::forward)
{
    const GroupContext& ctx = f.context();
    const Side expected = direction == Direction::forward ? Side::primal : Side::dual;
    if (f.side() != expected)
        throw Error(ErrorCode::SideMismatch, direction == Direction::forward
                                                 ? "forward Fourier transform takes a function on V"
                                                 : "inverse Fourier transform takes a function on V*");
    auto kernel = direction == Direction::forward ? detail::primal_to_dual_kernel(ctx, true)
                                                  : detail::dual_to_primal_kernel(ctx, false);
    auto values = detail::digit_transform(f.values(), ctx.m(), f.digit_count(), kernel);
    const double scale = f.coset_measure();
    for (auto& v : values)
        v *= scale;
    const Side target = direction == Direction::forward ? Side::dual : Side::primal;
    return TestFunction(f.context_ptr(), target, f.support(), f.smoothness(), std::move(values));
}

inline TestFunction inverse_fourier(const TestFunction& g) { return fourier(g, Direction::inverse); }

/// <f, g> = integral of f * conj(g), on the common refinement.
inline Complex inner_product(const TestFunction& f, const TestFunction& g)
{
    detail::require_same_group(f, g);
    const int n = std::max(f.smoothness(), g.smoothness());
    const int K = std::max(f.support(), g.support());
    const TestFunction a = refine(f, n, K);
    const TestFunction b = refine(g, n, K);
    Complex acc = 0;
    for (Index k = 0; k < a.size(); ++k)
        acc += a[k] * std::conj(b[k]);
    return acc * a.coset_measure();
}

inline double sup_distance(const TestFunction& f, const TestFunction& g)
{
    detail::require_same_group(f, g);
    const int n = std::max(f.smoothness(), g.smoothness());
    const int K = std::max(f.support(), g.support());
    const TestFunction a = refine(f, n, K);
    const TestFunction b = refine(g, n, K);
    double out = 0;
    for (Index k = 0; k < a.size(); ++k)
        out = std::max(out, std::abs(a[k] - b[k]));
    return out;
}

inline TestFunction operator*(Complex c, const TestFunction& f)
{
    TestFunction out = f;
    for (auto& v : out.mutable_values())
        v *= c;
    return out;
}

inline TestFunction operator+(const TestFunction& f, const TestFunction& g)
{
    detail::require_same_group(f, g);
    const int n = std::max(f.smoothness(), g.smoothness());
    const int K = std::max(f.support(), g.support());
    TestFunction out = refine(f, n, K);
    const TestFunction b = refine(g, n, K);
    for (Index k = 0; k < out.size(); ++k)
        out[k] += b[k];
    return out;
}

/// x -> f(x (+) gamma) for any finite gamma on f's side.
inline TestFunction translate(const TestFunction& f, const GroupElement& gamma)
{
    if (gamma.side() != f.side())
        throw Error(ErrorCode::SideMismatch, "shift lives on the other side");
    if (gamma.is_neutral())
        return f;
    const int support = std::max(f.support(), 1 - gamma.lowest_position());
    const TestFunction wide = refine(f, f.smoothness(), support);
    Index shift = 0;
    for (int p = -support + 1; p <= wide.smoothness(); ++p)
        shift = shift * f.context().m() + gamma.digit(p);
    auto out = TestFunction::zero(f.context_ptr(), f.side(), wide.smoothness(), support);
    for (Index k = 0; k < out.size(); ++k)
        out[k] = wide[gamma_add_index(f.context(), f.side(), k, shift)];
    return out;
}

/// x -> f(M^j x); same values, shape (n + j, K - j).
inline TestFunction dilate_argument(const TestFunction& f, int j)
{
    std::vector<Complex> values(f.values().begin(), f.values().end());
    return TestFunction(f.context_ptr(), f.side(), f.smoothness() + j, f.support() - j, std::move(values));
}

/// omega -> g(omega) * chi(gamma, omega) for g on V* and gamma in V.
inline TestFunction modulate(const TestFunction& g, const GroupElement& gamma)
{
    if (g.side() != Side::dual || gamma.side() != Side::primal)
        throw Error(ErrorCode::SideMismatch, "modulate multiplies a function on V* by chi(gamma, .)");
    if (gamma.is_neutral())
        return g;
    const GroupContext& ctx = g.context();
    TestFunction out = refine(g, std::max(g.smoothness(), 1 - gamma.lowest_position()), g.support());
    for (Index k = 0; k < out.size(); ++k) {
        if (out[k] == Complex(0.0))
            continue;
        unsigned e = 0;
        for (int p = gamma.lowest_position(); p <= gamma.highest_position(); ++p)
            e += ctx.pairing(gamma.digit(p), out.digit_at(k, 1 - p));
        out[k] *= ctx.root(e % ctx.m());
    }
    return out;
}

/// omega -> g(omega) * mask(M*^{-j} omega) = g(omega) * b(omega_{1-j} ... omega_{n-j}).
inline TestFunction multiply_by_mask(const TestFunction& g, const WalshPolynomial& mask, int j)
{
    if (g.side() != Side::dual)
        throw Error(ErrorCode::SideMismatch, "masks multiply functions on V*");
    if (!same_group(g.context(), mask.context()))
        throw Error(ErrorCode::ContextMismatch, "mask and function belong to different groups");
    const int order = static_cast<int>(mask.order());
    TestFunction out = refine(g, std::max(g.smoothness(), order - j), g.support());
    const unsigned m = g.context().m();
    for (Index k = 0; k < out.size(); ++k) {
        if (out[k] == Complex(0.0))
            continue;
        Index pattern = 0;
        for (int t = 1; t <= order; ++t)
            pattern = pattern * m + out.digit_at(k, t - j);
        out[k] *= mask.value(pattern);
    }
    return out;
}

} // namespace vilenkin
