#pragma once

#include "vilenkin/group.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

namespace vilenkin {

enum class Direction { forward, inverse };

namespace detail {

inline constexpr Index kMaxTableSize = Index{1} << 28;

inline std::optional<unsigned> exact_log(unsigned m, std::size_t size)
{
    if (size == 0)
        return std::nullopt;
    unsigned p = 0;
    while (size % m == 0) {
        size /= m;
        ++p;
    }
    if (size != 1)
        return std::nullopt;
    return p;
}

inline std::size_t table_size(unsigned m, long digits)
{
    if (digits < 0)
        throw Error(ErrorCode::InvalidShape, "negative digit count");
    const Index size = checked_pow(m, digits);
    if (size > kMaxTableSize)
        throw Error(ErrorCode::TooLarge, "table of " + std::to_string(size) + " values is beyond desk scale");
    return static_cast<std::size_t>(size);
}

inline Index reverse_digits(Index i, unsigned m, unsigned count)
{
    Index out = 0;
    for (unsigned d = 0; d < count; ++d) {
        out = out * m + i % m;
        i /= m;
    }
    return out;
}

/// out[l] = sum_k in[k] * prod_j kernel[k_j][l_{N-1-j}], k_j and l_i being
/// base-m digits. The digit reversal is applied first, then one radix-m
/// butterfly pass per digit axis, in a fixed order.
inline std::vector<Complex> digit_transform(std::span<const Complex> in, unsigned m, unsigned digits,
                                            const std::vector<Complex>& kernel)
{
    std::vector<Complex> out(in.size());
    for (Index i = 0; i < in.size(); ++i)
        out[reverse_digits(i, m, digits)] = in[i];

    std::vector<Complex> column(m);
    Index stride = 1;
    for (unsigned axis = 0; axis < digits; ++axis, stride *= m) {
        const Index block = stride * m;
        for (Index hi = 0; hi < out.size(); hi += block)
            for (Index lo = 0; lo < stride; ++lo) {
                const Index base = hi + lo;
                for (unsigned a = 0; a < m; ++a)
                    column[a] = out[base + a * stride];
                for (unsigned b = 0; b < m; ++b) {
                    Complex acc = 0;
                    for (unsigned a = 0; a < m; ++a)
                        acc += column[a] * kernel[a * m + b];
                    out[base + b * stride] = acc;
                }
            }
    }
    return out;
}

// kernel[a][b] for a primal digit input and dual digit output.
inline std::vector<Complex> primal_to_dual_kernel(const GroupContext& ctx, bool conjugate)
{
    const unsigned m = ctx.m();
    std::vector<Complex> kernel(std::size_t{m} * m);
    for (Digit a = 0; a < m; ++a)
        for (Digit b = 0; b < m; ++b) {
            const unsigned e = ctx.pairing(a, b);
            kernel[a * m + b] = ctx.root(conjugate ? (m - e) % m : e);
        }
    return kernel;
}

// kernel[b][a] for a dual digit input and primal digit output.
inline std::vector<Complex> dual_to_primal_kernel(const GroupContext& ctx, bool conjugate)
{
    const unsigned m = ctx.m();
    std::vector<Complex> kernel(std::size_t{m} * m);
    for (Digit a = 0; a < m; ++a)
        for (Digit b = 0; b < m; ++b) {
            const unsigned e = ctx.pairing(a, b);
            kernel[b * m + a] = ctx.root(conjugate ? (m - e) % m : e);
        }
    return kernel;
}

} // namespace detail

/// W_k(omega) = chi(gamma_[k], omega), returned as an exponent of exp(2 pi i / m).
inline unsigned walsh_eval(const GroupContext& ctx, Index k, const GroupElement& omega)
{
    return char_exponent(ctx, gamma_of(ctx, k), omega);
}

/// Generalized Walsh-Chrestenson transform of size m^p. Forward takes Walsh
/// coefficients c_k to the values of sum_k c_k W_k on the m^p cosets of U*_p
/// in U* (value index: omega_1 most significant). Inverse undoes it.
inline std::vector<Complex> walsh_transform(const GroupContext& ctx, std::span<const Complex> values, Direction direction)
{
    const auto p = detail::exact_log(ctx.m(), values.size());
    if (!p)
        throw Error(ErrorCode::BadLength, "length " + std::to_string(values.size()) + " is not a power of m = " +
                                              std::to_string(ctx.m()));
    if (direction == Direction::forward)
        return detail::digit_transform(values, ctx.m(), *p, detail::primal_to_dual_kernel(ctx, false));
    auto out = detail::digit_transform(values, ctx.m(), *p, detail::dual_to_primal_kernel(ctx, true));
    const double scale = 1.0 / static_cast<double>(values.size());
    for (auto& v : out)
        v *= scale;
    return out;
}

/// Order-n Walsh polynomial, stored by its values b(omega_1 ... omega_n) on
/// the cosets of U*_n in U*; omega_1 is the most significant base-m digit of
/// the table index. Coefficients are derived on demand.
class WalshPolynomial {
public:
    WalshPolynomial() = default;

    static WalshPolynomial from_values(ContextPtr ctx, unsigned order, std::vector<Complex> values)
    {
        if (!ctx)
            throw Error(ErrorCode::InvalidParameters, "null group context");
        if (values.size() != detail::table_size(ctx->m(), order))
            throw Error(ErrorCode::BadLength, "Walsh polynomial of order " + std::to_string(order) + " needs " +
                                                  std::to_string(detail::table_size(ctx->m(), order)) + " values");
        WalshPolynomial p;
        p.ctx_ = std::move(ctx);
        p.order_ = order;
        p.values_ = std::move(values);
        return p;
    }

    static WalshPolynomial from_coefficients(ContextPtr ctx, unsigned order, std::span<const Complex> coefficients)
    {
        if (!ctx)
            throw Error(ErrorCode::InvalidParameters, "null group context");
        if (coefficients.size() != detail::table_size(ctx->m(), order))
            throw Error(ErrorCode::BadLength, "coefficient table has the wrong size");
        auto values = walsh_transform(*ctx, coefficients, Direction::forward);
        return from_values(std::move(ctx), order, std::move(values));
    }

    const GroupContext& context() const { return *ctx_; }
    const ContextPtr& context_ptr() const { return ctx_; }
    unsigned order() const noexcept { return order_; }
    std::size_t size() const noexcept { return values_.size(); }
    std::span<const Complex> values() const noexcept { return values_; }
    Complex value(Index pattern) const { return values_[pattern]; }

    /// Value at omega (H*-periodic: only omega_1 ... omega_n matter).
    Complex operator()(const GroupElement& omega) const
    {
        if (omega.side() != Side::dual)
            throw Error(ErrorCode::SideMismatch, "Walsh polynomials live on V*");
        Index pattern = 0;
        for (unsigned i = 1; i <= order_; ++i)
            pattern = pattern * ctx_->m() + omega.digit(static_cast<int>(i));
        return values_[pattern];
    }

    std::vector<Complex> coefficients() const { return walsh_transform(*ctx_, values_, Direction::inverse); }

    Index tail_count() const { return values_.size() / ctx_->m(); }

    /// b(k tail): first digit k, remaining n-1 digits given by the tail index.
    Complex column_entry(Digit k, Index tail) const { return values_[k * tail_count() + tail]; }

private:
    ContextPtr ctx_;
    unsigned order_ = 0;
    std::vector<Complex> values_;
};

/// Base-m index of a digit pattern, first digit most significant.
inline Index pattern_index(unsigned m, std::span<const Digit> pattern)
{
    Index out = 0;
    for (Digit d : pattern)
        out = detail::checked_mul(out, m) + d;
    return out;
}

inline std::vector<Digit> pattern_digits(unsigned m, Index pattern, unsigned length)
{
    std::vector<Digit> out(length);
    for (unsigned i = length; i > 0; --i) {
        out[i - 1] = static_cast<Digit>(pattern % m);
        pattern /= m;
    }
    return out;
}

} // namespace vilenkin
