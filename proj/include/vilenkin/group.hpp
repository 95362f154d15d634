#pragma once

// Exact arithmetic on a generalized Vilenkin group V built from a dilation
// matrix M and a digit set D(M), and on its dual V* (built from M^T).
//
// Elements are finite two-sided digit strings; position j holds a digit
// index into the side's digit set. Addition is position-wise through the
// digit Cayley table (no carries). The dilation M acts as a shift:
// (M x)_j = x_{j+1}.

#include "vilenkin/error.hpp"
#include "vilenkin/int_matrix.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <limits>
#include <map>
#include <memory>
#include <numbers>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace vilenkin {

using Complex = std::complex<double>;
using Digit = std::uint32_t;
using Index = std::uint64_t;

enum class Side { primal, dual };

constexpr std::string_view to_string(Side side) { return side == Side::primal ? "primal" : "dual"; }

struct DilationPair {
    std::size_t dim = 0;
    IntMatrix M;
    IntMatrix Mstar;
    IntMatrix adjugate; // adj(M); adj(M*) is its transpose
    std::int64_t det = 0;
    unsigned m = 0;

    const IntMatrix& matrix(Side side) const { return side == Side::primal ? M : Mstar; }
    IntMatrix adjugate_for(Side side) const { return side == Side::primal ? adjugate : adjugate.transposed(); }
};

inline constexpr double kExpansionTolerance = 1e-9;

inline DilationPair validate_dilation_pair(const IntMatrix& M)
{
    if (!M.square() || M.rows() == 0)
        throw Error(ErrorCode::NotSquare, "dilation matrix must be square and non-empty");
    DilationPair pair;
    pair.dim = M.rows();
    pair.M = M;
    pair.Mstar = M.transposed();
    pair.det = determinant(M);
    if (pair.det == 0)
        throw Error(ErrorCode::Singular, "det M = 0");
    if (pair.det == 1 || pair.det == -1)
        throw Error(ErrorCode::UnitDeterminant, "|det M| = 1, the digit group is trivial");
    pair.adjugate = adjugate(M);
    pair.m = static_cast<unsigned>(pair.det < 0 ? -pair.det : pair.det);

    Eigen::MatrixXd A(pair.dim, pair.dim);
    for (std::size_t r = 0; r < pair.dim; ++r)
        for (std::size_t c = 0; c < pair.dim; ++c)
            A(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = static_cast<double>(M(r, c));
    Eigen::EigenSolver<Eigen::MatrixXd> solver(A, false);
    for (Eigen::Index i = 0; i < solver.eigenvalues().size(); ++i) {
        const double modulus = std::abs(solver.eigenvalues()[i]);
        if (modulus <= 1.0 + kExpansionTolerance)
            throw Error(ErrorCode::NotExpanding,
                        "eigenvalue of modulus " + std::to_string(modulus) + " is not > 1");
    }
    return pair;
}

struct DigitSet {
    Side side = Side::primal;
    std::vector<IntVector> digits;

    std::size_t size() const noexcept { return digits.size(); }
};

namespace detail {

inline std::int64_t floor_mod(std::int64_t a, std::int64_t m)
{
    const std::int64_t r = a % m;
    return r < 0 ? r + m : r;
}

// adj * v reduced mod |det| componentwise: equal keys <=> congruent mod the
// side's matrix.
inline IntVector residue_key(const IntMatrix& adj, std::int64_t det, const IntVector& v)
{
    IntVector key = adj.apply(v);
    const std::int64_t modulus = det < 0 ? -det : det;
    for (auto& x : key)
        x = floor_mod(x, modulus);
    return key;
}

inline bool is_zero(const IntVector& v)
{
    return std::all_of(v.begin(), v.end(), [](std::int64_t x) { return x == 0; });
}

inline IntVector difference(const IntVector& a, const IntVector& b)
{
    IntVector out(a.size());
    for (std::size_t i = 0; i < a.size(); ++i)
        out[i] = a[i] - b[i];
    return out;
}

} // namespace detail

inline bool congruent(const DilationPair& pair, Side side, const IntVector& a, const IntVector& b)
{
    return detail::is_zero(detail::residue_key(pair.adjugate_for(side), pair.det, detail::difference(a, b)));
}

/// Validates user digits, or generates the canonical set. Generation scans the
/// box [-B, B]^d (B = largest absolute row or column sum), visiting points by
/// sup-norm, then number of negative coordinates, then lexicographically, and
/// keeps the first point of each residue class.
inline DigitSet resolve_digit_set(const DilationPair& pair, Side side,
                                  const std::optional<std::vector<IntVector>>& user = std::nullopt)
{
    DigitSet set{side, {}};
    if (user) {
        if (user->size() != pair.m)
            throw Error(ErrorCode::WrongCount, "expected " + std::to_string(pair.m) + " digits, got " +
                                                   std::to_string(user->size()));
        for (const auto& v : *user)
            if (v.size() != pair.dim)
                throw Error(ErrorCode::WrongCount, "digit vector has wrong dimension");
        if (!detail::is_zero(user->front()))
            throw Error(ErrorCode::MissingZeroDigit, "s_0 must be the zero vector");
        for (std::size_t i = 0; i < user->size(); ++i)
            for (std::size_t j = i + 1; j < user->size(); ++j)
                if (congruent(pair, side, (*user)[i], (*user)[j]))
                    throw Error(ErrorCode::CongruentDigits,
                                "digits " + std::to_string(i) + " and " + std::to_string(j) + " are congruent");
        set.digits = *user;
        return set;
    }

    const IntMatrix& A = pair.matrix(side);
    std::int64_t bound = 0;
    for (std::size_t r = 0; r < pair.dim; ++r) {
        std::int64_t row = 0, col = 0;
        for (std::size_t c = 0; c < pair.dim; ++c) {
            row += std::abs(A(r, c));
            col += std::abs(A(c, r));
        }
        bound = std::max({bound, row, col});
    }

    std::vector<IntVector> candidates;
    IntVector point(pair.dim, -bound);
    while (true) {
        candidates.push_back(point);
        std::size_t axis = pair.dim;
        while (axis > 0) {
            --axis;
            if (point[axis] < bound) {
                ++point[axis];
                break;
            }
            point[axis] = -bound;
            if (axis == 0) {
                axis = pair.dim + 1;
                break;
            }
        }
        if (axis == pair.dim + 1)
            break;
    }
    auto sort_key = [](const IntVector& v) {
        std::int64_t sup = 0, negatives = 0;
        for (auto x : v) {
            sup = std::max(sup, std::abs(x));
            negatives += x < 0;
        }
        return std::make_pair(sup, negatives);
    };
    std::stable_sort(candidates.begin(), candidates.end(), [&](const IntVector& a, const IntVector& b) {
        const auto ka = sort_key(a), kb = sort_key(b);
        if (ka != kb)
            return ka < kb;
        return a < b;
    });

    const IntMatrix adj = pair.adjugate_for(side);
    std::map<IntVector, bool> seen;
    for (const auto& v : candidates) {
        auto key = detail::residue_key(adj, pair.det, v);
        if (seen.emplace(std::move(key), true).second)
            set.digits.push_back(v);
        if (set.digits.size() == pair.m)
            break;
    }
    if (set.digits.size() != pair.m)
        throw Error(ErrorCode::InternalInconsistency, "digit scan did not cover every residue class");
    return set;
}

/// Digit Cayley tables for both sides, the digit character pairing, and the
/// table of m-th roots of unity. Immutable once built.
class GroupContext {
public:
    GroupContext(DilationPair pair, DigitSet primal, DigitSet dual)
        : pair_(std::move(pair)), digits_{std::move(primal), std::move(dual)}
    {
        if (digits_[0].side != Side::primal || digits_[1].side != Side::dual)
            throw Error(ErrorCode::SideMismatch, "digit sets passed on the wrong sides");
        m_ = pair_.m;
        for (int s = 0; s < 2; ++s) {
            const Side side = s == 0 ? Side::primal : Side::dual;
            if (digits_[s].size() != m_)
                throw Error(ErrorCode::WrongCount, "digit set size differs from m");
            const IntMatrix adj = pair_.adjugate_for(side);
            std::map<IntVector, Digit> lookup;
            for (Digit i = 0; i < m_; ++i)
                if (!lookup.emplace(detail::residue_key(adj, pair_.det, digits_[s].digits[i]), i).second)
                    throw Error(ErrorCode::InternalInconsistency, "two digits share a residue class");
            cayley_[s].assign(std::size_t{m_} * m_, 0);
            inverse_[s].assign(m_, 0);
            for (Digit i = 0; i < m_; ++i)
                for (Digit j = 0; j < m_; ++j) {
                    IntVector sum = digits_[s].digits[i];
                    for (std::size_t c = 0; c < sum.size(); ++c)
                        sum[c] += digits_[s].digits[j][c];
                    const auto it = lookup.find(detail::residue_key(adj, pair_.det, sum));
                    if (it == lookup.end())
                        throw Error(ErrorCode::InternalInconsistency, "digit sum has no representative");
                    cayley_[s][i * m_ + j] = it->second;
                    if (it->second == 0)
                        inverse_[s][i] = j;
                }
        }

        const std::int64_t sign = pair_.det < 0 ? -1 : 1;
        pairing_.assign(std::size_t{m_} * m_, 0);
        for (Digit i = 0; i < m_; ++i) {
            const IntVector image = pair_.adjugate.apply(digits_[0].digits[i]);
            for (Digit j = 0; j < m_; ++j) {
                std::int64_t dot = 0;
                for (std::size_t c = 0; c < image.size(); ++c)
                    dot += image[c] * digits_[1].digits[j][c];
                pairing_[i * m_ + j] = static_cast<unsigned>(detail::floor_mod(sign * dot, m_));
            }
        }

        roots_.resize(m_);
        for (unsigned e = 0; e < m_; ++e) {
            // quarter turns are exact so sign patterns never pick up rounding
            if ((4 * e) % m_ == 0) {
                static constexpr Complex quarter[4] = {{1, 0}, {0, 1}, {-1, 0}, {0, -1}};
                roots_[e] = quarter[(4 * e) / m_];
            } else {
                roots_[e] = std::polar(1.0, 2.0 * std::numbers::pi * e / m_);
            }
        }
    }

    unsigned m() const noexcept { return m_; }
    std::size_t dim() const noexcept { return pair_.dim; }
    const DilationPair& pair() const noexcept { return pair_; }
    const DigitSet& digits(Side side) const noexcept { return digits_[side == Side::primal ? 0 : 1]; }

    Digit add(Side side, Digit a, Digit b) const { return cayley_[slot(side)][a * m_ + b]; }
    Digit negate(Side side, Digit a) const { return inverse_[slot(side)][a]; }

    /// E[i][j]: the digit character value is exp(2 pi i E[i][j] / m).
    unsigned pairing(Digit primal, Digit dual) const { return pairing_[primal * m_ + dual]; }
    Complex root(unsigned exponent) const { return roots_[exponent % m_]; }

private:
    static int slot(Side side) noexcept { return side == Side::primal ? 0 : 1; }

    DilationPair pair_;
    DigitSet digits_[2];
    unsigned m_ = 0;
    std::vector<Digit> cayley_[2];
    std::vector<Digit> inverse_[2];
    std::vector<unsigned> pairing_;
    std::vector<Complex> roots_;
};

using ContextPtr = std::shared_ptr<const GroupContext>;

inline ContextPtr build_group_context(DilationPair pair, DigitSet primal, DigitSet dual)
{
    return std::make_shared<const GroupContext>(std::move(pair), std::move(primal), std::move(dual));
}

/// Validates M and resolves both digit sets (generating any that are omitted).
inline ContextPtr make_context(const IntMatrix& M, const std::optional<std::vector<IntVector>>& primal = std::nullopt,
                               const std::optional<std::vector<IntVector>>& dual = std::nullopt)
{
    DilationPair pair = validate_dilation_pair(M);
    DigitSet d = resolve_digit_set(pair, Side::primal, primal);
    DigitSet dstar = resolve_digit_set(pair, Side::dual, dual);
    return build_group_context(std::move(pair), std::move(d), std::move(dstar));
}

/// Finite digit string. Digit digits_[i] sits at position low_ + i; the
/// representation is trimmed so that equality is structural.
class GroupElement {
public:
    explicit GroupElement(Side side = Side::primal) : side_(side) {}

    static GroupElement from_positions(Side side, int lowest, std::vector<Digit> digits)
    {
        GroupElement x(side);
        x.low_ = lowest;
        x.digits_ = std::move(digits);
        x.canonicalize();
        return x;
    }

    /// Positional notation: integer digits most significant first (the last
    /// one sits at position 0), then fractional digits at positions 1, 2, ...
    static GroupElement from_parts(Side side, std::span<const Digit> int_digits, std::span<const Digit> frac_digits = {})
    {
        std::vector<Digit> all(int_digits.begin(), int_digits.end());
        all.insert(all.end(), frac_digits.begin(), frac_digits.end());
        return from_positions(side, 1 - static_cast<int>(int_digits.size()), std::move(all));
    }
    static GroupElement from_parts(Side side, std::initializer_list<Digit> int_digits,
                                   std::initializer_list<Digit> frac_digits = {})
    {
        return from_parts(side, std::span<const Digit>(int_digits.begin(), int_digits.size()),
                          std::span<const Digit>(frac_digits.begin(), frac_digits.size()));
    }

    Side side() const noexcept { return side_; }
    bool is_neutral() const noexcept { return digits_.empty(); }

    /// Lowest / highest position carrying a nonzero digit (0 for the neutral element).
    int lowest_position() const noexcept { return low_; }
    int highest_position() const noexcept { return digits_.empty() ? 0 : low_ + static_cast<int>(digits_.size()) - 1; }

    Digit digit(int position) const noexcept
    {
        const long offset = static_cast<long>(position) - low_;
        if (offset < 0 || offset >= static_cast<long>(digits_.size()))
            return 0;
        return digits_[static_cast<std::size_t>(offset)];
    }

    std::vector<Digit> int_digits() const
    {
        std::vector<Digit> out;
        if (digits_.empty() || low_ > 0)
            return out;
        for (int p = low_; p <= 0; ++p)
            out.push_back(digit(p));
        return out;
    }

    std::vector<Digit> frac_digits() const
    {
        std::vector<Digit> out;
        for (int p = 1; p <= highest_position(); ++p)
            out.push_back(digit(p));
        return out;
    }

    bool in_H() const noexcept { return digits_.empty() || highest_position() <= 0; }

    bool operator==(const GroupElement&) const = default;

private:
    void canonicalize()
    {
        std::size_t first = 0;
        while (first < digits_.size() && digits_[first] == 0)
            ++first;
        if (first == digits_.size()) {
            digits_.clear();
            low_ = 0;
            return;
        }
        std::size_t last = digits_.size();
        while (digits_[last - 1] == 0)
            --last;
        digits_ = std::vector<Digit>(digits_.begin() + static_cast<long>(first), digits_.begin() + static_cast<long>(last));
        low_ += static_cast<int>(first);
    }

    Side side_;
    int low_ = 0;
    std::vector<Digit> digits_;
};

inline GroupElement add(const GroupContext& ctx, const GroupElement& x, const GroupElement& y)
{
    if (x.side() != y.side())
        throw Error(ErrorCode::SideMismatch, "cannot add elements of V and V*");
    if (x.is_neutral())
        return y;
    if (y.is_neutral())
        return x;
    const int lo = std::min(x.lowest_position(), y.lowest_position());
    const int hi = std::max(x.highest_position(), y.highest_position());
    std::vector<Digit> digits(static_cast<std::size_t>(hi - lo + 1));
    for (int p = lo; p <= hi; ++p)
        digits[static_cast<std::size_t>(p - lo)] = ctx.add(x.side(), x.digit(p), y.digit(p));
    return GroupElement::from_positions(x.side(), lo, std::move(digits));
}

inline GroupElement negate(const GroupContext& ctx, const GroupElement& x)
{
    std::vector<Digit> digits;
    for (int p = x.lowest_position(); p <= x.highest_position() && !x.is_neutral(); ++p)
        digits.push_back(ctx.negate(x.side(), x.digit(p)));
    return GroupElement::from_positions(x.side(), x.lowest_position(), std::move(digits));
}

inline GroupElement subtract(const GroupContext& ctx, const GroupElement& x, const GroupElement& y)
{
    return add(ctx, x, negate(ctx, y));
}

/// M^j x: the digit at position q moves to position q - j.
inline GroupElement dilate(const GroupElement& x, int j)
{
    if (x.is_neutral())
        return x;
    std::vector<Digit> digits;
    for (int p = x.lowest_position(); p <= x.highest_position(); ++p)
        digits.push_back(x.digit(p));
    return GroupElement::from_positions(x.side(), x.lowest_position() - j, std::move(digits));
}

namespace detail {

inline Index checked_mul(Index a, Index b)
{
    if (b != 0 && a > std::numeric_limits<Index>::max() / b)
        throw Error(ErrorCode::IndexOverflow, "index exceeds 64 bits");
    return a * b;
}

inline Index checked_pow(unsigned m, long p)
{
    if (p < 0)
        throw Error(ErrorCode::InvalidShape, "negative digit count");
    Index out = 1;
    for (long i = 0; i < p; ++i)
        out = checked_mul(out, m);
    return out;
}

inline std::vector<Digit> base_digits(Index k, unsigned m)
{
    std::vector<Digit> out;
    while (k > 0) {
        out.push_back(static_cast<Digit>(k % m));
        k /= m;
    }
    return out;
}

} // namespace detail

/// gamma_[k]: the element of H whose digit at position -j is the j-th base-m
/// digit of k.
inline GroupElement gamma_of(const GroupContext& ctx, Index k, Side side = Side::primal)
{
    const auto kd = detail::base_digits(k, ctx.m());
    std::vector<Digit> digits(kd.rbegin(), kd.rend());
    const int lowest = 1 - static_cast<int>(digits.size());
    return GroupElement::from_positions(side, lowest, std::move(digits));
}

struct CosetAddress {
    Side side = Side::primal;
    int n = 0;
    Index k = 0;

    bool operator==(const CosetAddress&) const = default;
};

/// The (n, k) with x in U_{n,k} = M^{-n} gamma_[k] + M^{-n} U.
inline CosetAddress coset_address(const GroupContext& ctx, const GroupElement& x, int n)
{
    CosetAddress out{x.side(), n, 0};
    if (x.is_neutral() || x.lowest_position() > n)
        return out;
    Index weight = 1;
    const int top = std::min(n, x.highest_position());
    for (int p = n; p > top; --p)
        weight = detail::checked_mul(weight, ctx.m());
    for (int p = top; p >= x.lowest_position(); --p) {
        out.k += detail::checked_mul(weight, x.digit(p));
        if (p > x.lowest_position())
            weight = detail::checked_mul(weight, ctx.m());
    }
    return out;
}

inline GroupElement coset_representative(const GroupContext& ctx, const CosetAddress& address)
{
    return dilate(gamma_of(ctx, address.k, address.side), -address.n);
}

/// k (+) l on gamma indices: digit-wise Cayley addition of base-m expansions.
inline Index gamma_add_index(const GroupContext& ctx, Side side, Index k, Index l)
{
    const unsigned m = ctx.m();
    Index out = 0, weight = 1;
    while (k > 0 || l > 0) {
        const Digit d = ctx.add(side, static_cast<Digit>(k % m), static_cast<Digit>(l % m));
        out += weight * d;
        k /= m;
        l /= m;
        if (k > 0 || l > 0)
            weight = detail::checked_mul(weight, m);
    }
    return out;
}

inline Index gamma_negate_index(const GroupContext& ctx, Side side, Index k)
{
    const unsigned m = ctx.m();
    Index out = 0, weight = 1;
    while (k > 0) {
        out += weight * ctx.negate(side, static_cast<Digit>(k % m));
        k /= m;
        if (k > 0)
            weight *= m;
    }
    return out;
}

/// p with chi(x, omega) = exp(2 pi i p / m); x in V pairs its digit at
/// position j with omega's digit at position 1 - j.
inline unsigned char_exponent(const GroupContext& ctx, const GroupElement& x, const GroupElement& omega)
{
    if (x.side() != Side::primal || omega.side() != Side::dual)
        throw Error(ErrorCode::SideMismatch, "char_exponent takes x in V and omega in V*");
    if (x.is_neutral() || omega.is_neutral())
        return 0;
    unsigned total = 0;
    for (int p = x.lowest_position(); p <= x.highest_position(); ++p)
        total += ctx.pairing(x.digit(p), omega.digit(1 - p));
    return total % ctx.m();
}

} // namespace vilenkin
