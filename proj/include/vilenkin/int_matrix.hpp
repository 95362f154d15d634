#pragma once

#include "vilenkin/error.hpp"

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <ostream>
#include <vector>

namespace vilenkin {

using IntVector = std::vector<std::int64_t>;

/// Small dense integer matrix, row-major. Only what the dilation machinery
/// needs: products, transpose, exact determinant and adjugate.
class IntMatrix {
public:
    IntMatrix() = default;
    IntMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols, 0) {}
    IntMatrix(std::initializer_list<std::initializer_list<std::int64_t>> rows)
    {
        rows_ = rows.size();
        cols_ = rows_ == 0 ? 0 : rows.begin()->size();
        for (const auto& row : rows) {
            if (row.size() != cols_)
                throw Error(ErrorCode::NotSquare, "ragged matrix literal");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static IntMatrix from_rows(const std::vector<std::vector<std::int64_t>>& rows)
    {
        IntMatrix out(rows.size(), rows.empty() ? 0 : rows.front().size());
        for (std::size_t r = 0; r < rows.size(); ++r) {
            if (rows[r].size() != out.cols_)
                throw Error(ErrorCode::NotSquare, "ragged matrix rows");
            for (std::size_t c = 0; c < out.cols_; ++c)
                out(r, c) = rows[r][c];
        }
        return out;
    }

    static IntMatrix identity(std::size_t d)
    {
        IntMatrix out(d, d);
        for (std::size_t i = 0; i < d; ++i)
            out(i, i) = 1;
        return out;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    std::int64_t& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    std::int64_t operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    IntMatrix transposed() const
    {
        IntMatrix out(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out(c, r) = (*this)(r, c);
        return out;
    }

    IntVector apply(const IntVector& v) const
    {
        IntVector out(rows_, 0);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out[r] += (*this)(r, c) * v[c];
        return out;
    }

    friend IntMatrix operator*(const IntMatrix& a, const IntMatrix& b)
    {
        IntMatrix out(a.rows_, b.cols_);
        for (std::size_t r = 0; r < a.rows_; ++r)
            for (std::size_t k = 0; k < a.cols_; ++k)
                for (std::size_t c = 0; c < b.cols_; ++c)
                    out(r, c) += a(r, k) * b(k, c);
        return out;
    }

    std::vector<std::vector<std::int64_t>> to_rows() const
    {
        std::vector<std::vector<std::int64_t>> out(rows_, std::vector<std::int64_t>(cols_));
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c)
                out[r][c] = (*this)(r, c);
        return out;
    }

    bool operator==(const IntMatrix&) const = default;

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<std::int64_t> data_;
};

inline std::ostream& operator<<(std::ostream& os, const IntMatrix& a)
{
    os << '[';
    for (std::size_t r = 0; r < a.rows(); ++r) {
        os << (r ? ",[" : "[");
        for (std::size_t c = 0; c < a.cols(); ++c)
            os << (c ? "," : "") << a(r, c);
        os << ']';
    }
    return os << ']';
}

/// Fraction-free (Bareiss) elimination; exact for the desk-scale matrices we
/// handle, intermediates are kept in 128 bits.
namespace detail {
__extension__ typedef __int128 Wide;
} // namespace detail

inline std::int64_t determinant(const IntMatrix& a)
{
    if (!a.square())
        throw Error(ErrorCode::NotSquare, "determinant of a non-square matrix");
    const std::size_t d = a.rows();
    if (d == 0)
        return 1;
    std::vector<detail::Wide> w(d * d);
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c)
            w[r * d + c] = a(r, c);
    auto at = [&](std::size_t r, std::size_t c) -> detail::Wide& { return w[r * d + c]; };

    int sign = 1;
    detail::Wide prev = 1;
    for (std::size_t k = 0; k + 1 < d; ++k) {
        if (at(k, k) == 0) {
            std::size_t swap = k + 1;
            while (swap < d && at(swap, k) == 0)
                ++swap;
            if (swap == d)
                return 0;
            for (std::size_t c = 0; c < d; ++c)
                std::swap(at(k, c), at(swap, c));
            sign = -sign;
        }
        for (std::size_t i = k + 1; i < d; ++i)
            for (std::size_t j = k + 1; j < d; ++j)
                at(i, j) = (at(i, j) * at(k, k) - at(i, k) * at(k, j)) / prev;
        prev = at(k, k);
    }
    return static_cast<std::int64_t>(sign * at(d - 1, d - 1));
}

inline IntMatrix minor_matrix(const IntMatrix& a, std::size_t skip_row, std::size_t skip_col)
{
    IntMatrix out(a.rows() - 1, a.cols() - 1);
    for (std::size_t r = 0, rr = 0; r < a.rows(); ++r) {
        if (r == skip_row)
            continue;
        for (std::size_t c = 0, cc = 0; c < a.cols(); ++c) {
            if (c == skip_col)
                continue;
            out(rr, cc++) = a(r, c);
        }
        ++rr;
    }
    return out;
}

/// adj(A) with A * adj(A) = det(A) * I.
inline IntMatrix adjugate(const IntMatrix& a)
{
    if (!a.square())
        throw Error(ErrorCode::NotSquare, "adjugate of a non-square matrix");
    const std::size_t d = a.rows();
    IntMatrix out(d, d);
    if (d == 1) {
        out(0, 0) = 1;
        return out;
    }
    for (std::size_t r = 0; r < d; ++r)
        for (std::size_t c = 0; c < d; ++c) {
            const std::int64_t cof = determinant(minor_matrix(a, r, c));
            out(c, r) = ((r + c) % 2 == 0) ? cof : -cof;
        }
    return out;
}

} // namespace vilenkin
