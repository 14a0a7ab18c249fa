#pragma once

#include <cstdint>
#include <initializer_list>
#include <string>
#include <vector>

#include "linktomo/error.hpp"

namespace linktomo {

/// Dense row-major matrix. Small and boring on purpose: every matrix in this
/// library is desk-scale, so there is no sparsity or expression machinery.
template <typename T>
class Matrix {
public:
    Matrix() = default;

    Matrix(std::size_t rows, std::size_t cols, T fill = T{})
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ == 0 ? 0 : init.begin()->size();
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) fail(Errc::bad_input, "ragged matrix initializer");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool empty() const noexcept { return data_.empty(); }

    T& operator()(std::size_t i, std::size_t j) { return data_[i * cols_ + j]; }
    const T& operator()(std::size_t i, std::size_t j) const { return data_[i * cols_ + j]; }

    const std::vector<T>& data() const noexcept { return data_; }

    bool operator==(const Matrix& other) const = default;

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T{1};
        return m;
    }

    Matrix transposed() const {
        Matrix t(cols_, rows_);
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = 0; j < cols_; ++j) t(j, i) = (*this)(i, j);
        return t;
    }

    bool is_square() const noexcept { return rows_ == cols_; }

    bool is_symmetric() const {
        if (!is_square()) return false;
        for (std::size_t i = 0; i < rows_; ++i)
            for (std::size_t j = i + 1; j < cols_; ++j)
                if ((*this)(i, j) != (*this)(j, i)) return false;
        return true;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

using BinMatrix = Matrix<std::uint8_t>;
using IntMatrix = Matrix<long long>;

/// Integer matrix product with overflow detection; walk counts must never
/// silently wrap.
inline IntMatrix checked_mul(const IntMatrix& a, const IntMatrix& b) {
    if (a.cols() != b.rows()) fail(Errc::bad_input, "matrix dimension mismatch");
    IntMatrix out(a.rows(), b.cols());
    for (std::size_t i = 0; i < a.rows(); ++i) {
        for (std::size_t k = 0; k < a.cols(); ++k) {
            long long aik = a(i, k);
            if (aik == 0) continue;
            for (std::size_t j = 0; j < b.cols(); ++j) {
                long long term;
                if (__builtin_mul_overflow(aik, b(k, j), &term) ||
                    __builtin_add_overflow(out(i, j), term, &out(i, j)))
                    fail(Errc::bad_input, "integer overflow in matrix product");
            }
        }
    }
    return out;
}

/// Square integer matrix with row/column labels (vertex or link names).
struct LabeledIntMatrix {
    IntMatrix values;
    std::vector<std::string> labels;

    std::size_t size() const noexcept { return values.rows(); }
};

} // namespace linktomo
