#pragma once

#include "tanks/error.hpp"

#include <algorithm>
#include <cstddef>
#include <initializer_list>
#include <string>
#include <utility>
#include <vector>

namespace tanks {

using BankSet = std::vector<std::size_t>;  // sorted or caller-ordered indices
using BankMask = std::vector<bool>;

template <class T>
using Vector = std::vector<T>;

/// Dense row-major matrix. Sizes here are desk scale, so no sparse storage.
template <class T>
class Matrix {
public:
    Matrix() = default;
    Matrix(std::size_t rows, std::size_t cols, const T& fill = T(0))
        : rows_(rows), cols_(cols), data_(rows * cols, fill) {}

    Matrix(std::initializer_list<std::initializer_list<T>> init) {
        rows_ = init.size();
        cols_ = rows_ ? init.begin()->size() : 0;
        data_.reserve(rows_ * cols_);
        for (const auto& row : init) {
            if (row.size() != cols_) throw Error(ErrorKind::DimensionMismatch, "ragged matrix literal");
            data_.insert(data_.end(), row.begin(), row.end());
        }
    }

    static Matrix identity(std::size_t n) {
        Matrix m(n, n);
        for (std::size_t i = 0; i < n; ++i) m(i, i) = T(1);
        return m;
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    bool square() const noexcept { return rows_ == cols_; }

    T& operator()(std::size_t r, std::size_t c) { return data_[r * cols_ + c]; }
    const T& operator()(std::size_t r, std::size_t c) const { return data_[r * cols_ + c]; }

    Matrix transpose() const {
        Matrix t(cols_, rows_);
        for (std::size_t r = 0; r < rows_; ++r)
            for (std::size_t c = 0; c < cols_; ++c) t(c, r) = (*this)(r, c);
        return t;
    }

    void swap_rows(std::size_t a, std::size_t b) {
        if (a == b) return;
        for (std::size_t c = 0; c < cols_; ++c) std::swap((*this)(a, c), (*this)(b, c));
    }

    friend bool operator==(const Matrix& a, const Matrix& b) {
        return a.rows_ == b.rows_ && a.cols_ == b.cols_ && a.data_ == b.data_;
    }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<T> data_;
};

/// y = A^T x
template <class T>
Vector<T> transpose_times(const Matrix<T>& a, const Vector<T>& x) {
    Vector<T> y(a.cols(), T(0));
    for (std::size_t r = 0; r < a.rows(); ++r) {
        if (x[r] == T(0)) continue;
        for (std::size_t c = 0; c < a.cols(); ++c)
            if (a(r, c) != T(0)) y[c] += a(r, c) * x[r];
    }
    return y;
}

inline bool contains(const BankSet& set, std::size_t i) {
    return std::find(set.begin(), set.end(), i) != set.end();
}

inline BankSet mask_to_set(const BankMask& mask) {
    BankSet s;
    for (std::size_t i = 0; i < mask.size(); ++i)
        if (mask[i]) s.push_back(i);
    return s;
}

inline BankMask set_to_mask(const BankSet& set, std::size_t n) {
    BankMask m(n, false);
    for (auto i : set) m.at(i) = true;
    return m;
}

}  // namespace tanks
