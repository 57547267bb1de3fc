#pragma once

#include "tanks/matrix.hpp"
#include "tanks/scalar.hpp"

#include <cmath>
#include <numeric>
#include <optional>

namespace tanks {

/// Solves A x = rhs by Gaussian elimination. Exact scalars use full pivoting
/// (any nonzero pivot is exact, the largest keeps it symmetric with the float
/// path); doubles use partial pivoting. Returns nullopt when A is singular.
template <class T>
std::optional<Vector<T>> gauss_solve(Matrix<T> a, Vector<T> rhs) {
    const std::size_t n = a.rows();
    if (!a.square() || rhs.size() != n) throw Error(ErrorKind::DimensionMismatch, "gauss_solve: shape mismatch");

    std::vector<std::size_t> col_of(n);
    std::iota(col_of.begin(), col_of.end(), std::size_t{0});

    double scale = 0.0;
    if constexpr (!is_exact_v<T>) {
        for (std::size_t r = 0; r < n; ++r)
            for (std::size_t c = 0; c < n; ++c) scale = std::max(scale, std::abs(a(r, c)));
    }

    for (std::size_t k = 0; k < n; ++k) {
        std::size_t prow = k, pcol = k;
        T best = abs_value(a(k, k));
        if constexpr (is_exact_v<T>) {
            for (std::size_t r = k; r < n; ++r)
                for (std::size_t c = k; c < n; ++c)
                    if (abs_value(a(r, c)) > best) {
                        best = abs_value(a(r, c));
                        prow = r;
                        pcol = c;
                    }
            if (best == T(0)) return std::nullopt;
        } else {
            for (std::size_t r = k + 1; r < n; ++r)
                if (abs_value(a(r, k)) > best) {
                    best = abs_value(a(r, k));
                    prow = r;
                }
            if (best <= 1e-14 * scale || best == 0.0) return std::nullopt;
        }
        a.swap_rows(k, prow);
        std::swap(rhs[k], rhs[prow]);
        if (pcol != k) {
            for (std::size_t r = 0; r < n; ++r) std::swap(a(r, k), a(r, pcol));
            std::swap(col_of[k], col_of[pcol]);
        }
        for (std::size_t r = k + 1; r < n; ++r) {
            if (a(r, k) == T(0)) continue;
            T f = a(r, k) / a(k, k);
            for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
            rhs[r] -= f * rhs[k];
        }
    }

    Vector<T> y(n, T(0));
    for (std::size_t k = n; k-- > 0;) {
        T acc = rhs[k];
        for (std::size_t c = k + 1; c < n; ++c) acc -= a(k, c) * y[c];
        y[k] = acc / a(k, k);
    }
    Vector<T> x(n, T(0));
    for (std::size_t k = 0; k < n; ++k) x[col_of[k]] = y[k];
    return x;
}

/// Exact determinant by fraction-free elimination; debugging aid for the
/// reachability-based transience test.
template <class T>
T determinant(Matrix<T> a) {
    const std::size_t n = a.rows();
    T det(1);
    for (std::size_t k = 0; k < n; ++k) {
        std::size_t p = k;
        while (p < n && a(p, k) == T(0)) ++p;
        if (p == n) return T(0);
        if (p != k) {
            a.swap_rows(p, k);
            det = -det;
        }
        det *= a(k, k);
        for (std::size_t r = k + 1; r < n; ++r) {
            T f = a(r, k) / a(k, k);
            for (std::size_t c = k; c < n; ++c) a(r, c) -= f * a(k, c);
        }
    }
    return det;
}

}  // namespace tanks
