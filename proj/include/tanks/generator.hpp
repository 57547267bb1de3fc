#pragma once

// Random networks for property runs and the `gen` subcommand. Draws go through
// raw mt19937_64 output (not the std distributions, whose algorithms differ
// between standard libraries) so a seed means the same network everywhere.

#include "tanks/network.hpp"

#include <cmath>
#include <cstdint>
#include <random>

namespace tanks {

struct GeneratorParams {
    std::size_t n = 5;
    double density = 0.5;
    double cash_scale = 2.0;
    double zero_cash_probability = 0.0;  // chance a bank starts with no cash
    std::uint64_t max_numerator = 32;    // liabilities are a/d, 1 <= a <= this
    std::uint64_t max_denominator = 8;   // 1 <= d <= this (at most 64)
};

namespace detail {

struct Draws {
    std::mt19937_64 rng;
    explicit Draws(std::uint64_t seed) : rng(seed) {}

    double unit() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }
    std::uint64_t between(std::uint64_t lo, std::uint64_t hi) { return lo + rng() % (hi - lo + 1); }
};

}  // namespace detail

template <class T = Rational>
FinancialNetwork<T> generate_network(std::uint64_t seed, const GeneratorParams& params) {
    if (params.n < 1) throw Error(ErrorKind::InvalidParams, "n must be at least 1");
    if (!(params.density > 0.0 && params.density <= 1.0)) throw Error(ErrorKind::InvalidParams, "density must lie in (0, 1]");
    if (!(params.cash_scale >= 0.0) || !std::isfinite(params.cash_scale))
        throw Error(ErrorKind::InvalidParams, "cash scale must be finite and nonnegative");
    if (!(params.zero_cash_probability >= 0.0 && params.zero_cash_probability <= 1.0))
        throw Error(ErrorKind::InvalidParams, "zero-cash probability must lie in [0, 1]");
    if (params.max_numerator < 1 || params.max_denominator < 1 || params.max_denominator > 64)
        throw Error(ErrorKind::InvalidParams, "liability numerator/denominator bounds out of range");

    const std::size_t n = params.n;
    detail::Draws d(seed);
    Matrix<Rational> l(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) {
            if (i == j) continue;
            // Always draw both values so density does not shift later draws.
            const bool edge = params.density >= 1.0 || d.unit() < params.density;
            const auto a = d.between(1, params.max_numerator);
            const auto b = d.between(1, params.max_denominator);
            if (edge) l(i, j) = Rational(static_cast<long long>(a), static_cast<long long>(b));
        }
    // Cash: cash_scale * k/64 with k in 1..64; exact zeros only via zero_cash_probability.
    const Rational scale = from_double<Rational>(params.cash_scale);
    Vector<Rational> cash(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool zero = d.unit() < params.zero_cash_probability;
        const auto k = d.between(1, 64);
        cash[i] = zero ? Rational(0) : Rational(scale * Rational(static_cast<long long>(k), 64LL));
    }
    auto net = build_network(std::move(l), std::move(cash));
    if constexpr (is_exact_v<T>)
        return net;
    else
        return convert_network<T>(net);
}

}  // namespace tanks
