#pragma once

#include "tanks/tanks.hpp"

#include <string>

namespace fixtures {

using tanks::Rational;

inline Rational q(const char* s) { return tanks::parse_scalar<Rational>(s); }

/// Five-bank example with parameters a, b and cash eps on banks 2..4:
/// 1 owes a to 2 and 1-a to 5; 2 owes 2b to 5 and 2(1-b) to 3; 3 owes 3 to 4;
/// 4 owes 4 to 2; bank 1 holds 1.
inline tanks::FinancialNetwork<Rational> example1(Rational a, Rational b, Rational eps) {
    tanks::Matrix<Rational> l(5, 5);
    l(0, 1) = a;
    l(0, 4) = 1 - a;
    l(1, 4) = 2 * b;
    l(1, 2) = 2 * (1 - b);
    l(2, 3) = 3;
    l(3, 1) = 4;
    return tanks::build_network(std::move(l), {Rational(1), eps, eps, eps, Rational(0)});
}

inline tanks::FinancialNetwork<Rational> example_1a(Rational eps = Rational(1, 36)) {
    return example1(Rational(1, 3), Rational(1, 2), eps);
}
inline tanks::FinancialNetwork<Rational> example_1b() { return example1(Rational(2, 3), Rational(1, 2), Rational(0)); }
inline tanks::FinancialNetwork<Rational> example_1c() { return example1(Rational(0), Rational(0), Rational(0)); }

/// Example 1C with bank 4 owing 2 to bank 2 and 2 to bank 3.
inline tanks::FinancialNetwork<Rational> example_1c_variant() {
    tanks::Matrix<Rational> l(5, 5);
    l(0, 4) = 1;
    l(1, 2) = 2;
    l(2, 3) = 3;
    l(3, 1) = 2;
    l(3, 2) = 2;
    return tanks::build_network(std::move(l), {Rational(1), Rational(0), Rational(0), Rational(0), Rational(0)});
}

inline tanks::BankSet banks(std::initializer_list<std::size_t> one_based) {
    tanks::BankSet s;
    for (auto i : one_based) s.push_back(i - 1);
    return s;
}

inline tanks::Vector<Rational> vec(std::initializer_list<const char*> xs) {
    tanks::Vector<Rational> v;
    for (auto x : xs) v.push_back(q(x));
    return v;
}

inline std::string data_path(const std::string& name) {
#ifdef TANKS_DATA_DIR
    return std::string(TANKS_DATA_DIR) + "/" + name;
#else
    return "data/" + name;
#endif
}

}  // namespace fixtures
