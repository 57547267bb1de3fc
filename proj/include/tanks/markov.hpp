#pragma once

// Linear-algebraic and graph kernel over the relative-liabilities matrix:
// restriction to a bank subset, transience, fundamental-matrix solves, the
// active set, and the ergodic ("swamp") decomposition of the nonactive banks.

#include "tanks/linear_solve.hpp"
#include "tanks/network.hpp"

#include <algorithm>
#include <cassert>
#include <deque>
#include <functional>

namespace tanks {

/// Q restricted to rows and columns in an index set B (order as given).
/// `leaks(r)` records whether state B[r] has positive mass leaving B in the
/// parent matrix; it is what the transience test runs on.
template <class T>
class SubMatrix {
public:
    SubMatrix(BankSet index_set, Matrix<T> entries, std::vector<bool> leaks)
        : index_set_(std::move(index_set)), entries_(std::move(entries)), leaks_(std::move(leaks)) {}

    std::size_t size() const noexcept { return index_set_.size(); }
    const BankSet& index_set() const noexcept { return index_set_; }
    const Matrix<T>& entries() const noexcept { return entries_; }
    const T& operator()(std::size_t r, std::size_t s) const { return entries_(r, s); }
    bool leaks(std::size_t r) const { return leaks_.at(r); }

    /// Row r sums to one within B (no exit).
    bool closed_row(std::size_t r) const { return !leaks_.at(r); }

private:
    BankSet index_set_;
    Matrix<T> entries_;
    std::vector<bool> leaks_;
};

template <class T>
SubMatrix<T> restrict_matrix(const Matrix<T>& q, const BankSet& b) {
    if (b.empty()) throw Error(ErrorKind::EmptySet, "restriction to an empty bank set");
    const std::size_t n = q.rows();
    BankMask in(n, false);
    for (auto i : b) {
        if (i >= n) throw Error(ErrorKind::IndexOutOfRange, "bank index " + std::to_string(i) + " out of range");
        if (in[i]) throw Error(ErrorKind::IndexOutOfRange, "bank index " + std::to_string(i) + " repeated");
        in[i] = true;
    }
    Matrix<T> e(b.size(), b.size());
    std::vector<bool> leaks(b.size(), false);
    for (std::size_t r = 0; r < b.size(); ++r) {
        for (std::size_t s = 0; s < b.size(); ++s) e(r, s) = q(b[r], b[s]);
        for (std::size_t j = 0; j < n; ++j)
            if (!in[j] && q(b[r], j) > T(0)) leaks[r] = true;
    }
    return SubMatrix<T>(b, std::move(e), std::move(leaks));
}

/// Restriction of a SubMatrix to a subset of its own index set (given as
/// parent bank indices).
template <class T>
SubMatrix<T> restrict_matrix(const SubMatrix<T>& sub, const BankSet& b) {
    if (b.empty()) throw Error(ErrorKind::EmptySet, "restriction to an empty bank set");
    std::vector<std::size_t> pos;
    for (auto i : b) {
        auto it = std::find(sub.index_set().begin(), sub.index_set().end(), i);
        if (it == sub.index_set().end())
            throw Error(ErrorKind::IndexOutOfRange, "bank " + std::to_string(i) + " not in parent index set");
        pos.push_back(static_cast<std::size_t>(it - sub.index_set().begin()));
    }
    Matrix<T> e(b.size(), b.size());
    std::vector<bool> leaks(b.size(), false);
    for (std::size_t r = 0; r < b.size(); ++r) {
        leaks[r] = sub.leaks(pos[r]);
        for (std::size_t s = 0; s < b.size(); ++s) e(r, s) = sub(pos[r], pos[s]);
        for (std::size_t s = 0; s < sub.size(); ++s)
            if (std::find(pos.begin(), pos.end(), s) == pos.end() && sub(pos[r], s) > T(0)) leaks[r] = true;
    }
    return SubMatrix<T>(b, std::move(e), std::move(leaks));
}

/// True iff every state of B can reach, along positive entries, a state with
/// mass leaving B; equivalently I_B - Q_B is invertible.
template <class T>
bool is_transient(const SubMatrix<T>& sub) {
    const std::size_t m = sub.size();
    // Backward search from the leaking states.
    std::vector<bool> escapes(m, false);
    std::deque<std::size_t> queue;
    for (std::size_t r = 0; r < m; ++r)
        if (sub.leaks(r)) {
            escapes[r] = true;
            queue.push_back(r);
        }
    while (!queue.empty()) {
        auto s = queue.front();
        queue.pop_front();
        for (std::size_t r = 0; r < m; ++r)
            if (!escapes[r] && sub(r, s) > T(0)) {
                escapes[r] = true;
                queue.push_back(r);
            }
    }
    const bool transient = std::all_of(escapes.begin(), escapes.end(), [](bool b) { return b; });
#ifndef NDEBUG
    if constexpr (is_exact_v<T>) {
        Matrix<T> a = Matrix<T>::identity(m);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t s = 0; s < m; ++s) a(r, s) -= sub(r, s);
        assert(transient == (determinant(a) != T(0)));
    }
#endif
    return transient;
}

/// Unique v with v = e + Q_B^T v, i.e. v = (I - Q_B^T)^{-1} e.
template <class T>
Vector<T> fundamental_solve(const SubMatrix<T>& sub, const Vector<T>& e) {
    const std::size_t m = sub.size();
    if (e.size() != m) throw Error(ErrorKind::DimensionMismatch, "input vector does not match the restricted set");
    for (const auto& x : e)
        if (x < T(0)) throw Error(ErrorKind::NegativeInput, "fundamental_solve input has a negative entry");
    if (!is_transient(sub)) throw Error(ErrorKind::SingularSystem, "restricted matrix is not transient");
    Matrix<T> a(m, m);
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = 0; s < m; ++s) a(r, s) = (r == s ? T(1) : T(0)) - sub(s, r);
    auto v = gauss_solve(std::move(a), e);
    if (!v) throw Error(ErrorKind::SingularSystem, "elimination found a zero pivot");
    if constexpr (!is_exact_v<T>) {
        for (auto& x : *v)
            if (x < 0.0) x = 0.0;
    }
    return *v;
}

/// Banks reachable along debt edges (debtor -> creditor) from the banks with
/// positive cash.
template <class T>
BankSet active_set(const FinancialNetwork<T>& net) {
    const std::size_t n = net.size();
    BankMask active(n, false);
    std::deque<std::size_t> queue;
    for (std::size_t i = 0; i < n; ++i)
        if (net.cash()[i] > T(0)) {
            active[i] = true;
            queue.push_back(i);
        }
    while (!queue.empty()) {
        auto k = queue.front();
        queue.pop_front();
        for (std::size_t j = 0; j < n; ++j)
            if (!active[j] && net.has_creditor_link(k, j)) {
                active[j] = true;
                queue.push_back(j);
            }
    }
    return mask_to_set(active);
}

namespace detail {

/// Strongly connected components of the subgraph induced by `nodes`, with an
/// edge i -> j whenever edge(i, j). Components come back in reverse
/// topological order (Tarjan); members of each component sorted.
inline std::vector<BankSet> strongly_connected(const BankSet& nodes,
                                               const std::function<bool(std::size_t, std::size_t)>& edge) {
    const std::size_t m = nodes.size();
    std::vector<int> index(m, -1), low(m, 0);
    std::vector<bool> on_stack(m, false);
    std::vector<std::size_t> stack;
    std::vector<BankSet> comps;
    int counter = 0;

    std::function<void(std::size_t)> visit = [&](std::size_t v) {
        index[v] = low[v] = counter++;
        stack.push_back(v);
        on_stack[v] = true;
        for (std::size_t w = 0; w < m; ++w) {
            if (!edge(nodes[v], nodes[w])) continue;
            if (index[w] < 0) {
                visit(w);
                low[v] = std::min(low[v], low[w]);
            } else if (on_stack[w]) {
                low[v] = std::min(low[v], index[w]);
            }
        }
        if (low[v] == index[v]) {
            BankSet comp;
            std::size_t w;
            do {
                w = stack.back();
                stack.pop_back();
                on_stack[w] = false;
                comp.push_back(nodes[w]);
            } while (w != v);
            std::sort(comp.begin(), comp.end());
            comps.push_back(std::move(comp));
        }
    };
    for (std::size_t v = 0; v < m; ++v)
        if (index[v] < 0) visit(v);
    return comps;
}

}  // namespace detail

struct SwampDecomposition {
    BankSet active;
    BankSet nonactive_absorbing;   // nonactive, nothing owed
    BankSet transient_nonactive;   // nonactive, can drain toward A or A'_*
    std::vector<BankSet> swamps;   // closed communicating classes of nonactive debtors
};

template <class T>
SwampDecomposition decompose_nonactive(const FinancialNetwork<T>& net, const BankSet& active) {
    const std::size_t n = net.size();
    SwampDecomposition d;
    d.active = active;
    std::sort(d.active.begin(), d.active.end());
    BankMask is_active = set_to_mask(d.active, n);

    BankSet debtors;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_active[i]) continue;
        if (net.total_debt()[i] == T(0))
            d.nonactive_absorbing.push_back(i);
        else
            debtors.push_back(i);
    }
    auto edge = [&net](std::size_t i, std::size_t j) { return net.has_creditor_link(i, j); };
    auto comps = detail::strongly_connected(debtors, edge);
    for (auto& comp : comps) {
        bool closed = true;
        for (auto i : comp) {
            for (std::size_t j = 0; j < n && closed; ++j)
                if (edge(i, j) && !std::binary_search(comp.begin(), comp.end(), j)) closed = false;
            if (!closed) break;
        }
        if (closed)
            d.swamps.push_back(comp);
        else
            d.transient_nonactive.insert(d.transient_nonactive.end(), comp.begin(), comp.end());
    }
    std::sort(d.transient_nonactive.begin(), d.transient_nonactive.end());
    std::sort(d.swamps.begin(), d.swamps.end(), [](const BankSet& a, const BankSet& b) { return a.front() < b.front(); });
    return d;
}

template <class T>
struct InvariantDistribution {
    BankSet support;
    Vector<T> weights;  // over support, positive, sums to 1
};

/// Unique probability vector pi with pi = Q_S^T pi on an ergodic restriction.
template <class T>
InvariantDistribution<T> invariant_distribution(const SubMatrix<T>& sub) {
    const std::size_t m = sub.size();
    for (std::size_t r = 0; r < m; ++r)
        if (!sub.closed_row(r)) throw Error(ErrorKind::NotErgodic, "restricted chain has exits");
    BankSet local(m);
    for (std::size_t r = 0; r < m; ++r) local[r] = r;
    auto comps = detail::strongly_connected(local, [&sub](std::size_t a, std::size_t b) { return sub(a, b) > T(0); });
    if (comps.size() != 1) throw Error(ErrorKind::NotErgodic, "restricted chain is not irreducible");

    // (Q^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    Matrix<T> a(m, m);
    Vector<T> rhs(m, T(0));
    for (std::size_t r = 0; r < m; ++r)
        for (std::size_t s = 0; s < m; ++s) a(r, s) = sub(s, r) - (r == s ? T(1) : T(0));
    for (std::size_t s = 0; s < m; ++s) a(m - 1, s) = T(1);
    rhs[m - 1] = T(1);
    auto pi = gauss_solve(std::move(a), std::move(rhs));
    if (!pi) throw Error(ErrorKind::NotErgodic, "invariant distribution system is singular");
    for (const auto& w : *pi)
        if (!(w > T(0))) throw Error(ErrorKind::NotErgodic, "invariant distribution is not strictly positive");
    return {sub.index_set(), std::move(*pi)};
}

template <class T>
struct SwampSolution {
    BankSet support;
    Vector<T> pi;
    T scale;          // m = min_i b_i / pi_i
    Vector<T> payments;  // m * pi over support
};

/// Largest multiple of the invariant distribution that respects every debt.
template <class T>
SwampSolution<T> swamp_solution(const InvariantDistribution<T>& dist, const Vector<T>& total_debt) {
    if (dist.support.empty()) throw Error(ErrorKind::EmptySet, "empty swamp");
    T m(0);
    bool first = true;
    for (std::size_t r = 0; r < dist.support.size(); ++r) {
        const T& b = total_debt.at(dist.support[r]);
        if (b <= T(0)) throw Error(ErrorKind::ZeroDebtInSwamp, "swamp bank " + std::to_string(dist.support[r]) + " owes nothing");
        T ratio = b / dist.weights[r];
        if (first || ratio < m) {
            m = ratio;
            first = false;
        }
    }
    Vector<T> p(dist.support.size());
    for (std::size_t r = 0; r < p.size(); ++r) p[r] = m * dist.weights[r];
    return {dist.support, dist.weights, m, std::move(p)};
}

}  // namespace tanks
