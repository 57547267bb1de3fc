#pragma once

// Alternative clearing algorithms and solution-set analysis built on the
// clearing map Phi(p) = min(c + Q^T p, b).

#include "tanks/flow.hpp"

#include <algorithm>
#include <limits>

namespace tanks {

/// Phi(p) = min(cash + Q^T p, total_debt), componentwise.
template <class T>
Vector<T> phi(const FinancialNetwork<T>& net, const Vector<T>& p) {
    const std::size_t n = net.size();
    if (p.size() != n) throw Error(ErrorKind::DimensionMismatch, "payment vector has wrong length");
    const T tol = net.zero_tolerance();
    for (std::size_t i = 0; i < n; ++i)
        if (p[i] < -tol || p[i] > net.total_debt()[i] + tol)
            throw Error(ErrorKind::OutOfRange, "payment of bank " + net.id(i) + " outside [0, b_i]");
    auto in = transpose_times(net.relative(), p);
    Vector<T> out(n);
    for (std::size_t i = 0; i < n; ++i) {
        T v = net.cash()[i] + in[i];
        out[i] = v < net.total_debt()[i] ? v : net.total_debt()[i];
    }
    return out;
}

/// max_i |p_i - min(c_i + (Q^T p)_i, b_i)|; zero iff p clears the network.
template <class T>
T verify_clearing(const FinancialNetwork<T>& net, const Vector<T>& p) {
    if (p.size() != net.size()) throw Error(ErrorKind::DimensionMismatch, "payment vector has wrong length");
    auto in = transpose_times(net.relative(), p);
    T worst(0);
    for (std::size_t i = 0; i < net.size(); ++i) {
        T v = net.cash()[i] + in[i];
        T target = v < net.total_debt()[i] ? v : net.total_debt()[i];
        T r = abs_value(T(p[i] - target));
        if (r > worst) worst = r;
    }
    return worst;
}

// ---------------------------------------------------------------------------
// Fictitious defaults

template <class T>
struct FDSolve {
    BankSet set;     // D(k)
    Vector<T> input;  // e(k) over D(k)
    Vector<T> solution;  // r(k) over D(k)
};

template <class T>
struct FDTrace {
    std::vector<Vector<T>> iterates;  // p(1), p(2), ...
    std::vector<BankSet> default_sets;  // D(1), D(2), ...
    std::vector<FDSolve<T>> solves;
};

template <class T>
struct FDOutcome {
    ClearingResult<T> result;
    FDTrace<T> trace;
};

/// Fictitious defaults: start from p = b, alternate Phi with an exact solve of
/// the linear system on the current default set, until the default set stops
/// growing. Nonactive banks are held at zero payment and kept out of the
/// solves (their inflow from the active part is zero anyway).
template <class T>
FDOutcome<T> fictitious_defaults(const FinancialNetwork<T>& net) {
    const std::size_t n = net.size();
    const T tol = net.zero_tolerance();
    const auto& b = net.total_debt();
    const auto& q = net.relative();
    BankMask active = set_to_mask(active_set(net), n);

    auto defaults_of = [&](const Vector<T>& p) {
        BankSet d;
        for (std::size_t i = 0; i < n; ++i)
            if (active[i] && p[i] < b[i] - tol) d.push_back(i);
        return d;
    };
    auto pin_nonactive = [&](Vector<T> p) {
        for (std::size_t i = 0; i < n; ++i)
            if (!active[i]) p[i] = T(0);
        return p;
    };

    FDOutcome<T> out;
    Vector<T> base = pin_nonactive(b);  // p(0)
    Vector<T> p = pin_nonactive(phi(net, base));
    BankSet d = defaults_of(p);
    out.trace.iterates.push_back(p);
    out.trace.default_sets.push_back(d);

    while (!d.empty()) {
        BankMask in_d = set_to_mask(d, n);
        auto sub = restrict_matrix(q, d);
        Vector<T> e(d.size(), T(0));
        for (std::size_t r = 0; r < d.size(); ++r) {
            const std::size_t i = d[r];
            e[r] = net.cash()[i];
            for (std::size_t j = 0; j < n; ++j)
                if (!in_d[j] && q(j, i) != T(0)) e[r] += q(j, i) * base[j];
        }
        auto rsol = fundamental_solve(sub, e);
        Vector<T> s = base;
        for (std::size_t r = 0; r < d.size(); ++r) s[d[r]] = rsol[r];
        out.trace.solves.push_back({d, e, rsol});

        if constexpr (!is_exact_v<T>) {
            for (std::size_t i = 0; i < n; ++i) s[i] = std::clamp(s[i], 0.0, b[i]);
        }
        p = pin_nonactive(phi(net, s));
        BankSet next = defaults_of(p);
        out.trace.iterates.push_back(p);
        out.trace.default_sets.push_back(next);
        if (next == d) break;
        if (next.size() < d.size() || !std::includes(next.begin(), next.end(), d.begin(), d.end()))
            throw Error(ErrorKind::InvariantViolation, "fictitious default sets are not nested");
        d = std::move(next);
    }

    auto& res = out.result;
    res.algorithm = Algorithm::FictitiousDefaults;
    res.payments = p;
    res.final_partition.statuses.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        const bool short_paid = p[i] < b[i] - tol;
        res.final_partition.statuses[i] = short_paid ? Status::Zero : Status::Absorbing;
        if (short_paid) res.defaults.push_back(i);
    }
    return out;
}

// ---------------------------------------------------------------------------
// Picard iteration p <- Phi(p) from p = b: an oracle independent of both the
// flow and the linear solves.

template <class T>
struct PicardOptions {
    std::size_t max_iter = 0;  // 0: derived default
    double tol = 1e-12;        // target sup-norm distance to the fixed point, float only
};

template <class T>
std::size_t default_picard_cap(const FinancialNetwork<T>& net) {
    const std::size_t n = net.size();
    T total(0);
    for (const auto& x : net.total_debt()) total += x;
    T m = net.min_positive_datum();
    double ratio = m > T(0) ? to_double(T(total / m)) : 0.0;
    double cap = 10.0 * static_cast<double>(n) * (1.0 + ratio);
    if constexpr (!is_exact_v<T>) cap = std::max(cap, 1e6);
    cap = std::min(cap, 1e8);
    return static_cast<std::size_t>(cap);
}

template <class T>
struct PicardOutcome {
    Vector<T> payments;
    std::size_t iterations = 0;
};

template <class T>
PicardOutcome<T> picard_iterate(const FinancialNetwork<T>& net, PicardOptions<T> opts = {}) {
    const std::size_t cap = opts.max_iter ? opts.max_iter : default_picard_cap(net);
    Vector<T> p = net.total_debt();
    [[maybe_unused]] double prev_change = std::numeric_limits<double>::infinity();
    [[maybe_unused]] const double rounding = 8 * std::numeric_limits<double>::epsilon() * std::max(1.0, to_double(net.money_scale()));
    for (std::size_t it = 1; it <= cap; ++it) {
        Vector<T> next = phi(net, p);
        bool done;
        if constexpr (is_exact_v<T>) {
            done = next == p;
        } else {
            // Stop on a small step only once the observed contraction says the
            // remaining distance to the fixed point is small too.
            double change = 0.0;
            for (std::size_t i = 0; i < p.size(); ++i) change = std::max(change, std::abs(next[i] - p[i]));
            const double rho = change / prev_change;
            const double remaining = rho < 1.0 ? change * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
            done = change <= rounding || (change <= opts.tol && remaining <= 0.1 * opts.tol);
            prev_change = change;
        }
        p = std::move(next);
        if (done) return {std::move(p), it};
    }
    throw Error(ErrorKind::NoConvergence, "Picard iteration hit its cap of " + std::to_string(cap) + " iterations");
}

template <class T>
ClearingResult<T> picard_result(const FinancialNetwork<T>& net, const Vector<T>& payments) {
    ClearingResult<T> res;
    res.algorithm = Algorithm::Picard;
    res.payments = payments;
    const T tol = net.zero_tolerance();
    res.final_partition.statuses.resize(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) {
        const bool short_paid = payments[i] < net.total_debt()[i] - tol;
        res.final_partition.statuses[i] = short_paid ? Status::Zero : Status::Absorbing;
        if (short_paid) res.defaults.push_back(i);
    }
    return res;
}

// ---------------------------------------------------------------------------
// Solution family: basic (least) vector plus one generator per swamp.

template <class T>
struct SolutionFamily {
    Vector<T> basic;
    std::vector<SwampSolution<T>> swamps;
    Vector<T> greatest;
    bool unique = true;
    ClearingResult<T> flow;

    /// basic + sum_k weights[k] * p_{*k}, weights in [0, 1].
    Vector<T> member(const Vector<T>& weights) const {
        if (weights.size() != swamps.size()) throw Error(ErrorKind::DimensionMismatch, "one weight per swamp expected");
        Vector<T> p = basic;
        for (std::size_t k = 0; k < swamps.size(); ++k) {
            if (weights[k] < T(0) || weights[k] > T(1)) throw Error(ErrorKind::OutOfRange, "family weight outside [0, 1]");
            for (std::size_t r = 0; r < swamps[k].support.size(); ++r)
                p[swamps[k].support[r]] += weights[k] * swamps[k].payments[r];
        }
        return p;
    }
};

template <class T>
SolutionFamily<T> solution_family(const FinancialNetwork<T>& net, FlowOptions opts = {}) {
    SolutionFamily<T> fam;
    fam.flow = run_flow(net, opts);
    fam.basic = fam.flow.payments;
    auto dec = decompose_nonactive(net, active_set(net));
    for (const auto& swamp : dec.swamps) {
        auto dist = invariant_distribution(restrict_matrix(net.relative(), swamp));
        fam.swamps.push_back(swamp_solution(dist, net.total_debt()));
    }
    fam.unique = fam.swamps.empty();
    fam.greatest = fam.member(Vector<T>(fam.swamps.size(), T(1)));
    return fam;
}

// ---------------------------------------------------------------------------
// Bailout: cash injections into the defaulters so that every debt is paid.

template <class T>
struct BailoutPlan {
    Vector<T> unpaid;          // k_i = b_i - p_i (zero off the default set)
    BankSet defaulters;        // J_0(T*) of the unaided run
    Vector<T> surplus;         // final cash of the run with cash + k
    Vector<T> injections;      // x_i = k_i - surplus_i, clipped to [0, k_i]
    Vector<T> final_payments;  // run with cash + x
    Vector<T> final_cash;
    bool verified = false;
    std::vector<std::string> failures;
};

struct BailoutOptions {
    bool throw_on_failure = true;
};

/// Three passes: (1) unaided flow gives unpaid amounts k on the defaulters;
/// (2) rerun with cash + k there and read the leftover cash; (3) rerun with
/// cash + x, x = k - leftover, and check that every debt is paid and the
/// former defaulters end with zero cash.
template <class T>
BailoutPlan<T> bailout_vector(const FinancialNetwork<T>& net, BailoutOptions opts = {}) {
    const std::size_t n = net.size();
    const T tol = net.zero_tolerance();
    const FlowOptions quiet{false};
    BailoutPlan<T> plan;

    auto pass1 = run_flow(net, quiet);
    plan.defaulters = pass1.defaults;
    plan.unpaid.assign(n, T(0));
    for (auto i : plan.defaulters) plan.unpaid[i] = net.total_debt()[i] - pass1.payments[i];

    Vector<T> boosted = net.cash();
    for (auto i : plan.defaulters) boosted[i] += plan.unpaid[i];
    auto pass2 = run_flow(net.with_cash(boosted), quiet);
    plan.surplus = pass2.final_cash;

    plan.injections.assign(n, T(0));
    for (auto i : plan.defaulters) {
        T x = plan.unpaid[i] - plan.surplus[i];
        if (x < T(0)) x = T(0);
        if (x > plan.unpaid[i]) x = plan.unpaid[i];
        plan.injections[i] = x;
    }

    Vector<T> injected = net.cash();
    for (std::size_t i = 0; i < n; ++i) injected[i] += plan.injections[i];
    auto pass3 = run_flow(net.with_cash(injected), quiet);
    plan.final_payments = pass3.payments;
    plan.final_cash = pass3.final_cash;

    for (std::size_t i = 0; i < n; ++i)
        if (pass3.payments[i] < net.total_debt()[i] - tol)
            plan.failures.push_back("bank " + net.id(i) + " still short by " +
                                    to_string(T(net.total_debt()[i] - pass3.payments[i])));
    for (auto i : plan.defaulters)
        if (pass3.final_cash[i] > tol)
            plan.failures.push_back("former defaulter " + net.id(i) + " ends with cash " + to_string(pass3.final_cash[i]));
    plan.verified = plan.failures.empty();
    if (!plan.verified && opts.throw_on_failure) {
        std::string msg = "bailout verification failed";
        for (const auto& f : plan.failures) msg += "; " + f;
        throw Error(ErrorKind::VerificationFailed, msg);
    }
    return plan;
}

}  // namespace tanks
