#pragma once

// Continuous-time "banks as tanks" clearing flow, run as an event-driven
// discrete dynamical system. Between status changes every rate is constant:
// positive banks pay at full capacity 1, absorbing banks pay nothing, and zero
// banks pass on exactly what flows in (equilibrium rates from a transient
// linear system). Each step advances debts and cash linearly to the next
// moment some positive quantity reaches zero.

#include "tanks/markov.hpp"
#include "tanks/network.hpp"

#include <optional>
#include <string_view>

namespace tanks {

template <class T>
struct SystemState {
    T time{0};
    Partition partition;
    Vector<T> remaining_debt;
    Vector<T> cash;
    Vector<T> paid;
};

template <class T>
SystemState<T> initial_state(const FinancialNetwork<T>& net) {
    SystemState<T> s;
    s.time = T(0);
    s.partition = initial_partition(net);
    s.remaining_debt = net.total_debt();
    s.cash = net.cash();
    s.paid.assign(net.size(), T(0));
    return s;
}

template <class T>
struct IntervalRates {
    Vector<T> out;
    Vector<T> inflow;
    Vector<T> balance;  // inflow - out
};

template <class T>
struct BalanceRates {
    Vector<T> inflow;
    Vector<T> balance;
};

/// inflow = Q^T out, balance = inflow - out.
template <class T>
BalanceRates<T> balance_rates(const FinancialNetwork<T>& net, const Vector<T>& out) {
    if (out.size() != net.size()) throw Error(ErrorKind::DimensionMismatch, "out-rate vector has wrong length");
    for (const auto& u : out)
        if (u < T(0) || u > T(1) + net.zero_tolerance()) throw Error(ErrorKind::OutOfRange, "out-rate outside [0, 1]");
    BalanceRates<T> r;
    r.inflow = transpose_times(net.relative(), out);
    r.balance.resize(net.size());
    for (std::size_t i = 0; i < net.size(); ++i) r.balance[i] = r.inflow[i] - out[i];
    return r;
}

/// Out-rates for one interval: 1 on positive banks, 0 on absorbing and frozen
/// banks, and on the zero group the solution of v = e + Q_Z^T v with
/// e_i = sum over positive j of q_ji.
template <class T>
IntervalRates<T> equilibrium_rates(const FinancialNetwork<T>& net, const Partition& partition,
                                   const BankMask& frozen = {}) {
    const std::size_t n = net.size();
    if (partition.size() != n) throw Error(ErrorKind::DimensionMismatch, "partition has wrong length");
    auto is_frozen = [&frozen](std::size_t i) { return !frozen.empty() && frozen[i]; };

    Vector<T> out(n, T(0));
    BankSet zero_group;
    for (std::size_t i = 0; i < n; ++i) {
        if (is_frozen(i)) continue;
        if (partition[i] == Status::Positive) out[i] = T(1);
        if (partition[i] == Status::Zero) zero_group.push_back(i);
    }
    if (!zero_group.empty()) {
        auto sub = restrict_matrix(net.relative(), zero_group);
        if (!is_transient(sub))
            throw Error(ErrorKind::NonTransientZeroGroup, "zero group contains a closed class of banks");
        Vector<T> e(zero_group.size(), T(0));
        for (std::size_t r = 0; r < zero_group.size(); ++r)
            for (std::size_t j = 0; j < n; ++j)
                if (out[j] == T(1) && partition[j] == Status::Positive) e[r] += net.relative()(j, zero_group[r]);
        auto v = fundamental_solve(sub, e);
        for (std::size_t r = 0; r < zero_group.size(); ++r) out[zero_group[r]] = v[r];
    }
    auto br = balance_rates(net, out);
    IntervalRates<T> rates{std::move(out), std::move(br.inflow), std::move(br.balance)};
    for (auto i : zero_group) {
        if constexpr (is_exact_v<T>) {
            if (rates.balance[i] != T(0))
                throw Error(ErrorKind::InvariantViolation, "equilibrium rate does not balance its inflow");
        }
        rates.balance[i] = T(0);
    }
    return rates;
}

template <class T>
struct NextEvent {
    T duration;
    BankSet movers;  // every bank attaining the minimum
};

/// Time until the first positive debt or positive-bank cash reaches zero:
/// s_i = debt_i / out_i, t_i = -cash_i / balance_i, t' = min over both.
template <class T>
NextEvent<T> next_event(const SystemState<T>& state, const IntervalRates<T>& rates, const T& tol = T(0)) {
    const std::size_t n = state.cash.size();
    if (!state.partition.any(Status::Positive)) throw Error(ErrorKind::Stalled, "no positive bank left to drive the flow");
    std::vector<std::optional<T>> cand(n);
    std::optional<T> best;
    for (std::size_t i = 0; i < n; ++i) {
        const Status st = state.partition[i];
        if (st == Status::Absorbing) continue;
        std::optional<T> c;
        if (rates.out[i] > T(0) && state.remaining_debt[i] > T(0)) c = state.remaining_debt[i] / rates.out[i];
        if (st == Status::Positive && rates.balance[i] < T(0)) {
            T ti = -state.cash[i] / rates.balance[i];
            if (!c || ti < *c) c = ti;
        }
        cand[i] = c;
        if (c && (!best || *c < *best)) best = c;
    }
    if (!best) throw Error(ErrorKind::Stalled, "no finite event time");
    if (!(*best > T(0))) throw Error(ErrorKind::InvariantViolation, "zero-length interval");
    NextEvent<T> ev{*best, {}};
    for (std::size_t i = 0; i < n; ++i)
        if (cand[i] && *cand[i] <= *best + tol) ev.movers.push_back(i);
    return ev;
}

struct Transition {
    std::size_t bank;
    Status from;
    Status to;
};

template <class T>
struct FlowEvent {
    std::size_t k = 0;    // event index; the state after it is X_k
    T time{0};            // absolute time T_k
    T duration{0};        // length of the interval that ended here
    BankSet movers;
    std::vector<Transition> transitions;
    IntervalRates<T> rates;  // rates in force on the interval that ended here
    SystemState<T> state_after;
};

/// One application of the step map G: X_k -> X_{k+1}.
template <class T>
FlowEvent<T> step(const FinancialNetwork<T>& net, const SystemState<T>& state, const BankMask& frozen = {}) {
    const std::size_t n = net.size();
    const T tol = net.zero_tolerance();
    auto rates = equilibrium_rates(net, state.partition, frozen);
    auto ne = next_event(state, rates, tol);
    const T dt = ne.duration;

    FlowEvent<T> ev;
    ev.duration = dt;
    ev.time = state.time + dt;
    SystemState<T> next = state;
    next.time = ev.time;
    for (std::size_t i = 0; i < n; ++i) {
        next.remaining_debt[i] = state.remaining_debt[i] - rates.out[i] * dt;
        next.cash[i] = state.cash[i] + rates.balance[i] * dt;
        if constexpr (!is_exact_v<T>) {
            if (next.remaining_debt[i] < 0.0) next.remaining_debt[i] = 0.0;
            if (next.cash[i] < 0.0) next.cash[i] = 0.0;
        }
    }
    // Debt reaching zero wins over cash reaching zero.
    for (std::size_t i = 0; i < n; ++i) {
        const Status from = state.partition[i];
        if (from == Status::Absorbing) continue;
        Status to = from;
        if (rates.out[i] > T(0) && next.remaining_debt[i] <= tol) {
            next.remaining_debt[i] = T(0);
            to = Status::Absorbing;
        } else if (from == Status::Positive && next.cash[i] <= tol) {
            next.cash[i] = T(0);
            to = Status::Zero;
        }
        if (to != from) {
            next.partition.statuses[i] = to;
            ev.transitions.push_back({i, from, to});
            ev.movers.push_back(i);
        }
    }
    for (std::size_t i = 0; i < n; ++i) next.paid[i] = net.total_debt()[i] - next.remaining_debt[i];
    if constexpr (is_exact_v<T>) {
        if (ev.movers != ne.movers) throw Error(ErrorKind::InvariantViolation, "status changes disagree with event movers");
    }
    if (ev.movers.empty()) throw Error(ErrorKind::InvariantViolation, "event without a status change");
    ev.rates = std::move(rates);
    ev.state_after = std::move(next);
    return ev;
}

// ---------------------------------------------------------------------------
// Big Bang: resolving the initial zero group

template <class T>
struct BigBangIteration {
    BankSet candidates;    // tentatively positive initial-zero banks
    BankSet zero_group;    // banks solved by the equilibrium system
    Vector<T> zero_rates;  // solution over zero_group
    Vector<T> inflow;      // full in-rate vector (empty for the first solve if it had no closed part)
};

template <class T>
struct BigBangResult {
    Partition partition;
    BankSet revealed;  // initially-zero banks that must start positive
    std::vector<BigBangIteration<T>> iterations;
};

/// Modified initial partition. Zero-cash active banks whose inflow would
/// exceed their unit capacity start as positive; the rest keep equilibrium
/// rates below one. The first solve over the whole initial zero group marks
/// banks with rate >= 1 (and closed classes, whose rate is unbounded) as
/// candidates; later solves keep only candidates with in-rate > 1, until the
/// candidate set stops changing. Nonactive banks never flow and are left out.
template <class T>
BigBangResult<T> big_bang_partition(const FinancialNetwork<T>& net) {
    const std::size_t n = net.size();
    Partition p0 = initial_partition(net);
    BankMask active = set_to_mask(active_set(net), n);
    BankMask frozen(n);
    for (std::size_t i = 0; i < n; ++i) frozen[i] = !active[i];

    BankSet zero0;
    for (std::size_t i = 0; i < n; ++i)
        if (p0[i] == Status::Zero && active[i]) zero0.push_back(i);

    BigBangResult<T> result{p0, {}, {}};
    if (zero0.empty()) return result;

    // First solve. Split the zero group into the part that drains out of it
    // and the part that cannot (closed classes plus what feeds only them).
    auto sub = restrict_matrix(net.relative(), zero0);
    BankSet draining, trapped;
    {
        std::vector<bool> escapes(zero0.size(), false);
        std::deque<std::size_t> queue;
        for (std::size_t r = 0; r < zero0.size(); ++r)
            if (sub.leaks(r)) {
                escapes[r] = true;
                queue.push_back(r);
            }
        while (!queue.empty()) {
            auto s = queue.front();
            queue.pop_front();
            for (std::size_t r = 0; r < zero0.size(); ++r)
                if (!escapes[r] && sub(r, s) > T(0)) {
                    escapes[r] = true;
                    queue.push_back(r);
                }
        }
        for (std::size_t r = 0; r < zero0.size(); ++r) (escapes[r] ? draining : trapped).push_back(zero0[r]);
    }

    BankSet candidates = trapped;
    BigBangIteration<T> first{{}, draining, {}, {}};
    if (!draining.empty()) {
        auto dsub = restrict_matrix(net.relative(), draining);
        Vector<T> e(draining.size(), T(0));
        for (std::size_t r = 0; r < draining.size(); ++r)
            for (std::size_t j = 0; j < n; ++j)
                if (p0[j] == Status::Positive) e[r] += net.relative()(j, draining[r]);
        first.zero_rates = fundamental_solve(dsub, e);
        for (std::size_t r = 0; r < draining.size(); ++r)
            if (first.zero_rates[r] >= T(1)) candidates.push_back(draining[r]);
    }
    std::sort(candidates.begin(), candidates.end());
    first.candidates = candidates;
    result.iterations.push_back(first);

    while (!candidates.empty()) {
        Partition pm = p0;
        for (auto i : candidates) pm.statuses[i] = Status::Positive;
        auto rates = equilibrium_rates(net, pm, frozen);
        BigBangIteration<T> it{candidates, {}, {}, rates.inflow};
        for (auto i : zero0)
            if (!contains(candidates, i)) {
                it.zero_group.push_back(i);
                it.zero_rates.push_back(rates.out[i]);
                if (rates.out[i] > T(1) + net.zero_tolerance())
                    throw Error(ErrorKind::InvariantViolation, "zero-group rate above capacity after Big Bang demotion");
            }
        BankSet kept;
        for (auto i : candidates)
            if (rates.inflow[i] > T(1) + net.zero_tolerance()) kept.push_back(i);
        result.iterations.push_back(it);
        if (kept == candidates) {
            result.partition = pm;
            result.revealed = candidates;
            return result;
        }
        candidates = std::move(kept);
    }
    return result;
}

// ---------------------------------------------------------------------------
// Full run

enum class Algorithm { Flow, FictitiousDefaults, Picard };

constexpr std::string_view to_string(Algorithm a) noexcept {
    switch (a) {
        case Algorithm::Flow: return "flow";
        case Algorithm::FictitiousDefaults: return "fd";
        case Algorithm::Picard: return "picard";
    }
    return "?";
}

template <class T>
struct ClearingResult {
    Algorithm algorithm = Algorithm::Flow;
    Vector<T> payments;
    Partition final_partition;
    BankSet defaults;
    std::optional<T> total_time;  // flow only
    Vector<T> final_cash;         // flow only
    std::vector<FlowEvent<T>> trajectory;
    Partition start_partition;    // after the Big Bang override
    BankSet revealed;
    std::size_t event_count = 0;
};

struct FlowOptions {
    bool record_trajectory = true;
};

template <class T>
ClearingResult<T> run_flow(const FinancialNetwork<T>& net, FlowOptions opts = {}) {
    const std::size_t n = net.size();
    BankMask active = set_to_mask(active_set(net), n);
    BankMask frozen(n);
    for (std::size_t i = 0; i < n; ++i) frozen[i] = !active[i];

    auto bb = big_bang_partition(net);
    SystemState<T> state = initial_state(net);
    state.partition = bb.partition;

    ClearingResult<T> res;
    res.algorithm = Algorithm::Flow;
    res.start_partition = bb.partition;
    res.revealed = bb.revealed;

    std::size_t k = 0;
    while (state.partition.any(Status::Positive)) {
        auto ev = step(net, state, frozen);
        ev.k = ++k;
        if (k > 2 * n) throw Error(ErrorKind::InvariantViolation, "more than 2n status-change events");
        state = ev.state_after;
        if (opts.record_trajectory) res.trajectory.push_back(std::move(ev));
    }
    res.event_count = k;
    res.payments = state.paid;
    res.final_partition = state.partition;
    res.defaults = state.partition.zero();
    res.total_time = state.time;
    res.final_cash = state.cash;
    return res;
}

}  // namespace tanks
