#pragma once

// JSON views of solver outputs: result documents, flow trace lines, solution
// families and bailout plans. Scalars are "p/q" strings for exact types and
// plain numbers for doubles.

#include "tanks/network_io.hpp"
#include "tanks/solvers.hpp"

namespace tanks {

template <class T>
json swamps_json(const FinancialNetwork<T>& net, const std::vector<SwampSolution<T>>& swamps, bool with_payments) {
    json a = json::array();
    for (const auto& s : swamps) {
        json o;
        o["banks"] = ids_json(net, s.support);
        o["pi"] = scalars_json(s.pi);
        o["m"] = scalar_json(s.scale);
        if (with_payments) o["payments"] = scalars_json(s.payments);
        a.push_back(std::move(o));
    }
    return a;
}

/// {"algorithm", "payments", "defaults", "total_time", "unique", "swamps",
///  "greatest", "residual"}
template <class T>
json result_json(const FinancialNetwork<T>& net, const ClearingResult<T>& res, const SolutionFamily<T>& fam) {
    json o;
    o["algorithm"] = std::string(to_string(res.algorithm));
    o["payments"] = scalars_json(res.payments);
    o["defaults"] = ids_json(net, res.defaults);
    o["total_time"] = res.total_time ? scalar_json(*res.total_time) : json(nullptr);
    o["unique"] = fam.unique;
    o["swamps"] = swamps_json(net, fam.swamps, false);
    o["greatest"] = scalars_json(fam.greatest);
    o["residual"] = scalar_json(verify_clearing(net, res.payments));
    return o;
}

inline json transition_json(const std::vector<std::string>& ids, const Transition& t) {
    return {{"id", ids.at(t.bank)}, {"from", std::string(to_string(t.from))}, {"to", std::string(to_string(t.to))}};
}

/// One trace line: {"k", "time", "movers", "transitions", "debt", "cash", "out_rates"}.
template <class T>
json event_json(const FinancialNetwork<T>& net, const FlowEvent<T>& ev) {
    json o;
    o["k"] = ev.k;
    o["time"] = scalar_json(ev.time);
    o["movers"] = ids_json(net, ev.movers);
    json tr = json::array();
    for (const auto& t : ev.transitions) tr.push_back(transition_json(net.ids(), t));
    o["transitions"] = std::move(tr);
    o["debt"] = scalars_json(ev.state_after.remaining_debt);
    o["cash"] = scalars_json(ev.state_after.cash);
    o["out_rates"] = scalars_json(ev.rates.out);
    return o;
}

template <class T>
std::string trace_lines(const FinancialNetwork<T>& net, const ClearingResult<T>& res) {
    std::string out;
    for (const auto& ev : res.trajectory) out += event_json(net, ev).dump() + "\n";
    return out;
}

template <class T>
json family_json(const FinancialNetwork<T>& net, const SolutionFamily<T>& fam) {
    json o;
    o["basic"] = scalars_json(fam.basic);
    o["unique"] = fam.unique;
    o["swamps"] = swamps_json(net, fam.swamps, true);
    o["greatest"] = scalars_json(fam.greatest);
    return o;
}

template <class T>
json bailout_json(const FinancialNetwork<T>& net, const BailoutPlan<T>& plan) {
    json o;
    o["defaults"] = ids_json(net, plan.defaulters);
    o["unpaid"] = scalars_json(plan.unpaid);
    o["surplus"] = scalars_json(plan.surplus);
    o["injections"] = scalars_json(plan.injections);
    o["final_payments"] = scalars_json(plan.final_payments);
    o["final_cash"] = scalars_json(plan.final_cash);
    o["verified"] = plan.verified;
    o["failures"] = plan.failures;
    return o;
}

}  // namespace tanks
