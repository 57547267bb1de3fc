#pragma once

// Command-line front end. run_cli() takes explicit streams so tests can drive
// it in-process; tools/tanks.cpp is a thin main around it.
//
// Exit codes: 0 success, 2 validation or usage error, 3 solver error (also a
// failed bailout verification or a compare disagreement).

#include "tanks/generator.hpp"
#include "tanks/result_io.hpp"

#include "CLI11.hpp"

#include <atomic>
#include <fstream>
#include <iostream>
#include <iterator>
#include <mutex>
#include <optional>
#include <sstream>
#include <thread>

namespace tanks {

struct RunConfig {
    std::string algorithm = "flow";  // flow | fd | picard | all
    std::string mode = "rational";   // rational | float
    bool trace = false;
    std::uint64_t seed = 1;
    std::optional<double> tolerance;  // Picard stop tolerance, float mode only
    std::size_t picard_max_iter = 0;
};

namespace cli_detail {

constexpr int exit_ok = 0;
constexpr int exit_validation = 2;
constexpr int exit_solver = 3;

struct Input {
    std::string path = "-";
    std::string liabilities_csv;  // when set, `path` is the banks CSV
};

inline std::string read_text(const std::string& path, std::istream& in) {
    if (path == "-") return std::string(std::istreambuf_iterator<char>(in), {});
    std::ifstream f(path, std::ios::binary);
    if (!f) throw Error(ErrorKind::SchemaError, "cannot open '" + path + "'");
    return std::string(std::istreambuf_iterator<char>(f), {});
}

template <class T>
FinancialNetwork<T> load(const Input& input, std::istream& in) {
    if (!input.liabilities_csv.empty())
        return parse_network_csv<T>(read_text(input.path, in), read_text(input.liabilities_csv, in));
    return parse_network<T>(read_text(input.path, in));
}

inline void check_config(const RunConfig& cfg) {
    if (cfg.mode == "rational" && cfg.tolerance)
        throw Error(ErrorKind::InvalidParams, "tolerance overrides are only allowed in float mode");
}

template <class T>
PicardOptions<T> picard_options(const RunConfig& cfg) {
    PicardOptions<T> o;
    o.max_iter = cfg.picard_max_iter;
    if (cfg.tolerance) o.tol = *cfg.tolerance;
    return o;
}

/// Max |a_i - b_i|; exact when both sides are exact.
template <class A, class B>
json max_difference(const Vector<A>& a, const Vector<B>& b) {
    if constexpr (is_exact_v<A> && is_exact_v<B>) {
        Rational m(0);
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max<Rational>(m, abs_value(Rational(a[i] - b[i])));
        return scalar_json(m);
    } else {
        double m = 0.0;
        for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(to_double(a[i]) - to_double(b[i])));
        return m;
    }
}

/// Picard result document. In rational mode Picard runs on the float copy of
/// the network (exact Picard only converges in the limit); the family fields
/// still come from the exact run.
template <class T>
json picard_json(const FinancialNetwork<T>& net, const SolutionFamily<T>& fam, const RunConfig& cfg, Vector<double>& payments) {
    auto fnet = convert_network<double>(net);
    auto po = picard_iterate(fnet, picard_options<double>(cfg));
    auto res = picard_result(fnet, po.payments);
    json j = result_json(fnet, res, SolutionFamily<double>{});
    j["unique"] = fam.unique;
    j["swamps"] = swamps_json(net, fam.swamps, false);
    j["greatest"] = scalars_json(fam.greatest);
    j["iterations"] = po.iterations;
    payments = po.payments;
    return j;
}

template <class T>
json solve_doc(const FinancialNetwork<T>& net, const RunConfig& cfg) {
    auto fam = solution_family(net, FlowOptions{cfg.trace});
    auto flow_doc = [&] {
        json j = result_json(net, fam.flow, fam);
        if (cfg.trace) {
            json t = json::array();
            for (const auto& ev : fam.flow.trajectory) t.push_back(event_json(net, ev));
            j["trace"] = std::move(t);
        }
        return j;
    };
    if (cfg.algorithm == "flow") return flow_doc();
    if (cfg.algorithm == "fd") return result_json(net, fictitious_defaults(net).result, fam);
    Vector<double> pic;
    if (cfg.algorithm == "picard") return picard_json(net, fam, cfg, pic);

    auto fd = fictitious_defaults(net).result;
    json j;
    j["algorithm"] = "all";
    j["results"] = {{"flow", flow_doc()}, {"fd", result_json(net, fd, fam)}, {"picard", picard_json(net, fam, cfg, pic)}};
    j["max_difference"] = {{"flow-fd", max_difference(fam.flow.payments, fd.payments)},
                           {"flow-picard", max_difference(fam.flow.payments, pic)},
                           {"fd-picard", max_difference(fd.payments, pic)}};
    return j;
}

/// One compare record: flow against FD (exact in rational mode) and against
/// float Picard.
template <class T>
json compare_one(std::uint64_t seed, const GeneratorParams& gp, const RunConfig& cfg) {
    json rec;
    rec["seed"] = seed;
    try {
        auto net = generate_network<T>(seed, gp);
        auto flow = run_flow(net, FlowOptions{false});
        auto fd = fictitious_defaults(net).result;
        auto fnet = convert_network<double>(net);
        auto pic = picard_iterate(fnet, picard_options<double>(cfg)).payments;
        rec["n"] = net.size();
        rec["flow-fd"] = max_difference(flow.payments, fd.payments);
        double scale = 1.0;
        for (const auto& b : fnet.total_debt()) scale = std::max(scale, b);
        const double dp = max_difference(flow.payments, pic).template get<double>();
        bool agree = dp <= (is_exact_v<T> ? 1e-12 : 1e-9 * scale);
        if constexpr (is_exact_v<T>) {
            agree = agree && flow.payments == fd.payments;
        } else {
            agree = agree && max_difference(flow.payments, fd.payments).template get<double>() <= 1e-9 * scale;
        }
        rec["flow-picard"] = dp;
        rec["agree"] = agree;
    } catch (const Error& e) {
        rec["agree"] = false;
        rec["error"] = e.what();
    }
    return rec;
}

inline void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
    if (out_path.empty() || out_path == "-") {
        out << text;
        return;
    }
    std::ofstream f(out_path, std::ios::binary);
    if (!f) throw Error(ErrorKind::SchemaError, "cannot write '" + out_path + "'");
    f << text;
}

template <class F>
int guarded(std::ostream& err, F&& body) {
    try {
        return body();
    } catch (const Error& e) {
        err << "error: " << e.what() << "\n";
        return is_validation_error(e.kind()) || e.kind() == ErrorKind::InvalidParams ? exit_validation : exit_solver;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return exit_solver;
    }
}

template <class F>
auto dispatch_mode(const RunConfig& cfg, F&& f) {
    if (cfg.mode == "float") return f(double{});
    return f(Rational{});
}

}  // namespace cli_detail

inline int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err, std::istream& in) {
    using namespace cli_detail;
    CLI::App app{"Clearing vectors for financial liability networks"};
    app.require_subcommand(1);

    RunConfig cfg;
    Input input;
    std::string out_path;
    GeneratorParams gp;
    std::size_t count = 100;
    std::size_t jobs = 1;

    auto add_common = [&](CLI::App* sub, bool with_algorithm) {
        sub->add_option("input", input.path, "network JSON (or banks CSV); '-' reads standard input");
        sub->add_option("--liabilities-csv", input.liabilities_csv, "liabilities CSV; input is then the banks CSV");
        sub->add_option("--mode", cfg.mode, "scalar mode")->check(CLI::IsMember({"rational", "float"}));
        sub->add_option("--out", out_path, "write output here instead of standard output");
        if (with_algorithm) {
            sub->add_option("--algorithm", cfg.algorithm, "solver")->check(CLI::IsMember({"flow", "fd", "picard", "all"}));
            sub->add_option("--tol", cfg.tolerance, "Picard stop tolerance (float mode only)");
            sub->add_option("--max-iter", cfg.picard_max_iter, "Picard iteration cap (0: automatic)");
        }
    };
    auto add_generator = [&](CLI::App* sub) {
        sub->add_option("--seed", cfg.seed, "generator seed");
        sub->add_option("--n", gp.n, "number of banks");
        sub->add_option("--density", gp.density, "edge probability in (0, 1]");
        sub->add_option("--cash-scale", gp.cash_scale, "cash is drawn from [0, cash-scale]");
        sub->add_option("--zero-cash", gp.zero_cash_probability, "probability that a bank starts with zero cash");
    };

    auto* solve = app.add_subcommand("solve", "clearing vector by flow, fd, picard or all three");
    add_common(solve, true);
    solve->add_flag("--trace", cfg.trace, "include the flow event trace");
    auto* family = app.add_subcommand("family", "basic vector, swamps and greatest vector");
    add_common(family, false);
    auto* bailout = app.add_subcommand("bailout", "cash injections that let every bank pay in full");
    add_common(bailout, false);
    auto* trace = app.add_subcommand("trace", "flow events as JSON lines");
    add_common(trace, false);
    auto* gen = app.add_subcommand("gen", "random network JSON");
    add_generator(gen);
    gen->add_option("--mode", cfg.mode, "scalar mode")->check(CLI::IsMember({"rational", "float"}));
    gen->add_option("--out", out_path, "write output here instead of standard output");
    auto* compare = app.add_subcommand("compare", "batch cross-check of the three solvers on generated networks");
    add_generator(compare);
    compare->add_option("--count", count, "number of networks (seeds seed, seed+1, ...)");
    compare->add_option("--jobs", jobs, "worker threads")->check(CLI::PositiveNumber);
    compare->add_option("--mode", cfg.mode, "scalar mode")->check(CLI::IsMember({"rational", "float"}));
    compare->add_option("--tol", cfg.tolerance, "Picard stop tolerance (float mode only)");
    compare->add_option("--out", out_path, "write output here instead of standard output");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            out << app.help();
            return exit_ok;
        }
        err << "error: " << e.what() << "\n";
        return exit_validation;
    }

    return guarded(err, [&]() -> int {
        check_config(cfg);
        if (*solve) {
            return dispatch_mode(cfg, [&](auto tag) {
                using T = decltype(tag);
                emit(solve_doc(load<T>(input, in), cfg).dump(2) + "\n", out_path, out);
                return exit_ok;
            });
        }
        if (*family) {
            return dispatch_mode(cfg, [&](auto tag) {
                using T = decltype(tag);
                auto net = load<T>(input, in);
                emit(family_json(net, solution_family(net, FlowOptions{false})).dump(2) + "\n", out_path, out);
                return exit_ok;
            });
        }
        if (*bailout) {
            return dispatch_mode(cfg, [&](auto tag) {
                using T = decltype(tag);
                auto net = load<T>(input, in);
                auto plan = bailout_vector(net, BailoutOptions{false});
                emit(bailout_json(net, plan).dump(2) + "\n", out_path, out);
                if (plan.verified) return exit_ok;
                for (const auto& f : plan.failures) err << "error: VerificationFailed: " << f << "\n";
                return exit_solver;
            });
        }
        if (*trace) {
            return dispatch_mode(cfg, [&](auto tag) {
                using T = decltype(tag);
                auto net = load<T>(input, in);
                emit(trace_lines(net, run_flow(net)), out_path, out);
                return exit_ok;
            });
        }
        if (*gen) {
            return dispatch_mode(cfg, [&](auto tag) {
                using T = decltype(tag);
                emit(serialize_network(generate_network<T>(cfg.seed, gp)), out_path, out);
                return exit_ok;
            });
        }
        // compare
        return dispatch_mode(cfg, [&](auto tag) {
            using T = decltype(tag);
            generate_network<T>(cfg.seed, gp);  // parameter check before spawning workers
            std::vector<json> records(count);
            std::atomic<std::size_t> next{0};
            auto worker = [&] {
                for (std::size_t k; (k = next.fetch_add(1)) < count;) {
                    records[k] = compare_one<T>(cfg.seed + k, gp, cfg);
                    records[k]["index"] = k;
                }
            };
            std::vector<std::thread> pool;
            for (std::size_t t = 1; t < std::min(jobs, count); ++t) pool.emplace_back(worker);
            worker();
            for (auto& t : pool) t.join();

            std::string text;
            std::size_t disagreements = 0;
            for (const auto& r : records) {
                text += r.dump() + "\n";
                if (!r["agree"].template get<bool>()) ++disagreements;
            }
            json summary{{"count", count}, {"disagreements", disagreements}};
            text += summary.dump() + "\n";
            emit(text, out_path, out);
            return disagreements == 0 ? exit_ok : exit_solver;
        });
    });
}

}  // namespace tanks
