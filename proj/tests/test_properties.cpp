#include "catch_amalgamated.hpp"

#include "support/fixtures.hpp"

using namespace tanks;

TEST_CASE("generator determinism and shape", "[generator]") {
    GeneratorParams gp{6, 0.5, 2.0, 0.3, 32, 8};
    CHECK(generate_network<Rational>(99, gp) == generate_network<Rational>(99, gp));
    CHECK_FALSE(generate_network<Rational>(99, gp) == generate_network<Rational>(100, gp));

    auto dense = generate_network<Rational>(5, GeneratorParams{3, 1.0, 1.0, 0.0, 32, 8});
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t j = 0; j < 3; ++j) CHECK((dense.liabilities()(i, j) > 0) == (i != j));

    for (std::uint64_t seed = 1; seed <= 100; ++seed) {
        auto net = generate_network<Rational>(seed, gp);
        for (std::size_t i = 0; i < net.size(); ++i) {
            CHECK(net.cash()[i] >= 0);
            CHECK(net.cash()[i] <= 2);
            for (std::size_t j = 0; j < net.size(); ++j)
                CHECK(boost::multiprecision::denominator(net.liabilities()(i, j)) <= 64);
        }
    }
}

TEST_CASE("generator parameter checks", "[generator]") {
    auto kind = [](GeneratorParams gp) {
        try {
            generate_network<Rational>(1, gp);
        } catch (const Error& e) {
            return e.kind();
        }
        return ErrorKind::InvariantViolation;
    };
    CHECK(kind(GeneratorParams{0, 0.5, 1.0, 0.0, 32, 8}) == ErrorKind::InvalidParams);
    CHECK(kind(GeneratorParams{3, 0.0, 1.0, 0.0, 32, 8}) == ErrorKind::InvalidParams);
    CHECK(kind(GeneratorParams{3, 1.5, 1.0, 0.0, 32, 8}) == ErrorKind::InvalidParams);
    CHECK(kind(GeneratorParams{3, 0.5, -1.0, 0.0, 32, 8}) == ErrorKind::InvalidParams);
}

TEST_CASE("flow run invariants on generated networks", "[flow][property]") {
    for (std::uint64_t seed = 1; seed <= 200; ++seed) {
        GeneratorParams gp{1 + seed % 8, 0.5, 2.0, seed % 3 ? 0.0 : 0.4, 32, 8};
        auto net = generate_network<Rational>(seed, gp);
        INFO("seed " << seed);
        auto res = run_flow(net);
        const std::size_t n = net.size();
        Rational cash0(0), debt0(0), maxb(0);
        for (std::size_t i = 0; i < n; ++i) {
            cash0 += net.cash()[i];
            debt0 += net.total_debt()[i];
            maxb = std::max(maxb, net.total_debt()[i]);
        }
        CHECK(res.event_count <= 2 * n);
        CHECK(*res.total_time <= maxb);
        CHECK(verify_clearing(net, res.payments) == 0);
        Vector<Rational> prev_out, prev_in;
        for (const auto& ev : res.trajectory) {
            Rational c(0);
            for (const auto& x : ev.state_after.cash) c += x;
            CHECK(c == cash0);
            for (const auto& t : ev.transitions) {
                CHECK(t.from != Status::Absorbing);
                CHECK_FALSE((t.from == Status::Zero && t.to == Status::Positive));
            }
            if (!prev_out.empty())
                for (std::size_t i = 0; i < n; ++i) {
                    CHECK(ev.rates.out[i] <= prev_out[i]);
                    CHECK(ev.rates.inflow[i] <= prev_in[i]);
                }
            prev_out = ev.rates.out;
            prev_in = ev.rates.inflow;
        }
        Rational paid(0), left(0);
        for (std::size_t i = 0; i < n; ++i) paid += res.payments[i];
        for (auto i : res.defaults) left += net.total_debt()[i] - res.payments[i];
        CHECK(debt0 == paid + left);
        if (cash0 > 0) CHECK_FALSE(res.final_partition.absorbing().empty());
    }
}

TEST_CASE("less cash never means larger payments", "[flow][property]") {
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        GeneratorParams gp{2 + seed % 7, 0.5, 3.0, 0.0, 32, 8};
        auto net = generate_network<Rational>(seed, gp);
        Vector<Rational> c2 = net.cash();
        for (std::size_t i = 0; i < c2.size(); ++i) c2[i] *= Rational(static_cast<long long>((seed + i) % 4), 3 + (i % 2));
        for (std::size_t i = 0; i < c2.size(); ++i) c2[i] = std::min(c2[i], net.cash()[i]);
        auto p1 = run_flow(net, FlowOptions{false}).payments;
        auto p2 = run_flow(net.with_cash(c2), FlowOptions{false}).payments;
        for (auto i : active_set(net)) CHECK(p2[i] <= p1[i]);
    }
}

TEST_CASE("float runs track the exact runs", "[flow][property]") {
    for (std::uint64_t seed = 1; seed <= 150; ++seed) {
        GeneratorParams gp{2 + seed % 7, 0.5, 2.0, 0.0, 32, 8};
        auto net = generate_network<Rational>(seed, gp);
        auto fnet = convert_network<double>(net);
        auto exact = run_flow(net, FlowOptions{false}).payments;
        auto flow = run_flow(fnet, FlowOptions{false}).payments;
        auto fd = fictitious_defaults(fnet).result.payments;
        double scale = to_double(net.money_scale());
        for (std::size_t i = 0; i < net.size(); ++i) {
            CHECK(std::abs(flow[i] - to_double(exact[i])) <= 1e-9 * scale);
            CHECK(std::abs(fd[i] - to_double(exact[i])) <= 1e-9 * scale);
        }
        CHECK(verify_clearing(fnet, flow) <= 1e-9 * scale);
    }
}
