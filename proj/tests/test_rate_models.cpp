#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "pnsim/rate_models.hpp"
#include "support.hpp"

#include <random>

using namespace pnsim;

namespace {

constexpr int kDown = 0;
constexpr int kUp = 1;

NetworkState filled(const Scenario& s, double rho) {
    auto st = initial_network_state(s);
    for (auto& d : st.densities) d.assign(d.size(), rho);
    return st;
}

Scenario single_edge(double beta) {
    auto doc = support::single_edge_doc();
    doc["rates"]["beta"] = beta;
    return support::parse(doc);
}

}  // namespace

TEST_CASE("utilization ratio") {
    const auto s = single_edge(0.0);
    CHECK(ur(s, filled(s, 2.0), 0, 2.0) == doctest::Approx(1.0));
    CHECK(ur(s, filled(s, 0.0), 0, 2.0) == 0.0);
    CHECK(ur(s, filled(s, 1.0), 0, 2.0) == doctest::Approx(0.5));
    // failed machine produces nothing
    CHECK(ur(s, filled(s, 1.0), std::vector<int>{kDown}, 0) == 0.0);
    CHECK(ur(s, filled(s, 1.0), std::vector<int>{kUp}, 0) == doctest::Approx(0.5));
}

TEST_CASE("work in progress ratio") {
    const auto s = single_edge(0.0);
    CHECK(rwip(s, filled(s, 0.0), 0) == 0.0);
    CHECK(rwip(s, filled(s, 2.0), 0) == doctest::Approx(1.0));
    CHECK(rwip(s, filled(s, 0.5), 0) == doctest::Approx(0.25));
}

TEST_CASE("degenerate processor has zero load") {
    auto doc = support::single_edge_doc();
    doc["processors"][0]["capacities"] = {0.0, 0.0};
    const auto s = support::parse(doc);
    CHECK(ur(s, filled(s, 1.0), 0, 0.0) == 0.0);
    CHECK(rwip(s, filled(s, 1.0), 0) == 0.0);
}

TEST_CASE("linear load law") {
    const auto s = single_edge(0.5);
    const std::vector<int> up{kUp};
    CHECK(rate(s, 0, kUp, kDown, 0.0, filled(s, 0.0), up) == doctest::Approx(0.5 / 0.85));
    CHECK(rate(s, 0, kUp, kDown, 0.0, filled(s, 1.0), up) == doctest::Approx(1.0 / 0.85));
    CHECK(rate(s, 0, kUp, kDown, 0.0, filled(s, 2.0), up) == doctest::Approx(1.5 / 0.85));
    const std::vector<int> down{kDown};
    CHECK(rate(s, 0, kDown, kUp, 0.0, filled(s, 0.0), down) == doctest::Approx(1.5 / 0.15));
    CHECK(rate(s, 0, kDown, kUp, 0.0, filled(s, 2.0), down) == doctest::Approx(0.5 / 0.15));
    CHECK_THROWS_AS((void)rate(s, 0, kUp, kUp, 0.0, filled(s, 0.0), up), std::invalid_argument);
}

TEST_CASE("failure rate uses the up capacity even while down") {
    const auto s = single_edge(0.5);
    const auto st = filled(s, 1.0);
    const std::vector<int> down{kDown};
    CHECK(rate(s, 0, kUp, kDown, 0.0, st, down) == doctest::Approx(1.0 / 0.85));
}

TEST_CASE("clamped work in progress") {
    LinearLoadParams p{1.0 / 0.85, 1.0 / 0.15, 0.5};
    CHECK(repair_rate(p, 1.7) == doctest::Approx(p.rep_min()));
    CHECK(repair_rate(p, -0.2) == doctest::Approx(p.rep_max()));
    CHECK(failure_rate(p, 0.0) == doctest::Approx(p.down_min()));
    CHECK(failure_rate(p, 1.0) == doctest::Approx(p.down_max()));
}

TEST_CASE("constant matrix entries") {
    const auto s = support::single_edge_constant(0.7, 2.5);
    const auto st = filled(s, 1.3);
    CHECK(rate(s, 0, kUp, kDown, 4.0, st, std::vector<int>{kUp}) == 0.7);
    CHECK(rate(s, 0, kDown, kUp, 4.0, st, std::vector<int>{kDown}) == 2.5);
}

TEST_CASE("aggregate rate") {
    const auto d = support::diamond(0.0);
    CHECK(psi(d, 0.0, d.initial.regimes, initial_network_state(d)) == doctest::Approx(7.0 / 0.85));

    const auto s = single_edge(0.0);
    CHECK(psi(s, 0.0, std::vector<int>{kDown}, filled(s, 0.0)) == doctest::Approx(1.0 / 0.15));

    const auto zero = support::single_edge_constant(0.0, 0.0);
    CHECK(psi(zero, 0.0, std::vector<int>{kUp}, filled(zero, 1.0)) == 0.0);
    CHECK(psi(zero, 0.0, std::vector<int>{kDown}, filled(zero, 1.0)) == 0.0);
}

TEST_CASE("three-state constant matrix row sums") {
    auto doc = support::single_edge_doc();
    doc["processors"][0]["capacities"] = {0.0, 1.0, 2.0};
    doc["rates"] = {{"variant", "constant_matrix"},
                    {"matrices", {{{0.0, 1.0, 2.0}, {3.0, 0.0, 4.0}, {5.0, 6.0, 0.0}}}}};
    const auto s = support::parse(doc);
    REQUIRE(validate_scenario(s).ok());
    const auto st = filled(s, 0.0);
    CHECK(psi(s, 0.0, std::vector<int>{0}, st) == 3.0);
    CHECK(psi(s, 0.0, std::vector<int>{1}, st) == 7.0);
    CHECK(psi(s, 0.0, std::vector<int>{2}, st) == 11.0);
    CHECK(uniform_bound(s).network == 11.0);
}

TEST_CASE("uniform bounds") {
    CHECK(uniform_bound(single_edge(0.0)).per_edge[0] == doctest::Approx(1.0 / 0.15));
    CHECK(uniform_bound(single_edge(1.0)).per_edge[0] == doctest::Approx(2.0 / 0.15));
    const auto b = uniform_bound(support::diamond(0.0));
    CHECK(b.per_edge.size() == 7);
    CHECK(b.network == doctest::Approx(7.0 / 0.15));
    CHECK(uniform_bound(support::single_edge_constant(0.0, 0.0)).network == 0.0);
}

TEST_CASE("bound override can only raise the bound") {
    CHECK(uniform_bound(support::single_edge_constant(1.0, 1.0, 5.0)).network == 5.0);
    auto low = support::single_edge_constant(1.0, 1.0, 0.5);
    CHECK_FALSE(validate_scenario(low).ok());
}

TEST_CASE("beta zero gives state-independent rates") {
    const auto s = support::diamond(0.0);
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const auto base = initial_network_state(s);
    std::vector<int> up(7, kUp);
    std::vector<int> down(7, kDown);
    const double fail0 = rate(s, 0, kUp, kDown, 0.0, base, up);
    const double rep0 = rate(s, 0, kDown, kUp, 0.0, base, down);
    for (int k = 0; k < 100; ++k) {
        auto st = base;
        for (auto& q : st.queues) q = 40.0 * unit(rng);
        for (auto& d : st.densities)
            for (auto& r : d) r = 2.0 * unit(rng);
        const double t = 30.0 * unit(rng);
        for (EdgeId e = 0; e < 7; ++e) {
            CHECK(rate(s, e, kUp, kDown, t, st, up) == fail0);
            CHECK(rate(s, e, kDown, kUp, t, st, down) == rep0);
        }
    }
    CHECK(fail0 == 1.0 / 0.85);
    CHECK(rep0 == 1.0 / 0.15);
}

TEST_CASE("rates are monotone in load") {
    for (double beta : {0.0, 0.25, 0.5, 1.0}) {
        const auto s = single_edge(beta);
        double last_fail = -1.0;
        double last_rep = 1e300;
        for (int k = 0; k <= 40; ++k) {
            const auto st = filled(s, 0.05 * k);
            const double u = ur(s, st, 0, 2.0);
            const double w = rwip(s, st, 0);
            CHECK(u >= 0.0);
            CHECK(u <= 1.0 + 1e-15);
            CHECK(w >= 0.0);
            CHECK(w <= 1.0 + 1e-15);
            const double fail = rate(s, 0, kUp, kDown, 0.0, st, std::vector<int>{kUp});
            const double rep = rate(s, 0, kDown, kUp, 0.0, st, std::vector<int>{kDown});
            CHECK(fail >= last_fail);
            CHECK(rep <= last_rep);
            last_fail = fail;
            last_rep = rep;
        }
    }
}

TEST_CASE("rates are Lipschitz in the density") {
    auto doc = support::single_edge_doc();
    doc["processors"][0]["velocity"] = 2.0;
    doc["processors"][0]["length"] = 1.5;
    doc["processors"][0]["capacities"] = {0.0, 3.0};
    doc["rates"]["beta"] = 0.8;
    const auto s = support::parse(doc);
    const auto& p = s.rates.linear[0];
    const double v = 2.0;
    const double mu_max = 3.0;
    const double length = 1.5;
    const double c_fail = (p.down_max() - p.down_min()) * v / (mu_max * length);
    const double c_rep = (p.rep_max() - p.rep_min()) * v / (mu_max * length);

    std::mt19937_64 rng(29);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int k = 0; k < 100; ++k) {
        auto a = initial_network_state(s);
        auto b = a;
        // densities within the reachable box v rho <= mu_max
        for (auto& r : a.densities[0]) r = unit(rng) * mu_max / v;
        for (std::size_t j = 0; j < b.densities[0].size(); ++j)
            b.densities[0][j] = unit(rng) < 0.5 ? a.densities[0][j] : unit(rng) * mu_max / v;
        const double dist = l1_distance(a, b, s.numerics.dx);
        if (dist == 0.0) continue;
        const std::vector<int> up{kUp};
        const std::vector<int> down{kDown};
        const double dfail = std::abs(rate(s, 0, kUp, kDown, 0.0, a, up) - rate(s, 0, kUp, kDown, 0.0, b, up));
        const double drep = std::abs(rate(s, 0, kDown, kUp, 0.0, a, down) - rate(s, 0, kDown, kUp, 0.0, b, down));
        CHECK(dfail <= c_fail * dist * (1.0 + 1e-8));
        CHECK(drep <= c_rep * dist * (1.0 + 1e-8));
    }
}
