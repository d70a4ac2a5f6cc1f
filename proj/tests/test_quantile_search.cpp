#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "linksparse/ecdf.hpp"
#include "linksparse/graph.hpp"
#include "linksparse/quantile_search.hpp"
#include "linksparse/rng.hpp"
#include "oracles.hpp"

using namespace linksparse;

namespace {

EcdfModel uniform_ecdf(double lo, double hi, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> s(50000);
    for (auto& x : s) x = lo + (hi - lo) * rng.u01();
    return fit_ecdf(s);
}

}  // namespace

TEST_CASE("overhead mode names round trip, aliases included") {
    for (OverheadMode m : {OverheadMode::flexible, OverheadMode::fixed_deadline,
                           OverheadMode::csma})
        CHECK(overhead_mode_from_name(overhead_mode_name(m)) == m);
    CHECK(overhead_mode_from_name("deadline") == OverheadMode::fixed_deadline);
    CHECK(overhead_mode_from_name("qcsma") == OverheadMode::csma);
    CHECK_THROWS_AS(overhead_mode_from_name("tdma"), std::invalid_argument);
}

TEST_CASE("overhead fraction: pinned values and validation") {
    OverheadModel flex;
    flex.mode = OverheadMode::flexible;
    flex.tau = 0.01;
    CHECK(overhead_fraction(flex, 20) == doctest::Approx(0.2));
    CHECK(overhead_fraction(flex, 100) == 1.0);  // saturates at the full slot
    CHECK(overhead_fraction(flex, 150) == 1.0);
    OverheadModel dl;
    dl.mode = OverheadMode::fixed_deadline;
    dl.deadline_k = 30;
    CHECK(overhead_fraction(dl, 30) == 0.0);
    CHECK(overhead_fraction(dl, 31) == 1.0);
    CHECK_THROWS_AS(overhead_fraction(dl, 0), std::invalid_argument);
    OverheadModel cs;
    cs.mode = OverheadMode::csma;
    CHECK_THROWS_AS(overhead_fraction(cs, 5), std::invalid_argument);
    OverheadModel bad;
    bad.tau = 0.0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.tau = 0.01;
    bad.deadline_k = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
    bad.deadline_k = 30;
    bad.window = 0;
    CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
}

TEST_CASE("csma win probability: exact small cases and monotone decay") {
    CHECK(csma_win_probability(32, 0) == doctest::Approx(1.0));
    CHECK(csma_win_probability(8, 0) == doctest::Approx(1.0));
    // d = 1: P(b < b') = (1 - 1/W) / 2
    CHECK(csma_win_probability(32, 1) == doctest::Approx(31.0 / 64.0));
    CHECK(csma_win_probability(8, 1) == doctest::Approx(7.0 / 16.0));
    double prev = 2.0;
    for (int d = 0; d <= 10; ++d) {
        double p = csma_win_probability(32, d);
        CHECK(p < prev);
        CHECK(p > 0.0);
        prev = p;
    }
    CHECK_THROWS_AS(csma_win_probability(0, 1), std::invalid_argument);
    CHECK_THROWS_AS(csma_win_probability(8, -1), std::invalid_argument);
}

TEST_CASE("csma win probability matches a direct backoff simulation") {
    Rng rng(211);
    for (int d : {1, 3, 5}) {
        int wins = 0, trials = 200000;
        for (int t = 0; t < trials; ++t) {
            std::uint64_t mine = rng.uniform_int(32);
            bool lowest = true;
            for (int j = 0; j < d; ++j)
                if (rng.uniform_int(32) <= mine) {
                    lowest = false;
                    break;
                }
            wins += lowest;
        }
        double mc = static_cast<double>(wins) / trials;
        CHECK(std::fabs(mc - csma_win_probability(32, d)) <= 0.01);
    }
}

TEST_CASE("net utility objective: closed form on a single free link") {
    // one conflict-free link, csma mode, win prob 1: the objective is
    // E[u; u > u_eta], which for U(0,100) at eta = 0.5 is 37.5
    EcdfModel ecdf = uniform_ecdf(0.0, 100.0, 213);
    std::vector<ConflictGraph> graphs = {oracles::edgeless(1)};
    OverheadModel m;
    m.mode = OverheadMode::csma;
    double got = net_utility_objective(0.5, graphs, ecdf, m, 215, 2000);
    CHECK(got == doctest::Approx(37.5).epsilon(0.08));
}

TEST_CASE("net utility objective: deterministic and thread invariant") {
    EcdfModel ecdf = uniform_ecdf(0.0, 100.0, 217);
    std::vector<ConflictGraph> graphs;
    for (int i = 0; i < 4; ++i) graphs.push_back(generate_er(25, 5.0, 300 + i));
    OverheadModel m;
    m.mode = OverheadMode::flexible;
    m.tau = 0.01;
    double a = net_utility_objective(0.4, graphs, ecdf, m, 219, 400, 1);
    double b = net_utility_objective(0.4, graphs, ecdf, m, 219, 400, 1);
    double c = net_utility_objective(0.4, graphs, ecdf, m, 219, 400, 4);
    CHECK(a == b);
    CHECK(a == c);  // fixed-order reduction
    double d = net_utility_objective(0.4, graphs, ecdf, m, 220, 400, 1);
    CHECK(a != d);
}

TEST_CASE("net utility objective: conflict-free networks only lose from muting") {
    EcdfModel ecdf = uniform_ecdf(0.0, 100.0, 221);
    std::vector<ConflictGraph> graphs = {oracles::edgeless(30)};
    OverheadModel m;
    m.mode = OverheadMode::flexible;
    m.tau = 0.01;
    double prev = 1e18;
    for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9, 1.0}) {
        double val = net_utility_objective(eta, graphs, ecdf, m, 223, 500);
        CHECK(val < prev);
        CHECK(val >= 0.0);
        prev = val;
    }
}

TEST_CASE("net utility objective: input validation") {
    EcdfModel ecdf = uniform_ecdf(0.0, 100.0, 227);
    std::vector<ConflictGraph> graphs = {oracles::edgeless(3)};
    OverheadModel m;
    CHECK_THROWS_AS(net_utility_objective(0.0, graphs, ecdf, m, 1), std::invalid_argument);
    CHECK_THROWS_AS(net_utility_objective(1.1, graphs, ecdf, m, 1), std::invalid_argument);
    CHECK_THROWS_AS(net_utility_objective(0.5, {}, ecdf, m, 1), std::invalid_argument);
    CHECK_THROWS_AS(net_utility_objective(0.5, graphs, ecdf, m, 1, 0), std::invalid_argument);
}

TEST_CASE("peak search nails quadratic and edge-pinned peaks") {
    auto quad = [](double x) { return -(x - 0.3) * (x - 0.3); };
    double x = peak_search(quad, 0.01, 1.0, 1e-4);
    CHECK(std::fabs(x - 0.3) <= 1e-4);

    double hi = peak_search([](double x) { return x; }, 0.0, 1.0, 1e-4);
    CHECK(hi >= 1.0 - 1e-4);
    double lo = peak_search([](double x) { return -x; }, 0.0, 1.0, 1e-4);
    CHECK(lo <= 1e-4);

    CHECK_THROWS_AS(peak_search(quad, 1.0, 0.0, 1e-4), std::invalid_argument);
    CHECK_THROWS_AS(peak_search(quad, 0.0, 1.0, 0.0), std::invalid_argument);
}

TEST_CASE("peak search localizes 100 random quasi-concave functions") {
    Rng rng(229);
    for (int trial = 0; trial < 100; ++trial) {
        double a = rng.u01(), b = a + 0.5 + rng.u01();
        double c = a + (b - a) * (0.05 + 0.9 * rng.u01());  // interior peak
        double left = 0.5 + 2.0 * rng.u01(), right = 0.5 + 2.0 * rng.u01();
        int shape = static_cast<int>(rng.uniform_int(3));
        auto f = [&](double x) {
            double t = x < c ? left * (c - x) : right * (x - c);  // scaled distance
            switch (shape) {
                case 0: return -t;            // asymmetric tent
                case 1: return -t * t;        // asymmetric parabola
                default: return -std::sqrt(t);  // cusped peak
            }
        };
        double eps = 1e-4;
        std::vector<PeakSearchStep> trace;
        double x = peak_search(f, a, b, eps, &trace);
        CHECK(std::fabs(x - c) <= eps);

        // bracket invariants: containment, midpoint inside, 3/4 shrink
        double pl = a, pr = b;
        for (const auto& st : trace) {
            CHECK(st.x_l >= pl - 1e-15);
            CHECK(st.x_r <= pr + 1e-15);
            CHECK(st.x_l <= st.x_m);
            CHECK(st.x_m <= st.x_r);
            CHECK(st.x_r - st.x_l <= 0.75 * (pr - pl) + 1e-12);
            pl = st.x_l;
            pr = st.x_r;
        }
        CHECK(pr - pl <= eps);
    }
}

TEST_CASE("peak search memoizes probes") {
    int calls = 0;
    auto f = [&](double x) {
        ++calls;
        return -(x - 0.62) * (x - 0.62);
    };
    peak_search(f, 0.0, 1.0, 1e-4);
    CHECK(calls >= 4);
    CHECK(calls <= 60);  // ~33 iterations, a couple of probes each, all cached
}
