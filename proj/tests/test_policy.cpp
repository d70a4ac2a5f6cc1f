#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "linksparse/ecdf.hpp"
#include "linksparse/graph.hpp"
#include "linksparse/policy.hpp"
#include "linksparse/rng.hpp"
#include "oracles.hpp"

using namespace linksparse;

namespace {

PolicySpec baseline_at(double u_eta) {
    PolicySpec s;
    s.kind = PolicyKind::baseline;
    s.u_eta = u_eta;
    return s;
}

std::vector<double> uniform_utils(int n, double lo, double hi, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> u(n);
    for (auto& x : u) x = lo + (hi - lo) * rng.u01();
    return u;
}

}  // namespace

TEST_CASE("policy names round trip, including aliases") {
    for (PolicyKind k : {PolicyKind::zero, PolicyKind::baseline, PolicyKind::baseline_scaled,
                         PolicyKind::gcn, PolicyKind::hybrid})
        CHECK(policy_from_name(policy_name(k)) == k);
    CHECK(policy_from_name("baseline") == PolicyKind::baseline);
    CHECK(policy_from_name("baseline_scaled") == PolicyKind::baseline_scaled);
    CHECK_THROWS_AS(policy_from_name("nope"), std::invalid_argument);
}

TEST_CASE("baseline gate on a 3-path: pinned example") {
    ConflictGraph p3 = oracles::path(3);
    SparsifiedState s = apply_policy(p3, {5.0, 10.0, 2.0}, baseline_at(4.0));
    CHECK(s.retained == std::vector<char>{1, 1, 0});
    CHECK(s.sparse_graph.vertex_count == 2);
    CHECK(s.sparse_graph.edge_count == 1);
    CHECK(s.sparse_to_orig == std::vector<int>{0, 1});
    CHECK(s.orig_to_sparse == std::vector<int>{0, 1, -1});
    CHECK(s.weights == std::vector<double>{5.0, 10.0});
    CHECK(s.post_degrees == std::vector<int>{1, 1});
}

TEST_CASE("utility exactly at the gate is muted") {
    ConflictGraph p3 = oracles::path(3);
    SparsifiedState s = apply_policy(p3, {4.0, 10.0, 2.0}, baseline_at(4.0));
    CHECK(s.retained == std::vector<char>{0, 1, 0});
}

TEST_CASE("zero policy retains everything, even zero-utility links") {
    ConflictGraph p3 = oracles::path(3);
    PolicySpec spec;
    spec.kind = PolicyKind::zero;
    SparsifiedState s = apply_policy(p3, {0.0, 0.0, 0.0}, spec);
    CHECK(s.retained == std::vector<char>{1, 1, 1});
    CHECK(s.sparse_graph.vertex_count == 3);
    CHECK(s.sparse_graph.edge_count == 2);
}

TEST_CASE("gcn policy with z == 1 matches the baseline exactly") {
    Rng rng(5);
    for (int trial = 0; trial < 20; ++trial) {
        ConflictGraph g = generate_er(30, 5.0, 100 + trial);
        auto u = uniform_utils(30, 0.0, 100.0, 200 + trial);
        double u_eta = 100.0 * rng.u01();
        PolicySpec gp;
        gp.kind = PolicyKind::gcn;
        gp.u_eta = u_eta;
        gp.z.assign(30, 1.0);
        SparsifiedState a = apply_policy(g, u, gp);
        SparsifiedState b = apply_policy(g, u, baseline_at(u_eta));
        CHECK(a.retained == b.retained);
        CHECK(a.weights == b.weights);
        CHECK(a.sparse_to_orig == b.sparse_to_orig);
    }
}

TEST_CASE("hybrid policy gates only high-degree links") {
    // star with 12 leaves: center degree 12, leaves degree 1
    ConflictGraph s12 = oracles::star(12);
    std::vector<double> u(13, 0.1);
    PolicySpec spec;
    spec.kind = PolicyKind::hybrid;
    spec.u_eta = 50.0;
    spec.hybrid_degree = 10;
    spec.z.assign(13, 1.0);
    SparsifiedState st = apply_policy(s12, u, spec);
    CHECK(st.retained[0] == 0);  // center: 0.1 <= 1 * 50
    for (int leaf = 1; leaf <= 12; ++leaf) CHECK(st.retained[leaf] == 1);  // gate 0, u > 0

    spec.hybrid_degree = 12;  // now nobody exceeds the degree cut
    SparsifiedState all = apply_policy(s12, u, spec);
    CHECK(std::count(all.retained.begin(), all.retained.end(), 1) == 13);
}

TEST_CASE("scaled baseline uses the mean multiplier as a common gate") {
    ConflictGraph p3 = oracles::path(3);
    PolicySpec spec;
    spec.kind = PolicyKind::baseline_scaled;
    spec.u_eta = 4.0;
    spec.z = {0.5, 1.0, 1.5};  // mean 1.0 -> gate 4.0
    SparsifiedState s = apply_policy(p3, {5.0, 10.0, 2.0}, spec);
    CHECK(s.retained == std::vector<char>{1, 1, 0});
    spec.z = {2.0, 2.0, 2.0};  // gate 8.0
    SparsifiedState t = apply_policy(p3, {5.0, 10.0, 2.0}, spec);
    CHECK(t.retained == std::vector<char>{0, 1, 0});
}

TEST_CASE("apply_policy input validation") {
    ConflictGraph p3 = oracles::path(3);
    CHECK_THROWS_AS(apply_policy(p3, {1.0, 2.0}, baseline_at(0.5)), std::invalid_argument);
    CHECK_THROWS_AS(apply_policy(p3, {1.0, -2.0, 3.0}, baseline_at(0.5)), std::invalid_argument);
    PolicySpec gp;
    gp.kind = PolicyKind::gcn;
    gp.u_eta = 1.0;
    CHECK_THROWS_AS(apply_policy(p3, {1.0, 2.0, 3.0}, gp), std::invalid_argument);  // no z
    gp.z = {1.0, -1.0, 1.0};
    CHECK_THROWS_AS(apply_policy(p3, {1.0, 2.0, 3.0}, gp), std::invalid_argument);
}

TEST_CASE("sparse state bookkeeping is consistent on random graphs") {
    for (int trial = 0; trial < 20; ++trial) {
        ConflictGraph g = generate_er(40, 6.0, 300 + trial);
        auto u = uniform_utils(40, 0.0, 100.0, 400 + trial);
        SparsifiedState s = apply_policy(g, u, baseline_at(35.0));
        int kept = std::count(s.retained.begin(), s.retained.end(), 1);
        REQUIRE(s.sparse_graph.vertex_count == kept);
        REQUIRE(static_cast<int>(s.sparse_to_orig.size()) == kept);
        for (int sv = 0; sv < kept; ++sv) {
            int ov = s.sparse_to_orig[sv];
            CHECK(s.retained[ov] == 1);
            CHECK(s.orig_to_sparse[ov] == sv);
            CHECK(s.weights[sv] == u[ov]);
            CHECK(s.post_degrees[sv] == s.sparse_graph.degree(sv));
            CHECK(s.post_degrees[sv] <= g.degree(ov));
        }
        for (int ov = 0; ov < 40; ++ov)
            if (!s.retained[ov]) CHECK(s.orig_to_sparse[ov] == -1);
        // every sparse edge is an original edge between retained vertices
        for (const auto& e : s.sparse_graph.edges()) {
            int a = s.sparse_to_orig[e[0]], b = s.sparse_to_orig[e[1]];
            CHECK(g.has_edge(a, b));
        }
    }
}

TEST_CASE("raising the gate never un-mutes a link") {
    ConflictGraph g = generate_er(50, 8.0, 500);
    auto u = uniform_utils(50, 0.0, 100.0, 501);
    PolicySpec lo;
    lo.kind = PolicyKind::gcn;
    lo.u_eta = 30.0;
    lo.z = uniform_utils(50, 0.2, 1.0, 502);
    PolicySpec hi = lo;
    for (auto& zv : hi.z) zv *= 1.5;  // pointwise larger multipliers
    SparsifiedState a = apply_policy(g, u, lo);
    SparsifiedState b = apply_policy(g, u, hi);
    for (int v = 0; v < 50; ++v)
        if (b.retained[v]) CHECK(a.retained[v] == 1);
}

TEST_CASE("retained sets are nested as the contention target grows") {
    EcdfModel m = fit_ecdf(uniform_utils(100000, 0.0, 100.0, 600));
    ConflictGraph g = generate_er(60, 7.0, 601);
    auto u = uniform_utils(60, 0.0, 100.0, 602);
    std::vector<char> prev(60, 1);
    for (double eta : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        SparsifiedState s = apply_policy(g, u, baseline_at(m.quantile(eta)));
        for (int v = 0; v < 60; ++v)
            if (s.retained[v]) CHECK(prev[v] == 1);
        prev = s.retained;
    }
}

TEST_CASE("baseline mutes roughly an eta-fraction of fresh links") {
    EcdfModel m = fit_ecdf(uniform_utils(100000, 0.0, 100.0, 700));
    ConflictGraph g = generate_er(200, 5.0, 701);
    for (double eta : {0.2, 0.5, 0.8}) {
        double gate = m.quantile(eta);
        int kept = 0, total = 0;
        for (int rep = 0; rep < 100; ++rep) {
            auto u = uniform_utils(200, 0.0, 100.0, 800 + rep);
            SparsifiedState s = apply_policy(g, u, baseline_at(gate));
            kept += std::count(s.retained.begin(), s.retained.end(), 1);
            total += 200;
        }
        double frac = static_cast<double>(kept) / total;
        CHECK(std::fabs(frac - (1.0 - eta)) <= 0.02);
    }
}

TEST_CASE("cutoff probabilities follow the fitted distribution") {
    EcdfModel m = fit_ecdf(uniform_utils(100000, 10.0, 100.0, 900));
    double u_eta = m.quantile(0.6);
    auto p1 = cutoff_probabilities(std::vector<double>(5, 1.0), u_eta, m);
    for (double p : p1) CHECK(p == doctest::Approx(0.6).epsilon(0.01));
    auto p0 = cutoff_probabilities(std::vector<double>(5, 0.0), u_eta, m);
    for (double p : p0) CHECK(p <= 1e-6);  // gate 0 sits below the support
    auto p2 = cutoff_probabilities(std::vector<double>(5, 2.0), m.quantile(0.9), m);
    for (double p : p2) CHECK(p >= 1.0 - 1e-6);  // gate beyond the max utility
    CHECK_THROWS_AS(cutoff_probabilities({-0.1}, u_eta, m), std::invalid_argument);
    // monotone in z
    double prev = -1.0;
    for (double z = 0.0; z <= 2.0; z += 0.05) {
        double p = cutoff_probabilities({z}, u_eta, m)[0];
        CHECK(p >= prev);
        prev = p;
    }
}
