#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>

#include "linksparse/gcn.hpp"
#include "linksparse/graph.hpp"
#include "linksparse/rng.hpp"
#include "oracles.hpp"

using namespace linksparse;

namespace {

GcnModel tiny_l1(double t0, double t1) {
    GcnModel m;
    m.layer_count = 1;
    m.dims = {1, 1};
    m.theta0 = {{{t0}}};
    m.theta1 = {{{t1}}};
    return m;
}

// permute a graph's vertex labels
ConflictGraph permuted(const ConflictGraph& g, const std::vector<int>& pi) {
    std::vector<std::array<int, 2>> e;
    for (const auto& ed : g.edges()) {
        int a = pi[ed[0]], b = pi[ed[1]];
        e.push_back({std::min(a, b), std::max(a, b)});
    }
    return graph_from_edges(g.vertex_count, e);
}

double linear_objective(const GcnModel& m, const ConflictGraph& g, const std::vector<double>& c) {
    std::vector<double> z = gcn_forward(m, g);
    double acc = 0.0;
    for (int v = 0; v < g.vertex_count; ++v) acc += c[v] * z[v];
    return acc;
}

}  // namespace

TEST_CASE("init_gcn: dims, seeded determinism, scaled uniform range") {
    GcnModel m = init_gcn(3, 8, 0.01, 42);
    CHECK(m.dims == std::vector<int>{1, 8, 8, 1});
    m.validate();
    GcnModel m2 = init_gcn(3, 8, 0.01, 42);
    CHECK(m.theta0 == m2.theta0);
    CHECK(m.theta1 == m2.theta1);
    for (int l = 0; l < 3; ++l) {
        double bound = 0.5 / std::sqrt(static_cast<double>(m.dims[l]));
        for (const auto& row : m.theta0[l])
            for (double w : row) CHECK(std::fabs(w) <= bound);
        for (const auto& row : m.theta1[l])
            for (double w : row) CHECK(std::fabs(w) <= bound);
    }
    CHECK(init_gcn(3, 8, 0.01, 43).theta0 != m.theta0);
}

TEST_CASE("gcn_forward: pinned single-layer closed forms") {
    ConflictGraph k3 = oracles::complete(3);
    // Theta0=1, Theta1=0: Laplacian term irrelevant, z = ReLU(1) = 1
    auto ones = gcn_forward(tiny_l1(1.0, 0.0), k3);
    for (double z : ones) CHECK(z == doctest::Approx(1.0));
    // Theta0=0, Theta1=1 on a regular graph: L*ones = 0, so z = 0
    auto zeros = gcn_forward(tiny_l1(0.0, 1.0), k3);
    for (double z : zeros) CHECK(z == doctest::Approx(0.0));
    // star: center ReLU(1 - sqrt(3)) = 0, leaves 1 - 1/sqrt(3)
    ConflictGraph s3 = oracles::star(3);
    auto zs = gcn_forward(tiny_l1(0.0, 1.0), s3);
    CHECK(zs[0] == doctest::Approx(0.0));
    for (int leaf = 1; leaf <= 3; ++leaf)
        CHECK(zs[leaf] == doctest::Approx(1.0 - 1.0 / std::sqrt(3.0)));
}

TEST_CASE("gcn_forward: isolated vertex runs the full ReLU chain") {
    // degree 0 keeps the Laplacian row as identity, so each layer sees
    // x * (theta0 + theta1)
    ConflictGraph lone = oracles::edgeless(1);
    GcnModel m = init_gcn(2, 4, 0.01, 9);
    auto z = gcn_forward(m, lone);
    std::vector<double> x = {1.0};
    for (int l = 0; l < 2; ++l) {
        std::vector<double> nx(m.dims[l + 1], 0.0);
        for (int j = 0; j < m.dims[l + 1]; ++j) {
            for (int i = 0; i < m.dims[l]; ++i)
                nx[j] += x[i] * (m.theta0[l][i][j] + m.theta1[l][i][j]);
            bool last = l == 1;
            if (nx[j] < 0) nx[j] = last ? 0.0 : nx[j] * m.leaky_slope;
        }
        x = nx;
    }
    CHECK(z[0] == doctest::Approx(x[0]).epsilon(1e-12));
}

TEST_CASE("gcn output is nonnegative for random models and graphs") {
    for (int trial = 0; trial < 10; ++trial) {
        GcnModel m = init_gcn(1 + trial % 3, 6, 0.05, 100 + trial);
        ConflictGraph g = generate_er(25, 5.0, 200 + trial);
        for (double z : gcn_forward(m, g)) CHECK(z >= 0.0);
    }
}

TEST_CASE("local message-passing forward equals the matrix forward") {
    ConflictGraph k3 = oracles::complete(3);
    GcnModel mk = init_gcn(2, 5, 0.01, 7);
    auto a = gcn_forward(mk, k3);
    auto b = gcn_forward_local(mk, k3);
    for (int v = 0; v < 3; ++v) CHECK(std::fabs(a[v] - b[v]) <= 1e-9);

    for (int L : {1, 2, 3}) {
        GcnModel m = init_gcn(L, 8, 0.01, 50 + L);
        ConflictGraph g = generate_er(30, 5.0, 300 + L);
        auto zm = gcn_forward(m, g);
        auto zl = gcn_forward_local(m, g);
        for (int v = 0; v < 30; ++v) CHECK(std::fabs(zm[v] - zl[v]) <= 1e-9);
    }
}

TEST_CASE("gcn_forward is exactly permutation equivariant") {
    Rng rng(61);
    for (int trial = 0; trial < 10; ++trial) {
        int n = 12;
        ConflictGraph g = generate_er(n, 4.0, 700 + trial);
        GcnModel m = init_gcn(2, 6, 0.01, 800 + trial);
        std::vector<int> pi(n);
        std::iota(pi.begin(), pi.end(), 0);
        for (int i = n - 1; i > 0; --i)
            std::swap(pi[i], pi[rng.uniform_int(i + 1)]);
        auto z = gcn_forward(m, g);
        auto zp = gcn_forward(m, permuted(g, pi));
        for (int v = 0; v < n; ++v) CHECK(z[v] == zp[pi[v]]);  // bitwise
    }
}

TEST_CASE("gcn_backward: pinned hand computation on K3") {
    ConflictGraph k3 = oracles::complete(3);
    GcnModel m = tiny_l1(1.0, 0.0);
    GcnCache cache;
    gcn_forward(m, k3, &cache);
    GcnGradients g0 = gcn_backward(m, k3, cache, {0.0, 0.0, 0.0});
    CHECK(g0.norm() == 0.0);
    GcnGradients g1 = gcn_backward(m, k3, cache, {1.0, 1.0, 1.0});
    CHECK(g1.theta0[0][0][0] == doctest::Approx(3.0));  // sum of x=1 over vertices
    CHECK(g1.theta1[0][0][0] == doctest::Approx(0.0));  // L*ones = 0 on K3
}

TEST_CASE("gcn_backward matches finite differences for L in {1,2,3}") {
    Rng rng(71);
    for (int L : {1, 2, 3}) {
        GcnModel m = init_gcn(L, 5, 0.01, 900 + L);
        // lift the bias weights so the ReLU chain stays mostly active;
        // dead units give 0 = 0 everywhere, which checks nothing
        for (auto& layer : m.theta0)
            for (auto& row : layer)
                for (double& w : row) w += 0.6;
        ConflictGraph g = generate_er(20, 4.0, 910 + L);
        std::vector<double> c(20);
        for (auto& x : c) x = rng.normal();

        GcnCache cache;
        gcn_forward(m, g, &cache);
        std::vector<double> dJ(c);
        GcnGradients grads = gcn_backward(m, g, cache, dJ);

        const double h = 1e-5;
        int checked = 0;
        for (int l = 0; l < L; ++l)
            for (int side = 0; side < 2; ++side) {
                auto& th = side ? m.theta1[l] : m.theta0[l];
                const auto& gr = side ? grads.theta1[l] : grads.theta0[l];
                for (std::size_t i = 0; i < th.size(); ++i)
                    for (std::size_t j = 0; j < th[i].size(); ++j) {
                        double keep = th[i][j];
                        th[i][j] = keep + h;
                        double up = linear_objective(m, g, c);
                        th[i][j] = keep - h;
                        double dn = linear_objective(m, g, c);
                        th[i][j] = keep;
                        double fd = (up - dn) / (2.0 * h);
                        if (std::fabs(fd) < 1e-7 && std::fabs(gr[i][j]) < 1e-7) continue;
                        CHECK(oracles::rel_err(gr[i][j], fd) <= 1e-4);
                        ++checked;
                    }
            }
        CHECK(checked > 0);
    }
}

TEST_CASE("gcn_backward rejects a cache from a different graph") {
    GcnModel m = init_gcn(1, 4, 0.01, 3);
    ConflictGraph g1 = generate_er(10, 3.0, 1);
    ConflictGraph g2 = generate_er(12, 3.0, 2);
    GcnCache cache;
    gcn_forward(m, g1, &cache);
    CHECK_THROWS_AS(gcn_backward(m, g2, cache, std::vector<double>(12, 1.0)), std::exception);
}

TEST_CASE("apply_gradient subtracts step * grad") {
    GcnModel m = tiny_l1(1.0, -0.5);
    GcnGradients g;
    g.theta0 = {{{2.0}}};
    g.theta1 = {{{-4.0}}};
    apply_gradient(m, g, 0.25);
    CHECK(m.theta0[0][0][0] == doctest::Approx(0.5));
    CHECK(m.theta1[0][0][0] == doctest::Approx(0.5));
}

TEST_CASE("gradient container arithmetic: norm, scale, accumulate") {
    GcnGradients a;
    a.theta0 = {{{3.0}}};
    a.theta1 = {{{4.0}}};
    CHECK(a.norm() == doctest::Approx(5.0));
    a.scale(2.0);
    CHECK(a.theta0[0][0][0] == 6.0);
    GcnGradients b;
    b.theta0 = {{{1.0}}};
    b.theta1 = {{{1.0}}};
    a.accumulate(b, -6.0);
    CHECK(a.theta0[0][0][0] == doctest::Approx(0.0));
    CHECK(a.theta1[0][0][0] == doctest::Approx(2.0));
}

TEST_CASE("gcn save/load round trip is bitwise") {
    GcnModel m = init_gcn(2, 6, 0.01, 55);
    m.trained_epochs = 7;
    std::string path = "test_gcn_roundtrip.json";
    save_gcn(m, path);
    GcnModel back = load_gcn(path);
    CHECK(back.layer_count == m.layer_count);
    CHECK(back.dims == m.dims);
    CHECK(back.leaky_slope == m.leaky_slope);
    CHECK(back.theta0 == m.theta0);
    CHECK(back.theta1 == m.theta1);
    CHECK(back.init_seed == m.init_seed);
    CHECK(back.trained_epochs == m.trained_epochs);
    std::remove(path.c_str());
}
