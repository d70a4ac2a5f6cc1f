#pragma once

// Independent reference implementations for the test suite. Everything
// here is deliberately naive: dense matrices, sequential loops, direct
// counting. The production code must agree with these, not the other
// way around.

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <vector>

#include "linksparse/graph.hpp"

namespace oracles {

using linksparse::ConflictGraph;
using Mat = std::vector<std::vector<double>>;

// Dense normalized Laplacian I - D^{-1/2} A D^{-1/2}; isolated vertices
// get an identity row.
inline Mat dense_laplacian(const ConflictGraph& g) {
    int n = g.vertex_count;
    Mat m(n, std::vector<double>(n, 0.0));
    for (int v = 0; v < n; ++v) {
        m[v][v] = 1.0;
        for (int u : g.adjacency[v])
            m[v][u] = -1.0 / std::sqrt(static_cast<double>(g.degree(v)) * g.degree(u));
    }
    return m;
}

inline Mat dense_apply(const Mat& m, const Mat& x) {
    std::size_t rows = m.size();
    std::size_t cols = x.empty() ? 0 : x[0].size();
    Mat y(rows, std::vector<double>(cols, 0.0));
    for (std::size_t i = 0; i < rows; ++i)
        for (std::size_t k = 0; k < m[i].size(); ++k)
            if (m[i][k] != 0.0)
                for (std::size_t j = 0; j < cols; ++j) y[i][j] += m[i][k] * x[k][j];
    return y;
}

// Sequential greedy maximum-weight independent set: repeatedly take the
// globally heaviest live vertex (lowest index on ties), drop neighbors.
inline std::vector<char> greedy_mis(const ConflictGraph& g, const std::vector<double>& w) {
    int n = g.vertex_count;
    std::vector<char> live(n, 1), picked(n, 0);
    for (;;) {
        int best = -1;
        for (int v = 0; v < n; ++v)
            if (live[v] && (best < 0 || w[v] > w[best])) best = v;
        if (best < 0) break;
        picked[best] = 1;
        live[best] = 0;
        for (int u : g.adjacency[best]) live[u] = 0;
    }
    return picked;
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

inline double rel_err(double got, double want) {
    double scale = std::max({std::fabs(got), std::fabs(want), 1e-12});
    return std::fabs(got - want) / scale;
}

// Empirical step CDF P(X <= x) and its left limit P(X < x).
struct StepCdf {
    std::vector<double> sorted;
    explicit StepCdf(std::vector<double> samples) : sorted(std::move(samples)) {
        std::sort(sorted.begin(), sorted.end());
    }
    double at(double x) const {
        auto it = std::upper_bound(sorted.begin(), sorted.end(), x);
        return static_cast<double>(it - sorted.begin()) / sorted.size();
    }
    double below(double x) const {
        auto it = std::lower_bound(sorted.begin(), sorted.end(), x);
        return static_cast<double>(it - sorted.begin()) / sorted.size();
    }
};

// Small named graphs.
inline ConflictGraph path(int n) {
    std::vector<std::array<int, 2>> e;
    for (int v = 0; v + 1 < n; ++v) e.push_back({v, v + 1});
    return linksparse::graph_from_edges(n, e);
}

inline ConflictGraph complete(int n) {
    std::vector<std::array<int, 2>> e;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v) e.push_back({u, v});
    return linksparse::graph_from_edges(n, e);
}

// Center is vertex 0.
inline ConflictGraph star(int leaves) {
    std::vector<std::array<int, 2>> e;
    for (int v = 1; v <= leaves; ++v) e.push_back({0, v});
    return linksparse::graph_from_edges(leaves + 1, e);
}

inline ConflictGraph edgeless(int n) { return linksparse::graph_from_edges(n, {}); }

inline double mean(const std::vector<double>& v) {
    double acc = 0.0;
    for (double x : v) acc += x;
    return v.empty() ? 0.0 : acc / v.size();
}

}  // namespace oracles
