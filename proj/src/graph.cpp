#include "linksparse/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "linksparse/rng.hpp"

namespace linksparse {

using nlohmann::json;

bool ConflictGraph::has_edge(int u, int v) const {
    const auto& nb = adjacency[u];
    return std::binary_search(nb.begin(), nb.end(), v);
}

std::vector<std::array<int, 2>> ConflictGraph::edges() const {
    std::vector<std::array<int, 2>> out;
    out.reserve(static_cast<std::size_t>(edge_count));
    for (int u = 0; u < vertex_count; ++u)
        for (int v : adjacency[u])
            if (u < v) out.push_back({u, v});
    return out;
}

ConflictGraph graph_from_edges(int n, const std::vector<std::array<int, 2>>& edges) {
    if (n < 0) throw std::invalid_argument("graph_from_edges: negative vertex count");
    ConflictGraph g;
    g.vertex_count = n;
    g.adjacency.assign(n, {});
    for (const auto& e : edges) {
        int u = e[0], v = e[1];
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::invalid_argument("graph_from_edges: vertex index out of range");
        if (u == v) throw std::invalid_argument("graph_from_edges: self-loop");
        g.adjacency[u].push_back(v);
        g.adjacency[v].push_back(u);
    }
    for (int v = 0; v < n; ++v) {
        auto& nb = g.adjacency[v];
        std::sort(nb.begin(), nb.end());
        if (std::adjacent_find(nb.begin(), nb.end()) != nb.end())
            throw std::invalid_argument("graph_from_edges: duplicate edge");
        g.edge_count += static_cast<long long>(nb.size());
    }
    g.edge_count /= 2;
    return g;
}

ConflictGraph induced_subgraph(const ConflictGraph& g, const std::vector<char>& keep,
                               std::vector<int>* sparse_to_orig) {
    if (static_cast<int>(keep.size()) != g.vertex_count)
        throw std::invalid_argument("induced_subgraph: mask size mismatch");
    std::vector<int> to_sparse(g.vertex_count, -1);
    std::vector<int> to_orig;
    for (int v = 0; v < g.vertex_count; ++v)
        if (keep[v]) {
            to_sparse[v] = static_cast<int>(to_orig.size());
            to_orig.push_back(v);
        }
    ConflictGraph s;
    s.vertex_count = static_cast<int>(to_orig.size());
    s.adjacency.assign(s.vertex_count, {});
    for (int sv = 0; sv < s.vertex_count; ++sv) {
        for (int u : g.adjacency[to_orig[sv]])
            if (to_sparse[u] >= 0) s.adjacency[sv].push_back(to_sparse[u]);
        s.edge_count += static_cast<long long>(s.adjacency[sv].size());
    }
    s.edge_count /= 2;
    if (sparse_to_orig) *sparse_to_orig = std::move(to_orig);
    return s;
}

ConflictGraph generate_er(int n, double avg_degree, std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("generate_er: n must be >= 1");
    if (avg_degree < 0.0 || (n > 1 && avg_degree > n - 1) || (n == 1 && avg_degree > 0.0))
        throw std::invalid_argument("generate_er: avg_degree outside [0, n-1]");
    double p = (n > 1) ? avg_degree / (n - 1) : 0.0;
    Rng rng(seed);
    std::vector<std::array<int, 2>> edges;
    for (int u = 0; u < n; ++u)
        for (int v = u + 1; v < n; ++v)
            if (rng.u01() < p) edges.push_back({u, v});
    ConflictGraph g = graph_from_edges(n, edges);
    g.model = "er";
    g.gen_param = avg_degree;
    g.gen_seed = seed;
    return g;
}

ConflictGraph generate_ba(int n, double m, std::uint64_t seed) {
    if (m < 1.0 || m >= n) throw std::invalid_argument("generate_ba: need 1 <= m < n");
    int m_lo = static_cast<int>(std::floor(m));
    double frac = m - m_lo;
    int seed_size = static_cast<int>(std::ceil(m));
    if (seed_size < 2) seed_size = 2;  // m = 1 still needs an edge to start from
    if (seed_size > n) seed_size = n;

    Rng rng(seed);
    std::vector<std::array<int, 2>> edges;
    // complete seed graph
    for (int u = 0; u < seed_size; ++u)
        for (int v = u + 1; v < seed_size; ++v) edges.push_back({u, v});
    // repeated-endpoint list for degree-proportional sampling
    std::vector<int> endpoints;
    endpoints.reserve(static_cast<std::size_t>(2.2 * m * n));
    for (const auto& e : edges) {
        endpoints.push_back(e[0]);
        endpoints.push_back(e[1]);
    }
    std::vector<char> picked(n, 0);
    for (int v = seed_size; v < n; ++v) {
        int want = m_lo + ((frac > 0.0 && rng.u01() < frac) ? 1 : 0);
        if (want > v) want = v;  // cannot attach to more vertices than exist
        std::vector<int> targets;
        targets.reserve(want);
        while (static_cast<int>(targets.size()) < want) {
            int t = endpoints[rng.uniform_int(endpoints.size())];
            if (!picked[t]) {
                picked[t] = 1;
                targets.push_back(t);
            }
        }
        for (int t : targets) {
            picked[t] = 0;
            edges.push_back({t, v});
            endpoints.push_back(t);
            endpoints.push_back(v);
        }
    }
    ConflictGraph g = graph_from_edges(n, edges);
    g.model = "ba";
    g.gen_param = m;
    g.gen_seed = seed;
    return g;
}

SpatialNetwork spatial_from_positions(const std::vector<std::array<double, 2>>& positions,
                                      double link_radius, double interference_radius) {
    if (link_radius <= 0.0 || interference_radius < link_radius)
        throw std::invalid_argument("spatial_from_positions: need interference_radius >= link_radius > 0");

    int n_devices = static_cast<int>(positions.size());
    SpatialNetwork net;
    net.device_positions = positions;
    auto dist2 = [&](int a, int b) {
        double dx = net.device_positions[a][0] - net.device_positions[b][0];
        double dy = net.device_positions[a][1] - net.device_positions[b][1];
        return dx * dx + dy * dy;
    };
    double lr2 = link_radius * link_radius;
    double ir2 = interference_radius * interference_radius;
    for (int a = 0; a < n_devices; ++a)
        for (int b = a + 1; b < n_devices; ++b)
            if (dist2(a, b) <= lr2) net.links.push_back({a, b});

    int nl = static_cast<int>(net.links.size());
    std::vector<std::array<int, 2>> conflicts;
    for (int i = 0; i < nl; ++i) {
        for (int j = i + 1; j < nl; ++j) {
            const auto& li = net.links[i];
            const auto& lj = net.links[j];
            bool clash = li[0] == lj[0] || li[0] == lj[1] || li[1] == lj[0] || li[1] == lj[1];
            for (int a = 0; !clash && a < 2; ++a)
                for (int b = 0; !clash && b < 2; ++b)
                    if (dist2(li[a], lj[b]) <= ir2) clash = true;
            if (clash) conflicts.push_back({i, j});
        }
    }
    net.conflict = graph_from_edges(nl, conflicts);
    net.conflict.model = "spatial";
    net.conflict.gen_param = (link_radius > 0.0) ? interference_radius / link_radius : 0.0;
    return net;
}

SpatialNetwork generate_spatial(int n_devices, double side, double link_radius,
                                double interference_radius, std::uint64_t seed) {
    if (n_devices < 0) throw std::invalid_argument("generate_spatial: negative device count");
    if (side <= 0.0) throw std::invalid_argument("generate_spatial: side must be positive");

    Rng rng(seed);
    std::vector<std::array<double, 2>> positions;
    positions.reserve(n_devices);
    for (int i = 0; i < n_devices; ++i) {
        double x = side * rng.u01();
        double y = side * rng.u01();
        positions.push_back({x, y});
    }
    SpatialNetwork net = spatial_from_positions(positions, link_radius, interference_radius);
    net.conflict.gen_seed = seed;
    return net;
}

std::vector<std::vector<double>> normalized_laplacian_apply(
    const ConflictGraph& g, const std::vector<std::vector<double>>& x) {
    if (static_cast<int>(x.size()) != g.vertex_count)
        throw std::invalid_argument("normalized_laplacian_apply: row count mismatch");
    std::size_t cols = x.empty() ? 0 : x[0].size();
    for (const auto& row : x)
        if (row.size() != cols)
            throw std::invalid_argument("normalized_laplacian_apply: ragged feature matrix");

    std::vector<double> inv_sqrt_deg(g.vertex_count, 0.0);
    for (int v = 0; v < g.vertex_count; ++v)
        if (g.degree(v) > 0) inv_sqrt_deg[v] = 1.0 / std::sqrt(static_cast<double>(g.degree(v)));

    std::vector<std::vector<double>> y(g.vertex_count, std::vector<double>(cols, 0.0));
    std::vector<double> terms;
    for (int v = 0; v < g.vertex_count; ++v) {
        for (std::size_t c = 0; c < cols; ++c) {
            terms.clear();
            for (int u : g.adjacency[v]) terms.push_back(x[u][c] * inv_sqrt_deg[u]);
            // canonical order: value-sorted sum is invariant under relabeling
            std::sort(terms.begin(), terms.end());
            double acc = 0.0;
            for (double t : terms) acc += t;
            y[v][c] = x[v][c] - inv_sqrt_deg[v] * acc;
        }
    }
    return y;
}

static json graph_to_json(const ConflictGraph& g) {
    json j;
    j["vertex_count"] = g.vertex_count;
    json edges = json::array();
    for (const auto& e : g.edges()) edges.push_back({e[0], e[1]});
    j["edges"] = std::move(edges);
    if (!g.model.empty())
        j["metadata"] = {{"model", g.model}, {"param", g.gen_param}, {"seed", g.gen_seed}};
    return j;
}

static ConflictGraph graph_from_json(const json& j) {
    std::vector<std::array<int, 2>> edges;
    for (const auto& e : j.at("edges")) edges.push_back({e.at(0).get<int>(), e.at(1).get<int>()});
    ConflictGraph g = graph_from_edges(j.at("vertex_count").get<int>(), edges);
    if (j.contains("metadata")) {
        const auto& md = j["metadata"];
        g.model = md.value("model", "");
        g.gen_param = md.value("param", 0.0);
        g.gen_seed = md.value("seed", std::uint64_t{0});
    }
    return g;
}

static void write_json_file(const json& j, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

static json read_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j;
    in >> j;
    return j;
}

void save_graph(const ConflictGraph& g, const std::string& path) {
    write_json_file(graph_to_json(g), path);
}

ConflictGraph load_graph(const std::string& path) { return graph_from_json(read_json_file(path)); }

void save_spatial(const SpatialNetwork& net, const std::string& path) {
    json j = graph_to_json(net.conflict);
    json pos = json::array();
    for (const auto& p : net.device_positions) pos.push_back({p[0], p[1]});
    j["device_positions"] = std::move(pos);
    json links = json::array();
    for (const auto& l : net.links) links.push_back({l[0], l[1]});
    j["links"] = std::move(links);
    write_json_file(j, path);
}

SpatialNetwork load_spatial(const std::string& path) {
    json j = read_json_file(path);
    SpatialNetwork net;
    net.conflict = graph_from_json(j);
    for (const auto& p : j.at("device_positions"))
        net.device_positions.push_back({p.at(0).get<double>(), p.at(1).get<double>()});
    for (const auto& l : j.at("links")) net.links.push_back({l.at(0).get<int>(), l.at(1).get<int>()});
    return net;
}

}  // namespace linksparse
