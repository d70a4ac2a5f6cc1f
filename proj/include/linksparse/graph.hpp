#pragma once

// Conflict graphs over wireless links: vertices are links, edges are
// interference conflicts. Includes the random generators used by the
// experiment datasets (Erdos-Renyi, Barabasi-Albert, 2D spatial) and
// the normalized-Laplacian operator the GCN is built on.

#include <array>
#include <cstdint>
#include <string>
#include <vector>

namespace linksparse {

struct ConflictGraph {
    int vertex_count = 0;
    std::vector<std::vector<int>> adjacency;  // sorted neighbor lists
    long long edge_count = 0;

    // metadata carried through dataset files; not used by algorithms
    std::string model;           // "er", "ba", "spatial", or empty
    double gen_param = 0.0;      // avg degree (er), m (ba), radius ratio (spatial)
    std::uint64_t gen_seed = 0;

    int degree(int v) const { return static_cast<int>(adjacency[v].size()); }
    bool has_edge(int u, int v) const;
    std::vector<std::array<int, 2>> edges() const;  // u < v, lexicographic
};

// Build from an edge list; validates indices, drops nothing silently:
// self-loops and duplicate edges are rejected with std::invalid_argument.
ConflictGraph graph_from_edges(int n, const std::vector<std::array<int, 2>>& edges);

// Induced subgraph on keep-marked vertices, re-indexed in original order.
ConflictGraph induced_subgraph(const ConflictGraph& g, const std::vector<char>& keep,
                               std::vector<int>* sparse_to_orig = nullptr);

// G(n, k) with k = avg_degree/(n-1); every unordered pair independent.
ConflictGraph generate_er(int n, double avg_degree, std::uint64_t seed);

// Preferential attachment from a complete seed graph; fractional m is
// honored in expectation (attach floor(m) or floor(m)+1 targets), so the
// average degree tends to 2m either way.
ConflictGraph generate_ba(int n, double m, std::uint64_t seed);

struct SpatialNetwork {
    std::vector<std::array<double, 2>> device_positions;
    std::vector<std::array<int, 2>> links;  // device index pairs, u < v
    ConflictGraph conflict;                 // one vertex per link
};

// A link joins every device pair within link_radius; two links conflict
// when they share a device or any cross pair of their devices is within
// interference_radius.
SpatialNetwork spatial_from_positions(const std::vector<std::array<double, 2>>& positions,
                                      double link_radius, double interference_radius);

// Same, with devices placed uniformly in a side x side square.
SpatialNetwork generate_spatial(int n_devices, double side, double link_radius,
                                double interference_radius, std::uint64_t seed);

// y = (I - D^{-1/2} A D^{-1/2}) x, one column per feature. Isolated
// vertices use 1/sqrt(d) == 0, i.e. their row passes through unchanged.
// Neighbor contributions are accumulated in sorted-by-value order so the
// result is bit-identical under any relabeling of the graph.
std::vector<std::vector<double>> normalized_laplacian_apply(
    const ConflictGraph& g, const std::vector<std::vector<double>>& x);

// JSON (de)serialization; spatial networks carry positions and links too.
void save_graph(const ConflictGraph& g, const std::string& path);
ConflictGraph load_graph(const std::string& path);
void save_spatial(const SpatialNetwork& net, const std::string& path);
SpatialNetwork load_spatial(const std::string& path);

}  // namespace linksparse
