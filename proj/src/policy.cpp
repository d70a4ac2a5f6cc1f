#include "linksparse/policy.hpp"

#include <stdexcept>

namespace linksparse {

const char* policy_name(PolicyKind k) {
    switch (k) {
        case PolicyKind::zero: return "zero";
        case PolicyKind::baseline: return "stat";
        case PolicyKind::baseline_scaled: return "stat-scaled";
        case PolicyKind::gcn: return "gcn";
        case PolicyKind::hybrid: return "hybrid";
    }
    return "?";
}

PolicyKind policy_from_name(const std::string& name) {
    if (name == "zero") return PolicyKind::zero;
    if (name == "stat" || name == "baseline") return PolicyKind::baseline;
    if (name == "stat-scaled" || name == "baseline-scaled" || name == "baseline_scaled")
        return PolicyKind::baseline_scaled;
    if (name == "gcn") return PolicyKind::gcn;
    if (name == "hybrid") return PolicyKind::hybrid;
    throw std::invalid_argument("unknown policy: " + name);
}

SparsifiedState apply_policy(const ConflictGraph& g, const std::vector<double>& u,
                             const PolicySpec& spec) {
    int n = g.vertex_count;
    if (static_cast<int>(u.size()) != n)
        throw std::invalid_argument("apply_policy: utility size mismatch");
    for (double uv : u)
        if (uv < 0.0) throw std::invalid_argument("apply_policy: negative utility");

    bool needs_z = spec.kind == PolicyKind::gcn || spec.kind == PolicyKind::hybrid ||
                   spec.kind == PolicyKind::baseline_scaled;
    if (needs_z && static_cast<int>(spec.z.size()) != n)
        throw std::invalid_argument("apply_policy: policy needs per-vertex z of size n");
    if (needs_z)
        for (double zv : spec.z)
            if (zv < 0.0) throw std::invalid_argument("apply_policy: negative multiplier");

    double mean_z = 0.0;
    if (spec.kind == PolicyKind::baseline_scaled && n > 0) {
        for (double zv : spec.z) mean_z += zv;
        mean_z /= n;
    }

    SparsifiedState s;
    s.graph = &g;
    s.retained.assign(n, 0);
    for (int v = 0; v < n; ++v) {
        double gate;
        switch (spec.kind) {
            case PolicyKind::zero: gate = -1.0; break;  // retain unconditionally
            case PolicyKind::baseline: gate = spec.u_eta; break;
            case PolicyKind::baseline_scaled: gate = mean_z * spec.u_eta; break;
            case PolicyKind::gcn: gate = spec.z[v] * spec.u_eta; break;
            case PolicyKind::hybrid:
                gate = (g.degree(v) > spec.hybrid_degree) ? spec.z[v] * spec.u_eta : 0.0;
                break;
            default: gate = 0.0;
        }
        s.retained[v] = (spec.kind == PolicyKind::zero) ? 1 : (u[v] > gate ? 1 : 0);
    }

    s.sparse_graph = induced_subgraph(g, s.retained, &s.sparse_to_orig);
    s.orig_to_sparse.assign(n, -1);
    for (int sv = 0; sv < s.sparse_graph.vertex_count; ++sv)
        s.orig_to_sparse[s.sparse_to_orig[sv]] = sv;
    s.weights.resize(s.sparse_graph.vertex_count);
    s.post_degrees.resize(s.sparse_graph.vertex_count);
    for (int sv = 0; sv < s.sparse_graph.vertex_count; ++sv) {
        s.weights[sv] = u[s.sparse_to_orig[sv]];
        s.post_degrees[sv] = s.sparse_graph.degree(sv);
    }
    return s;
}

std::vector<double> cutoff_probabilities(const std::vector<double>& z, double u_eta,
                                         const EcdfModel& ecdf) {
    std::vector<double> p(z.size());
    for (std::size_t v = 0; v < z.size(); ++v) {
        if (z[v] < 0.0) throw std::invalid_argument("cutoff_probabilities: negative multiplier");
        p[v] = ecdf.cdf(z[v] * u_eta);
    }
    return p;
}

}  // namespace linksparse
