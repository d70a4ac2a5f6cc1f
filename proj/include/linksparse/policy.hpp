#pragma once

// Per-link contention-withdrawal policies. A policy turns the current
// utility vector into a retained-link set: a link stays in contention
// only while its utility exceeds its gate. Gates:
//   zero            -> 0 (keep everything; the reference policy)
//   baseline        -> u_eta                  (one global threshold)
//   baseline_scaled -> mean(z) * u_eta        (GCN-informed global scale)
//   gcn             -> z(v) * u_eta           (local threshold)
//   hybrid          -> z(v) * u_eta if d(v) > hybrid_degree else 0
// Equality at the gate mutes the link.

#include <string>
#include <vector>

#include "linksparse/ecdf.hpp"
#include "linksparse/graph.hpp"

namespace linksparse {

enum class PolicyKind { zero, baseline, baseline_scaled, gcn, hybrid };

const char* policy_name(PolicyKind k);
PolicyKind policy_from_name(const std::string& name);  // accepts stat/stat-scaled aliases

struct PolicySpec {
    PolicyKind kind = PolicyKind::zero;
    double eta = 0.0;
    double u_eta = 0.0;            // global threshold u^(eta), utility units
    std::vector<double> z;         // per-vertex multipliers (gcn family)
    int hybrid_degree = 25;        // D: degree gate for the hybrid policy
};

struct SparsifiedState {
    const ConflictGraph* graph = nullptr;  // original graph (not owned)
    std::vector<char> retained;            // over original vertices
    ConflictGraph sparse_graph;            // induced on retained, re-indexed
    std::vector<int> sparse_to_orig;
    std::vector<int> orig_to_sparse;       // -1 for muted vertices
    std::vector<double> weights;           // per sparse vertex, = u of retained link
    std::vector<int> post_degrees;         // per sparse vertex, degree in sparse_graph
};

// u must be nonnegative; kinds gcn/hybrid/baseline_scaled require spec.z
// of matching size (std::invalid_argument otherwise).
SparsifiedState apply_policy(const ConflictGraph& g, const std::vector<double>& u,
                             const PolicySpec& spec);

// p_v = ecdf.cdf(z_v * u_eta): probability the link's utility falls at or
// below its gate, i.e. the chance it gets muted.
std::vector<double> cutoff_probabilities(const std::vector<double>& z, double u_eta,
                                         const EcdfModel& ecdf);

}  // namespace linksparse
