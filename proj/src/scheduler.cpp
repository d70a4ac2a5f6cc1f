#include "linksparse/scheduler.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace linksparse {

namespace {
enum : char { kUndecided = 0, kScheduled = 1, kMuted = 2 };
}

Schedule lgs_schedule(const SparsifiedState& s) {
    const ConflictGraph& sg = s.sparse_graph;
    int n_orig = s.graph ? s.graph->vertex_count : static_cast<int>(s.retained.size());
    Schedule out;
    out.scheduled.assign(n_orig, 0);
    out.decision_round.assign(n_orig, 0);

    std::vector<char> status(sg.vertex_count, kUndecided);
    int undecided = sg.vertex_count;
    std::vector<int> winners;
    int round = 0;
    while (undecided > 0) {
        ++round;
        // every still-contending vertex spends an RTS-like and a CTS-like message
        out.message_count += 2LL * undecided;
        winners.clear();
        for (int v = 0; v < sg.vertex_count; ++v) {
            if (status[v] != kUndecided) continue;
            bool best = true;
            for (int u : sg.adjacency[v]) {
                if (status[u] != kUndecided) continue;
                if (s.weights[u] > s.weights[v] ||
                    (s.weights[u] == s.weights[v] && s.sparse_to_orig[u] < s.sparse_to_orig[v])) {
                    best = false;
                    break;
                }
            }
            if (best) winners.push_back(v);
        }
        for (int v : winners) {
            status[v] = kScheduled;
            --undecided;
            out.scheduled[s.sparse_to_orig[v]] = 1;
            out.decision_round[s.sparse_to_orig[v]] = round;
        }
        for (int v : winners)
            for (int u : sg.adjacency[v])
                if (status[u] == kUndecided) {
                    status[u] = kMuted;
                    --undecided;
                }
    }
    return out;
}

TimingResult apply_fixed_deadline(const Schedule& schedule, const SparsifiedState& s, int K) {
    if (K < 1) throw std::invalid_argument("apply_fixed_deadline: K must be >= 1");
    int n = static_cast<int>(schedule.scheduled.size());
    TimingResult r;
    r.transmit.assign(n, 0);
    r.multipliers.assign(n, 0.0);
    for (int sv = 0; sv < s.sparse_graph.vertex_count; ++sv) {
        int v = s.sparse_to_orig[sv];
        if (schedule.scheduled[v] && s.post_degrees[sv] + 1 <= K) {
            r.transmit[v] = 1;
            r.multipliers[v] = 1.0;
        }
    }
    return r;
}

TimingResult apply_flexible_overhead(const Schedule& schedule, const SparsifiedState& s,
                                     double tau_ms, double slot_ms, double comm_ms) {
    if (!(comm_ms > 0.0 && comm_ms < slot_ms))
        throw std::invalid_argument("apply_flexible_overhead: need 0 < comm_ms < slot_ms");
    if (tau_ms <= 0.0) throw std::invalid_argument("apply_flexible_overhead: tau_ms must be > 0");
    int n = static_cast<int>(schedule.scheduled.size());
    TimingResult r;
    r.transmit.assign(n, 0);
    r.multipliers.assign(n, 0.0);
    for (int sv = 0; sv < s.sparse_graph.vertex_count; ++sv) {
        int v = s.sparse_to_orig[sv];
        if (!schedule.scheduled[v]) continue;
        double e = std::min(slot_ms, (s.post_degrees[sv] + 1) * tau_ms);
        double mult = std::max(0.0, slot_ms - e) / comm_ms;
        r.multipliers[v] = mult;
        r.transmit[v] = mult > 0.0 ? 1 : 0;
    }
    return r;
}

Schedule csma_schedule(const SparsifiedState& s, int W, bool weighted,
                       const std::vector<char>& priority, Rng& rng) {
    if (W < 1) throw std::invalid_argument("csma_schedule: W must be >= 1");
    const ConflictGraph& g = *s.graph;
    int n = g.vertex_count;
    if (static_cast<int>(priority.size()) != n)
        throw std::invalid_argument("csma_schedule: priority mask size mismatch");

    Schedule out;
    out.scheduled.assign(n, 0);
    out.decision_round.assign(n, 0);

    // one backoff draw and one activation coin per vertex, every slot,
    // so the stream stays aligned across policies and retained sets
    std::vector<int> backoff(n);
    std::vector<double> coin(n);
    for (int v = 0; v < n; ++v) {
        backoff[v] = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(W)));
        coin[v] = rng.u01();
    }

    for (int v = 0; v < n; ++v)
        if (priority[v]) out.scheduled[v] = 1;

    // retained links conflicting with a priority link sit this slot out
    std::vector<char> contender(n, 0);
    for (int sv = 0; sv < s.sparse_graph.vertex_count; ++sv) {
        int v = s.sparse_to_orig[sv];
        if (priority[v]) continue;
        bool blocked = false;
        for (int u : g.adjacency[v])
            if (priority[u]) {
                blocked = true;
                break;
            }
        if (!blocked) contender[v] = 1;
    }

    for (int sv = 0; sv < s.sparse_graph.vertex_count; ++sv) {
        int v = s.sparse_to_orig[sv];
        if (!contender[v]) continue;
        bool lowest = true, tied = false;
        for (int su : s.sparse_graph.adjacency[sv]) {
            int u = s.sparse_to_orig[su];
            if (!contender[u]) continue;
            if (backoff[u] < backoff[v]) {
                lowest = false;
                break;
            }
            if (backoff[u] == backoff[v]) tied = true;
        }
        if (!lowest) continue;
        if (tied) {
            ++out.collision_count;  // tied local minimum: nobody transmits
            continue;
        }
        if (weighted) {
            double p = 1.0 / (1.0 + std::exp(-s.weights[sv]));  // e^w / (e^w + 1)
            if (coin[v] >= p) continue;
        }
        out.scheduled[v] = 1;
    }
    return out;
}

bool validate_independent(const ConflictGraph& g, const std::vector<char>& mask) {
    if (static_cast<int>(mask.size()) != g.vertex_count)
        throw std::invalid_argument("validate_independent: mask size mismatch");
    for (int v = 0; v < g.vertex_count; ++v) {
        if (!mask[v]) continue;
        for (int u : g.adjacency[v])
            if (u > v && mask[u]) return false;
    }
    return true;
}

}  // namespace linksparse
