#pragma once

// Time-slotted network simulation: Poisson arrivals, normal link rates
// (ceil + clip), backlog-times-rate utilities, per-slot sparsification
// and scheduling, queue evolution, and episode metrics.

#include <cstdint>
#include <string>
#include <vector>

#include "linksparse/policy.hpp"
#include "linksparse/rng.hpp"

namespace linksparse {

enum class Protocol { lgs_ideal, lgs_deadline, lgs_flexible, qcsma, csma };

const char* protocol_name(Protocol p);
Protocol protocol_from_name(const std::string& name);
inline bool is_csma(Protocol p) { return p == Protocol::qcsma || p == Protocol::csma; }

struct TrafficConfig {
    double load = 0.03;        // mu: arrival rate as a fraction of mean service
    double rate_mean = 50.0;   // packets/slot before ceil+clip
    double rate_std = 25.0;
    double rate_clip_lo = 0.0;
    double rate_clip_hi = 100.0;
    int horizon = 200;         // T slots
    double expected_rate = 0.0;  // E[r] after ceil+clip; <= 0 means "estimate me"

    double arrival_rate() const { return load * expected_rate; }  // lambda
};

// ceil+clip shifts the normal mean, so E[r] comes from a one-off
// Monte-Carlo of the actual transform (10^6 draws by default).
double estimate_expected_rate(const TrafficConfig& cfg, std::uint64_t seed = 1,
                              int draws = 1000000);

// fills expected_rate if unset; returns the completed config
TrafficConfig resolve_traffic(TrafficConfig cfg);

struct TimingConfig {
    double slot_ms = 100.0;
    double tau_ms = 1.0;    // per control message, flexible overhead
    double comm_ms = 70.0;  // nominal payload time inside the slot
    int deadline_k = 30;    // max control messages, fixed deadline
    int window = 32;        // CSMA contention window W
};

std::vector<double> compute_utility(const std::vector<double>& q, const std::vector<double>& r);

// q' = q - transmit * min(mult * r, q) + a, elementwise; q' >= 0 follows
// from service never exceeding backlog (no clamping involved).
std::vector<double> step_queues(const std::vector<double>& q, const std::vector<double>& r,
                                const std::vector<char>& transmit,
                                const std::vector<double>& multipliers,
                                const std::vector<double>& arrivals);

std::vector<double> sample_link_rates(int n, const TrafficConfig& cfg, Rng& rng);
std::vector<double> sample_arrivals(double lambda, int n, Rng& rng);

struct SlotTrace {
    int t = 0;
    int retained_count = 0;
    int scheduled_count = 0;
    double served_packets = 0.0;
    double mean_backlog = 0.0;
};

// per-slot raw vectors for conservation audits (optional, heavy)
struct DetailedTrace {
    std::vector<std::vector<double>> q_before, rates, arrivals, served, q_after;
    std::vector<std::vector<char>> transmit;
};

struct EpisodeMetrics {
    double mean_backlog = 0.0;      // packets, averaged over links and slots
    double mean_post_degree = 0.0;  // avg d^s over retained link-slots
    double total_utility = 0.0;     // sum of u over scheduled link-slots
    long long message_total = 0;    // greedy protocols
    long long collision_total = 0;  // csma protocols
    std::vector<SlotTrace> trace;   // filled when requested
};

struct EpisodeOptions {
    bool record_trace = false;
    DetailedTrace* detail = nullptr;
};

// Runs T slots of sparsify -> contend -> transmit -> queue update.
// spec.z must be precomputed for gcn-family policies (topology is static
// inside an episode). Every schedule is checked for independence against
// the original graph; a violation throws std::logic_error.
EpisodeMetrics run_episode(const ConflictGraph& g, const PolicySpec& spec, Protocol protocol,
                           const TrafficConfig& traffic, const TimingConfig& timing,
                           std::uint64_t seed, const EpisodeOptions& opts = {});

void save_trace_csv(const std::vector<SlotTrace>& trace, const std::string& path);

}  // namespace linksparse
