#include "linksparse/traffic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "linksparse/scheduler.hpp"

namespace linksparse {

const char* protocol_name(Protocol p) {
    switch (p) {
        case Protocol::lgs_ideal: return "lgs-ideal";
        case Protocol::lgs_deadline: return "lgs-deadline";
        case Protocol::lgs_flexible: return "lgs-flexible";
        case Protocol::qcsma: return "qcsma";
        case Protocol::csma: return "csma";
    }
    return "?";
}

Protocol protocol_from_name(const std::string& name) {
    if (name == "lgs-ideal") return Protocol::lgs_ideal;
    if (name == "lgs-deadline") return Protocol::lgs_deadline;
    if (name == "lgs-flexible") return Protocol::lgs_flexible;
    if (name == "qcsma") return Protocol::qcsma;
    if (name == "csma") return Protocol::csma;
    throw std::invalid_argument("unknown protocol: " + name);
}

double estimate_expected_rate(const TrafficConfig& cfg, std::uint64_t seed, int draws) {
    Rng rng(derive_seed(seed, "rate-mean-estimate"));
    double acc = 0.0;
    for (int i = 0; i < draws; ++i) {
        double r = std::ceil(rng.normal(cfg.rate_mean, cfg.rate_std));
        acc += std::clamp(r, cfg.rate_clip_lo, cfg.rate_clip_hi);
    }
    return acc / draws;
}

TrafficConfig resolve_traffic(TrafficConfig cfg) {
    if (cfg.load <= 0.0) throw std::invalid_argument("TrafficConfig: load must be > 0");
    if (cfg.horizon < 1) throw std::invalid_argument("TrafficConfig: horizon must be >= 1");
    if (cfg.expected_rate <= 0.0) cfg.expected_rate = estimate_expected_rate(cfg);
    return cfg;
}

std::vector<double> compute_utility(const std::vector<double>& q, const std::vector<double>& r) {
    if (q.size() != r.size()) throw std::invalid_argument("compute_utility: size mismatch");
    std::vector<double> u(q.size());
    for (std::size_t v = 0; v < q.size(); ++v) {
        if (q[v] < 0.0 || r[v] < 0.0)
            throw std::invalid_argument("compute_utility: negative input");
        u[v] = q[v] * r[v];
    }
    return u;
}

std::vector<double> step_queues(const std::vector<double>& q, const std::vector<double>& r,
                                const std::vector<char>& transmit,
                                const std::vector<double>& multipliers,
                                const std::vector<double>& arrivals) {
    std::size_t n = q.size();
    if (r.size() != n || transmit.size() != n || multipliers.size() != n || arrivals.size() != n)
        throw std::invalid_argument("step_queues: size mismatch");
    std::vector<double> next(n);
    for (std::size_t v = 0; v < n; ++v) {
        double served = transmit[v] ? std::min(multipliers[v] * r[v], q[v]) : 0.0;
        next[v] = q[v] - served + arrivals[v];
    }
    return next;
}

std::vector<double> sample_link_rates(int n, const TrafficConfig& cfg, Rng& rng) {
    if (n < 1) throw std::invalid_argument("sample_link_rates: n must be >= 1");
    std::vector<double> r(n);
    for (int v = 0; v < n; ++v)
        r[v] = std::clamp(std::ceil(rng.normal(cfg.rate_mean, cfg.rate_std)), cfg.rate_clip_lo,
                          cfg.rate_clip_hi);
    return r;
}

std::vector<double> sample_arrivals(double lambda, int n, Rng& rng) {
    if (lambda < 0.0) throw std::invalid_argument("sample_arrivals: lambda must be >= 0");
    std::vector<double> a(n);
    for (int v = 0; v < n; ++v) a[v] = static_cast<double>(rng.poisson(lambda));
    return a;
}

EpisodeMetrics run_episode(const ConflictGraph& g, const PolicySpec& spec, Protocol protocol,
                           const TrafficConfig& traffic, const TimingConfig& timing,
                           std::uint64_t seed, const EpisodeOptions& opts) {
    TrafficConfig cfg = resolve_traffic(traffic);
    int n = g.vertex_count;
    double lambda = cfg.arrival_rate();

    Rng rates_rng(derive_seed(seed, "episode/rates"));
    Rng arrivals_rng(derive_seed(seed, "episode/arrivals"));
    Rng csma_rng(derive_seed(seed, "episode/csma"));

    std::vector<double> q(n, 0.0);
    std::vector<char> priority(n, 0);

    EpisodeMetrics metrics;
    double backlog_acc = 0.0;
    long long retained_slots = 0;
    long long post_degree_acc = 0;

    for (int t = 1; t <= cfg.horizon; ++t) {
        std::vector<double> r = sample_link_rates(n, cfg, rates_rng);
        std::vector<double> a = sample_arrivals(lambda, n, arrivals_rng);
        std::vector<double> u = compute_utility(q, r);
        SparsifiedState s = apply_policy(g, u, spec);

        Schedule sched;
        TimingResult timing_result;
        bool have_timing = false;
        switch (protocol) {
            case Protocol::lgs_ideal:
                sched = lgs_schedule(s);
                break;
            case Protocol::lgs_deadline:
                sched = lgs_schedule(s);
                timing_result = apply_fixed_deadline(sched, s, timing.deadline_k);
                have_timing = true;
                break;
            case Protocol::lgs_flexible:
                sched = lgs_schedule(s);
                timing_result = apply_flexible_overhead(sched, s, timing.tau_ms, timing.slot_ms,
                                                        timing.comm_ms);
                have_timing = true;
                break;
            case Protocol::qcsma:
                sched = csma_schedule(s, timing.window, true, priority, csma_rng);
                break;
            case Protocol::csma:
                sched = csma_schedule(s, timing.window, false, priority, csma_rng);
                break;
        }
        if (!validate_independent(g, sched.scheduled))
            throw std::logic_error("run_episode: scheduler produced a conflicting set");

        const std::vector<char>& transmit = have_timing ? timing_result.transmit : sched.scheduled;
        std::vector<double> mult;
        if (!have_timing) mult.assign(n, 1.0);
        const std::vector<double>& multipliers = have_timing ? timing_result.multipliers : mult;

        std::vector<double> q_next = step_queues(q, r, transmit, multipliers, a);

        int scheduled_count = 0;
        for (int v = 0; v < n; ++v)
            if (sched.scheduled[v]) {
                ++scheduled_count;
                metrics.total_utility += u[v];
            }
        metrics.message_total += sched.message_count;
        metrics.collision_total += sched.collision_count;
        retained_slots += s.sparse_graph.vertex_count;
        for (int d : s.post_degrees) post_degree_acc += d;
        double slot_backlog = 0.0;
        for (double qv : q_next) slot_backlog += qv;
        backlog_acc += slot_backlog;

        if (opts.record_trace || opts.detail) {
            double served_sum = 0.0;
            std::vector<double> served;
            if (opts.detail) served.assign(n, 0.0);
            for (int v = 0; v < n; ++v) {
                double sv = transmit[v] ? std::min(multipliers[v] * r[v], q[v]) : 0.0;
                served_sum += sv;
                if (opts.detail) served[v] = sv;
            }
            if (opts.record_trace)
                metrics.trace.push_back(
                    {t, s.sparse_graph.vertex_count, scheduled_count, served_sum,
                     n > 0 ? slot_backlog / n : 0.0});
            if (opts.detail) {
                opts.detail->q_before.push_back(q);
                opts.detail->rates.push_back(r);
                opts.detail->arrivals.push_back(a);
                opts.detail->served.push_back(std::move(served));
                opts.detail->q_after.push_back(q_next);
                opts.detail->transmit.push_back(transmit);
            }
        }

        q = std::move(q_next);
        if (is_csma(protocol))
            for (int v = 0; v < n; ++v) priority[v] = (sched.scheduled[v] && q[v] > 0.0) ? 1 : 0;
    }

    metrics.mean_backlog = (n > 0) ? backlog_acc / (static_cast<double>(n) * cfg.horizon) : 0.0;
    metrics.mean_post_degree =
        retained_slots > 0 ? static_cast<double>(post_degree_acc) / retained_slots : 0.0;
    return metrics;
}

void save_trace_csv(const std::vector<SlotTrace>& trace, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "t,retained_count,scheduled_count,served_packets,mean_backlog\n";
    for (const auto& row : trace)
        out << row.t << ',' << row.retained_count << ',' << row.scheduled_count << ','
            << row.served_packets << ',' << row.mean_backlog << '\n';
}

}  // namespace linksparse
