#include "linksparse/training.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "linksparse/parallel.hpp"
#include "linksparse/scheduler.hpp"

namespace linksparse {

void UtilityProxy::validate() const {
    if (kind == ProxyKind::simple) {
        if (a1 <= 0.0) throw std::invalid_argument("UtilityProxy: a1 must be > 0");
    } else {
        if (a2 <= 0.0) throw std::invalid_argument("UtilityProxy: a2 must be > 0");
        if (!(a3 > 0.0 && a3 < 1.0)) throw std::invalid_argument("UtilityProxy: need 0 < a3 < 1");
    }
}

std::vector<double> expected_post_degrees(const ConflictGraph& g, const std::vector<double>& p) {
    if (static_cast<int>(p.size()) != g.vertex_count)
        throw std::invalid_argument("expected_post_degrees: size mismatch");
    std::vector<double> ds(g.vertex_count);
    for (int v = 0; v < g.vertex_count; ++v) {
        double acc = 0.0;
        for (int i : g.adjacency[v]) acc += p[i];
        ds[v] = g.degree(v) - acc;
    }
    return ds;
}

double expected_sparse_edges(const ConflictGraph& g, const std::vector<double>& p) {
    for (double pv : p)
        if (pv < 0.0 || pv > 1.0)
            throw std::invalid_argument("expected_sparse_edges: p outside [0,1]");
    std::vector<double> ds = expected_post_degrees(g, p);
    double acc = 0.0;
    for (int v = 0; v < g.vertex_count; ++v) acc += ds[v] * (1.0 - p[v]);
    return 0.5 * acc;
}

std::vector<double> grad_edges_wrt_z(const ConflictGraph& g, const std::vector<double>& z,
                                     double u_eta, const EcdfModel& ecdf) {
    std::vector<double> p = cutoff_probabilities(z, u_eta, ecdf);
    std::vector<double> ds = expected_post_degrees(g, p);
    std::vector<double> grad(g.vertex_count);
    for (int v = 0; v < g.vertex_count; ++v)
        grad[v] = -ds[v] * ecdf.pdf(z[v] * u_eta) * u_eta;
    return grad;
}

double expected_utility_proxy(const ConflictGraph& g, const std::vector<double>& p,
                              const UtilityProxy& proxy) {
    proxy.validate();
    for (double pv : p)
        if (pv < 0.0 || pv > 1.0)
            throw std::invalid_argument("expected_utility_proxy: p outside [0,1]");
    double acc = 0.0;
    if (proxy.kind == ProxyKind::simple) {
        for (int v = 0; v < g.vertex_count; ++v) acc += proxy.a1 * (1.0 - p[v]);
    } else {
        std::vector<double> ds = expected_post_degrees(g, p);
        for (int v = 0; v < g.vertex_count; ++v)
            acc += proxy.a2 * (1.0 - p[v]) * (1.0 - proxy.a3 * ds[v]);
    }
    return acc;
}

std::vector<double> grad_utility_wrt_z(const ConflictGraph& g, const std::vector<double>& z,
                                       double u_eta, const EcdfModel& ecdf,
                                       const UtilityProxy& proxy) {
    proxy.validate();
    std::vector<double> p = cutoff_probabilities(z, u_eta, ecdf);
    std::vector<double> grad(g.vertex_count);
    if (proxy.kind == ProxyKind::simple) {
        for (int v = 0; v < g.vertex_count; ++v)
            grad[v] = -proxy.a1 * ecdf.pdf(z[v] * u_eta) * u_eta;
        return grad;
    }
    std::vector<double> ds = expected_post_degrees(g, p);
    for (int v = 0; v < g.vertex_count; ++v) {
        // own term, plus cross terms: each neighbor's d^s(i) loses p(v)
        double dproxy_dp = -proxy.a2 * (1.0 - proxy.a3 * ds[v]);
        double cross = 0.0;
        for (int i : g.adjacency[v]) cross += 1.0 - p[i];
        dproxy_dp += proxy.a2 * proxy.a3 * cross;
        grad[v] = dproxy_dp * ecdf.pdf(z[v] * u_eta) * u_eta;
    }
    return grad;
}

namespace {

double clamp_unit_open(double x) { return std::clamp(x, 1e-12, 1.0 - 1e-12); }

double scheduled_utility(const Schedule& sched, const std::vector<double>& u) {
    double acc = 0.0;
    for (std::size_t v = 0; v < u.size(); ++v)
        if (sched.scheduled[v]) acc += u[v];
    return acc;
}

Schedule run_constraint_scheduler(const SparsifiedState& s, const TrainConfig& cfg,
                                  std::uint64_t sample_seed) {
    if (is_csma(cfg.scheduler)) {
        // both policies must see identical draws, so reseed per call
        Rng rng(derive_seed(sample_seed, "train/csma"));
        std::vector<char> no_priority(s.retained.size(), 0);
        return csma_schedule(s, cfg.timing.window, cfg.scheduler == Protocol::qcsma, no_priority,
                             rng);
    }
    return lgs_schedule(s);  // timing models do not change the schedule itself
}

}  // namespace

TrainSample compute_train_sample(const GcnModel& model, const ConflictGraph& g,
                                 const EcdfModel& ecdf, const TrainConfig& cfg,
                                 std::uint64_t sample_seed) {
    Rng rng(derive_seed(sample_seed, "train/draws"));
    TrainSample out;
    out.eta = clamp_unit_open(rng.u01());
    out.u_eta = ecdf.quantile(out.eta);

    int n = g.vertex_count;
    std::vector<double> u(n);
    // the surrogate's lower ramp can dip below the sample min; realized
    // backlog-rate utilities are nonnegative
    for (int v = 0; v < n; ++v) u[v] = std::max(0.0, ecdf.quantile(clamp_unit_open(rng.u01())));

    GcnCache cache;
    std::vector<double> z = gcn_forward(model, g, &cache);

    PolicySpec gcn_spec{PolicyKind::gcn, out.eta, out.u_eta, z, 25};
    PolicySpec base_spec{PolicyKind::baseline, out.eta, out.u_eta, {}, 25};
    SparsifiedState s_gcn = apply_policy(g, u, gcn_spec);
    SparsifiedState s_base = apply_policy(g, u, base_spec);

    Schedule sched_gcn = run_constraint_scheduler(s_gcn, cfg, sample_seed);
    Schedule sched_base = run_constraint_scheduler(s_base, cfg, sample_seed);
    out.gcn_utility = scheduled_utility(sched_gcn, u);
    out.baseline_utility = scheduled_utility(sched_base, u);
    out.utility_branch = out.gcn_utility < out.baseline_utility;

    std::vector<double> p = cutoff_probabilities(z, out.u_eta, ecdf);
    out.expected_edges = expected_sparse_edges(g, p);

    std::vector<double> dJ_dz;
    if (out.utility_branch) {
        dJ_dz = grad_utility_wrt_z(g, z, out.u_eta, ecdf, cfg.proxy);
        for (double& gv : dJ_dz) gv = -gv;  // ascend the utility proxy
    } else {
        dJ_dz = grad_edges_wrt_z(g, z, out.u_eta, ecdf);
    }

    out.grads = gcn_backward(model, g, cache, dJ_dz);
    out.raw_norm = out.grads.norm();
    if (out.raw_norm > 0.0)
        out.grads.scale(cfg.clip_norm / out.raw_norm);
    else
        out.grads.scale(0.0);  // unusable sample; caller skips it
    return out;
}

TrainResult alt_sgd_train(GcnModel model, const std::vector<ConflictGraph>& dataset,
                          const EcdfModel& ecdf, const TrainConfig& cfg, std::uint64_t seed) {
    if (dataset.empty()) throw std::invalid_argument("alt_sgd_train: empty dataset");
    if (cfg.alpha <= 0.0 || cfg.beta <= 0.0 || cfg.beta > 1.0 || cfg.clip_norm <= 0.0 ||
        cfg.batch_size < 1 || cfg.epochs < 1)
        throw std::invalid_argument("alt_sgd_train: bad config");
    TrainConfig cfg_resolved = cfg;
    if (cfg_resolved.proxy.kind == ProxyKind::degree && cfg_resolved.proxy.a3 <= 0.0) {
        int max_deg = 0;
        for (const auto& g : dataset)
            for (int v = 0; v < g.vertex_count; ++v) max_deg = std::max(max_deg, g.degree(v));
        cfg_resolved.proxy.a3 = 1.0 / (max_deg + 1.0);
    }
    cfg_resolved.proxy.validate();

    TrainResult result;
    double alpha = cfg_resolved.alpha;
    int batch_index = 0;

    struct Pending {
        std::uint64_t seed;
        const ConflictGraph* graph;
        int epoch;
        TrainSample sample;
    };
    std::vector<Pending> queue;
    queue.reserve(cfg_resolved.batch_size);

    long long final_epoch_samples = 0, final_epoch_violations = 0;
    int last_epoch = cfg_resolved.epochs - 1;

    auto flush = [&] {
        parallel_for(queue.size(), cfg_resolved.threads, [&](std::size_t i) {
            queue[i].sample =
                compute_train_sample(model, *queue[i].graph, ecdf, cfg_resolved, queue[i].seed);
        });
        TrainBatchLog row;
        row.epoch = queue.back().epoch;
        row.batch = batch_index++;
        row.alpha = alpha;
        double ratio_acc = 0.0, edges_acc = 0.0;
        int branch_count = 0;
        for (auto& item : queue) {
            TrainSample& smp = item.sample;
            if (smp.raw_norm > 0.0) apply_gradient(model, smp.grads, alpha);
            if (smp.utility_branch) ++branch_count;
            ratio_acc += smp.baseline_utility > 0.0 ? smp.gcn_utility / smp.baseline_utility : 1.0;
            edges_acc += smp.expected_edges;
            if (item.epoch == last_epoch) {
                ++final_epoch_samples;
                if (smp.utility_branch) ++final_epoch_violations;
            }
        }
        double count = static_cast<double>(queue.size());
        row.branch_fraction = branch_count / count;
        row.mean_utility_ratio = ratio_acc / count;
        row.mean_expected_edges = edges_acc / count;
        result.log.push_back(row);
        alpha *= cfg_resolved.beta;
        queue.clear();
    };

    for (int epoch = 0; epoch < cfg_resolved.epochs; ++epoch) {
        for (std::size_t gi = 0; gi < dataset.size(); ++gi) {
            std::string role =
                "train/epoch=" + std::to_string(epoch) + "/sample=" + std::to_string(gi);
            queue.push_back({derive_seed(seed, role), &dataset[gi], epoch, {}});
            if (static_cast<int>(queue.size()) == cfg_resolved.batch_size) flush();
        }
    }
    // a trailing partial batch is never applied: updates only fire on
    // full queues, mirroring the batch semantics exactly

    result.final_epoch_violation_fraction =
        final_epoch_samples > 0
            ? static_cast<double>(final_epoch_violations) / final_epoch_samples
            : 0.0;
    model.trained_epochs += cfg_resolved.epochs;
    result.model = std::move(model);
    return result;
}

void save_train_log(const std::vector<TrainBatchLog>& log, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << "epoch,batch,alpha,branch_fraction,mean_utility_ratio,mean_expected_edges\n";
    for (const auto& row : log)
        out << row.epoch << ',' << row.batch << ',' << row.alpha << ',' << row.branch_fraction
            << ',' << row.mean_utility_ratio << ',' << row.mean_expected_edges << '\n';
}

}  // namespace linksparse
