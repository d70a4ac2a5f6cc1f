#pragma once

// Constrained unsupervised training of the threshold GCN. The analytic
// objective is the expected retained-edge count under independent
// per-link cutoff probabilities p(v) = F(z(v) u_eta):
//   E|E^s| = 1/2 sum_v d^s(v) (1 - p(v)),   d^s(v) = d(v) - sum_{i~v} p(i)
// The utility side is handled through differentiable proxies of the
// scheduled-utility expectation. Alt-SGD descends the edge objective
// while the GCN policy's scheduled utility beats the baseline's, and
// ascends the utility proxy otherwise.

#include <cstdint>
#include <string>
#include <vector>

#include "linksparse/ecdf.hpp"
#include "linksparse/gcn.hpp"
#include "linksparse/graph.hpp"
#include "linksparse/traffic.hpp"

namespace linksparse {

enum class ProxyKind { simple, degree };

struct UtilityProxy {
    ProxyKind kind = ProxyKind::degree;
    double a1 = 1.0;  // simple: sum a1 (1 - p_v)
    double a2 = 1.0;  // degree: sum a2 (1 - p_v)(1 - a3 d^s(v))
    double a3 = 0.0;  // <= 0 means "auto": 1 / (max degree in training set + 1)

    void validate() const;  // requires a1 > 0, a2 > 0, 0 < a3 < 1
};

// d^s(v) = d(v) - sum over neighbors of p(i); always >= 0 for p in [0,1]
std::vector<double> expected_post_degrees(const ConflictGraph& g, const std::vector<double>& p);

double expected_sparse_edges(const ConflictGraph& g, const std::vector<double>& p);

std::vector<double> grad_edges_wrt_z(const ConflictGraph& g, const std::vector<double>& z,
                                     double u_eta, const EcdfModel& ecdf);

double expected_utility_proxy(const ConflictGraph& g, const std::vector<double>& p,
                              const UtilityProxy& proxy);

std::vector<double> grad_utility_wrt_z(const ConflictGraph& g, const std::vector<double>& z,
                                       double u_eta, const EcdfModel& ecdf,
                                       const UtilityProxy& proxy);

struct TrainConfig {
    double alpha = 1e-4;      // initial learning rate
    double beta = 0.996;      // per-batch decay
    double clip_norm = 0.05;  // every sample gradient is rescaled to exactly this norm
    int batch_size = 100;
    int epochs = 25;
    UtilityProxy proxy;
    Protocol scheduler = Protocol::lgs_ideal;  // c(.) used for the constraint check
    TimingConfig timing;                       // only consulted by csma schedulers
    int threads = 1;
};

// One Alt-SGD sample, exposed for testing: draws eta and utilities,
// sparsifies with the GCN policy and the z==1 baseline, schedules both,
// picks the gradient branch, backpropagates and rescales.
struct TrainSample {
    double eta = 0.0;
    double u_eta = 0.0;
    bool utility_branch = false;   // true when GCN scheduled utility < baseline's
    double gcn_utility = 0.0;
    double baseline_utility = 0.0;
    double expected_edges = 0.0;   // analytic E|E^s| at this sample's z
    double raw_norm = 0.0;         // gradient norm before rescaling
    GcnGradients grads;            // rescaled to clip_norm (zero if raw_norm == 0)
};

TrainSample compute_train_sample(const GcnModel& model, const ConflictGraph& g,
                                 const EcdfModel& ecdf, const TrainConfig& cfg,
                                 std::uint64_t sample_seed);

struct TrainBatchLog {
    int epoch = 0;
    int batch = 0;               // global batch index
    double alpha = 0.0;          // rate used for this batch's updates
    double branch_fraction = 0.0;  // fraction of samples on the utility branch
    double mean_utility_ratio = 0.0;
    double mean_expected_edges = 0.0;
};

struct TrainResult {
    GcnModel model;
    std::vector<TrainBatchLog> log;
    double final_epoch_violation_fraction = 0.0;  // utility-branch rate in last epoch
};

// Samples visit the dataset in order, once per epoch; gradients queue up
// and flush as sequential updates every batch_size samples (the queue
// carries across epoch boundaries; a final partial batch is dropped).
// Within a batch the model is frozen, so per-sample gradients may be
// computed concurrently without changing the result.
TrainResult alt_sgd_train(GcnModel model, const std::vector<ConflictGraph>& dataset,
                          const EcdfModel& ecdf, const TrainConfig& cfg, std::uint64_t seed);

void save_train_log(const std::vector<TrainBatchLog>& log, const std::string& path);

}  // namespace linksparse
