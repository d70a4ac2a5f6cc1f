#pragma once

// Experiment harness: random-graph dataset presets, utility-sample
// collection for ecdf fitting, per-instance protocol sweeps, and
// ratio reports against the keep-everything reference policy.

#include <cstdint>
#include <string>
#include <vector>

#include "linksparse/ecdf.hpp"
#include "linksparse/graph.hpp"
#include "linksparse/policy.hpp"
#include "linksparse/traffic.hpp"

namespace linksparse {

struct DatasetCell {
    std::string model;   // "er" | "ba"
    int n = 0;
    double param = 0.0;  // target average degree (er) or attachment m (ba)
    int count = 0;       // instances in this cell
};

struct DatasetPreset {
    std::string name;
    std::vector<DatasetCell> cells;
    int total() const;
};

// Named presets: er-train, ba-train, er-test, ba-test. Desk scale keeps
// the full grid but divides per-cell instance counts by 10; full_scale
// restores the published counts (5900/5900/500/860).
DatasetPreset dataset_preset(const std::string& name, bool full_scale = false);
std::vector<std::string> dataset_preset_names();

// Materializes a preset without touching disk, cell by cell in order.
// Instance seeds derive from `seed` + preset/cell/index roles, so any
// instance regenerates identically on its own.
std::vector<ConflictGraph> build_dataset(const DatasetPreset& preset, std::uint64_t seed,
                                         int threads = 1);

// Writes one JSON graph file per instance plus manifest.json under
// out_dir; returns the manifest path.
std::string generate_datasets(const DatasetPreset& preset, const std::string& out_dir,
                              std::uint64_t seed, int threads = 1);

// Loads every graph a manifest lists, in manifest order. Accepts the
// manifest path or the directory that holds manifest.json.
std::vector<ConflictGraph> load_dataset(const std::string& path);

// Zero-threshold episodes on every graph under the given protocol;
// returns every per-link per-slot utility (n*T values per graph, in
// graph-then-slot-then-link order).
std::vector<double> collect_ecdf_samples(const std::vector<ConflictGraph>& graphs,
                                         Protocol protocol, const TrafficConfig& traffic,
                                         const TimingConfig& timing, std::uint64_t seed,
                                         int threads = 1);

struct PolicyConfig {
    PolicyKind kind = PolicyKind::zero;
    double eta = 0.0;
    std::string model_path;  // gcn-family policies
    int hybrid_degree = 25;
};

struct SweepConfig {
    std::string dataset;            // manifest path or directory
    std::string ecdf;               // fitted ecdf model path
    Protocol protocol = Protocol::lgs_ideal;
    std::string mode = "episodes";  // "episodes" | "static"
    TrafficConfig traffic;
    TimingConfig timing;
    std::vector<PolicyConfig> policies;
    std::vector<double> etas;  // non-empty: expand each non-zero policy across the grid
    std::uint64_t seed = 1;
    int threads = 1;
};

// Reads a JSON sweep config; dataset/ecdf/model paths resolve relative
// to the config file's directory.
SweepConfig sweep_config_from_json(const std::string& path);

// One row per (instance, policy). Episode rows carry simulation
// metrics and -1 for the per-draw retention counts; static rows carry
// single-draw retention/utility/message numbers and 0 backlog.
struct SweepRow {
    int instance = 0;
    std::string model;
    int n = 0;
    double param = 0.0;
    std::string protocol;
    std::string policy;
    double eta = 0.0;
    int retained_vertices = -1;
    long long retained_edges = -1;
    double total_utility = 0.0;
    double mean_backlog = 0.0;
    double mean_post_degree = 0.0;
    long long message_total = 0;
    long long collision_total = 0;
};

// Every policy sees identical inputs per instance: the episode (or the
// static utility draw) is seeded by the instance index alone. Static
// mode scores one frozen utility draw per instance: threshold, greedy
// schedule, total scheduled utility, retention counts.
std::vector<SweepRow> run_sweep(const SweepConfig& cfg);

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path);
std::vector<SweepRow> load_sweep_csv(const std::string& path);

// Per-(policy, eta, degree-bin) means of per-instance ratios against
// the reference policy's row on the same instance. Graphs bin by
// generator parameter: dbar = param for er, 2*param for ba.
struct ReportRow {
    std::string policy;
    double eta = 0.0;
    double dbar = 0.0;
    int instances = 0;
    double utility_ar = 0.0;
    double backlog_ratio = 0.0;
    double degree_ratio = 0.0;
    double message_ratio = 0.0;
    double vertex_rr = 0.0;
    double edge_rr = 0.0;
};

std::vector<ReportRow> report_ratios(const std::vector<SweepRow>& rows,
                                     const std::string& reference_policy = "zero");
void save_report_csv(const std::vector<ReportRow>& rows, const std::string& path);

}  // namespace linksparse
