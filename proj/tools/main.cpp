// Command-line front end: dataset generation, utility collection, ecdf
// fitting, Alt-SGD training, threshold search, sweeps, and reports.

#include <cstdint>
#include <exception>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "linksparse/ecdf.hpp"
#include "linksparse/experiments.hpp"
#include "linksparse/gcn.hpp"
#include "linksparse/graph.hpp"
#include "linksparse/parallel.hpp"
#include "linksparse/quantile_search.hpp"
#include "linksparse/rng.hpp"
#include "linksparse/traffic.hpp"
#include "linksparse/training.hpp"

namespace {

using namespace linksparse;

int cmd_gen_graphs(const std::string& preset_name, const std::string& out, std::uint64_t seed,
                   bool full, int threads) {
    DatasetPreset preset = dataset_preset(preset_name, full);
    std::string manifest = generate_datasets(preset, out, seed, threads);
    std::cout << "wrote " << preset.total() << " graphs, manifest " << manifest << "\n";
    return 0;
}

int cmd_collect_ecdf(const std::string& dataset, const std::string& protocol,
                     const std::string& out, std::uint64_t seed, double load, int horizon,
                     int threads) {
    std::vector<ConflictGraph> graphs = load_dataset(dataset);
    TrafficConfig traffic;
    traffic.load = load;
    traffic.horizon = horizon;
    TimingConfig timing;
    std::vector<double> samples =
        collect_ecdf_samples(graphs, protocol_from_name(protocol), traffic, timing, seed, threads);
    save_samples(samples, out);
    nlohmann::json meta{{"dataset", dataset},
                        {"protocol", protocol},
                        {"traffic", "load=" + std::to_string(load) +
                                        " horizon=" + std::to_string(horizon)},
                        {"seed", seed},
                        {"samples", samples.size()}};
    std::ofstream meta_out(out + ".meta.json");
    meta_out << meta.dump(2) << '\n';
    std::cout << "collected " << samples.size() << " utility samples from " << graphs.size()
              << " graphs\n";
    return 0;
}

int cmd_fit_ecdf(const std::string& samples_path, const std::string& out, int knots,
                 double bandwidth) {
    std::vector<double> samples = load_samples(samples_path);
    EcdfModel model = fit_ecdf(samples, knots, bandwidth);
    std::ifstream meta_in(samples_path + ".meta.json");
    if (meta_in) {
        nlohmann::json meta = nlohmann::json::parse(meta_in);
        model.protocol = meta.value("protocol", std::string());
        model.dataset = meta.value("dataset", std::string());
        model.traffic = meta.value("traffic", std::string());
    }
    save_ecdf(model, out);
    std::cout << "fit ecdf on " << samples.size() << " samples, " << model.knots.size()
              << " knots, support [" << model.min_support() << ", " << model.max_support()
              << "]\n";
    return 0;
}

int cmd_train(const std::string& dataset, const std::string& ecdf_path, const std::string& out,
              const std::string& log_path, std::uint64_t seed, int layers, int hidden,
              const TrainConfig& cfg, const std::string& proxy_name) {
    std::vector<ConflictGraph> graphs = load_dataset(dataset);
    EcdfModel ecdf = load_ecdf(ecdf_path);
    TrainConfig tc = cfg;
    tc.proxy.kind = proxy_name == "simple" ? ProxyKind::simple : ProxyKind::degree;
    GcnModel model = init_gcn(layers, hidden, 0.01, derive_seed(seed, "init"));
    TrainResult result = alt_sgd_train(model, graphs, ecdf, tc, seed);
    save_gcn(result.model, out);
    if (!log_path.empty()) save_train_log(result.log, log_path);
    std::cout << "trained " << layers << "-layer model on " << graphs.size() << " graphs, "
              << tc.epochs << " epochs; final-epoch constraint-violation fraction "
              << result.final_epoch_violation_fraction << "\n";
    return 0;
}

int cmd_search_eta(const std::string& dataset, const std::string& ecdf_path,
                   const std::string& mode, const std::string& out, std::uint64_t seed,
                   double tau, int deadline_k, int window, int samples, double eps,
                   int threads) {
    std::vector<ConflictGraph> graphs = load_dataset(dataset);
    EcdfModel ecdf = load_ecdf(ecdf_path);
    OverheadModel m;
    m.mode = overhead_mode_from_name(mode);
    m.tau = tau;
    m.deadline_k = deadline_k;
    m.window = window;

    auto objective = [&](double eta) {
        return net_utility_objective(eta, graphs, ecdf, m, seed, samples, threads);
    };
    std::ofstream csv;
    if (!out.empty()) {
        csv.open(out);
        if (!csv) throw std::runtime_error("cannot write " + out);
        csv << "eta,objective\n";
    }
    for (int i = 1; i <= 19; ++i) {
        double eta = 0.05 * i;
        double val = objective(eta);
        std::cout << "eta=" << eta << " objective=" << val << "\n";
        if (csv) csv << eta << ',' << val << '\n';
    }
    double eta_star = peak_search(objective, 0.01, 1.0, eps);
    std::cout << "eta*=" << eta_star << " objective=" << objective(eta_star) << "\n";
    if (csv) csv << "# eta*," << eta_star << '\n';
    return 0;
}

int cmd_sweep(const std::string& config, const std::string& out, std::uint64_t seed,
              bool seed_set, const std::string& protocol, const std::string& policy, double eta,
              int threads) {
    SweepConfig cfg = sweep_config_from_json(config);
    if (seed_set) cfg.seed = seed;
    if (!protocol.empty()) cfg.protocol = protocol_from_name(protocol);
    if (threads > 0) cfg.threads = threads;
    if (!policy.empty()) {
        PolicyConfig pc;
        pc.kind = policy_from_name(policy);
        pc.eta = eta;
        cfg.policies = {pc};
    }
    std::vector<SweepRow> rows = run_sweep(cfg);
    save_sweep_csv(rows, out);
    std::cout << "wrote " << rows.size() << " rows to " << out << "\n";
    return 0;
}

int cmd_report(const std::string& results, const std::string& reference, const std::string& out) {
    std::vector<SweepRow> rows = load_sweep_csv(results);
    std::vector<ReportRow> report = report_ratios(rows, reference);
    save_report_csv(report, out);
    std::cout << "wrote " << report.size() << " report rows to " << out << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"GCN-based link sparsification for distributed scheduling"};
    app.require_subcommand(1);

    std::uint64_t seed = 1;
    std::string out, dataset, ecdf_path, protocol = "lgs-ideal", policy, config;
    int threads = 1;
    bool full = false;
    double eta = 0.5;

    auto* gen = app.add_subcommand("gen-graphs", "generate a random-graph dataset");
    std::string preset = "er-test";
    gen->add_option("--preset", preset, "er-train | ba-train | er-test | ba-test")->required();
    gen->add_option("--out", out, "output directory")->required();
    gen->add_option("--seed", seed);
    gen->add_flag("--full", full, "published instance counts (default: 1/10 scale)");
    gen->add_option("--threads", threads);

    auto* collect = app.add_subcommand("collect-ecdf", "record per-link utilities under the zero policy");
    double load = 0.03;
    int horizon = 200;
    collect->add_option("--dataset", dataset, "dataset manifest")->required();
    collect->add_option("--protocol", protocol, "lgs-ideal | lgs-deadline | lgs-flexible | qcsma | csma");
    collect->add_option("--out", out, "sample file")->required();
    collect->add_option("--seed", seed);
    collect->add_option("--load", load, "arrival load fraction");
    collect->add_option("--horizon", horizon, "slots per episode");
    collect->add_option("--threads", threads);

    auto* fit = app.add_subcommand("fit-ecdf", "fit the smooth utility-distribution model");
    std::string samples_path;
    int knots = 256;
    double bandwidth = 0.0;
    fit->add_option("--samples", samples_path, "collected sample file")->required();
    fit->add_option("--out", out, "model file")->required();
    fit->add_option("--knots", knots, "max interior knots");
    fit->add_option("--bandwidth", bandwidth, "support ramp width (0 = auto)");

    auto* train = app.add_subcommand("train", "alternating constrained SGD");
    TrainConfig tc;
    int layers = 1, hidden = 8;
    std::string log_path, proxy_name = "degree", scheduler_name = "lgs-ideal";
    train->add_option("--dataset", dataset)->required();
    train->add_option("--ecdf", ecdf_path)->required();
    train->add_option("--out", out, "trained model file")->required();
    train->add_option("--log", log_path, "per-batch training log CSV");
    train->add_option("--seed", seed);
    train->add_option("--layers", layers);
    train->add_option("--hidden", hidden, "hidden width");
    train->add_option("--epochs", tc.epochs);
    train->add_option("--alpha", tc.alpha, "initial step size");
    train->add_option("--beta", tc.beta, "per-batch step decay");
    train->add_option("--batch", tc.batch_size);
    train->add_option("--clip", tc.clip_norm, "per-sample gradient norm");
    train->add_option("--proxy", proxy_name, "simple | degree");
    train->add_option("--scheduler", scheduler_name, "constraint scheduler");
    train->add_option("--threads", tc.threads);

    auto* search = app.add_subcommand("search-eta", "sweep and peak-search the net-utility objective");
    std::string mode = "flexible";
    double tau = 0.01, eps = 0.01;
    int deadline_k = 30, window = 32, samples = 200;
    search->add_option("--dataset", dataset)->required();
    search->add_option("--ecdf", ecdf_path)->required();
    search->add_option("--mode", mode, "flexible | fixed-deadline | csma");
    search->add_option("--out", out, "curve CSV");
    search->add_option("--seed", seed);
    search->add_option("--tau", tau, "slot fraction per control message");
    search->add_option("--deadline-k", deadline_k);
    search->add_option("--window", window);
    search->add_option("--samples", samples, "Monte-Carlo draws per eta");
    search->add_option("--eps", eps, "peak-search tolerance");
    search->add_option("--threads", threads);

    auto* sweep = app.add_subcommand("sweep", "run per-instance experiments from a config");
    sweep->add_option("--config", config, "sweep config JSON")->required();
    sweep->add_option("--out", out, "results CSV")->required();
    sweep->add_option("--seed", seed);
    sweep->add_option("--protocol", protocol, "override config protocol");
    sweep->add_option("--policy", policy, "zero | stat | stat-scaled | gcn | hybrid (replaces config policies)");
    sweep->add_option("--eta", eta, "threshold quantile for --policy");
    sweep->add_option("--threads", threads);

    auto* report = app.add_subcommand("report", "aggregate ratios against a reference policy");
    std::string results, reference = "zero";
    report->add_option("--results", results, "sweep results CSV")->required();
    report->add_option("--reference", reference, "reference policy name");
    report->add_option("--out", out, "report CSV")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) return cmd_gen_graphs(preset, out, seed, full, threads);
        if (collect->parsed())
            return cmd_collect_ecdf(dataset, protocol, out, seed, load, horizon, threads);
        if (fit->parsed()) return cmd_fit_ecdf(samples_path, out, knots, bandwidth);
        if (train->parsed()) {
            tc.scheduler = protocol_from_name(scheduler_name);
            return cmd_train(dataset, ecdf_path, out, log_path, seed, layers, hidden, tc,
                             proxy_name);
        }
        if (search->parsed())
            return cmd_search_eta(dataset, ecdf_path, mode, out, seed, tau, deadline_k, window,
                                  samples, eps, threads);
        if (sweep->parsed())
            return cmd_sweep(config, out, seed, sweep->count("--seed") > 0,
                             sweep->count("--protocol") ? protocol : std::string(), policy, eta,
                             sweep->count("--threads") ? threads : 0);
        if (report->parsed()) return cmd_report(results, reference, out);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
