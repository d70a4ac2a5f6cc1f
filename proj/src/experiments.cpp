#include "linksparse/experiments.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <tuple>

#include <json.hpp>

#include "linksparse/gcn.hpp"
#include "linksparse/parallel.hpp"
#include "linksparse/rng.hpp"
#include "linksparse/scheduler.hpp"

namespace linksparse {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

// shortest round-trip decimal form, stable across runs
std::string fmt_double(double x) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof(buf), x);
    return std::string(buf, res.ptr);
}

std::string param_tag(double p) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", p);
    return buf;
}

double clamp_unit_open(double x) { return std::clamp(x, 1e-12, 1.0 - 1e-12); }

bool needs_model(PolicyKind k) {
    return k == PolicyKind::gcn || k == PolicyKind::hybrid || k == PolicyKind::baseline_scaled;
}

}  // namespace

int DatasetPreset::total() const {
    int t = 0;
    for (const auto& c : cells) t += c.count;
    return t;
}

namespace {

void push_grid(std::vector<DatasetCell>& cells, const std::string& model,
               const std::vector<int>& sizes, const std::vector<double>& params, int count) {
    for (int n : sizes)
        for (double p : params) cells.push_back({model, n, p, count});
}

// small-graph rows parameterize by density k: dbar (er) or m (ba) is n*k
void push_density_grid(std::vector<DatasetCell>& cells, const std::string& model, int count) {
    for (int n : {30, 100})
        for (int i = 1; i <= 9; ++i) cells.push_back({model, n, n * (0.1 * i), count});
}

}  // namespace

DatasetPreset dataset_preset(const std::string& name, bool full_scale) {
    const int scale = full_scale ? 1 : 10;
    const std::vector<int> sizes{100, 150, 200, 250, 300};
    DatasetPreset p;
    p.name = name;
    if (name == "er-train") {
        push_grid(p.cells, "er", sizes, {2, 5, 7.5, 10, 12.5}, 200 / scale);
        push_density_grid(p.cells, "er", 50 / scale);
    } else if (name == "ba-train") {
        push_grid(p.cells, "ba", sizes, {2, 5, 7.5, 10, 12.5}, 200 / scale);
        push_density_grid(p.cells, "ba", 50 / scale);
    } else if (name == "er-test") {
        push_grid(p.cells, "er", sizes, {2, 5, 10, 15, 20}, 20 / scale);
    } else if (name == "ba-test") {
        push_grid(p.cells, "ba", sizes, {2, 5, 10, 15, 20}, 20 / scale);
        push_grid(p.cells, "ba", {300, 400, 500}, {25, 30, 35, 40, 45, 50}, 20 / scale);
    } else {
        throw std::invalid_argument("unknown dataset preset: " + name);
    }
    return p;
}

std::vector<std::string> dataset_preset_names() {
    return {"er-train", "ba-train", "er-test", "ba-test"};
}

std::vector<ConflictGraph> build_dataset(const DatasetPreset& preset, std::uint64_t seed,
                                         int threads) {
    struct Item {
        const DatasetCell* cell;
        int index;
    };
    std::vector<Item> items;
    for (const auto& c : preset.cells)
        for (int i = 0; i < c.count; ++i) items.push_back({&c, i});

    std::vector<ConflictGraph> graphs(items.size());
    parallel_for(static_cast<int>(items.size()), threads, [&](int t) {
        const DatasetCell& c = *items[t].cell;
        std::string role = "dataset/" + preset.name + "/" + c.model + "/n=" +
                           std::to_string(c.n) + "/param=" + param_tag(c.param) +
                           "/i=" + std::to_string(items[t].index);
        std::uint64_t s = derive_seed(seed, role);
        graphs[t] = c.model == "er" ? generate_er(c.n, c.param, s) : generate_ba(c.n, c.param, s);
    });
    return graphs;
}

std::string generate_datasets(const DatasetPreset& preset, const std::string& out_dir,
                              std::uint64_t seed, int threads) {
    fs::create_directories(out_dir);
    std::vector<ConflictGraph> graphs = build_dataset(preset, seed, threads);

    json rows = json::array();
    int idx = 0;
    for (const auto& c : preset.cells) {
        for (int i = 0; i < c.count; ++i, ++idx) {
            char name[96];
            std::snprintf(name, sizeof(name), "%s_n%d_p%s_i%03d.json", c.model.c_str(), c.n,
                          param_tag(c.param).c_str(), i);
            save_graph(graphs[idx], (fs::path(out_dir) / name).string());
            rows.push_back({{"file", name},
                            {"model", c.model},
                            {"n", c.n},
                            {"param", c.param},
                            {"instance", i}});
        }
    }
    json manifest{{"name", preset.name}, {"seed", seed}, {"graphs", rows}};
    std::string manifest_path = (fs::path(out_dir) / "manifest.json").string();
    std::ofstream out(manifest_path);
    if (!out) throw std::runtime_error("cannot write " + manifest_path);
    out << manifest.dump(2) << '\n';
    return manifest_path;
}

std::vector<ConflictGraph> load_dataset(const std::string& path) {
    fs::path manifest_path(path);
    if (fs::is_directory(manifest_path)) manifest_path /= "manifest.json";
    std::ifstream in(manifest_path);
    if (!in) throw std::runtime_error("cannot read " + manifest_path.string());
    json manifest = json::parse(in);
    fs::path dir = manifest_path.parent_path();

    std::vector<ConflictGraph> graphs;
    for (const auto& row : manifest.at("graphs"))
        graphs.push_back(load_graph((dir / row.at("file").get<std::string>()).string()));
    return graphs;
}

std::vector<double> collect_ecdf_samples(const std::vector<ConflictGraph>& graphs,
                                         Protocol protocol, const TrafficConfig& traffic,
                                         const TimingConfig& timing, std::uint64_t seed,
                                         int threads) {
    TrafficConfig cfg = resolve_traffic(traffic);
    std::vector<std::vector<double>> per_graph(graphs.size());
    parallel_for(static_cast<int>(graphs.size()), threads, [&](int i) {
        DetailedTrace detail;
        EpisodeOptions opts;
        opts.detail = &detail;
        PolicySpec zero;  // keep everything; utilities are still computed each slot
        run_episode(graphs[i], zero, protocol, cfg, timing,
                    derive_seed(seed, "collect/graph=" + std::to_string(i)), opts);
        auto& samples = per_graph[i];
        samples.reserve(detail.q_before.size() * graphs[i].vertex_count);
        for (std::size_t t = 0; t < detail.q_before.size(); ++t)
            for (int v = 0; v < graphs[i].vertex_count; ++v)
                samples.push_back(detail.q_before[t][v] * detail.rates[t][v]);
    });
    std::vector<double> all;
    for (const auto& s : per_graph) all.insert(all.end(), s.begin(), s.end());
    return all;
}

SweepConfig sweep_config_from_json(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    json j = json::parse(in);
    fs::path base = fs::path(path).parent_path();
    auto resolve = [&](const std::string& p) {
        if (p.empty() || fs::path(p).is_absolute()) return p;
        return (base / p).string();
    };

    SweepConfig cfg;
    cfg.dataset = resolve(j.at("dataset").get<std::string>());
    cfg.ecdf = resolve(j.value("ecdf", std::string()));
    cfg.protocol = protocol_from_name(j.value("protocol", std::string("lgs-ideal")));
    cfg.mode = j.value("mode", std::string("episodes"));
    if (cfg.mode != "episodes" && cfg.mode != "static")
        throw std::invalid_argument("sweep mode must be episodes or static");
    if (j.contains("traffic")) {
        const json& t = j["traffic"];
        cfg.traffic.load = t.value("load", cfg.traffic.load);
        cfg.traffic.rate_mean = t.value("rate_mean", cfg.traffic.rate_mean);
        cfg.traffic.rate_std = t.value("rate_std", cfg.traffic.rate_std);
        cfg.traffic.rate_clip_lo = t.value("rate_clip_lo", cfg.traffic.rate_clip_lo);
        cfg.traffic.rate_clip_hi = t.value("rate_clip_hi", cfg.traffic.rate_clip_hi);
        cfg.traffic.horizon = t.value("horizon", cfg.traffic.horizon);
        cfg.traffic.expected_rate = t.value("expected_rate", cfg.traffic.expected_rate);
    }
    if (j.contains("timing")) {
        const json& t = j["timing"];
        cfg.timing.slot_ms = t.value("slot_ms", cfg.timing.slot_ms);
        cfg.timing.tau_ms = t.value("tau_ms", cfg.timing.tau_ms);
        cfg.timing.comm_ms = t.value("comm_ms", cfg.timing.comm_ms);
        cfg.timing.deadline_k = t.value("deadline_k", cfg.timing.deadline_k);
        cfg.timing.window = t.value("window", cfg.timing.window);
    }
    for (const auto& p : j.value("policies", json::array())) {
        PolicyConfig pc;
        pc.kind = policy_from_name(p.contains("policy") ? p["policy"].get<std::string>()
                                                        : p.at("kind").get<std::string>());
        pc.eta = p.value("eta", 0.0);
        pc.model_path = resolve(p.value("model", std::string()));
        pc.hybrid_degree = p.value("min_degree", pc.hybrid_degree);
        cfg.policies.push_back(pc);
    }
    for (const auto& e : j.value("etas", json::array())) cfg.etas.push_back(e.get<double>());
    cfg.seed = j.value("seed", std::uint64_t{1});
    cfg.threads = j.value("threads", 1);
    return cfg;
}

std::vector<SweepRow> run_sweep(const SweepConfig& cfg) {
    std::vector<ConflictGraph> graphs = load_dataset(cfg.dataset);
    if (graphs.empty()) throw std::invalid_argument("sweep dataset is empty");
    if (cfg.policies.empty()) throw std::invalid_argument("sweep needs at least one policy");

    std::vector<PolicyConfig> expanded;
    for (const auto& pc : cfg.policies) {
        if (cfg.etas.empty() || pc.kind == PolicyKind::zero) {
            expanded.push_back(pc);
            continue;
        }
        for (double eta : cfg.etas) {
            PolicyConfig e = pc;
            e.eta = eta;
            expanded.push_back(e);
        }
    }

    bool needs_ecdf = cfg.mode == "static";
    std::map<std::string, GcnModel> models;
    for (const auto& pc : expanded) {
        if (pc.kind != PolicyKind::zero) needs_ecdf = true;
        if (needs_model(pc.kind)) {
            if (pc.model_path.empty())
                throw std::invalid_argument(std::string("policy ") + policy_name(pc.kind) +
                                            " needs a model file");
            if (!models.count(pc.model_path)) models.emplace(pc.model_path, load_gcn(pc.model_path));
        }
    }
    EcdfModel ecdf;
    if (needs_ecdf) {
        if (cfg.ecdf.empty()) throw std::invalid_argument("sweep needs an ecdf model");
        ecdf = load_ecdf(cfg.ecdf);
    }
    TrafficConfig traffic = resolve_traffic(cfg.traffic);

    const int policy_count = static_cast<int>(expanded.size());
    const int task_count = static_cast<int>(graphs.size()) * policy_count;
    std::vector<SweepRow> rows(static_cast<std::size_t>(task_count));
    parallel_for(task_count, cfg.threads, [&](int task) {
        const int i = task / policy_count;
        const PolicyConfig& pc = expanded[task % policy_count];
        const ConflictGraph& g = graphs[i];

        PolicySpec spec;
        spec.kind = pc.kind;
        spec.eta = pc.eta;
        spec.hybrid_degree = pc.hybrid_degree;
        if (pc.kind != PolicyKind::zero) spec.u_eta = ecdf.quantile(clamp_unit_open(pc.eta));
        if (needs_model(pc.kind)) spec.z = gcn_forward(models.at(pc.model_path), g);

        SweepRow& row = rows[task];
        row.instance = i;
        row.model = g.model;
        row.n = g.vertex_count;
        row.param = g.gen_param;
        row.protocol = protocol_name(cfg.protocol);
        row.policy = policy_name(pc.kind);
        row.eta = pc.eta;

        if (cfg.mode == "static") {
            // one frozen utility draw per instance, shared by every policy
            Rng rng(derive_seed(cfg.seed, "sweep/instance=" + std::to_string(i) + "/draws"));
            std::vector<double> u(g.vertex_count);
            // clamp: the surrogate's lower ramp can dip below zero
            for (int v = 0; v < g.vertex_count; ++v)
                u[v] = std::max(0.0, ecdf.quantile(clamp_unit_open(rng.u01())));
            SparsifiedState st = apply_policy(g, u, spec);
            Schedule sched = lgs_schedule(st);
            row.retained_vertices = st.sparse_graph.vertex_count;
            row.retained_edges = st.sparse_graph.edge_count;
            double total = 0.0, deg = 0.0;
            for (int sv = 0; sv < st.sparse_graph.vertex_count; ++sv) {
                if (sched.scheduled[st.sparse_to_orig[sv]]) total += st.weights[sv];
                deg += st.post_degrees[sv];
            }
            row.total_utility = total;
            row.mean_post_degree =
                st.sparse_graph.vertex_count ? deg / st.sparse_graph.vertex_count : 0.0;
            row.message_total = sched.message_count;
        } else {
            EpisodeMetrics m = run_episode(g, spec, cfg.protocol, traffic, cfg.timing,
                                           derive_seed(cfg.seed, "sweep/instance=" + std::to_string(i)));
            row.total_utility = m.total_utility;
            row.mean_backlog = m.mean_backlog;
            row.mean_post_degree = m.mean_post_degree;
            row.message_total = m.message_total;
            row.collision_total = m.collision_total;
        }
    });
    return rows;
}

void save_sweep_csv(const std::vector<SweepRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "instance,model,n,param,protocol,policy,eta,retained_vertices,retained_edges,"
           "total_utility,mean_backlog,mean_post_degree,message_total,collision_total\n";
    for (const auto& r : rows) {
        out << r.instance << ',' << r.model << ',' << r.n << ',' << fmt_double(r.param) << ','
            << r.protocol << ',' << r.policy << ',' << fmt_double(r.eta) << ','
            << r.retained_vertices << ',' << r.retained_edges << ','
            << fmt_double(r.total_utility) << ',' << fmt_double(r.mean_backlog) << ','
            << fmt_double(r.mean_post_degree) << ',' << r.message_total << ','
            << r.collision_total << '\n';
    }
}

std::vector<SweepRow> load_sweep_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error("empty sweep file: " + path);
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string tok;
        while (std::getline(ss, tok, ',')) f.push_back(tok);
        if (f.size() != 14) throw std::runtime_error("bad sweep row: " + line);
        SweepRow r;
        r.instance = std::stoi(f[0]);
        r.model = f[1];
        r.n = std::stoi(f[2]);
        r.param = std::stod(f[3]);
        r.protocol = f[4];
        r.policy = f[5];
        r.eta = std::stod(f[6]);
        r.retained_vertices = std::stoi(f[7]);
        r.retained_edges = std::stoll(f[8]);
        r.total_utility = std::stod(f[9]);
        r.mean_backlog = std::stod(f[10]);
        r.mean_post_degree = std::stod(f[11]);
        r.message_total = std::stoll(f[12]);
        r.collision_total = std::stoll(f[13]);
        rows.push_back(std::move(r));
    }
    return rows;
}

namespace {

// ratio vs the reference instance; negatives are "not measured" sentinels
double safe_ratio(double num, double den) {
    if (num < 0.0 || den < 0.0) return std::numeric_limits<double>::quiet_NaN();
    if (den == 0.0) return num == 0.0 ? 1.0 : std::numeric_limits<double>::infinity();
    return num / den;
}

struct RatioAccum {
    int instances = 0;
    double utility = 0.0, backlog = 0.0, degree = 0.0, message = 0.0;
    double vertex = 0.0, edge = 0.0;
    int vertex_n = 0, edge_n = 0;

    void add(double u, double b, double d, double m, double vr, double er) {
        ++instances;
        utility += u;
        backlog += b;
        degree += d;
        message += m;
        if (!std::isnan(vr)) vertex += vr, ++vertex_n;
        if (!std::isnan(er)) edge += er, ++edge_n;
    }
};

}  // namespace

std::vector<ReportRow> report_ratios(const std::vector<SweepRow>& rows,
                                     const std::string& reference_policy) {
    std::map<int, const SweepRow*> ref;
    for (const auto& r : rows) {
        if (r.policy != reference_policy) continue;
        if (!ref.emplace(r.instance, &r).second)
            throw std::invalid_argument("duplicate reference row for instance " +
                                        std::to_string(r.instance));
    }

    std::map<std::tuple<std::string, double, double>, RatioAccum> bins;
    for (const auto& r : rows) {
        auto it = ref.find(r.instance);
        if (it == ref.end())
            throw std::invalid_argument("missing reference row for instance " +
                                        std::to_string(r.instance));
        const SweepRow& z = *it->second;
        double dbar = r.model == "ba" ? 2.0 * r.param : r.param;
        bins[{r.policy, r.eta, dbar}].add(
            safe_ratio(r.total_utility, z.total_utility),
            safe_ratio(r.mean_backlog, z.mean_backlog),
            safe_ratio(r.mean_post_degree, z.mean_post_degree),
            safe_ratio(static_cast<double>(r.message_total), static_cast<double>(z.message_total)),
            safe_ratio(static_cast<double>(r.retained_vertices),
                       static_cast<double>(z.retained_vertices)),
            safe_ratio(static_cast<double>(r.retained_edges),
                       static_cast<double>(z.retained_edges)));
    }

    std::vector<ReportRow> out;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    for (const auto& [key, a] : bins) {
        ReportRow row;
        row.policy = std::get<0>(key);
        row.eta = std::get<1>(key);
        row.dbar = std::get<2>(key);
        row.instances = a.instances;
        row.utility_ar = a.utility / a.instances;
        row.backlog_ratio = a.backlog / a.instances;
        row.degree_ratio = a.degree / a.instances;
        row.message_ratio = a.message / a.instances;
        row.vertex_rr = a.vertex_n ? a.vertex / a.vertex_n : nan;
        row.edge_rr = a.edge_n ? a.edge / a.edge_n : nan;
        out.push_back(std::move(row));
    }
    return out;
}

void save_report_csv(const std::vector<ReportRow>& rows, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << "policy,eta,dbar,instances,utility_ar,backlog_ratio,degree_ratio,message_ratio,"
           "vertex_rr,edge_rr\n";
    for (const auto& r : rows) {
        out << r.policy << ',' << fmt_double(r.eta) << ',' << fmt_double(r.dbar) << ','
            << r.instances << ',' << fmt_double(r.utility_ar) << ','
            << fmt_double(r.backlog_ratio) << ',' << fmt_double(r.degree_ratio) << ','
            << fmt_double(r.message_ratio) << ',' << fmt_double(r.vertex_rr) << ','
            << fmt_double(r.edge_rr) << '\n';
    }
}

}  // namespace linksparse
