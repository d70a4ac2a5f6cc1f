// Serial-vs-parallel benchmark for the three hot paths: episode sweeps,
// training batch gradients, and Monte-Carlo objective draws. The serial
// path (threads == 1) is the reference implementation; the parallel path
// must reproduce it bit for bit.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <vector>

#include "linksparse/ecdf.hpp"
#include "linksparse/experiments.hpp"
#include "linksparse/gcn.hpp"
#include "linksparse/graph.hpp"
#include "linksparse/parallel.hpp"
#include "linksparse/quantile_search.hpp"
#include "linksparse/rng.hpp"
#include "linksparse/traffic.hpp"
#include "linksparse/training.hpp"

using namespace linksparse;

namespace {

double now_ms() {
    using clock = std::chrono::steady_clock;
    return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

struct Result {
    double serial_ms = 0.0;
    double parallel_ms = 0.0;
    bool match = false;
};

void print_row(const char* name, const Result& r) {
    std::printf("%-18s serial %8.1f ms   parallel %8.1f ms   speedup %5.2fx   results %s\n",
                name, r.serial_ms, r.parallel_ms, r.serial_ms / r.parallel_ms,
                r.match ? "identical" : "DIFFER");
}

std::vector<ConflictGraph> make_graphs(int count, int n, double dbar, std::uint64_t seed) {
    std::vector<ConflictGraph> graphs;
    for (int i = 0; i < count; ++i)
        graphs.push_back(generate_er(n, dbar, derive_seed(seed, "bench/g=" + std::to_string(i))));
    return graphs;
}

EcdfModel make_ecdf(const std::vector<ConflictGraph>& graphs) {
    TrafficConfig traffic;
    TimingConfig timing;
    std::vector<ConflictGraph> few(graphs.begin(), graphs.begin() + 3);
    std::vector<double> samples =
        collect_ecdf_samples(few, Protocol::lgs_ideal, traffic, timing, 7);
    return fit_ecdf(samples);
}

Result bench_episodes(const std::vector<ConflictGraph>& graphs, int threads) {
    TrafficConfig traffic = resolve_traffic({});
    TimingConfig timing;
    PolicySpec zero;
    auto run = [&](int t) {
        std::vector<double> backlog(graphs.size());
        parallel_for(static_cast<int>(graphs.size()), t, [&](int i) {
            EpisodeMetrics m = run_episode(graphs[i], zero, Protocol::lgs_deadline, traffic,
                                           timing, derive_seed(11, "ep=" + std::to_string(i)));
            backlog[i] = m.mean_backlog;
        });
        return backlog;
    };
    Result r;
    double t0 = now_ms();
    auto serial = run(1);
    double t1 = now_ms();
    auto parallel = run(threads);
    double t2 = now_ms();
    r.serial_ms = t1 - t0;
    r.parallel_ms = t2 - t1;
    r.match = serial == parallel;
    return r;
}

Result bench_training(const std::vector<ConflictGraph>& graphs, const EcdfModel& ecdf,
                      int threads) {
    GcnModel model = init_gcn(1, 8, 0.01, 5);
    TrainConfig cfg;
    cfg.epochs = 3;
    auto run = [&](int t) {
        TrainConfig c = cfg;
        c.threads = t;
        return alt_sgd_train(model, graphs, ecdf, c, 99).model;
    };
    Result r;
    double t0 = now_ms();
    GcnModel serial = run(1);
    double t1 = now_ms();
    GcnModel parallel = run(threads);
    double t2 = now_ms();
    r.serial_ms = t1 - t0;
    r.parallel_ms = t2 - t1;
    r.match = serial.theta0 == parallel.theta0 && serial.theta1 == parallel.theta1;
    return r;
}

Result bench_objective(const std::vector<ConflictGraph>& graphs, const EcdfModel& ecdf,
                       int threads) {
    OverheadModel m;
    m.mode = OverheadMode::fixed_deadline;
    auto run = [&](int t) { return net_utility_objective(0.5, graphs, ecdf, m, 3, 4000, t); };
    Result r;
    double t0 = now_ms();
    double serial = run(1);
    double t1 = now_ms();
    double parallel = run(threads);
    double t2 = now_ms();
    r.serial_ms = t1 - t0;
    r.parallel_ms = t2 - t1;
    r.match = serial == parallel;
    return r;
}

}  // namespace

int main() {
    const int threads = hardware_threads();
    std::printf("hardware threads: %d\n", threads);

    std::vector<ConflictGraph> graphs = make_graphs(32, 200, 10.0, 42);
    EcdfModel ecdf = make_ecdf(graphs);

    Result ep = bench_episodes(graphs, threads);
    print_row("episode sweep", ep);
    Result tr = bench_training(graphs, ecdf, threads);
    print_row("batch gradients", tr);
    Result ob = bench_objective(graphs, ecdf, threads);
    print_row("mc objective", ob);

    bool ok = ep.match && tr.match && ob.match;
    std::printf("%s\n", ok ? "parallel results match the serial reference"
                           : "MISMATCH between serial and parallel results");
    return ok ? 0 : 1;
}
