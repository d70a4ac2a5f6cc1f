#include "linksparse/quantile_search.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <map>
#include <numeric>
#include <stdexcept>
#include <string>

#include "linksparse/parallel.hpp"
#include "linksparse/policy.hpp"
#include "linksparse/rng.hpp"
#include "linksparse/scheduler.hpp"

namespace linksparse {

const char* overhead_mode_name(OverheadMode m) {
    switch (m) {
        case OverheadMode::flexible: return "flexible";
        case OverheadMode::fixed_deadline: return "fixed-deadline";
        case OverheadMode::csma: return "csma";
    }
    return "?";
}

OverheadMode overhead_mode_from_name(const std::string& name) {
    if (name == "flexible") return OverheadMode::flexible;
    if (name == "fixed-deadline" || name == "fixed_deadline" || name == "deadline")
        return OverheadMode::fixed_deadline;
    if (name == "csma" || name == "qcsma") return OverheadMode::csma;
    throw std::invalid_argument("unknown overhead mode: " + name);
}

void OverheadModel::validate() const {
    if (!(tau > 0.0)) throw std::invalid_argument("overhead model: tau must be > 0");
    if (deadline_k < 1) throw std::invalid_argument("overhead model: K must be >= 1");
    if (window < 1) throw std::invalid_argument("overhead model: W must be >= 1");
}

double overhead_fraction(const OverheadModel& m, int x) {
    m.validate();
    if (x < 1) throw std::invalid_argument("overhead_fraction: neighborhood size must be >= 1");
    switch (m.mode) {
        case OverheadMode::flexible: return std::min(1.0, x * m.tau);
        case OverheadMode::fixed_deadline: return x > m.deadline_k ? 1.0 : 0.0;
        case OverheadMode::csma: break;
    }
    throw std::invalid_argument("overhead_fraction: csma has no slot-fraction model");
}

double csma_win_probability(int window, int d) {
    if (window < 1) throw std::invalid_argument("csma_win_probability: W must be >= 1");
    if (d < 0) throw std::invalid_argument("csma_win_probability: degree must be >= 0");
    double sum = 0.0;
    for (int m = 0; m < window; ++m)
        sum += std::pow(static_cast<double>(window - 1 - m) / window, static_cast<double>(d));
    return sum / window;
}

namespace {

double clamp_unit_open(double x) { return std::clamp(x, 1e-12, 1.0 - 1e-12); }

// One frozen Monte-Carlo draw: graph pick, then iid utilities.
double objective_draw(double u_eta, const std::vector<ConflictGraph>& graphs,
                      const EcdfModel& ecdf, const OverheadModel& m, double eta,
                      std::uint64_t draw_seed) {
    Rng rng(draw_seed);
    const ConflictGraph& g = graphs[static_cast<std::size_t>(rng.uniform_int(graphs.size()))];
    std::vector<double> u(g.vertex_count);
    // clamp: the surrogate's lower ramp can dip below zero
    for (int v = 0; v < g.vertex_count; ++v)
        u[v] = std::max(0.0, ecdf.quantile(clamp_unit_open(rng.u01())));

    PolicySpec spec;
    spec.kind = PolicyKind::baseline;
    spec.eta = eta;
    spec.u_eta = u_eta;
    SparsifiedState state = apply_policy(g, u, spec);

    double total = 0.0;
    if (m.mode == OverheadMode::csma) {
        for (int v = 0; v < state.sparse_graph.vertex_count; ++v)
            total += state.weights[v] * csma_win_probability(m.window, state.post_degrees[v]);
        return total;
    }
    Schedule sched = lgs_schedule(state);
    for (int sv = 0; sv < state.sparse_graph.vertex_count; ++sv)
        if (sched.scheduled[state.sparse_to_orig[sv]])
            total += state.weights[sv] * (1.0 - overhead_fraction(m, state.post_degrees[sv] + 1));
    return total;
}

}  // namespace

double net_utility_objective(double eta, const std::vector<ConflictGraph>& graphs,
                             const EcdfModel& ecdf, const OverheadModel& m,
                             std::uint64_t seed, int n_samples, int threads) {
    if (!(eta > 0.0 && eta <= 1.0))
        throw std::invalid_argument("net_utility_objective: eta must be in (0, 1]");
    if (graphs.empty()) throw std::invalid_argument("net_utility_objective: no graphs");
    if (n_samples < 1) throw std::invalid_argument("net_utility_objective: n_samples must be >= 1");
    m.validate();

    double u_eta = ecdf.quantile(std::min(eta, 1.0 - 1e-12));
    std::vector<double> value(static_cast<std::size_t>(n_samples), 0.0);
    parallel_for(n_samples, threads, [&](int i) {
        std::uint64_t draw_seed = derive_seed(seed, "netutil/draw=" + std::to_string(i));
        value[static_cast<std::size_t>(i)] = objective_draw(u_eta, graphs, ecdf, m, eta, draw_seed);
    });
    // Fixed-order reduction keeps the result identical across thread counts.
    double sum = std::accumulate(value.begin(), value.end(), 0.0);
    return sum / n_samples;
}

double peak_search(const std::function<double(double)>& f, double a, double b,
                   double epsilon, std::vector<PeakSearchStep>* trace) {
    if (!(a < b)) throw std::invalid_argument("peak_search: need a < b");
    if (!(epsilon > 0.0)) throw std::invalid_argument("peak_search: epsilon must be > 0");
    if (trace) trace->clear();

    std::map<double, double> cache;
    auto eval = [&](double x) {
        auto it = cache.find(x);
        if (it != cache.end()) return it->second;
        double y = f(x);
        cache.emplace(x, y);
        return y;
    };

    double x_l = a, x_r = b;
    double x_m = 0.5 * (x_l + x_r);
    // Width falls by at least 1/4 per iteration, so the cap is slack.
    int max_iters = static_cast<int>(std::ceil(std::log((b - a) / epsilon) / std::log(4.0 / 3.0))) + 8;
    for (int iter = 0; iter < max_iters && x_r - x_l > epsilon; ++iter) {
        double xs[3] = {x_l, x_m, x_r};
        double fs[3] = {eval(x_l), eval(x_m), eval(x_r)};
        int best = 0, second = -1;
        for (int i = 1; i < 3; ++i)
            if (fs[i] > fs[best]) best = i;
        for (int i = 0; i < 3; ++i) {
            if (i == best) continue;
            if (second < 0 || fs[i] > fs[second]) second = i;
        }
        double x_1 = xs[best], x_2 = xs[second];
        double x_3 = 0.5 * (x_1 + x_2);
        if (x_3 <= x_l || x_3 >= x_r) break;  // bracket exhausted numerically
        if (eval(x_3) >= fs[best]) {
            // The midpoint beats the best probe: the peak sits between
            // the top two, and x_3 is the new bracket's midpoint.
            x_l = std::min(x_1, x_2);
            x_r = std::max(x_1, x_2);
            x_m = x_3;
        } else {
            // The best probe beats the midpoint: the peak lies on x_1's
            // side of x_3, so the far side goes.
            if (x_3 > x_1)
                x_r = x_3;
            else
                x_l = x_3;
            x_m = 0.5 * (x_l + x_r);
        }
        if (trace) trace->push_back({x_l, x_m, x_r});
    }
    return x_m;
}

}  // namespace linksparse
