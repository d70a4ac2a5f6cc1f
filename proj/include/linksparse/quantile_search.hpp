#pragma once

// Offline selection of the global cut-off quantile eta*. Wraps the
// per-protocol signaling-overhead models, the Monte-Carlo net-utility
// objective they feed, and a bracketing peak search for quasi-concave
// curves. The objective is frozen per seed so the search sees a
// deterministic function of eta.

#include <cstdint>
#include <functional>
#include <vector>

#include "linksparse/ecdf.hpp"
#include "linksparse/graph.hpp"

namespace linksparse {

enum class OverheadMode { flexible, fixed_deadline, csma };

const char* overhead_mode_name(OverheadMode m);
OverheadMode overhead_mode_from_name(const std::string& name);

// Per-protocol cost of contending with x neighbors: tau is the slot
// fraction one control message burns, K the fixed deadline in message
// units, W the csma contention window.
struct OverheadModel {
    OverheadMode mode = OverheadMode::flexible;
    double tau = 0.01;
    int deadline_k = 30;
    int window = 32;

    void validate() const;  // throws std::invalid_argument
};

// Fraction of the slot lost to contention when the local contention
// neighborhood has size x (>= 1). Flexible: min(1, x*tau); fixed
// deadline: 1 once x exceeds K. csma mode has no slot-fraction model
// and is rejected here (see csma_win_probability).
double overhead_fraction(const OverheadModel& m, int x);

// Probability a link with d retained neighbors wins a csma backoff
// round: (1/W) * sum_{m=0}^{W-1} ((W-1-m)/W)^d. Exactly 1 at d=0 and
// strictly decreasing in d.
double csma_win_probability(int window, int d);

// Monte-Carlo estimate of the expected per-slot utility net of
// signaling overhead when every link applies the single global
// threshold quantile(eta). Each draw picks one graph uniformly, draws
// iid utilities from the ecdf, keeps links with u > u_eta, and scores
//   LGS modes:  sum over the greedy max-weight independent set of
//               u(v) * (1 - overhead_fraction(d_s(v) + 1))
//   csma mode:  sum over all retained links of
//               u(v) * csma_win_probability(W, d_s(v))
// with d_s the realized post-cut degree. Draw streams derive from
// `seed` alone, so repeated calls (any eta, any thread count) reuse
// the same frozen sample set. Returns the mean over n_samples draws.
double net_utility_objective(double eta, const std::vector<ConflictGraph>& graphs,
                             const EcdfModel& ecdf, const OverheadModel& m,
                             std::uint64_t seed, int n_samples = 200, int threads = 1);

// Bracket state after each peak_search iteration, for convergence
// checks: x_m stays inside [x_l, x_r] and the width shrinks by a
// factor of at most 3/4 per iteration.
struct PeakSearchStep {
    double x_l = 0.0;
    double x_m = 0.0;
    double x_r = 0.0;
};

// Peak search for a quasi-concave f on [a, b]: keeps midpoint probes
// {x_l, x_m, x_r}, bisects between the two best, and cuts away the
// side of the halving point that the best probe rules out. For
// quasi-concave f the returned x_m is within epsilon of the argmax;
// other shapes converge to a local result. Values are memoized, so f
// is called once per distinct probe.
double peak_search(const std::function<double(double)>& f, double a, double b,
                   double epsilon, std::vector<PeakSearchStep>* trace = nullptr);

}  // namespace linksparse
