#pragma once

// Smooth monotone surrogate for the empirical CDF of link utilities.
// Monotone piecewise-cubic Hermite interpolation (harmonic-mean tangents)
// through mid-step empirical probabilities on quantile-spaced knots, with
// short linear-width ramps below the minimum and above the maximum sample
// so the CDF is strictly increasing on a closed interval and the PDF is
// analytic everywhere. Gives f_u, f_u' and f_u^{-1} for the sparsifier,
// the gradients, and the quantile search.

#include <string>
#include <vector>

namespace linksparse {

struct EcdfModel {
    std::vector<double> knots;       // strictly increasing, includes ramp endpoints
    std::vector<double> cdf_values;  // strictly increasing, inside (0,1)
    std::vector<double> slopes;      // Hermite tangents, endpoints 0
    double bandwidth = 0.0;          // ramp half-width
    double floor_prob = 1e-6;        // cdf value below the first knot

    // provenance, carried in the model file
    std::string protocol;
    std::string dataset;
    std::string traffic;

    double cdf(double u) const;
    double pdf(double u) const;           // analytic derivative of cdf
    double quantile(double eta) const;    // inverse cdf, eta in (0,1)

    double min_support() const { return knots.front(); }
    double max_support() const { return knots.back(); }
};

// knot_count bounds the number of interior knots (quantile-spaced);
// bandwidth <= 0 picks sample_range/knot_count (with a positive floor for
// degenerate all-equal samples). Throws std::invalid_argument on fewer
// than 2 samples or any negative utility.
EcdfModel fit_ecdf(const std::vector<double>& samples, int knot_count = 256,
                   double bandwidth = 0.0);

void save_ecdf(const EcdfModel& model, const std::string& path);
EcdfModel load_ecdf(const std::string& path);

// sample files: one utility per line, '#' comment lines ignored
void save_samples(const std::vector<double>& samples, const std::string& path);
std::vector<double> load_samples(const std::string& path);

}  // namespace linksparse
