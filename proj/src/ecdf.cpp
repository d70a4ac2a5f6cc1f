#include "linksparse/ecdf.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

namespace linksparse {

using nlohmann::json;

namespace {

// Hermite basis on t in [0,1]
inline double hermite(double y0, double y1, double m0, double m1, double dx, double t) {
    double t2 = t * t, t3 = t2 * t;
    return y0 * (2 * t3 - 3 * t2 + 1) + dx * m0 * (t3 - 2 * t2 + t) + y1 * (-2 * t3 + 3 * t2) +
           dx * m1 * (t3 - t2);
}

inline double hermite_deriv(double y0, double y1, double m0, double m1, double dx, double t) {
    double t2 = t * t;
    return (y0 * (6 * t2 - 6 * t) + dx * m0 * (3 * t2 - 4 * t + 1) + y1 * (-6 * t2 + 6 * t) +
            dx * m1 * (3 * t2 - 2 * t)) /
           dx;
}

void compute_slopes(EcdfModel& m) {
    std::size_t k = m.knots.size();
    m.slopes.assign(k, 0.0);
    if (k < 3) return;
    for (std::size_t i = 1; i + 1 < k; ++i) {
        double dl = (m.cdf_values[i] - m.cdf_values[i - 1]) / (m.knots[i] - m.knots[i - 1]);
        double dr = (m.cdf_values[i + 1] - m.cdf_values[i]) / (m.knots[i + 1] - m.knots[i]);
        // harmonic mean keeps the interpolant monotone (<= 2*min secant)
        m.slopes[i] = 2.0 / (1.0 / dl + 1.0 / dr);
    }
}

}  // namespace

EcdfModel fit_ecdf(const std::vector<double>& samples, int knot_count, double bandwidth) {
    if (samples.size() < 2) throw std::invalid_argument("fit_ecdf: need at least 2 samples");
    if (knot_count < 2) throw std::invalid_argument("fit_ecdf: knot_count must be >= 2");
    std::vector<double> s(samples);
    for (double v : s)
        if (v < 0.0 || !std::isfinite(v))
            throw std::invalid_argument("fit_ecdf: utilities must be finite and nonnegative");
    std::sort(s.begin(), s.end());
    std::size_t n = s.size();

    // mid-step empirical probability at each distinct value:
    // F_mid(x) = (#below + #equal/2) / n, strictly increasing over distinct x
    std::vector<double> xs, ps;
    std::size_t i = 0;
    while (i < n) {
        std::size_t j = i;
        while (j < n && s[j] == s[i]) ++j;
        xs.push_back(s[i]);
        ps.push_back((static_cast<double>(i) + 0.5 * static_cast<double>(j - i)) /
                     static_cast<double>(n));
        i = j;
    }

    EcdfModel m;
    double range = s.back() - s.front();
    m.bandwidth = bandwidth > 0.0
                      ? bandwidth
                      : std::max(range / knot_count, 1e-6 * std::max(1.0, std::abs(s.back())));
    m.floor_prob = std::min({1e-6, 0.5 * ps.front(), 0.5 * (1.0 - ps.back())});

    // knots at (up to) knot_count equally spaced order statistics
    m.knots.push_back(s.front() - m.bandwidth);
    m.cdf_values.push_back(m.floor_prob);
    double last = m.knots.back();
    for (int j = 0; j < knot_count; ++j) {
        double frac = (knot_count > 1) ? static_cast<double>(j) / (knot_count - 1) : 0.0;
        std::size_t idx = static_cast<std::size_t>(std::llround(frac * (n - 1)));
        double x = s[idx];
        if (x <= last) continue;
        std::size_t u = std::lower_bound(xs.begin(), xs.end(), x) - xs.begin();
        m.knots.push_back(x);
        m.cdf_values.push_back(ps[u]);
        last = x;
    }
    m.knots.push_back(s.back() + m.bandwidth);
    m.cdf_values.push_back(1.0 - m.floor_prob);

    compute_slopes(m);
    return m;
}

double EcdfModel::cdf(double u) const {
    if (u <= knots.front()) return floor_prob;
    if (u >= knots.back()) return 1.0 - floor_prob;
    std::size_t hi = std::upper_bound(knots.begin(), knots.end(), u) - knots.begin();
    std::size_t lo = hi - 1;
    double dx = knots[hi] - knots[lo];
    double t = (u - knots[lo]) / dx;
    return hermite(cdf_values[lo], cdf_values[hi], slopes[lo], slopes[hi], dx, t);
}

double EcdfModel::pdf(double u) const {
    if (u <= knots.front() || u >= knots.back()) return 0.0;
    std::size_t hi = std::upper_bound(knots.begin(), knots.end(), u) - knots.begin();
    std::size_t lo = hi - 1;
    double dx = knots[hi] - knots[lo];
    double t = (u - knots[lo]) / dx;
    double d = hermite_deriv(cdf_values[lo], cdf_values[hi], slopes[lo], slopes[hi], dx, t);
    return d > 0.0 ? d : 0.0;  // guards tiny negative round-off at knot boundaries
}

double EcdfModel::quantile(double eta) const {
    if (!(eta > 0.0 && eta < 1.0))
        throw std::domain_error("EcdfModel::quantile: eta must lie in (0,1)");
    double target = std::clamp(eta, floor_prob, 1.0 - floor_prob);
    if (target <= cdf_values.front()) return knots.front();
    if (target >= cdf_values.back()) return knots.back();
    std::size_t hi = std::upper_bound(cdf_values.begin(), cdf_values.end(), target) -
                     cdf_values.begin();
    double a = knots[hi - 1], b = knots[hi];
    for (int it = 0; it < 200 && b - a > 1e-15 * std::max(1.0, std::abs(b)); ++it) {
        double mid = 0.5 * (a + b);
        if (cdf(mid) < target)
            a = mid;
        else
            b = mid;
    }
    return 0.5 * (a + b);
}

void save_ecdf(const EcdfModel& m, const std::string& path) {
    json j;
    j["knots"] = m.knots;
    j["cdf_values"] = m.cdf_values;
    j["bandwidth"] = m.bandwidth;
    j["floor_prob"] = m.floor_prob;
    j["provenance"] = {{"protocol", m.protocol}, {"dataset", m.dataset}, {"traffic", m.traffic}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

EcdfModel load_ecdf(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j;
    in >> j;
    EcdfModel m;
    m.knots = j.at("knots").get<std::vector<double>>();
    m.cdf_values = j.at("cdf_values").get<std::vector<double>>();
    m.bandwidth = j.at("bandwidth").get<double>();
    m.floor_prob = j.value("floor_prob", 1e-6);
    if (j.contains("provenance")) {
        m.protocol = j["provenance"].value("protocol", "");
        m.dataset = j["provenance"].value("dataset", "");
        m.traffic = j["provenance"].value("traffic", "");
    }
    if (m.knots.size() != m.cdf_values.size() || m.knots.size() < 2)
        throw std::runtime_error("load_ecdf: malformed model file " + path);
    compute_slopes(m);  // tangents are derived data, recomputed on load
    return m;
}

void save_samples(const std::vector<double>& samples, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    for (double v : samples) out << v << '\n';
}

std::vector<double> load_samples(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    std::vector<double> out;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        out.push_back(std::stod(line));
    }
    return out;
}

}  // namespace linksparse
