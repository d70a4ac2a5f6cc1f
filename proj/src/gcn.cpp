#include "linksparse/gcn.hpp"

#include <cmath>
#include <fstream>
#include <stdexcept>

#include <json.hpp>

#include "linksparse/rng.hpp"

namespace linksparse {

using nlohmann::json;

namespace {

Mat zeros(std::size_t rows, std::size_t cols) {
    return Mat(rows, std::vector<double>(cols, 0.0));
}

// C = A * B, A: n x p, B: p x q
Mat matmul(const Mat& a, const Mat& b) {
    std::size_t n = a.size(), p = b.size(), q = b.empty() ? 0 : b[0].size();
    Mat c = zeros(n, q);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k) {
            double aik = a[i][k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < q; ++j) c[i][j] += aik * b[k][j];
        }
    return c;
}

// C = A^T * B, A: n x p, B: n x q -> p x q
Mat matmul_at_b(const Mat& a, const Mat& b) {
    std::size_t n = a.size(), p = n ? a[0].size() : 0, q = n ? b[0].size() : 0;
    Mat c = zeros(p, q);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k) {
            double aik = a[i][k];
            if (aik == 0.0) continue;
            for (std::size_t j = 0; j < q; ++j) c[k][j] += aik * b[i][j];
        }
    return c;
}

// C = A * B^T, A: n x q, B: p x q -> n x p
Mat matmul_a_bt(const Mat& a, const Mat& b) {
    std::size_t n = a.size(), q = n ? a[0].size() : 0, p = b.size();
    Mat c = zeros(n, p);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t k = 0; k < p; ++k) {
            double acc = 0.0;
            for (std::size_t j = 0; j < q; ++j) acc += a[i][j] * b[k][j];
            c[i][k] = acc;
        }
    return c;
}

double activate(double x, bool output_layer, double slope) {
    if (output_layer) return x > 0.0 ? x : 0.0;
    return x > 0.0 ? x : slope * x;
}

double activate_grad(double x, bool output_layer, double slope) {
    if (output_layer) return x > 0.0 ? 1.0 : 0.0;  // ReLU kink -> 0
    return x > 0.0 ? 1.0 : slope;                  // leaky kink -> slope
}

}  // namespace

void GcnModel::validate() const {
    if (layer_count < 1) throw std::invalid_argument("GcnModel: layer_count must be >= 1");
    if (static_cast<int>(dims.size()) != layer_count + 1)
        throw std::invalid_argument("GcnModel: dims size mismatch");
    if (dims.front() != 1 || dims.back() != 1)
        throw std::invalid_argument("GcnModel: input/output dims must be 1");
    if (leaky_slope <= 0.0 || leaky_slope >= 1.0)
        throw std::invalid_argument("GcnModel: leaky_slope outside (0,1)");
    if (static_cast<int>(theta0.size()) != layer_count ||
        static_cast<int>(theta1.size()) != layer_count)
        throw std::invalid_argument("GcnModel: parameter layer count mismatch");
    for (int l = 0; l < layer_count; ++l) {
        for (const Mat* th : {&theta0[l], &theta1[l]}) {
            if (static_cast<int>(th->size()) != dims[l])
                throw std::invalid_argument("GcnModel: parameter row count mismatch");
            for (const auto& row : *th)
                if (static_cast<int>(row.size()) != dims[l + 1])
                    throw std::invalid_argument("GcnModel: parameter col count mismatch");
        }
    }
}

GcnModel init_gcn(int layer_count, int hidden_dim, double leaky_slope, std::uint64_t seed) {
    if (layer_count < 1) throw std::invalid_argument("init_gcn: layer_count must be >= 1");
    if (layer_count > 1 && hidden_dim < 1)
        throw std::invalid_argument("init_gcn: hidden_dim must be >= 1");
    GcnModel m;
    m.layer_count = layer_count;
    m.leaky_slope = leaky_slope;
    m.init_seed = seed;
    m.dims.assign(layer_count + 1, hidden_dim);
    m.dims.front() = 1;
    m.dims.back() = 1;
    Rng rng(derive_seed(seed, "gcn-init"));
    for (int l = 0; l < layer_count; ++l) {
        double scale = 1.0 / std::sqrt(static_cast<double>(m.dims[l]));
        auto draw = [&] {
            Mat th = zeros(m.dims[l], m.dims[l + 1]);
            for (auto& row : th)
                for (auto& v : row) v = (rng.u01() - 0.5) * scale;
            return th;
        };
        m.theta0.push_back(draw());
        m.theta1.push_back(draw());
    }
    m.validate();
    return m;
}

std::vector<double> gcn_forward(const GcnModel& model, const ConflictGraph& g, GcnCache* cache) {
    model.validate();
    int n = g.vertex_count;
    GcnCache local;
    GcnCache& c = cache ? *cache : local;
    c.x.clear();
    c.lx.clear();
    c.s.clear();
    c.x.push_back(zeros(n, 1));
    for (auto& row : c.x[0]) row[0] = 1.0;
    for (int l = 0; l < model.layer_count; ++l) {
        c.lx.push_back(normalized_laplacian_apply(g, c.x[l]));
        Mat s = matmul(c.x[l], model.theta0[l]);
        Mat s1 = matmul(c.lx[l], model.theta1[l]);
        bool output_layer = (l == model.layer_count - 1);
        Mat x = zeros(n, model.dims[l + 1]);
        for (int v = 0; v < n; ++v)
            for (int j = 0; j < model.dims[l + 1]; ++j) {
                s[v][j] += s1[v][j];
                x[v][j] = activate(s[v][j], output_layer, model.leaky_slope);
            }
        c.s.push_back(std::move(s));
        c.x.push_back(std::move(x));
    }
    std::vector<double> z(n);
    for (int v = 0; v < n; ++v) z[v] = c.x.back()[v][0];
    return z;
}

std::vector<double> gcn_forward_local(const GcnModel& model, const ConflictGraph& g) {
    model.validate();
    int n = g.vertex_count;
    Mat prev = zeros(n, 1);
    for (auto& row : prev) row[0] = 1.0;
    for (int l = 0; l < model.layer_count; ++l) {
        bool output_layer = (l == model.layer_count - 1);
        int width = model.dims[l + 1];
        Mat next = zeros(n, width);
        std::vector<double> agg(model.dims[l]);
        for (int v = 0; v < n; ++v) {
            // local aggregate: own row minus degree-normalized neighbor sum
            for (int k = 0; k < model.dims[l]; ++k) agg[k] = prev[v][k];
            if (g.degree(v) > 0) {
                double dv = std::sqrt(static_cast<double>(g.degree(v)));
                for (int u : g.adjacency[v]) {
                    double w = 1.0 / (dv * std::sqrt(static_cast<double>(g.degree(u))));
                    for (int k = 0; k < model.dims[l]; ++k) agg[k] -= w * prev[u][k];
                }
            }
            for (int j = 0; j < width; ++j) {
                double s = 0.0;
                for (int k = 0; k < model.dims[l]; ++k)
                    s += prev[v][k] * model.theta0[l][k][j] + agg[k] * model.theta1[l][k][j];
                next[v][j] = activate(s, output_layer, model.leaky_slope);
            }
        }
        prev = std::move(next);
    }
    std::vector<double> z(n);
    for (int v = 0; v < n; ++v) z[v] = prev[v][0];
    return z;
}

double GcnGradients::norm() const {
    double acc = 0.0;
    for (const auto* side : {&theta0, &theta1})
        for (const auto& th : *side)
            for (const auto& row : th)
                for (double v : row) acc += v * v;
    return std::sqrt(acc);
}

void GcnGradients::scale(double factor) {
    for (auto* side : {&theta0, &theta1})
        for (auto& th : *side)
            for (auto& row : th)
                for (auto& v : row) v *= factor;
}

void GcnGradients::accumulate(const GcnGradients& other, double factor) {
    for (int side = 0; side < 2; ++side) {
        auto& mine = side ? theta1 : theta0;
        const auto& theirs = side ? other.theta1 : other.theta0;
        for (std::size_t l = 0; l < mine.size(); ++l)
            for (std::size_t i = 0; i < mine[l].size(); ++i)
                for (std::size_t j = 0; j < mine[l][i].size(); ++j)
                    mine[l][i][j] += factor * theirs[l][i][j];
    }
}

GcnGradients gcn_backward(const GcnModel& model, const ConflictGraph& g, const GcnCache& cache,
                          const std::vector<double>& dJ_dz) {
    model.validate();
    int n = g.vertex_count;
    if (static_cast<int>(dJ_dz.size()) != n)
        throw std::invalid_argument("gcn_backward: dJ_dz size mismatch");
    if (static_cast<int>(cache.x.size()) != model.layer_count + 1 ||
        static_cast<int>(cache.lx.size()) != model.layer_count ||
        static_cast<int>(cache.s.size()) != model.layer_count ||
        static_cast<int>(cache.x[0].size()) != n)
        throw std::invalid_argument("gcn_backward: cache does not match model/graph");
    for (int l = 0; l <= model.layer_count; ++l)
        if (!cache.x[l].empty() && static_cast<int>(cache.x[l][0].size()) != model.dims[l])
            throw std::invalid_argument("gcn_backward: cache width mismatch");

    GcnGradients grads;
    grads.theta0.resize(model.layer_count);
    grads.theta1.resize(model.layer_count);

    Mat gmat = zeros(n, 1);
    for (int v = 0; v < n; ++v) gmat[v][0] = dJ_dz[v];
    for (int l = model.layer_count - 1; l >= 0; --l) {
        bool output_layer = (l == model.layer_count - 1);
        for (int v = 0; v < n; ++v)
            for (int j = 0; j < model.dims[l + 1]; ++j)
                gmat[v][j] *= activate_grad(cache.s[l][v][j], output_layer, model.leaky_slope);
        grads.theta0[l] = matmul_at_b(cache.x[l], gmat);
        grads.theta1[l] = matmul_at_b(cache.lx[l], gmat);
        if (l > 0) {
            Mat dx = matmul_a_bt(gmat, model.theta0[l]);
            Mat dx1 = normalized_laplacian_apply(g, matmul_a_bt(gmat, model.theta1[l]));
            for (int v = 0; v < n; ++v)
                for (int j = 0; j < model.dims[l]; ++j) dx[v][j] += dx1[v][j];
            gmat = std::move(dx);
        }
    }
    return grads;
}

void apply_gradient(GcnModel& model, const GcnGradients& grad, double step) {
    for (int l = 0; l < model.layer_count; ++l)
        for (int side = 0; side < 2; ++side) {
            auto& th = side ? model.theta1[l] : model.theta0[l];
            const auto& gr = side ? grad.theta1[l] : grad.theta0[l];
            for (std::size_t i = 0; i < th.size(); ++i)
                for (std::size_t j = 0; j < th[i].size(); ++j) th[i][j] -= step * gr[i][j];
        }
}

void save_gcn(const GcnModel& model, const std::string& path) {
    model.validate();
    json j;
    j["layer_count"] = model.layer_count;
    j["dims"] = model.dims;
    j["leaky_slope"] = model.leaky_slope;
    json layers = json::array();
    for (int l = 0; l < model.layer_count; ++l)
        layers.push_back({{"theta0", model.theta0[l]}, {"theta1", model.theta1[l]}});
    j["layers"] = std::move(layers);
    j["metadata"] = {{"init_seed", model.init_seed}, {"trained_epochs", model.trained_epochs}};
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    out << j.dump(2) << '\n';
}

GcnModel load_gcn(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    json j;
    in >> j;
    GcnModel m;
    m.layer_count = j.at("layer_count").get<int>();
    m.dims = j.at("dims").get<std::vector<int>>();
    m.leaky_slope = j.at("leaky_slope").get<double>();
    for (const auto& layer : j.at("layers")) {
        m.theta0.push_back(layer.at("theta0").get<Mat>());
        m.theta1.push_back(layer.at("theta1").get<Mat>());
    }
    if (j.contains("metadata")) {
        m.init_seed = j["metadata"].value("init_seed", std::uint64_t{0});
        m.trained_epochs = j["metadata"].value("trained_epochs", 0);
    }
    m.validate();
    return m;
}

}  // namespace linksparse
