#pragma once

// Small graph convolutional network that maps a conflict graph to one
// nonnegative scalar per vertex (the local threshold multiplier z).
// Layer rule: X^l = sigma_l( X^{l-1} Theta0^l + (L X^{l-1}) Theta1^l )
// with L the normalized Laplacian, X^0 = all-ones, no biases, leaky-ReLU
// on hidden layers and plain ReLU on the output layer.

#include <cstdint>
#include <string>
#include <vector>

#include "linksparse/graph.hpp"

namespace linksparse {

using Mat = std::vector<std::vector<double>>;  // row-major, rows = vertices or input dim

struct GcnModel {
    int layer_count = 1;
    std::vector<int> dims;  // size layer_count+1, dims.front() == dims.back() == 1
    double leaky_slope = 0.01;
    std::vector<Mat> theta0;  // theta0[l]: dims[l] x dims[l+1]
    std::vector<Mat> theta1;

    std::uint64_t init_seed = 0;
    int trained_epochs = 0;

    void validate() const;  // throws std::invalid_argument on shape problems
};

// dims = [1, hidden, ..., hidden, 1]; entries uniform in [-0.5, 0.5] / sqrt(fan_in)
GcnModel init_gcn(int layer_count, int hidden_dim, double leaky_slope, std::uint64_t seed);

struct GcnCache {
    std::vector<Mat> x;   // x[l] = activations of layer l, l = 0..L
    std::vector<Mat> lx;  // lx[l] = Laplacian applied to x[l], l = 0..L-1
    std::vector<Mat> s;   // s[l-1] = pre-activation of layer l, l = 1..L
};

// Matrix-form forward pass; z is the output column, cache feeds backward.
std::vector<double> gcn_forward(const GcnModel& model, const ConflictGraph& g,
                                GcnCache* cache = nullptr);

// Message-passing form: each vertex combines its own row with a plain
// neighbor aggregate, no global matrices. Agrees with gcn_forward up to
// floating-point summation order.
std::vector<double> gcn_forward_local(const GcnModel& model, const ConflictGraph& g);

struct GcnGradients {
    std::vector<Mat> theta0;
    std::vector<Mat> theta1;

    double norm() const;          // Frobenius norm over all matrices
    void scale(double factor);
    void accumulate(const GcnGradients& other, double factor = 1.0);
};

// Reverse-mode gradients of sum_v dJ_dz[v] * z_v with respect to every
// parameter. Kink subgradients: 0 for the output ReLU, leaky slope for
// hidden layers.
GcnGradients gcn_backward(const GcnModel& model, const ConflictGraph& g, const GcnCache& cache,
                          const std::vector<double>& dJ_dz);

// In-place SGD step: theta -= step * grad
void apply_gradient(GcnModel& model, const GcnGradients& grad, double step);

void save_gcn(const GcnModel& model, const std::string& path);
GcnModel load_gcn(const std::string& path);

}  // namespace linksparse
