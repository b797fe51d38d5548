#pragma once

#include "pinnlab/activation.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

namespace pinnlab {

struct Layer {
    Eigen::MatrixXd weight;  // out x in
    Eigen::VectorXd bias;    // out

    friend bool operator==(const Layer& a, const Layer& b) {
        return a.weight.rows() == b.weight.rows() && a.weight.cols() == b.weight.cols() &&
               a.bias.size() == b.bias.size() && a.weight == b.weight && a.bias == b.bias;
    }
};

// Feed-forward network. Hidden layers use `activation`; the last layer is
// linear unless `activate_output` is set.
struct MlpParams {
    std::vector<Layer> layers;
    Activation activation = Activation::sigmoid;
    bool activate_output = false;

    Eigen::Index input_dim() const;
    Eigen::Index output_dim() const;
    Eigen::Index parameter_count() const;
    std::vector<Eigen::Index> architecture() const;

    // Throws StructureError when shapes do not chain or entries are non-finite.
    void validate() const;

    bool operator==(const MlpParams&) const = default;
};

// Glorot-uniform weights, zero biases, deterministic in `seed`.
MlpParams init_mlp(std::span<const Eigen::Index> sizes, Activation activation, std::uint64_t seed,
                   bool activate_output = false);

double max_abs_weight(const MlpParams& net);

Eigen::VectorXd flatten(const MlpParams& net);
// Overwrites parameters in layer order (weights column-major, then bias).
void unflatten(MlpParams& net, const Eigen::Ref<const Eigen::VectorXd>& theta);

// Plain forward pass on a batch: inputs is in_dim x n, result is out_dim x n.
Eigen::MatrixXd eval_batch(const MlpParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs);
double eval(const MlpParams& net, std::span<const double> input);

struct StepWitness {
    int n = 1;
    std::vector<std::pair<double, double>> box;  // [l_i, r_i] per input dimension
};

// sigma(n*y - n(2d - 1/2)) with y = sum_i sigma(n x_i - n l_i) + sigma(-n x_i + n r_i).
MlpParams sigmoid_step_network(const StepWitness& witness);

// Two hidden ReLU layers converging a.e. on [-1, 1] to the indicator of [0, 1].
//   y = relu(nx + 1/2) - relu(nx - 1/2) + relu(n - nx + 1/2) - relu(n - nx - 1/2)
//   f = relu(n y - 2n + 1)
MlpParams relu_step_network(int n);

// Scaled indicator of an open interval.
struct StepFunction1d {
    double lo = 0.0;
    double hi = 1.0;
    double height = 1.0;

    double operator()(double x) const { return (x > lo && x < hi) ? height : 0.0; }
};

// Unit-norm indicator of (1 - 2^{1-n}, 1 - 2^{-n}).
StepFunction1d phi_witness(int n);
double l2_norm(const StepFunction1d& f);
double l2_distance(const StepFunction1d& a, const StepFunction1d& b);

}  // namespace pinnlab
