#pragma once

#include "pinnlab/jet.hpp"
#include "pinnlab/mlp.hpp"

#include <Eigen/Dense>

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pinnlab {

// Jets of every output unit over a batch; each block is out_dim x n.
struct JetBatch {
    Eigen::MatrixXd val, dx, dt, dxx;

    Jet2d at(Eigen::Index point, Eigen::Index unit = 0) const {
        return {val(unit, point), dx(unit, point), dt(unit, point), dxx(unit, point)};
    }
};

// Inputs are 2 x n with rows (x, t).
JetBatch jet_eval_batch(const MlpParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs);
Jet2d jet_eval(const MlpParams& net, double x, double t);

// Gradient of a scalar loss with respect to every weight and bias.
struct ParamGrad {
    std::vector<Layer> layers;
    // Set when a non-finite intermediate appeared; the gradient is then unusable.
    std::optional<std::size_t> nonfinite_layer;

    static ParamGrad zeros_like(const MlpParams& net);

    bool congruent_with(const MlpParams& net) const;
    ParamGrad& operator+=(const ParamGrad& o);
    ParamGrad& operator*=(double s);
    double norm() const;
    double max_abs() const;
    bool all_zero() const;
    Eigen::VectorXd flatten() const;
};

// Penalty of one point and its derivative with respect to (u, u_x, u_t, u_xx).
struct PointPenalty {
    double value = 0.0;
    std::array<double, 4> grad{};
};

enum class TermKind { residual, initial, data, other };

std::string to_string(TermKind kind);

// One mean-squared style term of a composite loss: weight * mean_i penalty(i, input_i, jet_i).
struct LossTerm {
    using Penalty = std::function<PointPenalty(Eigen::Index index, double x, double t, const Jet2d& u)>;

    TermKind kind = TermKind::other;
    Eigen::MatrixXd inputs;  // in_dim x n; rows (x, t) when derivatives are needed
    Penalty penalty;
    double weight = 1.0;
    // When false only u is propagated and penalty.grad[1..3] are ignored.
    bool needs_derivatives = true;
};

struct LossEvaluation {
    double total = 0.0;
    std::vector<double> term_means;  // unweighted, one per term
};

LossEvaluation evaluate_loss(const MlpParams& net, const std::vector<LossTerm>& terms);

struct LossAndGrad {
    LossEvaluation loss;
    ParamGrad grad;
};

// d(sum_k w_k * mean_i penalty_k)/d(theta) by reverse mode over the jet forward pass.
// With a positive `per_sample_flush`, each component of a single point's
// gradient d(penalty_i)/d(theta) is zeroed when its magnitude is below that
// threshold before the mean is taken (simulated machine precision).
LossAndGrad loss_param_grad(const MlpParams& net, const std::vector<LossTerm>& terms,
                            double per_sample_flush = 0.0);

}  // namespace pinnlab
