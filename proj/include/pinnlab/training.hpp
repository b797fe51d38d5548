#pragma once

#include "pinnlab/autodiff.hpp"
#include "pinnlab/cauchy.hpp"
#include "pinnlab/mlp.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace pinnlab {

enum class Optimizer { sgd, adam };

std::string to_string(Optimizer o);
std::optional<Optimizer> parse_optimizer(std::string_view name);

struct LossWeights {
    double residual = 1.0;
    double initial = 1.0;
    double data = 1.0;
};

// Gradient components below reference * 2^-p are treated as zero.
struct PrecisionSimulation {
    int mantissa_bits = 53;
    double reference = 1.0;
    bool per_sample = true;  // flush each point's gradient, not only the mean

    double threshold() const;
};

struct TrainConfig {
    Optimizer optimizer = Optimizer::adam;
    double learning_rate = 1e-3;
    long steps = 1000;
    Eigen::Index batch_size = 0;  // points drawn per term and step; 0 uses every point
    LossWeights weights;
    std::optional<PrecisionSimulation> precision;
    std::uint64_t seed = 0;
    long log_every = 100;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double adam_epsilon = 1e-8;
    bool freeze_biases = false;
    double divergence_threshold = 1e12;
    long checkpoint_every = 0;  // 0 disables intermediate checkpoints

    void validate() const;
    static double default_learning_rate(Optimizer o) { return o == Optimizer::sgd ? 1e-2 : 1e-3; }
};

struct TrainLogEntry {
    long step = 0;
    double loss_total = 0.0;
    double loss_res = 0.0;
    double loss_ic = 0.0;
    double loss_data = 0.0;
    double w_norm = 0.0;
    double g_norm = 0.0;

    bool operator==(const TrainLogEntry&) const = default;
};

struct TrainLog {
    std::vector<TrainLogEntry> entries;

    std::string to_csv() const;
    bool operator==(const TrainLog&) const = default;
};

enum class TrainStatus { completed, converged, diverged, nonfinite };

std::string to_string(TrainStatus s);

struct TrainResult {
    MlpParams params;
    TrainLog log;
    TrainStatus status = TrainStatus::completed;
    long steps_taken = 0;
    std::string diagnostic;
};

struct AdamState {
    std::vector<Layer> m, v;
    long t = 0;
};

void step_sgd(MlpParams& net, const ParamGrad& grad, double lr);
void step_adam(MlpParams& net, const ParamGrad& grad, AdamState& state, double lr, double beta1 = 0.9,
               double beta2 = 0.999, double epsilon = 1e-8);

// Zero every component with |g| < reference * 2^-p.
ParamGrad flush_gradient(ParamGrad grad, int mantissa_bits, double reference = 1.0);

// ---- losses ----------------------------------------------------------------

struct PinnLoss {
    double total = 0.0;
    double residual_part = 0.0;  // |D| * mean residual^2
    double ic_part = 0.0;        // |D_x| * mean (u(x, 0) - phi)^2
};

// Residual and initial-condition terms; weights carry the domain volumes.
std::vector<LossTerm> pinn_loss_terms(const CauchyProblem& problem, const CollocationSet& colloc,
                                      const LossWeights& weights = {});

PinnLoss pinn_loss(const MlpParams& net, const CauchyProblem& problem, const CollocationSet& colloc,
                   const LossWeights& weights = {});
// Same loss for an arbitrary candidate supplied as a jet-valued closure.
PinnLoss pinn_loss(const JetField& candidate, const CauchyProblem& problem, const CollocationSet& colloc,
                   const LossWeights& weights = {});

struct DataSamples {
    Eigen::MatrixXd inputs;  // in_dim x K
    Eigen::VectorXd values;  // K
};

LossTerm data_loss_term(const DataSamples& samples, double weight = 1.0);
// (1/K) sum_i |u(x_i, t_i) - u_i|^2
double data_loss(const MlpParams& net, const DataSamples& samples);

// ---- training loop ---------------------------------------------------------

using CheckpointHook = std::function<void(long step, const MlpParams&)>;

TrainResult train(MlpParams net, const std::vector<LossTerm>& terms, const TrainConfig& config,
                  const CheckpointHook& on_checkpoint = {});
TrainResult train(MlpParams net, const CauchyProblem& problem, const CollocationSet& colloc,
                  const TrainConfig& config, const CheckpointHook& on_checkpoint = {});
TrainResult train(MlpParams net, const DataSamples& samples, const TrainConfig& config,
                  const CheckpointHook& on_checkpoint = {});

}  // namespace pinnlab
