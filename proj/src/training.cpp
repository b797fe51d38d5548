#include "pinnlab/training.hpp"

#include "pinnlab/errors.hpp"

#include <cmath>
#include <memory>
#include <random>
#include <sstream>
#include <stdexcept>

namespace pinnlab {

std::string to_string(Optimizer o) { return o == Optimizer::sgd ? "sgd" : "adam"; }

std::optional<Optimizer> parse_optimizer(std::string_view name) {
    if (name == "sgd") return Optimizer::sgd;
    if (name == "adam") return Optimizer::adam;
    return std::nullopt;
}

std::string to_string(TrainStatus s) {
    switch (s) {
        case TrainStatus::completed:
            return "completed";
        case TrainStatus::converged:
            return "converged";
        case TrainStatus::diverged:
            return "diverged";
        case TrainStatus::nonfinite:
            return "nonfinite";
    }
    return "unknown";
}

double PrecisionSimulation::threshold() const { return reference * std::ldexp(1.0, -mantissa_bits); }

void TrainConfig::validate() const {
    if (!(learning_rate > 0.0)) throw std::invalid_argument("learning rate must be positive");
    if (steps < 0) throw std::invalid_argument("steps must be non-negative");
    if (weights.residual < 0.0 || weights.initial < 0.0 || weights.data < 0.0)
        throw std::invalid_argument("loss weights must be non-negative");
    if (weights.residual == 0.0 && weights.initial == 0.0 && weights.data == 0.0)
        throw std::invalid_argument("loss weights cannot all be zero");
    if (precision && precision->mantissa_bits < 2) throw std::invalid_argument("mantissa bits p must be >= 2");
    if (batch_size < 0) throw std::invalid_argument("batch size must be non-negative");
    if (log_every < 1) throw std::invalid_argument("log cadence must be >= 1");
}

std::string TrainLog::to_csv() const {
    std::ostringstream os;
    os.precision(17);
    os << "step,loss_total,loss_res,loss_ic,loss_data,w_norm,g_norm\n";
    for (const auto& e : entries)
        os << e.step << ',' << e.loss_total << ',' << e.loss_res << ',' << e.loss_ic << ',' << e.loss_data << ','
           << e.w_norm << ',' << e.g_norm << '\n';
    return os.str();
}

void step_sgd(MlpParams& net, const ParamGrad& grad, double lr) {
    if (!grad.congruent_with(net)) throw StructureError("gradient shape does not match network");
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        net.layers[i].weight -= lr * grad.layers[i].weight;
        net.layers[i].bias -= lr * grad.layers[i].bias;
    }
}

void step_adam(MlpParams& net, const ParamGrad& grad, AdamState& state, double lr, double beta1, double beta2,
               double epsilon) {
    if (!grad.congruent_with(net)) throw StructureError("gradient shape does not match network");
    if (state.m.empty()) {
        const ParamGrad zeros = ParamGrad::zeros_like(net);
        state.m = zeros.layers;
        state.v = zeros.layers;
    }
    ++state.t;
    const double c1 = 1.0 - std::pow(beta1, double(state.t));
    const double c2 = 1.0 - std::pow(beta2, double(state.t));
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
        m = beta1 * m + (1.0 - beta1) * g;
        v = beta2 * v + (1.0 - beta2) * g.cwiseProduct(g);
        param.array() -= lr * (m.array() / c1) / ((v.array() / c2).sqrt() + epsilon);
    };
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        update(net.layers[i].weight, state.m[i].weight, state.v[i].weight, grad.layers[i].weight);
        update(net.layers[i].bias, state.m[i].bias, state.v[i].bias, grad.layers[i].bias);
    }
}

ParamGrad flush_gradient(ParamGrad grad, int mantissa_bits, double reference) {
    if (mantissa_bits < 2) throw std::invalid_argument("mantissa bits p must be >= 2");
    const double thr = reference * std::ldexp(1.0, -mantissa_bits);
    for (auto& l : grad.layers) {
        l.weight = (l.weight.array().abs() < thr).select(0.0, l.weight);
        l.bias = (l.bias.array().abs() < thr).select(0.0, l.bias);
    }
    return grad;
}

// ---------------------------------------------------------------------------

std::vector<LossTerm> pinn_loss_terms(const CauchyProblem& problem, const CollocationSet& colloc,
                                      const LossWeights& weights) {
    problem.validate();
    std::vector<LossTerm> terms;

    LossTerm res;
    res.kind = TermKind::residual;
    res.inputs = colloc.interior;
    res.weight = weights.residual * problem.domain.volume();
    res.needs_derivatives = true;
    res.penalty = [op = problem.op](Eigen::Index, double, double, const Jet2d& u) {
        const LinearizedResidual r = linearize_residual(op, u);
        PointPenalty p{r.value * r.value, {}};
        for (std::size_t k = 0; k < 4; ++k) p.grad[k] = 2.0 * r.value * r.grad[k];
        return p;
    };
    terms.push_back(std::move(res));

    const Eigen::Index n0 = colloc.initial.size();
    LossTerm ic;
    ic.kind = TermKind::initial;
    ic.inputs = Eigen::MatrixXd::Zero(2, n0);
    ic.inputs.row(0) = colloc.initial.transpose();
    ic.weight = weights.initial * problem.domain.length();
    ic.needs_derivatives = false;
    auto targets = std::make_shared<Eigen::VectorXd>(n0);
    for (Eigen::Index i = 0; i < n0; ++i) (*targets)(i) = problem.initial(colloc.initial(i));
    ic.penalty = [targets](Eigen::Index i, double, double, const Jet2d& u) {
        const double e = u.val - (*targets)(i);
        return PointPenalty{e * e, {2.0 * e, 0.0, 0.0, 0.0}};
    };
    terms.push_back(std::move(ic));
    return terms;
}

PinnLoss pinn_loss(const MlpParams& net, const CauchyProblem& problem, const CollocationSet& colloc,
                   const LossWeights& weights) {
    const auto terms = pinn_loss_terms(problem, colloc, weights);
    const LossEvaluation ev = evaluate_loss(net, terms);
    PinnLoss out;
    out.residual_part = problem.domain.volume() * ev.term_means[0];
    out.ic_part = problem.domain.length() * ev.term_means[1];
    out.total = weights.residual * out.residual_part + weights.initial * out.ic_part;
    return out;
}

PinnLoss pinn_loss(const JetField& candidate, const CauchyProblem& problem, const CollocationSet& colloc,
                   const LossWeights& weights) {
    problem.validate();
    double res = 0.0;
    for (Eigen::Index k = 0; k < colloc.interior.cols(); ++k) {
        const double x = colloc.interior(0, k), t = colloc.interior(1, k);
        const double r = problem.residual(x, t, candidate(x, t));
        if (!std::isfinite(r)) {
            std::ostringstream msg;
            msg << "non-finite residual at (" << x << ", " << t << ")";
            throw std::domain_error(msg.str());
        }
        res += r * r;
    }
    double ic = 0.0;
    for (Eigen::Index k = 0; k < colloc.initial.size(); ++k) {
        const double x = colloc.initial(k);
        const double e = candidate(x, 0.0).val - problem.initial(x);
        ic += e * e;
    }
    PinnLoss out;
    out.residual_part = problem.domain.volume() * res / double(std::max<Eigen::Index>(1, colloc.interior.cols()));
    out.ic_part = problem.domain.length() * ic / double(std::max<Eigen::Index>(1, colloc.initial.size()));
    out.total = weights.residual * out.residual_part + weights.initial * out.ic_part;
    return out;
}

LossTerm data_loss_term(const DataSamples& samples, double weight) {
    if (samples.inputs.cols() != samples.values.size())
        throw StructureError("data samples: input and value counts differ");
    LossTerm term;
    term.kind = TermKind::data;
    term.inputs = samples.inputs;
    term.weight = weight;
    term.needs_derivatives = false;
    auto values = std::make_shared<Eigen::VectorXd>(samples.values);
    term.penalty = [values](Eigen::Index i, double, double, const Jet2d& u) {
        const double e = u.val - (*values)(i);
        return PointPenalty{e * e, {2.0 * e, 0.0, 0.0, 0.0}};
    };
    return term;
}

double data_loss(const MlpParams& net, const DataSamples& samples) {
    if (samples.values.size() == 0) throw std::invalid_argument("data loss needs at least one sample");
    const Eigen::MatrixXd pred = eval_batch(net, samples.inputs);
    return (pred.row(0).transpose() - samples.values).squaredNorm() / double(samples.values.size());
}

// ---------------------------------------------------------------------------

namespace {

std::vector<LossTerm> draw_minibatch(const std::vector<LossTerm>& terms, Eigen::Index batch,
                                     std::mt19937_64& rng) {
    std::vector<LossTerm> out;
    out.reserve(terms.size());
    for (const auto& term : terms) {
        const Eigen::Index n = term.inputs.cols();
        if (batch == 0 || n <= batch) {
            out.push_back(term);
            continue;
        }
        std::uniform_int_distribution<Eigen::Index> pick(0, n - 1);
        auto index = std::make_shared<std::vector<Eigen::Index>>(std::size_t(batch));
        LossTerm sub = term;
        sub.inputs.resize(term.inputs.rows(), batch);
        for (Eigen::Index j = 0; j < batch; ++j) {
            const Eigen::Index i = pick(rng);
            (*index)[std::size_t(j)] = i;
            sub.inputs.col(j) = term.inputs.col(i);
        }
        sub.penalty = [index, inner = term.penalty](Eigen::Index j, double x, double t, const Jet2d& u) {
            return inner((*index)[std::size_t(j)], x, t, u);
        };
        out.push_back(std::move(sub));
    }
    return out;
}

TrainLogEntry make_entry(long step, const std::vector<LossTerm>& terms, const LossAndGrad& lg,
                         const MlpParams& net) {
    TrainLogEntry e;
    e.step = step;
    e.loss_total = lg.loss.total;
    for (std::size_t k = 0; k < terms.size(); ++k) {
        const double part = terms[k].weight * lg.loss.term_means[k];
        switch (terms[k].kind) {
            case TermKind::residual:
                e.loss_res += part;
                break;
            case TermKind::initial:
                e.loss_ic += part;
                break;
            case TermKind::data:
            case TermKind::other:
                e.loss_data += part;
                break;
        }
    }
    e.w_norm = flatten(net).norm();
    e.g_norm = lg.grad.norm();
    return e;
}

bool all_finite(const MlpParams& net) {
    for (const auto& l : net.layers)
        if (!l.weight.allFinite() || !l.bias.allFinite()) return false;
    return true;
}

}  // namespace

TrainResult train(MlpParams net, const std::vector<LossTerm>& terms, const TrainConfig& config,
                  const CheckpointHook& on_checkpoint) {
    config.validate();
    net.validate();
    TrainResult result;
    std::mt19937_64 rng(config.seed);
    AdamState adam;
    const bool sample_flush = config.precision && config.precision->per_sample;
    const double flush = sample_flush ? config.precision->threshold() : 0.0;

    for (long step = 0; step < config.steps; ++step) {
        std::vector<LossTerm> drawn;
        if (config.batch_size > 0) drawn = draw_minibatch(terms, config.batch_size, rng);
        const std::vector<LossTerm>& batch = config.batch_size > 0 ? drawn : terms;
        LossAndGrad lg = loss_param_grad(net, batch, flush);
        const bool log_now = step % config.log_every == 0 || step + 1 == config.steps;

        if (lg.grad.nonfinite_layer || !std::isfinite(lg.loss.total)) {
            result.status = TrainStatus::nonfinite;
            result.diagnostic = "non-finite loss or gradient at step " + std::to_string(step) +
                                (lg.grad.nonfinite_layer ? " in layer " + std::to_string(*lg.grad.nonfinite_layer)
                                                         : std::string());
            break;
        }
        if (lg.loss.total > config.divergence_threshold) {
            result.log.entries.push_back(make_entry(step, batch, lg, net));
            result.status = TrainStatus::diverged;
            result.diagnostic = "loss exceeded " + std::to_string(config.divergence_threshold) + " at step " +
                                std::to_string(step);
            break;
        }
        if (config.precision && !config.precision->per_sample)
            lg.grad = flush_gradient(std::move(lg.grad), config.precision->mantissa_bits,
                                     config.precision->reference);
        if (config.freeze_biases)
            for (auto& l : lg.grad.layers) l.bias.setZero();

        if (config.precision && lg.grad.all_zero()) {
            result.log.entries.push_back(make_entry(step, batch, lg, net));
            result.status = TrainStatus::converged;
            result.diagnostic = "gradient flushed to zero at step " + std::to_string(step);
            break;
        }
        if (log_now) result.log.entries.push_back(make_entry(step, batch, lg, net));

        MlpParams next = net;
        if (config.optimizer == Optimizer::sgd) {
            step_sgd(next, lg.grad, config.learning_rate);
        } else {
            step_adam(next, lg.grad, adam, config.learning_rate, config.beta1, config.beta2, config.adam_epsilon);
        }
        if (!all_finite(next)) {
            result.status = TrainStatus::nonfinite;
            result.diagnostic = "update produced non-finite parameters at step " + std::to_string(step);
            break;
        }
        net = std::move(next);
        result.steps_taken = step + 1;
        if (on_checkpoint && config.checkpoint_every > 0 && result.steps_taken % config.checkpoint_every == 0)
            on_checkpoint(result.steps_taken, net);
    }
    result.params = std::move(net);
    if (on_checkpoint) on_checkpoint(result.steps_taken, result.params);
    return result;
}

TrainResult train(MlpParams net, const CauchyProblem& problem, const CollocationSet& colloc,
                  const TrainConfig& config, const CheckpointHook& on_checkpoint) {
    return train(std::move(net), pinn_loss_terms(problem, colloc, config.weights), config, on_checkpoint);
}

TrainResult train(MlpParams net, const DataSamples& samples, const TrainConfig& config,
                  const CheckpointHook& on_checkpoint) {
    return train(std::move(net), std::vector<LossTerm>{data_loss_term(samples, config.weights.data)}, config,
                 on_checkpoint);
}

}  // namespace pinnlab
