#include "pinnlab/autodiff.hpp"

#include "pinnlab/errors.hpp"

#include <cmath>
#include <limits>

namespace pinnlab {

namespace {

// Component blocks of a batched jet: value, d/dx, d/dt, d2/dx2. Only the
// first `count` blocks are populated (1 for value-only propagation).
struct Blocks {
    std::array<Eigen::MatrixXd, 4> c;
    int count = 1;
};

struct Tape {
    std::vector<Blocks> acts;  // acts[i] feeds layer i; acts.back() is the output
    std::vector<Blocks> pre;   // pre-activations of layer i
    std::optional<std::size_t> nonfinite_layer;
};

struct Slopes {
    Eigen::ArrayXXd d1, d2, d3;
};

// Derivatives of the activation expressed through its value f where possible,
// so the value path matches eval_batch exactly.
Slopes activation_slopes(Activation a, const Eigen::ArrayXXd& z, const Eigen::ArrayXXd& f, bool need_higher) {
    Slopes s;
    switch (a) {
        case Activation::sigmoid:
            s.d1 = f * (1.0 - f);
            if (need_higher) {
                s.d2 = s.d1 * (1.0 - 2.0 * f);
                s.d3 = s.d1 * (1.0 - 6.0 * s.d1);
            }
            break;
        case Activation::tanh:
            s.d1 = 1.0 - f.square();
            if (need_higher) {
                s.d2 = -2.0 * f * s.d1;
                s.d3 = s.d1 * (6.0 * f.square() - 2.0);
            }
            break;
        case Activation::relu:
            s.d1 = (z > 0.0).cast<double>();
            if (need_higher) {
                s.d2 = Eigen::ArrayXXd::Zero(z.rows(), z.cols());
                s.d3 = s.d2;
            }
            break;
    }
    return s;
}

bool layer_activated(const MlpParams& net, std::size_t i) {
    return i + 1 < net.layers.size() || net.activate_output;
}

Tape forward(const MlpParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs, int count) {
    net.validate();
    if (inputs.rows() != net.input_dim())
        throw StructureError("input has " + std::to_string(inputs.rows()) + " rows, network fan-in is " +
                             std::to_string(net.input_dim()));
    if (count == 4 && inputs.rows() != 2)
        throw StructureError("jet propagation needs (x, t) inputs, got dimension " +
                             std::to_string(inputs.rows()));

    const Eigen::Index n = inputs.cols();
    Tape tape;
    Blocks a;
    a.count = count;
    a.c[0] = inputs;
    if (count == 4) {
        a.c[1] = Eigen::MatrixXd::Zero(2, n);
        a.c[1].row(0).setOnes();
        a.c[2] = Eigen::MatrixXd::Zero(2, n);
        a.c[2].row(1).setOnes();
        a.c[3] = Eigen::MatrixXd::Zero(2, n);
    }

    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& l = net.layers[i];
        Blocks z;
        z.count = count;
        z.c[0] = l.weight * a.c[0];
        z.c[0].colwise() += l.bias;
        for (int k = 1; k < count; ++k) z.c[k] = l.weight * a.c[k];

        Blocks out;
        out.count = count;
        if (layer_activated(net, i)) {
            out.c[0] = apply_activation(net.activation, z.c[0].array()).matrix();
            if (count == 4) {
                const Slopes s = activation_slopes(net.activation, z.c[0].array(), out.c[0].array(), true);
                out.c[1] = (s.d1 * z.c[1].array()).matrix();
                out.c[2] = (s.d1 * z.c[2].array()).matrix();
                out.c[3] = (s.d2 * z.c[1].array().square() + s.d1 * z.c[3].array()).matrix();
            }
        } else {
            out = z;
        }
        bool finite = true;
        for (int k = 0; k < count; ++k) finite = finite && out.c[k].allFinite();

        tape.acts.push_back(std::move(a));
        tape.pre.push_back(std::move(z));
        a = std::move(out);
        if (!finite) {
            tape.nonfinite_layer = i;
            break;
        }
    }
    tape.acts.push_back(std::move(a));
    return tape;
}

ParamGrad backward(const MlpParams& net, const Tape& tape, Blocks adj, double flush) {
    ParamGrad g = ParamGrad::zeros_like(net);
    const int count = adj.count;
    for (std::size_t ii = net.layers.size(); ii-- > 0;) {
        const auto& l = net.layers[ii];
        const Blocks& z = tape.pre[ii];
        Blocks zb;
        zb.count = count;
        if (layer_activated(net, ii)) {
            const auto& f = tape.acts[ii + 1].c[0];
            const Slopes s = activation_slopes(net.activation, z.c[0].array(), f.array(), count == 4);
            if (count == 1) {
                zb.c[0] = (adj.c[0].array() * s.d1).matrix();
            } else {
                const auto zx = z.c[1].array();
                const auto zt = z.c[2].array();
                const auto zxx = z.c[3].array();
                const auto av = adj.c[0].array();
                const auto ax = adj.c[1].array();
                const auto at = adj.c[2].array();
                const auto axx = adj.c[3].array();
                zb.c[0] = (av * s.d1 + ax * s.d2 * zx + at * s.d2 * zt +
                           axx * (s.d3 * zx.square() + s.d2 * zxx))
                              .matrix();
                zb.c[1] = (ax * s.d1 + 2.0 * axx * s.d2 * zx).matrix();
                zb.c[2] = (at * s.d1).matrix();
                zb.c[3] = (axx * s.d1).matrix();
            }
        } else {
            zb = std::move(adj);
        }

        const Blocks& a_in = tape.acts[ii];
        auto& gl = g.layers[ii];
        if (flush > 0.0) {
            // Per-point outer products, each flushed before it is summed.
            Eigen::MatrixXd gj(l.weight.rows(), l.weight.cols());
            for (Eigen::Index j = 0; j < zb.c[0].cols(); ++j) {
                gj.noalias() = zb.c[0].col(j) * a_in.c[0].col(j).transpose();
                for (int k = 1; k < count; ++k) gj.noalias() += zb.c[k].col(j) * a_in.c[k].col(j).transpose();
                gl.weight += (gj.array().abs() < flush).select(0.0, gj);
                const auto bj = zb.c[0].col(j);
                gl.bias += (bj.array().abs() < flush).select(0.0, bj);
            }
        } else {
            gl.weight.noalias() = zb.c[0] * a_in.c[0].transpose();
            for (int k = 1; k < count; ++k) gl.weight.noalias() += zb.c[k] * a_in.c[k].transpose();
            gl.bias = zb.c[0].rowwise().sum();
        }
        if (!gl.weight.allFinite() || !gl.bias.allFinite()) {
            g.nonfinite_layer = ii;
            return g;
        }

        if (ii > 0) {
            adj.count = count;
            for (int k = 0; k < count; ++k) adj.c[k].noalias() = l.weight.transpose() * zb.c[k];
        }
    }
    return g;
}

Jet2d output_jet(const Blocks& out, Eigen::Index i) {
    if (out.count == 4) return {out.c[0](0, i), out.c[1](0, i), out.c[2](0, i), out.c[3](0, i)};
    return Jet2d(out.c[0](0, i));
}

std::pair<double, double> input_xt(const Eigen::MatrixXd& inputs, Eigen::Index i) {
    return {inputs(0, i), inputs.rows() > 1 ? inputs(1, i) : 0.0};
}

void check_term(const MlpParams& net, const LossTerm& term) {
    if (net.output_dim() != 1) throw StructureError("loss terms need a scalar-output network");
    if (!term.penalty) throw std::invalid_argument("loss term has no penalty function");
}

// Adds the weighted gradient of one term over a column range of its inputs.
double accumulate_term(const MlpParams& net, const LossTerm& term, Eigen::Index first, Eigen::Index count,
                       double scale, double flush, ParamGrad& into) {
    const int comps = term.needs_derivatives ? 4 : 1;
    const Eigen::MatrixXd inputs = term.inputs.middleCols(first, count);
    const Tape tape = forward(net, inputs, comps);
    if (tape.nonfinite_layer) {
        into.nonfinite_layer = tape.nonfinite_layer;
        return std::numeric_limits<double>::quiet_NaN();
    }
    const Blocks& out = tape.acts.back();
    Blocks adj;
    adj.count = comps;
    for (int k = 0; k < comps; ++k) adj.c[k] = Eigen::MatrixXd::Zero(1, count);
    double sum = 0.0;
    for (Eigen::Index j = 0; j < count; ++j) {
        const auto [x, t] = input_xt(term.inputs, first + j);
        const PointPenalty p = term.penalty(first + j, x, t, output_jet(out, j));
        sum += p.value;
        for (int k = 0; k < comps; ++k) adj.c[k](0, j) = scale * p.grad[std::size_t(k)];
    }
    ParamGrad g = backward(net, tape, std::move(adj), flush * std::abs(scale));
    if (g.nonfinite_layer) {
        into.nonfinite_layer = g.nonfinite_layer;
        return sum;
    }
    into += g;
    return sum;
}

}  // namespace

JetBatch jet_eval_batch(const MlpParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
    const Tape tape = forward(net, inputs, 4);
    if (tape.nonfinite_layer)
        throw NonFiniteError("non-finite jet in layer " + std::to_string(*tape.nonfinite_layer),
                             *tape.nonfinite_layer);
    const Blocks& out = tape.acts.back();
    return {out.c[0], out.c[1], out.c[2], out.c[3]};
}

Jet2d jet_eval(const MlpParams& net, double x, double t) {
    Eigen::MatrixXd in(2, 1);
    in << x, t;
    return jet_eval_batch(net, in).at(0);
}

ParamGrad ParamGrad::zeros_like(const MlpParams& net) {
    ParamGrad g;
    g.layers.reserve(net.layers.size());
    for (const auto& l : net.layers)
        g.layers.push_back({Eigen::MatrixXd::Zero(l.weight.rows(), l.weight.cols()),
                            Eigen::VectorXd::Zero(l.bias.size())});
    return g;
}

bool ParamGrad::congruent_with(const MlpParams& net) const {
    if (layers.size() != net.layers.size()) return false;
    for (std::size_t i = 0; i < layers.size(); ++i) {
        if (layers[i].weight.rows() != net.layers[i].weight.rows() ||
            layers[i].weight.cols() != net.layers[i].weight.cols() ||
            layers[i].bias.size() != net.layers[i].bias.size())
            return false;
    }
    return true;
}

ParamGrad& ParamGrad::operator+=(const ParamGrad& o) {
    if (layers.size() != o.layers.size()) throw StructureError("gradient layer counts differ");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        layers[i].weight += o.layers[i].weight;
        layers[i].bias += o.layers[i].bias;
    }
    if (o.nonfinite_layer && !nonfinite_layer) nonfinite_layer = o.nonfinite_layer;
    return *this;
}

ParamGrad& ParamGrad::operator*=(double s) {
    for (auto& l : layers) {
        l.weight *= s;
        l.bias *= s;
    }
    return *this;
}

double ParamGrad::norm() const {
    double sq = 0.0;
    for (const auto& l : layers) sq += l.weight.squaredNorm() + l.bias.squaredNorm();
    return std::sqrt(sq);
}

double ParamGrad::max_abs() const {
    double m = 0.0;
    for (const auto& l : layers) {
        if (l.weight.size() > 0) m = std::max(m, l.weight.cwiseAbs().maxCoeff());
        if (l.bias.size() > 0) m = std::max(m, l.bias.cwiseAbs().maxCoeff());
    }
    return m;
}

bool ParamGrad::all_zero() const {
    for (const auto& l : layers)
        if (!l.weight.isZero(0.0) || !l.bias.isZero(0.0)) return false;
    return true;
}

Eigen::VectorXd ParamGrad::flatten() const {
    Eigen::Index n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    Eigen::VectorXd v(n);
    Eigen::Index k = 0;
    for (const auto& l : layers) {
        v.segment(k, l.weight.size()) = l.weight.reshaped();
        k += l.weight.size();
        v.segment(k, l.bias.size()) = l.bias;
        k += l.bias.size();
    }
    return v;
}

std::string to_string(TermKind kind) {
    switch (kind) {
        case TermKind::residual:
            return "residual";
        case TermKind::initial:
            return "initial";
        case TermKind::data:
            return "data";
        case TermKind::other:
            return "other";
    }
    return "other";
}

LossEvaluation evaluate_loss(const MlpParams& net, const std::vector<LossTerm>& terms) {
    LossEvaluation ev;
    for (const auto& term : terms) {
        check_term(net, term);
        const Eigen::Index n = term.inputs.cols();
        if (n == 0) {
            ev.term_means.push_back(0.0);
            continue;
        }
        const int comps = term.needs_derivatives ? 4 : 1;
        const Tape tape = forward(net, term.inputs, comps);
        if (tape.nonfinite_layer)
            throw NonFiniteError("non-finite value in layer " + std::to_string(*tape.nonfinite_layer),
                                 *tape.nonfinite_layer);
        const Blocks& out = tape.acts.back();
        double sum = 0.0;
        for (Eigen::Index j = 0; j < n; ++j) {
            const auto [x, t] = input_xt(term.inputs, j);
            sum += term.penalty(j, x, t, output_jet(out, j)).value;
        }
        const double mean = sum / double(n);
        ev.term_means.push_back(mean);
        ev.total += term.weight * mean;
    }
    return ev;
}

LossAndGrad loss_param_grad(const MlpParams& net, const std::vector<LossTerm>& terms, double per_sample_flush) {
    LossAndGrad out{{}, ParamGrad::zeros_like(net)};
    for (const auto& term : terms) {
        check_term(net, term);
        const Eigen::Index n = term.inputs.cols();
        if (n == 0) {
            out.loss.term_means.push_back(0.0);
            continue;
        }
        const double scale = term.weight / double(n);
        const double sum = accumulate_term(net, term, 0, n, scale, per_sample_flush, out.grad);
        const double mean = sum / double(n);
        out.loss.term_means.push_back(mean);
        out.loss.total += term.weight * mean;
    }
    return out;
}

}  // namespace pinnlab
