#include "pinnlab/mlp.hpp"

#include "pinnlab/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace pinnlab {

std::string to_string(Activation a) {
    switch (a) {
        case Activation::sigmoid:
            return "sigmoid";
        case Activation::tanh:
            return "tanh";
        case Activation::relu:
            return "relu";
    }
    return "unknown";
}

std::optional<Activation> parse_activation(std::string_view name) {
    if (name == "sigmoid") return Activation::sigmoid;
    if (name == "tanh") return Activation::tanh;
    if (name == "relu") return Activation::relu;
    return std::nullopt;
}

Eigen::Index MlpParams::input_dim() const {
    return layers.empty() ? 0 : layers.front().weight.cols();
}

Eigen::Index MlpParams::output_dim() const {
    return layers.empty() ? 0 : layers.back().weight.rows();
}

Eigen::Index MlpParams::parameter_count() const {
    Eigen::Index n = 0;
    for (const auto& l : layers) n += l.weight.size() + l.bias.size();
    return n;
}

std::vector<Eigen::Index> MlpParams::architecture() const {
    std::vector<Eigen::Index> sizes;
    if (layers.empty()) return sizes;
    sizes.push_back(input_dim());
    for (const auto& l : layers) sizes.push_back(l.weight.rows());
    return sizes;
}

void MlpParams::validate() const {
    if (layers.empty()) throw StructureError("network has no layers");
    for (std::size_t i = 0; i < layers.size(); ++i) {
        const auto& l = layers[i];
        if (l.weight.rows() == 0 || l.weight.cols() == 0)
            throw StructureError("layer " + std::to_string(i) + " has an empty weight matrix");
        if (l.bias.size() != l.weight.rows())
            throw StructureError("layer " + std::to_string(i) + " bias length " +
                                 std::to_string(l.bias.size()) + " != fan-out " +
                                 std::to_string(l.weight.rows()));
        if (i > 0 && l.weight.cols() != layers[i - 1].weight.rows())
            throw StructureError("layer " + std::to_string(i) + " fan-in " +
                                 std::to_string(l.weight.cols()) + " != previous fan-out " +
                                 std::to_string(layers[i - 1].weight.rows()));
        if (!l.weight.allFinite() || !l.bias.allFinite())
            throw StructureError("layer " + std::to_string(i) + " has non-finite parameters");
    }
}

MlpParams init_mlp(std::span<const Eigen::Index> sizes, Activation activation, std::uint64_t seed,
                   bool activate_output) {
    if (sizes.size() < 2) throw StructureError("architecture needs at least input and output sizes");
    for (auto s : sizes)
        if (s <= 0) throw StructureError("layer sizes must be positive");

    std::mt19937_64 rng(seed);
    MlpParams net;
    net.activation = activation;
    net.activate_output = activate_output;
    for (std::size_t i = 0; i + 1 < sizes.size(); ++i) {
        const auto fan_in = sizes[i];
        const auto fan_out = sizes[i + 1];
        const double limit = std::sqrt(6.0 / double(fan_in + fan_out));
        std::uniform_real_distribution<double> dist(-limit, limit);
        Layer layer{Eigen::MatrixXd(fan_out, fan_in), Eigen::VectorXd::Zero(fan_out)};
        for (Eigen::Index c = 0; c < fan_in; ++c)
            for (Eigen::Index r = 0; r < fan_out; ++r) layer.weight(r, c) = dist(rng);
        net.layers.push_back(std::move(layer));
    }
    return net;
}

double max_abs_weight(const MlpParams& net) {
    double m = 0.0;
    for (const auto& l : net.layers) m = std::max(m, l.weight.cwiseAbs().maxCoeff());
    return m;
}

Eigen::VectorXd flatten(const MlpParams& net) {
    Eigen::VectorXd theta(net.parameter_count());
    Eigen::Index k = 0;
    for (const auto& l : net.layers) {
        theta.segment(k, l.weight.size()) = l.weight.reshaped();
        k += l.weight.size();
        theta.segment(k, l.bias.size()) = l.bias;
        k += l.bias.size();
    }
    return theta;
}

void unflatten(MlpParams& net, const Eigen::Ref<const Eigen::VectorXd>& theta) {
    if (theta.size() != net.parameter_count())
        throw StructureError("flat parameter vector has " + std::to_string(theta.size()) +
                             " entries, network expects " + std::to_string(net.parameter_count()));
    Eigen::Index k = 0;
    for (auto& l : net.layers) {
        l.weight.reshaped() = theta.segment(k, l.weight.size());
        k += l.weight.size();
        l.bias = theta.segment(k, l.bias.size());
        k += l.bias.size();
    }
}

Eigen::MatrixXd eval_batch(const MlpParams& net, const Eigen::Ref<const Eigen::MatrixXd>& inputs) {
    net.validate();
    if (inputs.rows() != net.input_dim())
        throw StructureError("input has " + std::to_string(inputs.rows()) +
                             " rows, network fan-in is " + std::to_string(net.input_dim()));
    Eigen::MatrixXd a = inputs;
    for (std::size_t i = 0; i < net.layers.size(); ++i) {
        const auto& l = net.layers[i];
        Eigen::MatrixXd z = l.weight * a;
        z.colwise() += l.bias;
        const bool last = i + 1 == net.layers.size();
        if (!last || net.activate_output) {
            a = apply_activation(net.activation, z.array()).matrix();
        } else {
            a = std::move(z);
        }
    }
    return a;
}

double eval(const MlpParams& net, std::span<const double> input) {
    const Eigen::MatrixXd x =
        Eigen::Map<const Eigen::VectorXd>(input.data(), Eigen::Index(input.size()));
    const Eigen::MatrixXd y = eval_batch(net, x);
    if (y.rows() != 1) throw StructureError("eval expects a scalar-output network");
    return y(0, 0);
}

MlpParams sigmoid_step_network(const StepWitness& witness) {
    const auto d = Eigen::Index(witness.box.size());
    if (witness.n < 1) throw std::invalid_argument("step sharpness n must be >= 1");
    if (d == 0) throw std::invalid_argument("step box needs at least one dimension");
    const double n = witness.n;

    Layer hidden{Eigen::MatrixXd::Zero(2 * d, d), Eigen::VectorXd::Zero(2 * d)};
    for (Eigen::Index i = 0; i < d; ++i) {
        const auto [lo, hi] = witness.box[std::size_t(i)];
        if (!(lo < hi)) throw std::invalid_argument("step box needs l_i < r_i");
        hidden.weight(2 * i, i) = n;
        hidden.bias(2 * i) = -n * lo;
        hidden.weight(2 * i + 1, i) = -n;
        hidden.bias(2 * i + 1) = n * hi;
    }
    // All 2d hidden units are near 1 inside the box, one drops to 0 outside; threshold halfway.
    Layer out{Eigen::MatrixXd::Constant(1, 2 * d, n), Eigen::VectorXd::Constant(1, -n * (2.0 * double(d) - 0.5))};

    MlpParams net;
    net.activation = Activation::sigmoid;
    net.activate_output = true;
    net.layers = {std::move(hidden), std::move(out)};
    return net;
}

MlpParams relu_step_network(int n_int) {
    if (n_int < 1) throw std::invalid_argument("step sharpness n must be >= 1");
    const double n = n_int;

    Layer first{Eigen::MatrixXd(4, 1), Eigen::VectorXd(4)};
    first.weight << n, n, -n, -n;
    first.bias << 0.5, -0.5, n + 0.5, n - 0.5;

    Layer second{Eigen::MatrixXd(1, 4), Eigen::VectorXd(1)};
    second.weight << n, -n, n, -n;
    second.bias << 1.0 - 2.0 * n;

    Layer out{Eigen::MatrixXd::Ones(1, 1), Eigen::VectorXd::Zero(1)};

    MlpParams net;
    net.activation = Activation::relu;
    net.layers = {std::move(first), std::move(second), std::move(out)};
    return net;
}

StepFunction1d phi_witness(int n) {
    if (n < 1) throw std::invalid_argument("witness index must be >= 1");
    return {1.0 - std::ldexp(1.0, 1 - n), 1.0 - std::ldexp(1.0, -n), std::sqrt(std::ldexp(1.0, n))};
}

double l2_norm(const StepFunction1d& f) {
    return std::abs(f.height) * std::sqrt(std::max(0.0, f.hi - f.lo));
}

double l2_distance(const StepFunction1d& a, const StepFunction1d& b) {
    const double overlap = std::max(0.0, std::min(a.hi, b.hi) - std::max(a.lo, b.lo));
    const double la = std::max(0.0, a.hi - a.lo);
    const double lb = std::max(0.0, b.hi - b.lo);
    // Split into the three disjoint pieces so no cancellation occurs.
    const double only_a = la - overlap;
    const double only_b = lb - overlap;
    const double diff = a.height - b.height;
    return std::sqrt(a.height * a.height * only_a + b.height * b.height * only_b + diff * diff * overlap);
}

}  // namespace pinnlab
