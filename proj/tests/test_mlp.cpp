#include "pinnlab/autodiff.hpp"
#include "pinnlab/errors.hpp"
#include "pinnlab/experiments.hpp"
#include "pinnlab/mlp.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace pinnlab;

TEST_CASE("init is deterministic in the seed") {
    const std::vector<Eigen::Index> arch{2, 4, 4, 1};
    const MlpParams a = init_mlp(arch, Activation::tanh, 0);
    const MlpParams b = init_mlp(arch, Activation::tanh, 0);
    CHECK(a == b);
    CHECK_FALSE(a == init_mlp(arch, Activation::tanh, 1));
    CHECK(a.architecture() == arch);
}

TEST_CASE("parameter count of a 256 x 256 network") {
    const MlpParams net = init_mlp(std::vector<Eigen::Index>{2, 256, 256, 1}, Activation::tanh, 3);
    CHECK(net.parameter_count() == 66817);
    CHECK(flatten(net).size() == 66817);
}

TEST_CASE("init leaves biases at zero and weights inside the Glorot bound") {
    const MlpParams net = init_mlp(std::vector<Eigen::Index>{2, 16, 8, 1}, Activation::sigmoid, 5);
    for (const auto& l : net.layers) {
        CHECK(l.bias.isZero(0.0));
        const double bound = std::sqrt(6.0 / double(l.weight.rows() + l.weight.cols()));
        CHECK(l.weight.cwiseAbs().maxCoeff() <= bound);
    }
}

TEST_CASE("zero networks") {
    MlpParams net = init_mlp(std::vector<Eigen::Index>{2, 5, 1}, Activation::sigmoid, 2);
    for (auto& l : net.layers) l.weight.setZero();
    const double in[2] = {0.3, -0.4};
    CHECK(eval(net, in) == 0.0);

    MlpParams one;
    one.activation = Activation::sigmoid;
    one.activate_output = true;
    one.layers = {Layer{Eigen::MatrixXd::Zero(1, 1), Eigen::VectorXd::Zero(1)}};
    const double x[1] = {7.0};
    CHECK(eval(one, x) == 0.5);
}

TEST_CASE("eval agrees exactly with jet values") {
    for (Activation a : {Activation::sigmoid, Activation::tanh, Activation::relu}) {
        MlpParams net = init_mlp(std::vector<Eigen::Index>{2, 9, 7, 1}, a, 4);
        std::mt19937_64 rng(8);
        std::uniform_real_distribution<double> U(-1.0, 1.0);
        for (auto& l : net.layers) l.bias = l.bias.unaryExpr([&](double) { return 0.3 * U(rng); });
        Eigen::MatrixXd pts(2, 1000);
        for (Eigen::Index i = 0; i < pts.cols(); ++i) pts.col(i) << U(rng), 0.5 * (U(rng) + 1.0);
        const Eigen::MatrixXd plain = eval_batch(net, pts);
        const JetBatch jets = jet_eval_batch(net, pts);
        CHECK((plain.array() == jets.val.array()).all());
        // single points take the matrix-vector path on both sides
        for (Eigen::Index i = 0; i < pts.cols(); ++i) {
            const double p[2] = {pts(0, i), pts(1, i)};
            if (eval(net, p) != jet_eval_batch(net, pts.col(i)).val(0, 0)) FAIL("point " << i);
        }
    }
}

TEST_CASE("validation rejects broken structures") {
    MlpParams net = init_mlp(std::vector<Eigen::Index>{2, 3, 1}, Activation::tanh, 0);
    CHECK_NOTHROW(net.validate());
    MlpParams bad = net;
    bad.layers[1].weight.resize(1, 4);
    bad.layers[1].weight.setOnes();
    CHECK_THROWS_AS(bad.validate(), StructureError);
    bad = net;
    bad.layers[0].bias(0) = std::nan("");
    CHECK_THROWS_AS(bad.validate(), StructureError);
    const double in[3] = {0, 0, 0};
    CHECK_THROWS_AS(eval(net, in), StructureError);
    CHECK_THROWS(init_mlp(std::vector<Eigen::Index>{2}, Activation::tanh, 0));
}

TEST_CASE("sigmoid step network in one dimension") {
    const MlpParams net = sigmoid_step_network({100, {{0.0, 1.0}}});
    const double inside[1] = {0.5}, outside[1] = {2.0};
    CHECK(std::abs(eval(net, inside) - 1.0) < 1e-6);
    CHECK(std::abs(eval(net, outside)) < 1e-6);
    for (int n : {1, 10, 100, 1000}) {
        const double edge[1] = {0.0};
        const double v = eval(sigmoid_step_network({n, {{0.0, 1.0}}}), edge);
        CHECK(v > 0.0);
        CHECK(v < 1.0);
    }
    CHECK_THROWS(sigmoid_step_network({10, {{1.0, 0.0}}}));
    CHECK_THROWS(sigmoid_step_network({0, {{0.0, 1.0}}}));
}

TEST_CASE("sigmoid step network in two dimensions") {
    const MlpParams net = sigmoid_step_network({200, {{0.0, 1.0}, {-0.5, 0.5}}});
    const double in[2] = {0.5, 0.0}, out1[2] = {0.5, 0.9}, out2[2] = {-0.4, 0.0};
    CHECK(eval(net, in) > 1.0 - 1e-6);
    CHECK(eval(net, out1) < 1e-6);
    CHECK(eval(net, out2) < 1e-6);
}

TEST_CASE("relu step network") {
    const MlpParams net = relu_step_network(1000);
    const double mid[1] = {0.5}, neg[1] = {-0.5};
    CHECK(std::abs(eval(net, mid) - 1.0) < 1e-3);
    CHECK(eval(net, neg) == 0.0);
    CHECK(max_abs_weight(relu_step_network(100)) == 100.0);
}

TEST_CASE("step constructions converge in L2 against the quadrature oracle") {
    // Oracle: adaptive mpmath quadrature with breakpoints at every transition.
    const std::array<double, 3> sig_oracle{0.155459109303498, 0.0152267082878246, 0.00152242364606464};
    const std::array<double, 3> relu_oracle{0.2943920288775949, 0.099331096171675598, 0.031601687718643551};
    const std::array<int, 3> ns{10, 100, 1000};
    double prev_relu = 1e9;
    for (std::size_t k = 0; k < ns.size(); ++k) {
        const int n = ns[k];
        const MlpParams s = sigmoid_step_network({n, {{0.0, 1.0}}});
        const MlpParams r = relu_step_network(n);
        auto fs = [&](double x) { return eval(s, std::span<const double>(&x, 1)); };
        auto fr = [&](double x) { return eval(r, std::span<const double>(&x, 1)); };
        const double kink = 0.5 / n - 1.0 / (double(n) * n);
        const double es = step_l2_error(fs, n), er = step_l2_error(fr, n, {kink, 1.0 - kink});
        CHECK(std::abs(es - sig_oracle[k]) < 1e-12);
        CHECK(std::abs(er - relu_oracle[k]) < 1e-12);
        CHECK(er < prev_relu);
        prev_relu = er;
    }
}

TEST_CASE("phi witnesses") {
    for (int n = 1; n <= 10; ++n) CHECK(std::abs(l2_norm(phi_witness(n)) - 1.0) < 1e-12);
    CHECK(std::abs(l2_distance(phi_witness(3), phi_witness(7)) - std::numbers::sqrt2) < 1e-12);
    CHECK(std::abs(l2_distance(phi_witness(2), phi_witness(5)) - std::numbers::sqrt2) < 1e-12);
    CHECK(l2_distance(phi_witness(4), phi_witness(4)) == 0.0);
    for (int m = 1; m <= 10; ++m)
        for (int n = m + 1; n <= 10; ++n) {
            const auto a = phi_witness(m), b = phi_witness(n);
            CHECK((a.hi <= b.lo || b.hi <= a.lo));
        }
    CHECK(phi_witness(1)(0.25) == doctest::Approx(std::sqrt(2.0)));
    CHECK(phi_witness(1)(0.75) == 0.0);
    CHECK_THROWS(phi_witness(0));
}
