#pragma once

#include "pinnlab/autodiff.hpp"
#include "pinnlab/jet.hpp"

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>

namespace pinnlab {

// Space-time box [x_lo, x_hi] x [0, t_hi].
struct Domain {
    double x_lo = -1.0;
    double x_hi = 1.0;
    double t_hi = 1.0;

    double length() const { return x_hi - x_lo; }
    double volume() const { return length() * t_hi; }
    bool contains(double x, double t) const { return x >= x_lo && x <= x_hi && t >= 0.0 && t <= t_hi; }
};

// u_t + b u_x = c
struct TransportOperator {
    double b = 1.0;
    double c = 0.0;
};
// u_t + u_x^2 = 0
struct HamiltonJacobiOperator {};
// u_t = u_xx
struct HeatOperator {};
// u_t + mu u u_x = nu u_xx
struct BurgersOperator {
    double mu = -1.0;
    double nu = 1e-3;
};

using PdeOperator = std::variant<TransportOperator, HamiltonJacobiOperator, HeatOperator, BurgersOperator>;

// Residual of the operator and its gradient with respect to (u, u_x, u_t, u_xx).
struct LinearizedResidual {
    double value = 0.0;
    std::array<double, 4> grad{};
};

LinearizedResidual linearize_residual(const PdeOperator& op, const Jet2d& u);

using JetField = std::function<Jet2d(double x, double t)>;
using ScalarFunction = std::function<double(double)>;

struct CauchyProblem {
    std::string name;
    PdeOperator op;
    ScalarFunction initial;
    Domain domain;
    // Registered exact (classical or a.e.) solution, when one is known.
    JetField exact;

    double residual(double x, double t, const Jet2d& u) const;
    void validate() const;
};

CauchyProblem make_transport(double b, double c, ScalarFunction phi);
CauchyProblem make_hamilton_jacobi();
CauchyProblem make_heat(ScalarFunction phi);
CauchyProblem make_burgers(double mu, double nu);

// Problem by CLI name: transport | hamilton-jacobi | heat | burgers.
std::optional<CauchyProblem> make_problem(const std::string& name);

enum class Sampler { grid, uniform };

struct CollocationCounts {
    Eigen::Index nx = 64;  // grid columns; uniform: interior count is nx * nt
    Eigen::Index nt = 32;
    Eigen::Index n_initial = 64;
};

struct CollocationSet {
    Eigen::MatrixXd interior;  // 2 x n, rows (x, t)
    Eigen::VectorXd initial;   // x positions on t = 0
    Sampler sampler = Sampler::grid;
    std::uint64_t seed = 0;
};

CollocationSet sample_collocation(const Domain& domain, const CollocationCounts& counts, Sampler scheme,
                                  std::uint64_t seed);

}  // namespace pinnlab
