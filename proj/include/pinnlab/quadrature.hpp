#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <span>
#include <vector>

namespace pinnlab {

// Gauss-Legendre rule on [-1, 1].
struct GaussRule {
    Eigen::VectorXd nodes;
    Eigen::VectorXd weights;
};

// Nodes by Newton iteration on P_n; exact for polynomials of degree 2n - 1.
GaussRule gauss_legendre(int n);

// Composite rule: `panels` equal panels on [a, b], n nodes each.
GaussRule composite_gauss_legendre(double a, double b, int panels, int n);

// Composite rule whose panels never straddle the given breakpoints.
GaussRule piecewise_gauss_legendre(std::span<const double> breakpoints, int panels_per_piece, int n);

template <typename F>
double integrate(const GaussRule& rule, F&& f) {
    double s = 0.0;
    for (Eigen::Index i = 0; i < rule.nodes.size(); ++i) s += rule.weights(i) * f(rule.nodes(i));
    return s;
}

// Trapezoid weights for an equispaced grid of n points with spacing h.
Eigen::VectorXd trapezoid_weights(Eigen::Index n, double h);

}  // namespace pinnlab
