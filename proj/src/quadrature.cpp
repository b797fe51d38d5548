#include "pinnlab/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace pinnlab {

GaussRule gauss_legendre(int n) {
    if (n < 1) throw std::invalid_argument("Gauss-Legendre rule needs n >= 1");
    GaussRule r{Eigen::VectorXd(n), Eigen::VectorXd(n)};
    const int half = (n + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 1.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = 0.0;
            for (int k = 1; k <= n; ++k) {
                const double p2 = p1;
                p1 = p0;
                p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
            }
            dp = n * (z * p0 - p1) / (z * z - 1.0);
            const double dz = p0 / dp;
            z -= dz;
            if (std::abs(dz) < 1e-16) break;
        }
        // Recompute the derivative at the converged node.
        double p0 = 1.0, p1 = 0.0;
        for (int k = 1; k <= n; ++k) {
            const double p2 = p1;
            p1 = p0;
            p0 = ((2.0 * k - 1.0) * z * p1 - (k - 1.0) * p2) / k;
        }
        dp = n * (z * p0 - p1) / (z * z - 1.0);
        const double w = 2.0 / ((1.0 - z * z) * dp * dp);
        r.nodes(i) = -z;
        r.nodes(n - 1 - i) = z;
        r.weights(i) = w;
        r.weights(n - 1 - i) = w;
    }
    if (n % 2 == 1) r.nodes(n / 2) = 0.0;
    return r;
}

GaussRule composite_gauss_legendre(double a, double b, int panels, int n) {
    if (panels < 1) throw std::invalid_argument("composite rule needs at least one panel");
    const GaussRule base = gauss_legendre(n);
    GaussRule r{Eigen::VectorXd(panels * n), Eigen::VectorXd(panels * n)};
    const double h = (b - a) / panels;
    for (int p = 0; p < panels; ++p) {
        const double mid = a + (p + 0.5) * h;
        r.nodes.segment(p * n, n) = (mid + 0.5 * h * base.nodes.array()).matrix();
        r.weights.segment(p * n, n) = 0.5 * h * base.weights;
    }
    return r;
}

GaussRule piecewise_gauss_legendre(std::span<const double> breakpoints, int panels_per_piece, int n) {
    std::vector<double> bp(breakpoints.begin(), breakpoints.end());
    std::sort(bp.begin(), bp.end());
    bp.erase(std::unique(bp.begin(), bp.end()), bp.end());
    std::vector<double> nodes, weights;
    for (std::size_t i = 0; i + 1 < bp.size(); ++i) {
        if (!(bp[i + 1] > bp[i])) continue;
        const GaussRule piece = composite_gauss_legendre(bp[i], bp[i + 1], panels_per_piece, n);
        nodes.insert(nodes.end(), piece.nodes.begin(), piece.nodes.end());
        weights.insert(weights.end(), piece.weights.begin(), piece.weights.end());
    }
    GaussRule r;
    r.nodes = Eigen::Map<Eigen::VectorXd>(nodes.data(), Eigen::Index(nodes.size()));
    r.weights = Eigen::Map<Eigen::VectorXd>(weights.data(), Eigen::Index(weights.size()));
    return r;
}

Eigen::VectorXd trapezoid_weights(Eigen::Index n, double h) {
    if (n < 2) throw std::invalid_argument("trapezoid rule needs at least two points");
    Eigen::VectorXd w = Eigen::VectorXd::Constant(n, h);
    w(0) = w(n - 1) = 0.5 * h;
    return w;
}

}  // namespace pinnlab
