#include "pinnlab/experiments.hpp"

#include "pinnlab/io.hpp"
#include "pinnlab/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace pinnlab {

double smooth_bump(double x) {
    const double q = 1.0 - x * x;
    return q > 0.0 ? std::exp(1.0 - 1.0 / q) : 0.0;
}

ExperimentReport exp_C_nonlocality(const ConfigC& cfg) {
    for (std::size_t k = 1; k < cfg.amplitudes.size(); ++k)
        if (!(cfg.amplitudes[k] > cfg.amplitudes[k - 1]))
            throw std::invalid_argument("amplitudes must be ascending");
    if (cfg.amplitudes.empty() || cfg.amplitudes.front() < 0.0)
        throw std::invalid_argument("amplitudes must be non-negative");

    ExperimentReport r;
    r.id = "C";
    {
        std::ostringstream os;
        os.precision(17);
        os << "C|" << cfg.bump_scale << '|' << cfg.far_centre << '|' << cfg.nx << '|' << cfg.nt << '|' << cfg.t_min;
        for (double a : cfg.amplitudes) os << '|' << a;
        r.config_hash = hex64(fnv1a(os.str()));
    }

    const HeatKernelSolution u({smooth_bump, -1.0, 1.0, 1.0});
    auto far_data = [&](double A) {
        const double c = cfg.far_centre, s = A * cfg.bump_scale;
        return InitialData{[c, s](double x) { return smooth_bump(x) + s * smooth_bump(x - c); }, -1.0, c + 1.0,
                           1.0 + s};
    };

    // L2(D) quadrature nodes.
    const GaussRule gx = composite_gauss_legendre(-1.0, 1.0, 8, 8);
    const GaussRule gt = composite_gauss_legendre(0.0, 1.0, 8, 8);
    Eigen::MatrixXd u_nodes(gx.nodes.size(), gt.nodes.size());
    for (Eigen::Index j = 0; j < gt.nodes.size(); ++j)
        for (Eigen::Index i = 0; i < gx.nodes.size(); ++i) u_nodes(i, j) = u(gx.nodes(i), gt.nodes(j));

    const Grid probe{-1.0, 1.0, cfg.nx, cfg.t_min, 1.0, cfg.nt};
    auto max_residual = [&](const HeatKernelSolution& f) {
        double m = 0.0;
        for (Eigen::Index j = 0; j < probe.nt; ++j)
            for (Eigen::Index i = 0; i < probe.nx; ++i) m = std::max(m, std::abs(f.fd_residual(probe.x(i), probe.t(j))));
        return m;
    };
    const double res_u = max_residual(u);
    r.metrics["max residual u"] = res_u;
    r.check("residual u", 0.0, res_u, cfg.residual_tolerance, res_u < cfg.residual_tolerance,
            "fourth-order finite-difference residual on D");

    std::vector<double> errors;
    for (double A : cfg.amplitudes) {
        const InitialData data = far_data(A);
        const HeatKernelSolution v(data);
        double e2 = 0.0;
        for (Eigen::Index j = 0; j < gt.nodes.size(); ++j)
            for (Eigen::Index i = 0; i < gx.nodes.size(); ++i) {
                const double d = v(gx.nodes(i), gt.nodes(j)) - u_nodes(i, j);
                e2 += gx.weights(i) * gt.weights(j) * d * d;
            }
        const double err = std::sqrt(e2);
        errors.push_back(err);

        std::ostringstream tag;
        tag << "A=" << A;
        r.metrics["error " + tag.str()] = err;
        const double res_v = max_residual(v);
        r.metrics["max residual v " + tag.str()] = res_v;
        r.check("residual v " + tag.str(), 0.0, res_v, cfg.residual_tolerance, res_v < cfg.residual_tolerance,
                "fourth-order finite-difference residual on D");
        double ic_gap = 0.0;
        for (int k = 0; k <= 2000; ++k) {
            const double x = -1.0 + k * 1e-3;
            ic_gap = std::max(ic_gap, std::abs(data.f(x) - smooth_bump(x)));
        }
        r.check("identical IC on [-1,1] " + tag.str(), 0.0, ic_gap, 0.0, ic_gap == 0.0);
    }
    r.series["amplitude"] = cfg.amplitudes;
    r.series["error"] = errors;
    r.tables["amplitudes"] = {"amplitude", "error"};
    r.plots.push_back({"error_vs_amplitude", "L2(D) gap vs far amplitude", "A", "||v - u||", "amplitude", {"error"},
                       false, false, true});

    bool increasing = true;
    for (std::size_t k = 1; k < errors.size(); ++k) increasing = increasing && errors[k] > errors[k - 1];
    r.check("strictly increasing", 0.0, increasing ? 1.0 : 0.0, 0.0, increasing);

    // Linearity against the first positive amplitude.
    std::size_t ref = 0;
    while (ref < cfg.amplitudes.size() && cfg.amplitudes[ref] == 0.0) ++ref;
    double worst = 0.0;
    for (std::size_t k = 0; k < errors.size(); ++k) {
        if (cfg.amplitudes[k] == 0.0) {
            // Different integration windows for u and v leave rounding-level noise.
            r.check("zero gap at A=0", 0.0, errors[k], 1e-10, errors[k] <= 1e-10, "quadrature noise floor");
            continue;
        }
        if (ref >= errors.size()) break;
        const double predicted = errors[ref] * cfg.amplitudes[k] / cfg.amplitudes[ref];
        worst = std::max(worst, std::abs(errors[k] / predicted - 1.0));
    }
    r.metrics["linearity deviation"] = worst;
    r.check("linear in A", 0.0, worst, cfg.linearity_tolerance, worst <= cfg.linearity_tolerance,
            "relative deviation from proportionality");
    r.check("exceeds target at largest A", cfg.target_error, errors.back(), 0.0, errors.back() > cfg.target_error);

    const Grid field_grid{-1.0, 1.0, 81, 0.0, 1.0, 41};
    r.fields["u"] = u.solve(field_grid);
    r.fields["v_largest"] = HeatKernelSolution(far_data(cfg.amplitudes.back())).solve(field_grid);
    return r;
}

}  // namespace pinnlab
