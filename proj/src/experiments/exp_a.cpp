#include "pinnlab/experiments.hpp"

#include "pinnlab/io.hpp"

#include <cmath>
#include <sstream>

namespace pinnlab {

namespace {

std::string fmt(double v) {
    std::ostringstream os;
    os << v;
    return os.str();
}

bool near_kink(double a, double x, double t, double tol) {
    return std::abs(x) < tol || std::abs(std::abs(x) - a * t) < tol;
}

}  // namespace

ExperimentReport exp_A_nonuniqueness(const ConfigA& cfg) {
    ExperimentReport r;
    r.id = "A";
    {
        std::ostringstream os;
        os << "A|" << cfg.nx << '|' << cfg.nt << '|' << cfg.kink_tolerance;
        for (double a : cfg.as) os << '|' << a;
        r.config_hash = hex64(fnv1a(os.str()));
    }
    const CauchyProblem hj = make_hamilton_jacobi();
    const Grid grid{hj.domain.x_lo, hj.domain.x_hi, cfg.nx, 0.0, hj.domain.t_hi, cfg.nt};
    grid.validate();

    for (double a : cfg.as) {
        std::vector<double> xs, ts;
        for (Eigen::Index j = 0; j < grid.nt; ++j)
            for (Eigen::Index i = 0; i < grid.nx; ++i) {
                const double x = grid.x(i), t = grid.t(j);
                if (near_kink(a, x, t, cfg.kink_tolerance)) continue;
                xs.push_back(x);
                ts.push_back(t);
            }
        CollocationSet colloc;
        colloc.interior.resize(2, Eigen::Index(xs.size()));
        for (std::size_t k = 0; k < xs.size(); ++k) colloc.interior.col(Eigen::Index(k)) << xs[k], ts[k];
        std::vector<double> x0;
        for (Eigen::Index i = 0; i < grid.nx; ++i)
            if (!near_kink(a, grid.x(i), 0.0, cfg.kink_tolerance)) x0.push_back(grid.x(i));
        colloc.initial = Eigen::Map<const Eigen::VectorXd>(x0.data(), Eigen::Index(x0.size()));

        const PinnLoss loss = pinn_loss([a](double x, double t) { return hj_jet(a, x, t); }, hj, colloc);
        const std::string tag = "a=" + fmt(a);
        r.metrics["loss " + tag] = loss.total;
        r.metrics["points " + tag] = double(xs.size());
        r.check("zero loss " + tag, 0.0, loss.total, cfg.loss_tolerance, loss.total < cfg.loss_tolerance,
                "discretized PINN loss on the kink-avoiding grid");
        r.fields["u_" + fmt(a)] = hj_family(a, grid);
    }

    std::vector<double> pair_i, pair_j, dist;
    for (std::size_t i = 0; i < cfg.as.size(); ++i)
        for (std::size_t j = i + 1; j < cfg.as.size(); ++j) {
            const double a = cfg.as[i], b = cfg.as[j];
            const double d = hj_l2_distance(a, b, hj.domain);
            const double d_grid = l2_field_error(hj_family(a, grid), hj_family(b, grid));
            const std::string tag = "a=" + fmt(a) + " vs a=" + fmt(b);
            r.metrics["distance " + tag] = d;
            r.metrics["grid distance " + tag] = d_grid;
            pair_i.push_back(a);
            pair_j.push_back(b);
            dist.push_back(d);
            r.check("separated " + tag, cfg.min_separation, d, cfg.min_separation, d > cfg.min_separation,
                    "piecewise-exact L2(D) distance");
        }
    r.series["pair_a"] = pair_i;
    r.series["pair_b"] = pair_j;
    r.series["distance"] = dist;
    r.tables["distances"] = {"pair_a", "pair_b", "distance"};
    return r;
}

}  // namespace pinnlab
