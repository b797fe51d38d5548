#include "pinnlab/experiments.hpp"

#include "pinnlab/io.hpp"
#include "pinnlab/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

namespace pinnlab {

using std::numbers::pi;

TraceIdentity trace_identity(const ScalarField& v, const ScalarField& u, const ScalarField& residual, int panels,
                             int nodes, int path_nodes) {
    // U is parametrized by s = x + 1 in [0, 1] and t in [s, 1]; the lateral foot of
    // (s - 1, t) is (-1, t - s), reached after a path of length s.
    const GaussRule outer = composite_gauss_legendre(0.0, 1.0, panels, nodes);
    const GaussRule path = gauss_legendre(path_nodes);
    TraceIdentity out;
    double interior2 = 0.0, boundary2 = 0.0, slack2 = 0.0;
    double se = 0, sf = 0, see = 0, sff = 0, sef = 0, count = 0;
    out.max_drift_excess = -INFINITY;
    for (Eigen::Index a = 0; a < outer.nodes.size(); ++a) {
        const double s = outer.nodes(a);
        const GaussRule inner = composite_gauss_legendre(s, 1.0, panels, nodes);
        for (Eigen::Index b = 0; b < inner.nodes.size(); ++b) {
            const double t = inner.nodes(b), w = outer.weights(a) * inner.weights(b);
            const double x = s - 1.0, t0 = t - s;
            const double e = v(x, t) - u(x, t);
            const double ef = v(-1.0, t0) - u(-1.0, t0);
            interior2 += w * e * e;
            boundary2 += w * ef * ef;
            se += e, sf += ef, see += e * e, sff += ef * ef, sef += e * ef, count += 1;
            if (residual) {
                double R = 0.0;
                for (Eigen::Index k = 0; k < path.nodes.size(); ++k) {
                    const double sigma = 0.5 * s * (path.nodes(k) + 1.0);
                    R += 0.5 * s * path.weights(k) * std::abs(residual(-1.0 + sigma, t0 + sigma));
                }
                slack2 += w * R * R;
                const double drift = std::abs(v(x, t) - v(-1.0, t0));
                out.max_drift_excess = std::max(out.max_drift_excess, drift - 1.01 * R);
            }
        }
    }
    out.interior = std::sqrt(interior2);
    out.boundary = std::sqrt(boundary2);
    out.slack = std::sqrt(slack2);
    if (!residual) out.max_drift_excess = 0.0;
    const double cov = sef / count - (se / count) * (sf / count);
    const double ve = see / count - (se / count) * (se / count), vf = sff / count - (sf / count) * (sf / count);
    out.correlation = (ve > 0 && vf > 0) ? cov / std::sqrt(ve * vf) : 0.0;
    return out;
}

ExperimentReport exp_B_characteristics(const ConfigB& cfg, const RunContext& ctx) {
    ExperimentReport r;
    r.id = "B";
    r.seed = ctx.seed;
    {
        std::ostringstream os;
        os.precision(17);
        os << "B|" << to_string(cfg.activation) << '|' << to_string(cfg.train.optimizer) << '|'
           << cfg.train.learning_rate << '|' << cfg.train.steps << '|' << cfg.train.batch_size << '|'
           << cfg.counts.nx << '|' << cfg.counts.nt << '|' << cfg.counts.n_initial << '|' << ctx.seed;
        for (auto s : cfg.architecture) os << '|' << s;
        r.config_hash = hex64(fnv1a(os.str()));
    }

    auto phi = [](double x) { return std::sin(pi * x / 2.0); };
    const CauchyProblem problem = make_transport(1.0, 0.0, phi);
    const CollocationSet colloc = sample_collocation(problem.domain, cfg.counts, Sampler::grid, ctx.seed);
    MlpParams net = init_mlp(cfg.architecture, cfg.activation, ctx.seed);
    TrainConfig tc = cfg.train;
    tc.seed = ctx.seed;
    ctx.say("B: training transport PINN for " + std::to_string(tc.steps) + " steps");
    const TrainResult tr = train(net, problem, colloc, tc);
    net = tr.params;

    std::vector<double> step, lres, lic;
    for (const auto& e : tr.log.entries) {
        step.push_back(double(e.step));
        lres.push_back(e.loss_res);
        lic.push_back(e.loss_ic);
    }
    r.series["step"] = step;
    r.series["loss_res"] = lres;
    r.series["loss_ic"] = lic;
    r.tables["training"] = {"step", "loss_res", "loss_ic"};
    r.plots.push_back({"training", "transport PINN training", "step", "loss", "step", {"loss_res", "loss_ic"},
                       false, true, false});

    // Mean squared residual on an evaluation grid independent of the collocation set.
    const Grid eval_grid{-1.0, 1.0, 101, 0.0, 1.0, 51};
    Eigen::MatrixXd pts(2, eval_grid.nx * eval_grid.nt);
    for (Eigen::Index j = 0; j < eval_grid.nt; ++j)
        for (Eigen::Index i = 0; i < eval_grid.nx; ++i) pts.col(j * eval_grid.nx + i) << eval_grid.x(i), eval_grid.t(j);
    const JetBatch jb = jet_eval_batch(net, pts);
    const double msr = (jb.dt + jb.dx).squaredNorm() / double(pts.cols());
    r.metrics["mean squared residual"] = msr;
    r.metrics["steps taken"] = double(tr.steps_taken);
    if (tr.status != TrainStatus::completed) r.note = "training " + to_string(tr.status) + ": " + tr.diagnostic;

    auto v = [&net](double x, double t) {
        const double in[2] = {x, t};
        return eval(net, in);
    };
    auto u = [&phi](double x, double t) { return phi(x - t); };
    auto res = [&net](double x, double t) {
        const Jet2d j = jet_eval(net, x, t);
        return j.dt + j.dx;
    };
    const TraceIdentity ti = trace_identity(v, u, res);
    r.metrics["interior error"] = ti.interior;
    r.metrics["boundary trace"] = ti.boundary;
    r.metrics["residual slack"] = ti.slack;
    r.metrics["correlation"] = ti.correlation;
    r.metrics["max drift excess"] = ti.max_drift_excess;

    const double allowance = cfg.relative_tolerance * ti.boundary + ti.slack;
    const double gap = std::abs(ti.interior - ti.boundary);
    r.check("low residual", 0.0, msr, cfg.residual_threshold, msr < cfg.residual_threshold,
            "mean squared residual on a 101x51 grid");
    r.check("trace identity", ti.boundary, ti.interior, allowance, gap <= allowance,
            "interior L2 error over U vs boundary-trace integral, 5% plus residual slack");
    r.check("drift bounded", 0.0, ti.max_drift_excess, 1e-10, ti.max_drift_excess <= 1e-10,
            "|v(x,t) - v(foot)| <= 1.01 * path integral of |residual|");
    r.check("error correlation", 1.0, ti.correlation, 1.0 - cfg.min_correlation, ti.correlation > cfg.min_correlation,
            "interior error vs propagated boundary error");
    if (!(msr < cfg.residual_threshold)) {
        r.inconclusive = true;
        r.note = "training did not reach the residual threshold";
    }

    const Grid out_grid{-1.0, 1.0, 101, 0.0, 1.0, 51};
    r.fields["prediction"] = SolutionField::tabulate(out_grid, v, {{"source", "pinn"}});
    r.fields["error"] = SolutionField::tabulate(out_grid, [&](double x, double t) { return v(x, t) - u(x, t); },
                                                {{"source", "pinn - exact"}});
    return r;
}

}  // namespace pinnlab
