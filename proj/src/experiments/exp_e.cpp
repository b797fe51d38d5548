#include "pinnlab/experiments.hpp"

#include "pinnlab/io.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

namespace pinnlab {

namespace {

std::vector<Eigen::Index> layer_sizes(Eigen::Index width, Eigen::Index hidden) {
    std::vector<Eigen::Index> s{2};
    for (Eigen::Index k = 0; k < hidden; ++k) s.push_back(width);
    s.push_back(1);
    return s;
}

SolutionField predict(const MlpParams& net, const Grid& g) {
    Eigen::MatrixXd pts(2, g.nx * g.nt);
    for (Eigen::Index j = 0; j < g.nt; ++j)
        for (Eigen::Index i = 0; i < g.nx; ++i) pts.col(j * g.nx + i) << g.x(i), g.t(j);
    const Eigen::MatrixXd out = eval_batch(net, pts);
    return SolutionField(g, Eigen::Map<const Eigen::MatrixXd>(out.data(), g.nx, g.nt));
}

double max_slope_at(const MlpParams& net, double t, Eigen::Index n) {
    Eigen::MatrixXd pts(2, n);
    for (Eigen::Index i = 0; i < n; ++i) pts.col(i) << -1.0 + 2.0 * double(i) / double(n - 1), t;
    return jet_eval_batch(net, pts).dx.cwiseAbs().maxCoeff();
}

SolutionField downsample(const SolutionField& f, Eigen::Index sx, Eigen::Index st) {
    Grid g = f.grid;
    g.nx = (f.grid.nx - 1) / sx + 1;
    g.nt = (f.grid.nt - 1) / st + 1;
    Eigen::MatrixXd v(g.nx, g.nt);
    for (Eigen::Index j = 0; j < g.nt; ++j)
        for (Eigen::Index i = 0; i < g.nx; ++i) v(i, j) = f.values(i * sx, j * st);
    return SolutionField(g, std::move(v), f.metadata);
}

struct Fit {
    MlpParams net;
    TrainLog log;
    double rel_error = 0.0;
    double abs_error = 0.0;
    double max_slope = 0.0;
    std::string status;
};

}  // namespace

ExperimentReport exp_E_burgers(const ConfigE& cfg, const RunContext& ctx) {
    ExperimentReport r;
    r.id = "E";
    r.seed = ctx.seed;
    {
        std::ostringstream os;
        os.precision(17);
        os << "E|" << cfg.width << '|' << cfg.hidden_layers << '|' << cfg.collocation << '|' << cfg.initial_points
           << '|' << cfg.data_samples << '|' << cfg.sweep_steps << '|' << ctx.seed;
        for (const TrainConfig* c : {&cfg.pinn_adam, &cfg.pinn_sgd, &cfg.data})
            os << '|' << to_string(c->optimizer) << ',' << c->learning_rate << ',' << c->steps << ',' << c->batch_size;
        for (auto w : cfg.widths) os << "|w" << w;
        for (auto d : cfg.depths) os << "|d" << d;
        r.config_hash = hex64(fnv1a(os.str()));
    }

    const Grid& rg = cfg.reference_grid;
    ctx.say("E: reference solution (cache " + ctx.cache_dir.string() + ")");
    bool cached = false;
    const SolutionField ref = cached_burgers_reference(cfg.reference, rg, ctx.cache_dir, &cached);
    r.cache_keys.push_back("burgers-" + burgers_cache_key(cfg.reference, rg));
    const double ref_slope = std::stod(ref.metadata.at("final_max_slope"));
    const SolutionField zero(rg, Eigen::MatrixXd::Zero(rg.nx, rg.nt));
    const double ref_norm = l2_field_error(ref, zero);
    r.metrics["reference max|u_x(.,1)|"] = ref_slope;
    r.metrics["reference L2 norm"] = ref_norm;

    const CauchyProblem burgers = make_burgers(cfg.reference.mu, cfg.reference.nu);
    const CollocationSet colloc = sample_collocation(burgers.domain, {cfg.collocation, 1, cfg.initial_points},
                                                     Sampler::uniform, derive_seed(ctx.seed, 1));

    DataSamples samples;
    {
        std::vector<Eigen::Index> idx(std::size_t(rg.nx * rg.nt));
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<Eigen::Index> pick;
        std::mt19937_64 rng(derive_seed(ctx.seed, 2));
        std::sample(idx.begin(), idx.end(), std::back_inserter(pick),
                    std::min<std::size_t>(idx.size(), std::size_t(cfg.data_samples)), rng);
        samples.inputs.resize(2, Eigen::Index(pick.size()));
        samples.values.resize(Eigen::Index(pick.size()));
        for (std::size_t k = 0; k < pick.size(); ++k) {
            const Eigen::Index i = pick[k] % rg.nx, j = pick[k] / rg.nx;
            samples.inputs.col(Eigen::Index(k)) << rg.x(i), rg.t(j);
            samples.values(Eigen::Index(k)) = ref.values(i, j);
        }
    }

    auto finish = [&](Fit& f, const TrainResult& tr) {
        f.net = tr.params;
        f.log = tr.log;
        f.status = to_string(tr.status);
        const SolutionField pred = predict(f.net, rg);
        f.abs_error = l2_field_error(pred, ref);
        f.rel_error = f.abs_error / ref_norm;
        f.max_slope = max_slope_at(f.net, 1.0, 4001);
    };

    // Main runs: PINN with Adam, PINN with SGD, data fit. Then the sweeps.
    const std::size_t n_w = cfg.widths.size(), n_d = cfg.depths.size();
    std::vector<Fit> fits(3 + n_w + n_d);
    parallel_for(int(fits.size()), ctx.jobs, [&](int k) {
        const std::uint64_t seed = derive_seed(ctx.seed, 100 + std::uint64_t(k));
        if (k < 2) {
            TrainConfig tc = k == 0 ? cfg.pinn_adam : cfg.pinn_sgd;
            tc.seed = seed;
            ctx.say("E: PINN training (" + to_string(tc.optimizer) + ")");
            MlpParams net = init_mlp(layer_sizes(cfg.width, cfg.hidden_layers), Activation::sigmoid, seed);
            finish(fits[std::size_t(k)], train(std::move(net), burgers, colloc, tc));
            return;
        }
        TrainConfig tc = cfg.data;
        tc.seed = seed;
        std::vector<Eigen::Index> sizes;
        if (k == 2) {
            sizes = layer_sizes(cfg.width, cfg.hidden_layers);
            ctx.say("E: data-fit training");
        } else {
            tc.steps = cfg.sweep_steps;
            const std::size_t s = std::size_t(k - 3);
            sizes = s < n_w ? layer_sizes(cfg.widths[s], 2) : layer_sizes(cfg.depth_width, cfg.depths[s - n_w]);
        }
        MlpParams net = init_mlp(sizes, Activation::sigmoid, seed);
        finish(fits[std::size_t(k)], train(std::move(net), samples, tc));
    });

    const Fit &adam = fits[0], &sgd = fits[1], &data = fits[2];
    for (const auto& [name, f] : {std::pair{"pinn adam", &adam}, std::pair{"pinn sgd", &sgd},
                                  std::pair{"data fit", &data}}) {
        r.metrics[std::string(name) + " relative L2 error"] = f->rel_error;
        r.metrics[std::string(name) + " absolute L2 error"] = f->abs_error;
        r.metrics[std::string(name) + " max|u_x(.,1)|"] = f->max_slope;
        if (f->status != "completed") r.note += std::string(name) + " training " + f->status + "; ";
    }

    std::vector<double> widths, width_err, depths, depth_err;
    for (std::size_t s = 0; s < n_w; ++s) {
        widths.push_back(double(cfg.widths[s]));
        width_err.push_back(fits[3 + s].rel_error);
    }
    for (std::size_t s = 0; s < n_d; ++s) {
        depths.push_back(double(cfg.depths[s]));
        depth_err.push_back(fits[3 + n_w + s].rel_error);
    }
    r.series["width"] = widths;
    r.series["width_error"] = width_err;
    r.series["depth"] = depths;
    r.series["depth_error"] = depth_err;
    r.tables["width_sweep"] = {"width", "width_error"};
    r.tables["depth_sweep"] = {"depth", "depth_error"};
    r.plots.push_back({"error_vs_width", "data-fit error vs width", "hidden width", "relative L2 error", "width",
                       {"width_error"}, true, true, false});
    r.plots.push_back({"error_vs_depth", "data-fit error vs depth (width " + std::to_string(cfg.depth_width) + ")",
                       "hidden layers", "relative L2 error", "depth", {"depth_error"}, false, true, false});

    for (const auto& [key, f] : {std::pair{"adam", &adam}, std::pair{"sgd", &sgd}, std::pair{"data", &data}}) {
        std::vector<double> step, loss;
        for (const auto& e : f->log.entries) {
            step.push_back(double(e.step));
            loss.push_back(e.loss_total);
        }
        r.series[std::string("step_") + key] = step;
        r.series[std::string("loss_") + key] = loss;
    }
    r.plots.push_back({"loss_pinn", "PINN loss", "step", "loss", "step_adam", {"loss_adam"}, false, true, false});
    r.plots.push_back({"loss_pinn_sgd", "PINN loss (SGD)", "step", "loss", "step_sgd", {"loss_sgd"}, false, true, false});
    r.plots.push_back({"loss_data", "data-fit loss", "step", "loss", "step_data", {"loss_data"}, false, true, false});

    // Slices at t = 0, 0.25, 0.5, 0.75, 1.
    std::vector<double> xs;
    for (Eigen::Index i = 0; i < rg.nx; ++i) xs.push_back(rg.x(i));
    r.series["x"] = xs;
    auto& slices = r.tables["slices"];
    slices.push_back("x");
    for (double t : {0.0, 0.25, 0.5, 0.75, 1.0}) {
        const Eigen::Index j = std::lround((t - rg.t_lo) / rg.dt());
        std::ostringstream tag;
        tag << "t" << t;
        std::vector<double> rv, pa, dv;
        Eigen::MatrixXd pts(2, rg.nx);
        for (Eigen::Index i = 0; i < rg.nx; ++i) pts.col(i) << rg.x(i), rg.t(j);
        const Eigen::MatrixXd ya = eval_batch(adam.net, pts), yd = eval_batch(data.net, pts);
        for (Eigen::Index i = 0; i < rg.nx; ++i) {
            rv.push_back(ref.values(i, j));
            pa.push_back(ya(0, i));
            dv.push_back(yd(0, i));
        }
        r.series["reference_" + tag.str()] = rv;
        r.series["pinn_" + tag.str()] = pa;
        r.series["datafit_" + tag.str()] = dv;
        for (const char* k : {"reference_", "pinn_", "datafit_"}) slices.push_back(k + tag.str());
        r.plots.push_back({"slice_" + tag.str(), "u(x, " + tag.str().substr(1) + ")", "x", "u", "x",
                           {"reference_" + tag.str(), "pinn_" + tag.str(), "datafit_" + tag.str()}, false, false,
                           false});
    }
    const Eigen::Index sx = std::max<Eigen::Index>(1, (rg.nx - 1) / 200);
    r.fields["reference"] = downsample(ref, sx, 1);
    r.fields["pinn_adam"] = downsample(predict(adam.net, rg), sx, 1);
    r.fields["data_fit"] = downsample(predict(data.net, rg), sx, 1);

    for (const auto& [name, f] : {std::pair{"adam", &adam}, std::pair{"sgd", &sgd}})
        r.check(std::string("PINN smooth at t=1 (") + name + ")", cfg.smooth_slope, f->max_slope, 0.0,
                f->max_slope < cfg.smooth_slope, "max |u_x(., 1)| of the PINN-loss solution");
    r.check("reference shock at t=1", cfg.shock_slope, ref_slope, 0.0, ref_slope > cfg.shock_slope,
            "max |u_x(., 1)| of the spectral reference");
    const double best_pinn = std::min(adam.rel_error, sgd.rel_error);
    r.check("data fit beats PINN loss", best_pinn / cfg.fit_factor, data.rel_error, cfg.fit_factor,
            data.rel_error * cfg.fit_factor <= best_pinn, "relative L2 error, factor against the better PINN run");
    r.check("data-fit error floor", cfg.error_floor, data.abs_error, 0.0, data.abs_error > cfg.error_floor,
            "absolute L2(D) error of the data fit");
    if (n_w >= 2)
        r.check("width helps", width_err.front(), width_err.back(), 0.0, width_err.back() < width_err.front(),
                "data-fit error at the largest width below the smallest");
    return r;
}

}  // namespace pinnlab
