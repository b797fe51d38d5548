#pragma once

#include "pinnlab/cauchy.hpp"
#include "pinnlab/reference.hpp"
#include "pinnlab/report.hpp"
#include "pinnlab/training.hpp"

#include <filesystem>
#include <functional>
#include <string>
#include <vector>

namespace pinnlab {

struct RunContext {
    std::uint64_t seed = 0;
    int jobs = 1;
    std::filesystem::path cache_dir = "cache";
    std::function<void(const std::string&)> progress;  // optional status lines

    void say(const std::string& s) const {
        if (progress) progress(s);
    }
};

// Runs f(0..n-1) on at most `jobs` threads; results land in index order.
void parallel_for(int n, int jobs, const std::function<void(int)>& f);

// Seed of sweep cell `cell` derived from the master seed (splitmix64).
std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell);

// ---- A: zero-loss non-uniqueness for u_t + u_x^2 = 0 -----------------------

struct ConfigA {
    std::vector<double> as{0.0, 0.5, 1.0, 2.0};
    Eigen::Index nx = 201;
    Eigen::Index nt = 101;
    double kink_tolerance = 1e-9;
    double loss_tolerance = 1e-10;
    double min_separation = 0.01;
};

ExperimentReport exp_A_nonuniqueness(const ConfigA& cfg = {});

// ---- B: error transported along characteristics -----------------------------

// Both sides of the boundary-trace identity for transport with b = 1 on
// U = {-1 <= x <= 0, x + 1 <= t <= 1}, by Gauss quadrature on the triangle.
struct TraceIdentity {
    double interior = 0.0;  // ||v - u||_{L2(U)}
    double boundary = 0.0;  // sqrt(int_0^1 int_0^t |v - u|^2(-1, t - s) ds dt)
    double slack = 0.0;     // ||R||_{L2(U)}, R = path integral of |residual| from the lateral foot
    double max_drift_excess = 0.0;  // max over nodes of |v(x,t) - v(foot)| - R(x,t)
    double correlation = 0.0;       // Pearson correlation of e(x,t) and e(foot) over the nodes
};

using ScalarField = std::function<double(double x, double t)>;

// `residual` may be empty, in which case the slack and drift entries stay 0.
TraceIdentity trace_identity(const ScalarField& v, const ScalarField& u, const ScalarField& residual = {},
                             int panels = 8, int nodes = 8, int path_nodes = 24);

struct ConfigB {
    std::vector<Eigen::Index> architecture{2, 32, 32, 1};
    Activation activation = Activation::tanh;
    TrainConfig train = [] {
        TrainConfig c;
        c.optimizer = Optimizer::adam;
        c.learning_rate = 2e-3;
        c.steps = 8000;
        c.log_every = 100;
        return c;
    }();
    CollocationCounts counts{48, 24, 64};
    double residual_threshold = 1e-5;
    double relative_tolerance = 0.05;
    double min_correlation = 0.95;
};

ExperimentReport exp_B_characteristics(const ConfigB& cfg, const RunContext& ctx = {});

// ---- C: parabolic non-locality ----------------------------------------------

// exp(1 - 1/(1 - x^2)) on (-1, 1), zero outside.
double smooth_bump(double x);

struct ConfigC {
    std::vector<double> amplitudes{0.0, 1.0, 2.0, 4.0, 8.0};
    double bump_scale = 4.0;     // far bump is amplitude * bump_scale * smooth_bump(x - far_centre)
    double far_centre = 3.0;
    Eigen::Index nx = 41;        // residual probe grid on D
    Eigen::Index nt = 21;
    double t_min = 0.05;
    double residual_tolerance = 1e-4;
    double linearity_tolerance = 1e-6;
    double target_error = 1.0;
};

ExperimentReport exp_C_nonlocality(const ConfigC& cfg = {});

// ---- D1: step-function limits -----------------------------------------------

// ||f - chi_[0,1]||_{L2(-1,1)} for a scalar function with transitions near 0 and 1
// of width ~ 1/n, by piecewise Gauss-Legendre quadrature. Known kinks of f go in `extra`.
double step_l2_error(const std::function<double(double)>& f, double n, const std::vector<double>& extra = {});

struct ConfigD1 {
    std::vector<int> ns{10, 100, 1000};
    std::vector<int> phi_indices{1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
    double max_error = 0.05;
    double slope_tolerance = 0.1;
};

ExperimentReport exp_D1_step_limits(const ConfigD1& cfg = {});

// ---- D2: machine-precision floor --------------------------------------------

// sqrt((2/w)(log(2/(1 + e^-w)) + 1 - 2/(1 + e^w))), the printed closed form.
double precision_floor_closed_form(double w);
// ||sigma(w x) - chi_[0,1]||_{L2(-1,1)} by quadrature.
double sigmoid_step_error(double w);
// (p - 1) log 2 / dx
double precision_stop_bound(int p, double dx);

struct SingleNeuronRun {
    double w_stop = 0.0;
    long steps = 0;
    bool halted = false;     // flushed gradient reached zero
    bool monotone = true;    // w never decreased
    double learning_rate = 0.0;
    int retries = 0;
    std::vector<double> w_trace;  // every log_every steps
};

struct ConfigD2 {
    std::vector<int> ps{10, 20, 30, 40, 53};
    std::vector<double> dxs{0.1, 0.02, 0.004};
    Optimizer optimizer = Optimizer::adam;
    double lr_times_dx = 5e-4;  // learning rate = lr_times_dx / dx
    double adam_epsilon = 1e-300;
    long max_steps = 2'000'000;
    int max_retries = 5;
    double error_factor = 2.0;
    double slope_tolerance = 0.1;
};

// Trains sigma(w x) from w = 0 on the grid x_i = -1 + (i - 1)/K, K = 1/dx,
// with per-sample gradient flushing at 2^-p.
SingleNeuronRun train_single_neuron(int p, double dx, const ConfigD2& cfg);

ExperimentReport exp_D2_precision_floor(const ConfigD2& cfg = {}, const RunContext& ctx = {});

// ---- E: Burgers shock --------------------------------------------------------

struct ConfigE {
    BurgersSettings reference;
    Grid reference_grid{-1.0, 1.0, 2001, 0.0, 1.0, 101};
    Eigen::Index width = 64;
    Eigen::Index hidden_layers = 2;
    TrainConfig pinn_adam = [] {
        TrainConfig c;
        c.optimizer = Optimizer::adam;
        c.learning_rate = 1e-3;
        c.steps = 20000;
        c.batch_size = 1024;
        c.log_every = 200;
        return c;
    }();
    TrainConfig pinn_sgd = [] {
        TrainConfig c;
        c.optimizer = Optimizer::sgd;
        c.learning_rate = 1e-2;
        c.steps = 20000;
        c.batch_size = 1024;
        c.log_every = 200;
        return c;
    }();
    TrainConfig data = [] {
        TrainConfig c;
        c.optimizer = Optimizer::adam;
        c.learning_rate = 1e-3;
        c.steps = 20000;
        c.batch_size = 1024;
        c.log_every = 200;
        return c;
    }();
    long sweep_steps = 5000;
    Eigen::Index collocation = 10000;
    Eigen::Index initial_points = 256;
    Eigen::Index data_samples = 50000;
    std::vector<Eigen::Index> widths{2, 4, 8, 16, 32, 64};
    std::vector<Eigen::Index> depths{1, 2, 3, 4};
    Eigen::Index depth_width = 4;
    double smooth_slope = 20.0;
    double shock_slope = 100.0;
    double fit_factor = 5.0;
    double error_floor = 1e-3;
};

ExperimentReport exp_E_burgers(const ConfigE& cfg = {}, const RunContext& ctx = {});

// ---- gradient check ----------------------------------------------------------

struct GradcheckSummary {
    int configurations = 0;
    long components = 0;
    long skipped_kinks = 0;  // ReLU components whose finite difference straddles a kink
    double max_deviation = 0.0;
    std::string worst;
};

// loss_param_grad against central differences (h = 1e-5) over random networks of
// depth <= 4 on random PINN losses. Deviation is |g - fd| / max(|fd|, floor / rtol).
GradcheckSummary gradient_check(int per_activation, std::uint64_t seed, double h = 1e-5, double rtol = 1e-4,
                                double floor = 1e-8);

}  // namespace pinnlab
