#pragma once

#include "pinnlab/experiments.hpp"

#include <CLI11.hpp>

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace pinnlab::cli {

// Every tunable of the lab. Keys in config files are the option names without dashes.
struct LabConfig {
    std::string out = "out";
    std::string cache = "cache";
    std::uint64_t seed = 0;
    int jobs = 1;
    bool plots = true;

    std::vector<double> a_values{0.0, 0.5, 1.0, 2.0};

    std::vector<Eigen::Index> b_arch{2, 32, 32, 1};
    std::string b_activation = "tanh";
    std::string b_optimizer = "adam";
    double b_lr = 2e-3;
    long b_steps = 8000;
    Eigen::Index b_nx = 48;
    Eigen::Index b_nt = 24;
    Eigen::Index b_initial = 64;

    std::vector<double> amplitudes{0.0, 1.0, 2.0, 4.0, 8.0};
    double bump_scale = 4.0;

    std::vector<int> ns{10, 100, 1000};

    std::vector<int> ps{10, 20, 30, 40, 53};
    std::vector<double> dxs{0.1, 0.02, 0.004};
    std::string d2_optimizer = "adam";
    double d2_lr_dx = 5e-4;
    long d2_max_steps = 2'000'000;

    Eigen::Index e_width = 64;
    Eigen::Index e_hidden = 2;
    long e_steps = 20000;
    long e_sweep_steps = 5000;
    double e_adam_lr = 1e-3;
    double e_sgd_lr = 1e-2;
    double e_data_lr = 1e-3;
    Eigen::Index e_batch = 1024;
    Eigen::Index e_collocation = 10000;
    Eigen::Index e_samples = 50000;
    std::vector<Eigen::Index> e_widths{2, 4, 8, 16, 32, 64};
    std::vector<Eigen::Index> e_depths{1, 2, 3, 4};
    int e_modes = 16000;
    double e_dt = 1e-4;

    std::vector<Eigen::Index> train_arch{2, 32, 32, 1};
    std::string train_activation = "tanh";
    std::string train_optimizer = "adam";
    double train_lr = 1e-3;
    long train_steps = 2000;
    Eigen::Index train_batch = 0;
    int train_bits = 0;  // simulated mantissa bits; 0 disables flushing
    double lambda_res = 1.0;
    double lambda_ic = 1.0;
};

// Binds every LabConfig field as an option of `app`.
void add_lab_options(CLI::App& app, LabConfig& cfg);

// Strict TOML parsing: unknown keys throw CLI::ConfigError.
LabConfig parse_config(std::istream& in);
// Full TOML rendering of cfg, every key present.
std::string serialize_config(const LabConfig& cfg, bool descriptions = false);

ConfigA to_config_A(const LabConfig& c);
ConfigB to_config_B(const LabConfig& c);
ConfigC to_config_C(const LabConfig& c);
ConfigD1 to_config_D1(const LabConfig& c);
ConfigD2 to_config_D2(const LabConfig& c);
ConfigE to_config_E(const LabConfig& c);

// Exit codes: 0 every verdict passed, 1 error or failed verdict, 2 inconclusive.
int run(int argc, const char* const* argv);

}  // namespace pinnlab::cli
