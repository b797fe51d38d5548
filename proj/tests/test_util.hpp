#pragma once

#include "pinnlab/autodiff.hpp"
#include "pinnlab/mlp.hpp"

#include <atomic>
#include <cmath>
#include <filesystem>
#include <string>
#include <unistd.h>

namespace testutil {

inline double rel(double a, double b) { return std::abs(a - b) / std::max(std::abs(b), 1e-300); }

// Fresh directory under the system temp dir, removed on scope exit.
struct TempDir {
    std::filesystem::path path;
    TempDir() {
        static std::atomic<int> counter{0};
        path = std::filesystem::temp_directory_path() /
               ("pinnlab-test-" + std::to_string(::getpid()) + "-" + std::to_string(counter++));
        std::filesystem::remove_all(path);
        std::filesystem::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        std::filesystem::remove_all(path, ec);
    }
    TempDir(const TempDir&) = delete;
    TempDir& operator=(const TempDir&) = delete;
};

// Central differences of the composite loss over the flat parameter vector.
inline Eigen::VectorXd fd_gradient(const pinnlab::MlpParams& net, const std::vector<pinnlab::LossTerm>& terms,
                                   double h) {
    Eigen::VectorXd theta = pinnlab::flatten(net), g(theta.size());
    pinnlab::MlpParams probe = net;
    for (Eigen::Index k = 0; k < theta.size(); ++k) {
        Eigen::VectorXd tp = theta, tm = theta;
        tp(k) += h;
        tm(k) -= h;
        pinnlab::unflatten(probe, tp);
        const double fp = pinnlab::evaluate_loss(probe, terms).total;
        pinnlab::unflatten(probe, tm);
        const double fm = pinnlab::evaluate_loss(probe, terms).total;
        g(k) = (fp - fm) / (2.0 * h);
    }
    return g;
}

}  // namespace testutil
