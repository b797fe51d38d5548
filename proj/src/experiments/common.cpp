#include "pinnlab/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <mutex>
#include <random>
#include <sstream>
#include <thread>

namespace pinnlab {

void parallel_for(int n, int jobs, const std::function<void(int)>& f) {
    jobs = std::clamp(jobs, 1, std::max(1, n));
    if (jobs == 1) {
        for (int i = 0; i < n; ++i) f(i);
        return;
    }
    std::atomic<int> next{0};
    std::exception_ptr error;
    std::mutex error_mutex;
    std::vector<std::thread> pool;
    for (int k = 0; k < jobs; ++k)
        pool.emplace_back([&] {
            for (int i = next++; i < n; i = next++) {
                try {
                    f(i);
                } catch (...) {
                    std::lock_guard lock(error_mutex);
                    if (!error) error = std::current_exception();
                }
            }
        });
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
}

std::uint64_t derive_seed(std::uint64_t master, std::uint64_t cell) {
    std::uint64_t z = master + 0x9e3779b97f4a7c15ull * (cell + 1);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
    return z ^ (z >> 31);
}

namespace {

// Signs of every ReLU pre-activation over all term inputs.
std::vector<bool> relu_pattern(const MlpParams& net, const std::vector<LossTerm>& terms) {
    std::vector<bool> out;
    for (const auto& term : terms) {
        Eigen::MatrixXd a = term.inputs;
        for (std::size_t i = 0; i < net.layers.size(); ++i) {
            Eigen::MatrixXd z = net.layers[i].weight * a;
            z.colwise() += net.layers[i].bias;
            if (i + 1 < net.layers.size() || net.activate_output) {
                for (Eigen::Index k = 0; k < z.size(); ++k) out.push_back(z.data()[k] > 0.0);
                a = z.cwiseMax(0.0);
            } else {
                a = z;
            }
        }
    }
    return out;
}

CauchyProblem random_problem(std::mt19937_64& rng) {
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    const int kind = std::uniform_int_distribution<int>(0, 3)(rng);
    switch (kind) {
        case 0: {
            const double b = u(rng), c = u(rng);
            return make_transport(b, c, [](double x) { return std::sin(1.5 * x); });
        }
        case 1:
            return make_hamilton_jacobi();
        case 2:
            return make_heat([](double x) { return std::exp(-x * x); });
        default:
            return make_burgers(-1.0, 0.05 + 0.1 * std::abs(u(rng)));
    }
}

}  // namespace

GradcheckSummary gradient_check(int per_activation, std::uint64_t seed, double h, double rtol, double floor) {
    GradcheckSummary summary;
    const double denom_floor = floor / rtol;
    for (Activation act : {Activation::sigmoid, Activation::tanh, Activation::relu}) {
        for (int cfg = 0; cfg < per_activation; ++cfg) {
            std::mt19937_64 rng(derive_seed(seed, std::uint64_t(int(act)) * 100000 + std::uint64_t(cfg)));
            std::uniform_int_distribution<int> depth_d(1, 3), width_d(1, 6);
            std::vector<Eigen::Index> sizes{2};
            const int hidden = depth_d(rng);
            for (int k = 0; k < hidden; ++k) sizes.push_back(width_d(rng));
            sizes.push_back(1);
            const bool act_out = std::uniform_int_distribution<int>(0, 3)(rng) == 0;
            MlpParams net = init_mlp(sizes, act, rng(), act_out);
            std::normal_distribution<double> nb(0.0, 0.5);
            for (auto& l : net.layers)
                for (Eigen::Index k = 0; k < l.bias.size(); ++k) l.bias(k) = nb(rng);

            const CauchyProblem problem = random_problem(rng);
            const CollocationSet colloc =
                sample_collocation(problem.domain, {3, 3, 4}, Sampler::uniform, rng());
            std::uniform_real_distribution<double> wd(0.25, 2.0);
            std::vector<LossTerm> terms = pinn_loss_terms(problem, colloc, {wd(rng), wd(rng), 1.0});
            if (std::uniform_int_distribution<int>(0, 1)(rng)) {
                DataSamples data;
                data.inputs = colloc.interior.leftCols(3);
                data.values = Eigen::VectorXd::Constant(3, 0.3);
                terms.push_back(data_loss_term(data, wd(rng)));
            }

            const LossAndGrad lg = loss_param_grad(net, terms);
            const Eigen::VectorXd g = lg.grad.flatten();
            const Eigen::VectorXd theta = flatten(net);
            const auto base_pattern = act == Activation::relu ? relu_pattern(net, terms) : std::vector<bool>{};
            ++summary.configurations;
            for (Eigen::Index k = 0; k < theta.size(); ++k) {
                MlpParams plus = net, minus = net;
                Eigen::VectorXd tp = theta, tm = theta;
                tp(k) += h;
                tm(k) -= h;
                unflatten(plus, tp);
                unflatten(minus, tm);
                if (act == Activation::relu &&
                    (relu_pattern(plus, terms) != base_pattern || relu_pattern(minus, terms) != base_pattern)) {
                    ++summary.skipped_kinks;
                    continue;
                }
                const double fd = (evaluate_loss(plus, terms).total - evaluate_loss(minus, terms).total) / (2 * h);
                const double dev = std::abs(g(k) - fd) / std::max(std::abs(fd), denom_floor);
                ++summary.components;
                if (dev > summary.max_deviation || !std::isfinite(dev)) {
                    summary.max_deviation = std::isfinite(dev) ? dev : INFINITY;
                    std::ostringstream os;
                    os << to_string(act) << " config " << cfg << " (" << problem.name << ") param " << k
                       << ": grad " << g(k) << " vs fd " << fd;
                    summary.worst = os.str();
                }
            }
        }
    }
    return summary;
}

}  // namespace pinnlab
