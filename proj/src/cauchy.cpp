#include "pinnlab/cauchy.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>

namespace pinnlab {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};

}  // namespace

LinearizedResidual linearize_residual(const PdeOperator& op, const Jet2d& u) {
    return std::visit(
        overloaded{
            [&](const TransportOperator& p) -> LinearizedResidual {
                return {u.dt + p.b * u.dx - p.c, {0.0, p.b, 1.0, 0.0}};
            },
            [&](const HamiltonJacobiOperator&) -> LinearizedResidual {
                return {u.dt + u.dx * u.dx, {0.0, 2.0 * u.dx, 1.0, 0.0}};
            },
            [&](const HeatOperator&) -> LinearizedResidual {
                return {u.dt - u.dxx, {0.0, 0.0, 1.0, -1.0}};
            },
            [&](const BurgersOperator& p) -> LinearizedResidual {
                return {u.dt + p.mu * u.val * u.dx - p.nu * u.dxx, {p.mu * u.dx, p.mu * u.val, 1.0, -p.nu}};
            },
        },
        op);
}

double CauchyProblem::residual(double, double, const Jet2d& u) const {
    return linearize_residual(op, u).value;
}

void CauchyProblem::validate() const {
    if (!(domain.t_hi > 0.0)) throw std::invalid_argument("problem " + name + ": T must be positive");
    if (!(domain.x_lo < domain.x_hi)) throw std::invalid_argument("problem " + name + ": need x_lo < x_hi");
    if (!initial) throw std::invalid_argument("problem " + name + ": missing initial condition");
}

CauchyProblem make_transport(double b, double c, ScalarFunction phi) {
    CauchyProblem p{"transport", TransportOperator{b, c}, phi, Domain{}, {}};
    return p;
}

CauchyProblem make_hamilton_jacobi() {
    CauchyProblem p{"hamilton-jacobi", HamiltonJacobiOperator{}, [](double) { return 0.0; }, Domain{}, {}};
    p.exact = [](double, double) { return Jet2d{}; };
    return p;
}

CauchyProblem make_heat(ScalarFunction phi) {
    return {"heat", HeatOperator{}, std::move(phi), Domain{}, {}};
}

CauchyProblem make_burgers(double mu, double nu) {
    if (!(nu > 0.0)) throw std::invalid_argument("Burgers viscosity must be positive");
    return {"burgers", BurgersOperator{mu, nu},
            [](double x) { return std::sin(std::numbers::pi * x / 2.0); }, Domain{}, {}};
}

std::optional<CauchyProblem> make_problem(const std::string& name) {
    using std::numbers::pi;
    if (name == "transport") {
        auto p = make_transport(1.0, 0.0, [](double x) { return std::sin(pi * x / 2.0); });
        p.exact = [](double x, double t) {
            return sin(Jet2d::variable_x(x) * (pi / 2.0) - Jet2d::variable_t(t) * (pi / 2.0));
        };
        return p;
    }
    if (name == "hamilton-jacobi") return make_hamilton_jacobi();
    if (name == "heat") {
        // Gaussian density with unit variance; exact solution has variance 1 + 2t.
        auto p = make_heat([](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * pi); });
        p.exact = [](double x, double t) {
            const double s2 = 1.0 + 2.0 * t;
            const double g = std::exp(-0.5 * x * x / s2) / std::sqrt(2.0 * pi * s2);
            return Jet2d{g, -x / s2 * g, g * (x * x / (s2 * s2) - 1.0 / s2), g * (x * x / (s2 * s2) - 1.0 / s2)};
        };
        return p;
    }
    if (name == "burgers") return make_burgers(-1.0, 1e-3);
    return std::nullopt;
}

CollocationSet sample_collocation(const Domain& domain, const CollocationCounts& counts, Sampler scheme,
                                  std::uint64_t seed) {
    if (counts.nx < 1 || counts.nt < 1 || counts.n_initial < 1)
        throw std::invalid_argument("collocation counts must be >= 1");
    CollocationSet set;
    set.sampler = scheme;
    set.seed = seed;
    const Eigen::Index n = counts.nx * counts.nt;
    set.interior.resize(2, n);
    if (scheme == Sampler::grid) {
        const auto xs = Eigen::VectorXd::LinSpaced(counts.nx, domain.x_lo, domain.x_hi);
        const auto ts = Eigen::VectorXd::LinSpaced(counts.nt, 0.0, domain.t_hi);
        Eigen::Index k = 0;
        for (Eigen::Index j = 0; j < counts.nt; ++j)
            for (Eigen::Index i = 0; i < counts.nx; ++i) {
                set.interior(0, k) = xs(i);
                set.interior(1, k) = ts(j);
                ++k;
            }
        set.initial = Eigen::VectorXd::LinSpaced(counts.n_initial, domain.x_lo, domain.x_hi);
    } else {
        std::mt19937_64 rng(seed);
        std::uniform_real_distribution<double> ux(domain.x_lo, domain.x_hi);
        std::uniform_real_distribution<double> ut(0.0, domain.t_hi);
        for (Eigen::Index k = 0; k < n; ++k) {
            set.interior(0, k) = ux(rng);
            set.interior(1, k) = ut(rng);
        }
        set.initial.resize(counts.n_initial);
        for (Eigen::Index k = 0; k < counts.n_initial; ++k) set.initial(k) = ux(rng);
    }
    return set;
}

}  // namespace pinnlab
