// Acceptance runner. `acceptance N` checks criterion N, no argument checks all eight.
// One PASS/FAIL line per criterion; exit status is nonzero if any checked criterion fails.
#include "pinnlab/experiments.hpp"
#include "pinnlab/quadrature.hpp"
#include "pinnlab/reference.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

using namespace pinnlab;

namespace {

struct Result {
    bool pass = true;
    std::string detail;

    void need(bool ok, const std::string& what) {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + what;
        }
    }
};

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

// Every failing verdict of `r` whose claim starts with one of `prefixes` (all when empty).
void require_verdicts(Result& res, const ExperimentReport& r, const std::vector<std::string>& prefixes = {}) {
    std::size_t seen = 0;
    for (const auto& v : r.verdicts) {
        bool wanted = prefixes.empty();
        for (const auto& p : prefixes) wanted = wanted || v.claim.rfind(p, 0) == 0;
        if (!wanted) continue;
        ++seen;
        res.need(v.pass, v.claim + " measured " + num(v.measured) + " vs " + num(v.predicted));
    }
    res.need(seen > 0, "no matching verdicts");
    res.need(!r.inconclusive, "inconclusive");
}

Result gradient_fidelity() {
    Result res;
    const GradcheckSummary s = gradient_check(100, 2024);
    res.need(s.configurations == 300, "expected 300 configurations");
    res.need(s.max_deviation < 1e-4, "max relative deviation " + num(s.max_deviation) + " at " + s.worst);
    res.detail += (res.detail.empty() ? "" : "; ") + std::string("max deviation ") + num(s.max_deviation) + " over " +
                  std::to_string(s.components) + " components";
    return res;
}

Result nonuniqueness() {
    Result res;
    const ExperimentReport r = exp_A_nonuniqueness();
    require_verdicts(res, r);
    // piecewise-polynomial integration oracle
    const std::vector<std::pair<std::string, double>> oracle{
        {"a=0 vs a=0.5", 0.072168783648703221}, {"a=0 vs a=1", 0.40824829046386302},
        {"a=0 vs a=2", 2.2360679774997897},     {"a=0.5 vs a=1", 0.34610932762158645},
        {"a=0.5 vs a=2", 2.1854156736572259},   {"a=1 vs a=2", 1.8708286933869707}};
    for (const auto& [tag, d] : oracle) {
        const auto it = r.metrics.find("distance " + tag);
        res.need(it != r.metrics.end() && std::abs(it->second - d) < 1e-6, "distance " + tag + " off the oracle");
    }
    return res;
}

Result characteristic_law() {
    Result res;
    const ExperimentReport r = exp_B_characteristics(ConfigB{});
    require_verdicts(res, r);
    res.detail += (res.detail.empty() ? "" : "; ") + std::string("msr ") + num(r.metrics.at("mean squared residual")) +
                  ", interior " + num(r.metrics.at("interior error")) + ", trace " +
                  num(r.metrics.at("boundary trace"));
    return res;
}

Result nonlocality() {
    Result res;
    const ExperimentReport r = exp_C_nonlocality();
    require_verdicts(res, r);
    // heat evolution of the unit bump at x = 3, L2 over D; the bump enters with factor 4
    const double e1 = 0.04948415725407388;
    for (double A : {1.0, 2.0, 4.0, 8.0}) {
        std::ostringstream tag;
        tag << "error A=" << A;
        const double e = r.metrics.at(tag.str());
        res.need(std::abs(e - 4.0 * A * e1) <= 1e-6 * 4.0 * A * e1, tag.str() + " = " + num(e) + " off the oracle");
    }
    res.need(r.metrics.at("error A=8") > 1.0, "error at A=8 not above 1");
    return res;
}

Result step_limits() {
    Result res;
    const ExperimentReport r = exp_D1_step_limits();
    require_verdicts(res, r);
    res.need(r.metrics.at("relu error n=1000") < 0.05, "relu error at n=1000");
    return res;
}

Result precision_floor() {
    Result res;
    const ExperimentReport r = exp_D2_precision_floor(ConfigD2{});
    require_verdicts(res, r, {"w_stop bound", "closed form", "dx exponent", "|log eps| exponent"});
    return res;
}

Result burgers_failure() {
    Result res;
    const ExperimentReport r = exp_E_burgers(ConfigE{});
    require_verdicts(res, r, {"PINN smooth", "reference shock", "data fit beats", "data-fit error floor"});
    const auto& m = r.metrics;
    res.detail += (res.detail.empty() ? "" : "; ") + std::string("max|u_x(.,1)| pinn adam ") +
                  num(m.at("pinn adam max|u_x(.,1)|")) + ", sgd " + num(m.at("pinn sgd max|u_x(.,1)|")) +
                  ", reference " + num(m.at("reference max|u_x(.,1)|")) + "; relative L2 pinn adam " +
                  num(m.at("pinn adam relative L2 error")) + ", data fit " + num(m.at("data fit relative L2 error")) +
                  "; data-fit absolute L2 " + num(m.at("data fit absolute L2 error"));
    return res;
}

Result solver_self_validation() {
    Result res;
    // Burgers: mode doubling of the production reference, compared on its output grid
    const Grid g{-1.0, 1.0, 2001, 0.0, 1.0, 11};
    BurgersSettings a;
    BurgersSettings b = a;
    b.modes = 2 * a.modes;
    const SolutionField ua = solve_burgers_spectral(a, g).field, ub = solve_burgers_spectral(b, g).field;
    const Eigen::VectorXd w = trapezoid_weights(g.nx, g.dx());
    double worst = 0.0;
    for (Eigen::Index j = 0; j < g.nt; ++j) {
        const Eigen::VectorXd d = ua.values.col(j) - ub.values.col(j);
        worst = std::max(worst, std::sqrt(w.dot(d.cwiseAbs2())));
    }
    res.need(worst < 1e-6, "Burgers doubling gap " + num(worst));

    // heat: Gaussian data has a Gaussian solution with variance 1 + 2t
    const auto gauss = [](double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); };
    const HeatKernelSolution h({gauss, -12.0, 12.0, 1.0});
    double heat = 0.0;
    for (double x : {-1.0, -0.5, 0.0, 0.3, 1.0})
        for (double t : {0.01, 0.1, 0.5, 1.0}) {
            const double s2 = 1.0 + 2.0 * t;
            heat = std::max(heat, std::abs(h(x, t) - std::exp(-0.5 * x * x / s2) / std::sqrt(2.0 * std::numbers::pi * s2)));
        }
    res.need(heat < 1e-8, "heat kernel gap " + num(heat));

    // transport: values constant along x - t = const
    const auto phi = [](double x) { return std::sin(std::numbers::pi * x / 2.0); };
    const Grid tg{-1.0, 1.0, 201, 0.0, 1.0, 101};
    const SolutionField u = solve_transport_exact(1.0, 0.0, phi, tg);
    double drift = 0.0;
    for (Eigen::Index j = 0; j < tg.nt; ++j)
        for (Eigen::Index i = 0; i < tg.nx; ++i) {
            const auto foot = characteristic_foot(tg.x(i), tg.t(j), 1.0);
            if (foot.kind == FootKind::initial_axis) drift = std::max(drift, std::abs(u.values(i, j) - phi(foot.x0)));
        }
    res.need(drift < 1e-12, "transport drift " + num(drift));
    res.detail += (res.detail.empty() ? "" : "; ") + std::string("burgers ") + num(worst) + ", heat " + num(heat) +
                  ", transport " + num(drift);
    return res;
}

struct Criterion {
    const char* name;
    double budget_s;
    std::function<Result()> run;
};

}  // namespace

int main(int argc, char** argv) {
    const std::vector<Criterion> all{
        {"gradient fidelity", 60.0, gradient_fidelity},
        {"non-uniqueness", 60.0, nonuniqueness},
        {"characteristic error law", 600.0, characteristic_law},
        {"parabolic non-locality", 60.0, nonlocality},
        {"step-function limits", 60.0, step_limits},
        {"precision floor", 600.0, precision_floor},
        {"Burgers failure mode", 3600.0, burgers_failure},
        {"reference solver self-validation", 300.0, solver_self_validation},
    };
    std::vector<int> picked;
    for (int k = 1; k < argc; ++k) {
        const int n = std::atoi(argv[k]);
        if (n < 1 || n > int(all.size())) {
            std::fprintf(stderr, "usage: acceptance [1-%zu ...]\n", all.size());
            return 2;
        }
        picked.push_back(n);
    }
    if (picked.empty())
        for (int n = 1; n <= int(all.size()); ++n) picked.push_back(n);

    int failed = 0;
    for (int n : picked) {
        const Criterion& c = all[std::size_t(n - 1)];
        const auto t0 = std::chrono::steady_clock::now();
        Result res;
        try {
            res = c.run();
        } catch (const std::exception& e) {
            res.pass = false;
            res.detail = std::string("error: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        res.need(secs <= c.budget_s, "runtime over " + num(c.budget_s) + " s");
        std::printf("%s %d %s (%.1f s): %s\n", res.pass ? "PASS" : "FAIL", n, c.name, secs, res.detail.c_str());
        std::fflush(stdout);
        failed += !res.pass;
    }
    return failed == 0 ? 0 : 1;
}
