#include "pinnlab/experiments.hpp"

#include "test_util.hpp"

#include <doctest.h>

#include <atomic>
#include <cmath>
#include <numbers>
#include <set>
#include <sstream>

using namespace pinnlab;
using testutil::rel;

namespace {

std::size_t count_prefix(const ExperimentReport& r, const std::string& prefix) {
    std::size_t n = 0;
    for (const auto& v : r.verdicts) n += v.claim.rfind(prefix, 0) == 0;
    return n;
}

const Verdict& verdict(const ExperimentReport& r, const std::string& claim) {
    for (const auto& v : r.verdicts)
        if (v.claim == claim) return v;
    throw std::out_of_range(claim);
}

}  // namespace

TEST_CASE("parallel_for covers every index once and rethrows") {
    for (int jobs : {1, 3, 8}) {
        std::vector<int> hits(50, 0);
        parallel_for(50, jobs, [&](int k) { hits[std::size_t(k)] += 1; });
        CHECK(std::all_of(hits.begin(), hits.end(), [](int h) { return h == 1; }));
    }
    CHECK_THROWS_AS(parallel_for(10, 2, [](int k) {
                        if (k == 7) throw std::runtime_error("cell 7");
                    }),
                    std::runtime_error);
    parallel_for(0, 4, [](int) { FAIL("no cells"); });
}

TEST_CASE("derived seeds") {
    std::set<std::uint64_t> seen;
    for (std::uint64_t c = 0; c < 1000; ++c) seen.insert(derive_seed(42, c));
    CHECK(seen.size() == 1000);
    CHECK(derive_seed(42, 5) == derive_seed(42, 5));
    CHECK(derive_seed(42, 5) != derive_seed(43, 5));
}

TEST_CASE("gradient check over random configurations") {
    const GradcheckSummary s = gradient_check(8, 1);
    CHECK(s.configurations == 24);
    CHECK(s.components > 100);
    CHECK(s.max_deviation < 1e-4);
}

TEST_CASE("A: zero loss and separation") {
    const ExperimentReport r = exp_A_nonuniqueness();
    CHECK(r.outcome() == Outcome::pass);
    CHECK(count_prefix(r, "zero loss") == 4);
    for (const auto& v : r.verdicts)
        if (v.claim.rfind("zero loss", 0) == 0) CHECK(v.measured < 1e-10);
    CHECK(std::abs(r.metrics.at("distance a=0 vs a=1") - 0.40824829046386302) < 1e-6);
    CHECK(std::abs(r.metrics.at("distance a=0.5 vs a=1") - 0.34610932762158645) < 1e-6);
    CHECK(std::abs(r.metrics.at("distance a=1 vs a=2") - 1.8708286933869707) < 1e-6);
    CHECK(r.metrics.at("distance a=0 vs a=1") > r.metrics.at("distance a=0 vs a=0.5"));
    CHECK(r.fields.size() == 4);
    CHECK(r.series.at("distance").size() == 6);
    CHECK(report_from_json(report_to_json(r)) == r);
}

TEST_CASE("B: trace identity quadrature") {
    const ScalarField u = [](double x, double t) { return std::sin(std::numbers::pi * (x - t) / 2.0); };
    const TraceIdentity same = trace_identity(u, u, [](double, double) { return 0.0; });
    CHECK(same.interior == 0.0);
    CHECK(same.boundary == 0.0);
    CHECK(same.slack == 0.0);

    // Ramp e = d t (-x): vanishes at t = 0 and x = 0, not on x = -1. Oracle from scipy
    // nested adaptive quadrature.
    const double d = 0.1;
    const ScalarField v = [&](double x, double t) { return u(x, t) + d * t * (-x); };
    const ScalarField r = [&](double x, double t) { return -d * (x + t); };
    const TraceIdentity ramp = trace_identity(v, u, r);
    CHECK(std::abs(ramp.interior - 0.03248931448269655) < 1e-6);
    CHECK(std::abs(ramp.boundary - 0.02886751345948129) < 1e-6);
    CHECK(std::abs(ramp.slack - 0.011180339887498926) < 1e-5);
    CHECK(std::abs(ramp.interior - ramp.boundary) <= 0.05 * ramp.boundary + ramp.slack);
    CHECK(ramp.max_drift_excess <= 1e-10);
}

TEST_CASE("B: short training is inconclusive") {
    ConfigB cfg;
    cfg.architecture = {2, 6, 1};
    cfg.train.steps = 5;
    cfg.counts = {8, 6, 8};
    const ExperimentReport r = exp_B_characteristics(cfg);
    CHECK(r.outcome() == Outcome::inconclusive);
    CHECK(r.metrics.at("mean squared residual") > 1e-5);
    CHECK(r.metrics.count("interior error") == 1);
    CHECK(r.metrics.count("boundary trace") == 1);
    CHECK_NOTHROW(r.validate());
}

TEST_CASE("C: heat non-locality against the oracle") {
    const ExperimentReport r = exp_C_nonlocality();
    CHECK(r.outcome() == Outcome::pass);
    // oracle: L2(D) norm of the heat evolution of a unit bump at x = 3
    const double e1 = 0.04948415725407388;
    for (double A : {1.0, 2.0, 4.0, 8.0}) {
        std::ostringstream key;
        key << "error A=" << A;
        CHECK(rel(r.metrics.at(key.str()), 4.0 * A * e1) < 1e-8);
    }
    CHECK(r.metrics.at("error A=0") < 1e-10);
    CHECK(rel(r.metrics.at("error A=2"), 2.0 * r.metrics.at("error A=1")) < 1e-6);
    CHECK(r.metrics.at("error A=8") > 1.0);
    CHECK_THROWS(exp_C_nonlocality({{0.0, 2.0, 1.0}}));
}

TEST_CASE("D1: step limits") {
    const ExperimentReport r = exp_D1_step_limits();
    CHECK(r.outcome() == Outcome::pass);
    CHECK(std::abs(r.metrics.at("relu error n=1000") - 0.031601687718643551) < 1e-12);
    CHECK(std::abs(r.metrics.at("sigmoid error n=10") - 0.155459109303498) < 1e-12);
    CHECK(r.metrics.at("relu max|w| n=100") == 100.0);
    CHECK(r.metrics.at("phi distance deviation") <= 1e-9);
}

TEST_CASE("D2: closed form and bounds") {
    CHECK(std::abs(precision_floor_closed_form(3604.0) - 0.0306527866587) < 1e-11);
    CHECK(std::abs(precision_stop_bound(24, 0.1) - 159.4238515) < 1e-6);
    CHECK(std::abs(precision_stop_bound(53, 0.01) - 52 * std::log(2.0) / 0.01) < 1e-9);
    // limiting bracket log 2 + 1: e ~ sqrt(2 (log 2 + 1) / w)
    const double w = 1e7;
    CHECK(rel(precision_floor_closed_form(w), std::sqrt(3.3863 / w)) < 1e-4);
    // true quadrature error, mpmath oracle
    CHECK(std::abs(sigmoid_step_error(10.0) - 0.19654372517556030) < 1e-12);
    CHECK(std::abs(sigmoid_step_error(100.0) - 0.062152583302698740) < 1e-12);
    CHECK(std::abs(sigmoid_step_error(3604.0) - 0.010353013806246647) < 1e-12);
}

TEST_CASE("D2: small sweep") {
    ConfigD2 cfg;
    cfg.ps = {10, 20};
    cfg.dxs = {0.1, 0.05};
    RunContext ctx;
    ctx.jobs = 2;
    const ExperimentReport r = exp_D2_precision_floor(cfg, ctx);
    CHECK(r.series.at("p").size() == 4);
    CHECK(r.tables.at("sweep").front() == "p");
    CHECK(count_prefix(r, "w_stop bound") == 4);
    for (const auto& v : r.verdicts)
        if (v.claim.rfind("w_stop bound", 0) == 0) CHECK(v.pass);
    std::size_t scaling = 0;
    for (const auto& p : r.plots) scaling += p.name.rfind("scaling_", 0) == 0;
    CHECK(scaling == 2);
    const Verdict& b = verdict(r, "w_stop bound p=10 dx=0.1");
    CHECK(b.predicted == doctest::Approx(precision_stop_bound(10, 0.1)));
}

TEST_CASE("E: pipeline at toy scale") {
    testutil::TempDir tmp;
    ConfigE cfg;
    cfg.reference.nu = 0.05;
    cfg.reference.modes = 256;
    cfg.reference.dt = 1e-3;
    cfg.reference_grid = {-1.0, 1.0, 41, 0.0, 1.0, 5};
    cfg.width = 4;
    for (TrainConfig* t : {&cfg.pinn_adam, &cfg.pinn_sgd, &cfg.data}) {
        t->steps = 10;
        t->batch_size = 16;
        t->log_every = 5;
    }
    cfg.sweep_steps = 5;
    cfg.collocation = 32;
    cfg.initial_points = 8;
    cfg.data_samples = 50;
    cfg.widths = {2, 4};
    cfg.depths = {1, 2};
    RunContext ctx;
    ctx.cache_dir = tmp.path;
    const ExperimentReport r = exp_E_burgers(cfg, ctx);
    std::size_t slices = 0;
    for (const auto& p : r.plots) slices += p.name.rfind("slice_", 0) == 0;
    CHECK(slices == 5);
    CHECK(r.tables.at("slices").size() == 16);
    CHECK(r.series.at("width_error").size() == 2);
    CHECK(r.series.at("depth_error").size() == 2);
    CHECK(r.cache_keys.size() == 1);
    CHECK(r.metrics.count("data fit relative L2 error") == 1);
    CHECK(count_prefix(r, "PINN smooth") == 2);
    CHECK_NOTHROW(report_from_json(report_to_json(r)));
}
