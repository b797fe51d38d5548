#include "pinnlab/cauchy.hpp"
#include "pinnlab/reference.hpp"
#include "pinnlab/training.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <set>

using namespace pinnlab;
using std::numbers::pi;

namespace {
Jet2d poly(double v, double dx, double dt, double dxx) { return {v, dx, dt, dxx}; }
}  // namespace

TEST_CASE("transport with the sine profile") {
    const CauchyProblem p = *make_problem("transport");
    const Jet2d u = p.exact(0.3, 0.4);
    CHECK(std::abs(p.residual(0.3, 0.4, u)) < 1e-12);
    CHECK(std::abs(p.exact(0.5, 0.5).val) < 1e-15);
    for (double x : {-1.0, -0.3, 0.6, 1.0}) CHECK(std::abs(p.residual(x, 0.0, p.exact(x, 0.0))) < 1e-12);
    CHECK(p.exact(0.2, 0.0).val == doctest::Approx(p.initial(0.2)));
}

TEST_CASE("constants solve homogeneous transport with zero loss") {
    const CauchyProblem p = make_transport(1.0, 0.0, [](double) { return 1.0; });
    const CollocationSet c = sample_collocation(p.domain, {8, 8, 8}, Sampler::uniform, 1);
    const PinnLoss l = pinn_loss([](double, double) { return Jet2d(1.0); }, p, c);
    CHECK(l.total == 0.0);
    CHECK(l.ic_part == 0.0);
    CHECK(p.residual(0.1, 0.2, Jet2d(1.0)) == 0.0);
    // c shifts the residual
    const CauchyProblem q = make_transport(2.0, 3.0, [](double) { return 0.0; });
    CHECK(q.residual(0.0, 0.0, poly(0, 1, 1, 0)) == doctest::Approx(1.0 + 2.0 - 3.0));
}

TEST_CASE("Hamilton-Jacobi residuals of the zero-loss family") {
    const CauchyProblem p = make_hamilton_jacobi();
    CHECK(p.residual(0.2, 0.3, Jet2d(0.0)) == 0.0);
    const Jet2d in_wedge = hj_jet(1.0, 0.5, 1.0);
    CHECK(in_wedge.val == doctest::Approx(-0.5));
    CHECK(in_wedge.dt == -1.0);
    CHECK(in_wedge.dx == 1.0);
    CHECK(p.residual(0.5, 1.0, in_wedge) == 0.0);
    const Jet2d outside = hj_jet(1.0, 0.9, 0.5);
    CHECK(outside.val == 0.0);
    CHECK(p.residual(0.9, 0.5, outside) == 0.0);
}

TEST_CASE("caloric polynomials") {
    const CauchyProblem p = make_heat([](double) { return 1.0; });
    CHECK(p.residual(0.4, 0.2, Jet2d(1.0)) == 0.0);
    CHECK(p.residual(0.4, 0.2, poly(0.4, 1.0, 0.0, 0.0)) == 0.0);
    // x^2 + 2t
    CHECK(p.residual(0.4, 0.2, poly(0.16 + 0.4, 0.8, 2.0, 2.0)) == 0.0);
    const CauchyProblem g = *make_problem("heat");
    for (double x : {-0.8, 0.0, 0.5})
        for (double t : {0.0, 0.3, 1.0}) CHECK(std::abs(g.residual(x, t, g.exact(x, t))) < 1e-14);
}

TEST_CASE("Burgers zero state") {
    const CauchyProblem p = make_burgers(-1.0, 1e-3);
    CHECK(p.residual(0.3, 0.3, Jet2d(0.0)) == 0.0);
    // u_t + mu u u_x - nu u_xx
    CHECK(p.residual(0.0, 0.0, poly(2.0, 3.0, 5.0, 7.0)) == doctest::Approx(5.0 - 6.0 - 7e-3));
    // The zero network's initial-condition error estimates int sin^2(pi x / 2) = 1.
    const CollocationSet c = sample_collocation(p.domain, {4, 4, 2001}, Sampler::grid, 0);
    const PinnLoss l = pinn_loss([](double, double) { return Jet2d(0.0); }, p, c);
    CHECK(l.ic_part == doctest::Approx(1.0).epsilon(2e-3));
    CHECK(l.residual_part == 0.0);
    CHECK(p.initial(1.0) == doctest::Approx(1.0));
    CHECK(p.initial(-0.3) == doctest::Approx(-p.initial(0.3)));
    // Inviscid characteristics cross at t* = 1 / max |phi'| = 2 / pi.
    CHECK(2.0 / pi == doctest::Approx(0.6366).epsilon(1e-4));
}

TEST_CASE("problem registry") {
    for (const char* n : {"transport", "hamilton-jacobi", "heat", "burgers"}) {
        const auto p = make_problem(n);
        REQUIRE(p.has_value());
        CHECK(p->name == n);
        CHECK_NOTHROW(p->validate());
    }
    CHECK_FALSE(make_problem("wave").has_value());
    CauchyProblem bad = make_hamilton_jacobi();
    bad.domain.t_hi = 0.0;
    CHECK_THROWS(bad.validate());
    bad = make_hamilton_jacobi();
    bad.domain.x_hi = -2.0;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("linearized residual gradients") {
    const Jet2d u = poly(0.7, -0.2, 0.4, 1.1);
    const auto check = [&](const PdeOperator& op) {
        const auto lr = linearize_residual(op, u);
        const double h = 1e-6;
        for (int k = 0; k < 4; ++k) {
            Jet2d up = u, um = u;
            double* pp[4] = {&up.val, &up.dx, &up.dt, &up.dxx};
            double* pm[4] = {&um.val, &um.dx, &um.dt, &um.dxx};
            *pp[k] += h;
            *pm[k] -= h;
            const double fd = (linearize_residual(op, up).value - linearize_residual(op, um).value) / (2 * h);
            CHECK(lr.grad[std::size_t(k)] == doctest::Approx(fd).epsilon(1e-8));
        }
    };
    check(TransportOperator{2.0, 1.0});
    check(HamiltonJacobiOperator{});
    check(HeatOperator{});
    check(BurgersOperator{-1.0, 1e-3});
}

TEST_CASE("grid collocation") {
    const Domain d{};
    const CollocationSet c = sample_collocation(d, {3, 3, 3}, Sampler::grid, 0);
    REQUIRE(c.interior.cols() == 9);
    std::set<double> xs, ts;
    for (Eigen::Index i = 0; i < c.interior.cols(); ++i) {
        xs.insert(c.interior(0, i));
        ts.insert(c.interior(1, i));
    }
    CHECK(xs == std::set<double>{-1.0, 0.0, 1.0});
    CHECK(ts == std::set<double>{0.0, 0.5, 1.0});
    CHECK(c.initial.size() == 3);
    CHECK(c.initial(0) == -1.0);
    CHECK(c.initial(2) == 1.0);
}

TEST_CASE("uniform collocation is deterministic and inside the box") {
    const Domain d{-1.0, 1.0, 1.0};
    const CollocationSet a = sample_collocation(d, {100, 100, 50}, Sampler::uniform, 42);
    const CollocationSet b = sample_collocation(d, {100, 100, 50}, Sampler::uniform, 42);
    CHECK(a.interior == b.interior);
    CHECK(a.initial == b.initial);
    REQUIRE(a.interior.cols() == 10000);
    for (Eigen::Index i = 0; i < a.interior.cols(); ++i) CHECK(d.contains(a.interior(0, i), a.interior(1, i)));
    for (Eigen::Index i = 0; i < a.initial.size(); ++i) CHECK(d.contains(a.initial(i), 0.0));
    const CollocationSet c = sample_collocation(d, {100, 100, 50}, Sampler::uniform, 43);
    CHECK_FALSE(a.interior == c.interior);
    CHECK_THROWS(sample_collocation(d, {0, 3, 3}, Sampler::grid, 0));
}
