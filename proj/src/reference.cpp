#include "pinnlab/reference.hpp"

#include "pinnlab/errors.hpp"
#include "pinnlab/quadrature.hpp"

#include <unsupported/Eigen/FFT>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>
#include <vector>

namespace pinnlab {

using std::numbers::pi;

SolutionField solve_transport_exact(double b, double c, const ScalarFunction& phi, const Grid& grid) {
    std::ostringstream bs, cs;
    bs.precision(17);
    cs.precision(17);
    bs << b;
    cs << c;
    return SolutionField::tabulate(
        grid, [&](double x, double t) { return phi(x - b * t) + c * t; },
        {{"solver", "transport-exact"}, {"b", bs.str()}, {"c", cs.str()}});
}

CharacteristicFoot characteristic_foot(double x, double t, double b, const Domain& domain) {
    const double x_at_zero = x - b * t;
    if (x_at_zero >= domain.x_lo && x_at_zero <= domain.x_hi) return {x_at_zero, 0.0, FootKind::initial_axis};
    if (b > 0.0) return {domain.x_lo, t - (x - domain.x_lo) / b, FootKind::lateral_boundary};
    return {domain.x_hi, t - (domain.x_hi - x) / (-b), FootKind::lateral_boundary};
}

double hj_value(double a, double x, double t) {
    const double ax = std::abs(x);
    if (ax >= a * t) return 0.0;
    return a * ax - a * a * t;
}

Jet2d hj_jet(double a, double x, double t) {
    if (std::abs(x) >= a * t) return {};
    const double s = x >= 0.0 ? 1.0 : -1.0;
    return {a * std::abs(x) - a * a * t, a * s, -a * a, 0.0};
}

SolutionField hj_family(double a, const Grid& grid) {
    if (a < 0.0) throw std::invalid_argument("hj_family needs a >= 0");
    std::ostringstream as;
    as.precision(17);
    as << a;
    return SolutionField::tabulate(
        grid, [a](double x, double t) { return hj_value(a, x, t); },
        {{"solver", "hj-family"}, {"a", as.str()}});
}

double hj_l2_distance(double a, double b, const Domain& domain) {
    // Pieces in x are bounded by 0 and +-a t, +-b t; in t by the times those
    // lines leave the domain. Both integrands are polynomial on every piece.
    std::vector<double> tb{0.0, domain.t_hi};
    for (double s : {a, b}) {
        if (s <= 0.0) continue;
        for (double edge : {domain.x_hi / s, -domain.x_lo / s})
            if (edge > 0.0 && edge < domain.t_hi) tb.push_back(edge);
    }
    const GaussRule t_rule = piecewise_gauss_legendre(tb, 1, 4);
    double total = 0.0;
    for (Eigen::Index j = 0; j < t_rule.nodes.size(); ++j) {
        const double t = t_rule.nodes(j);
        std::vector<double> xb{domain.x_lo, domain.x_hi};
        for (double c : {0.0, a * t, -a * t, b * t, -b * t})
            if (c > domain.x_lo && c < domain.x_hi) xb.push_back(c);
        const GaussRule x_rule = piecewise_gauss_legendre(xb, 1, 3);
        const double inner = integrate(x_rule, [&](double x) {
            const double d = hj_value(a, x, t) - hj_value(b, x, t);
            return d * d;
        });
        total += t_rule.weights(j) * inner;
    }
    return std::sqrt(total);
}

double heat_kernel(double x, double t) {
    return std::exp(-x * x / (4.0 * t)) / (2.0 * std::sqrt(pi * t));
}

HeatKernelSolution::HeatKernelSolution(InitialData data, HeatQuadrature quad)
    : data_(std::move(data)), quad_(quad) {
    if (!data_.f) throw std::invalid_argument("heat solver: missing initial data");
    if (!(data_.support_hi > data_.support_lo)) throw std::invalid_argument("heat solver: empty support");
    if (quad_.nodes < 1) throw std::invalid_argument("heat solver: need at least one node per panel");
}

double HeatKernelSolution::window_radius(double t) const {
    return quad_.radius ? *quad_.radius : quad_.radius_factor * std::sqrt(2.0 * t);
}

double HeatKernelSolution::tail_estimate(double x, double t) const {
    if (t <= 0.0) return 0.0;
    const double r = window_radius(t);
    if (data_.support_lo >= x - r && data_.support_hi <= x + r) return 0.0;
    return std::erfc(r / (2.0 * std::sqrt(t))) * data_.sup_norm;
}

double HeatKernelSolution::operator()(double x, double t) const {
    if (t < 0.0) throw std::invalid_argument("heat solver: negative time");
    if (t == 0.0) return (x >= data_.support_lo && x <= data_.support_hi) ? data_.f(x) : 0.0;

    const double tail = tail_estimate(x, t);
    if (tail > quad_.tolerance) {
        // Smallest radius whose truncated kernel mass meets the tolerance.
        double lo = window_radius(t), hi = 2.0 * lo + 1.0;
        while (std::erfc(hi / (2.0 * std::sqrt(t))) * data_.sup_norm > quad_.tolerance) hi *= 2.0;
        for (int i = 0; i < 60; ++i) {
            const double mid = 0.5 * (lo + hi);
            (std::erfc(mid / (2.0 * std::sqrt(t))) * data_.sup_norm > quad_.tolerance ? lo : hi) = mid;
        }
        std::ostringstream msg;
        msg << "heat kernel truncation tail " << tail << " exceeds tolerance " << quad_.tolerance
            << " at (x=" << x << ", t=" << t << "); window radius must be at least " << hi;
        throw SolverError(msg.str());
    }

    const double r = window_radius(t);
    const double lo = std::max(data_.support_lo, x - r);
    const double hi = std::min(data_.support_hi, x + r);
    if (!(hi > lo)) return 0.0;
    const double panel = std::min(quad_.max_panel, quad_.panel_factor * std::sqrt(2.0 * t));
    const int panels = std::max(1, int(std::ceil((hi - lo) / panel)));
    const GaussRule rule = composite_gauss_legendre(lo, hi, panels, quad_.nodes);
    return integrate(rule, [&](double xi) { return heat_kernel(x - xi, t) * data_.f(xi); });
}

SolutionField HeatKernelSolution::solve(const Grid& grid) const {
    return SolutionField::tabulate(grid, [this](double x, double t) { return (*this)(x, t); },
                                   {{"solver", "heat-kernel"}});
}

double HeatKernelSolution::fd_residual(double x, double t, double h) const {
    if (t - 2.0 * h <= 0.0) throw std::invalid_argument("heat residual stencil reaches t <= 0");
    const auto& u = *this;
    const double u_t = (-u(x, t + 2 * h) + 8 * u(x, t + h) - 8 * u(x, t - h) + u(x, t - 2 * h)) / (12 * h);
    const double u_xx =
        (-u(x + 2 * h, t) + 16 * u(x + h, t) - 30 * u(x, t) + 16 * u(x - h, t) - u(x - 2 * h, t)) / (12 * h * h);
    return u_t - u_xx;
}

SolutionField solve_heat_kernel(const InitialData& data, const Grid& grid, const HeatQuadrature& quad) {
    return HeatKernelSolution(data, quad).solve(grid);
}

// ---------------------------------------------------------------------------

namespace {

using Complex = std::complex<double>;
using Spectrum = std::vector<Complex>;

struct EtdCoefficients {
    std::vector<double> e, e2, q, f1, f2, f3;
};

// Kassam-Trefethen contour averages avoid cancellation for small |L dt|.
EtdCoefficients etd_coefficients(const std::vector<double>& lin, double dt) {
    constexpr int contour = 32;
    const std::size_t n = lin.size();
    EtdCoefficients c;
    for (auto* v : {&c.e, &c.e2, &c.q, &c.f1, &c.f2, &c.f3}) v->resize(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double lr = lin[k] * dt;
        c.e[k] = std::exp(lr);
        c.e2[k] = std::exp(lr / 2.0);
        Complex q{}, f1{}, f2{}, f3{};
        for (int m = 0; m < contour; ++m) {
            const Complex z = lr + std::exp(Complex(0.0, pi * (m + 0.5) / (contour / 2.0)));
            const Complex ez = std::exp(z);
            const Complex z3 = z * z * z;
            q += (std::exp(z / 2.0) - 1.0) / z;
            f1 += (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / z3;
            f2 += (2.0 + z + ez * (z - 2.0)) / z3;
            f3 += (-4.0 - 3.0 * z - z * z + ez * (4.0 - z)) / z3;
        }
        c.q[k] = dt * (q / double(contour)).real();
        c.f1[k] = dt * (f1 / double(contour)).real();
        c.f2[k] = dt * (f2 / double(contour)).real();
        c.f3[k] = dt * (f3 / double(contour)).real();
    }
    return c;
}

class BurgersStepper {
  public:
    BurgersStepper(const BurgersSettings& s) : s_(s), n_(std::size_t(s.modes)) {
        if (s.modes < 8 || s.modes % 2 != 0) throw std::invalid_argument("Burgers modes must be even and >= 8");
        if (!(s.nu > 0.0)) throw std::invalid_argument("Burgers viscosity must be positive");
        k_.resize(n_);
        mask_.resize(n_);
        lin_.resize(n_);
        for (std::size_t j = 0; j < n_; ++j) {
            const long m = j < n_ / 2 ? long(j) : long(j) - long(n_);
            k_[j] = j == n_ / 2 ? 0.0 : 2.0 * pi * double(m) / s.period;
            mask_[j] = 3 * std::labs(m) < long(n_) ? 1.0 : 0.0;
            const double kk = 2.0 * pi * double(m) / s.period;
            lin_[j] = -s.nu * kk * kk;
        }
        real_.resize(n_);
        tmp_.resize(n_);
    }

    std::size_t size() const { return n_; }
    double h() const { return s_.period / double(n_); }
    double x(std::size_t j) const { return s_.period_lo + double(j) * h(); }

    Spectrum forward(const std::vector<double>& u) {
        Spectrum out;
        fft_.fwd(out, u);
        for (std::size_t j = 0; j < n_; ++j) out[j] *= mask_[j];
        return out;
    }

    std::vector<double> inverse(const Spectrum& v) {
        std::vector<double> u;
        fft_.inv(u, v);
        return u;
    }

    // -mu d/dx (u^2 / 2), dealiased.
    Spectrum nonlinear(const Spectrum& v) {
        fft_.inv(real_, v);
        for (auto& r : real_) r = r * r;
        fft_.fwd(tmp_, real_);
        Spectrum out(n_);
        for (std::size_t j = 0; j < n_; ++j) out[j] = Complex(0.0, -s_.mu * 0.5 * k_[j]) * tmp_[j] * mask_[j];
        return out;
    }

    void set_dt(double dt) {
        if (dt != dt_) {
            coef_ = etd_coefficients(lin_, dt);
            dt_ = dt;
        }
    }

    void step(Spectrum& v) {
        const auto& c = coef_;
        const Spectrum nv = nonlinear(v);
        Spectrum a(n_), b(n_), cc(n_);
        for (std::size_t j = 0; j < n_; ++j) a[j] = c.e2[j] * v[j] + c.q[j] * nv[j];
        const Spectrum na = nonlinear(a);
        for (std::size_t j = 0; j < n_; ++j) b[j] = c.e2[j] * v[j] + c.q[j] * na[j];
        const Spectrum nb = nonlinear(b);
        for (std::size_t j = 0; j < n_; ++j) cc[j] = c.e2[j] * a[j] + c.q[j] * (2.0 * nb[j] - nv[j]);
        const Spectrum nc = nonlinear(cc);
        for (std::size_t j = 0; j < n_; ++j)
            v[j] = c.e[j] * v[j] + nv[j] * c.f1[j] + 2.0 * (na[j] + nb[j]) * c.f2[j] + nc[j] * c.f3[j];
    }

    double max_slope(const Spectrum& v) {
        Spectrum d(n_);
        for (std::size_t j = 0; j < n_; ++j) d[j] = Complex(0.0, k_[j]) * v[j];
        const auto ux = inverse(d);
        double m = 0.0;
        for (double s : ux) m = std::max(m, std::abs(s));
        return m;
    }

    // Trigonometric interpolant at an arbitrary point.
    double interpolate(const Spectrum& v, double xq) const {
        const double theta = 2.0 * pi * (xq - s_.period_lo) / s_.period;
        double sum = v[0].real();
        for (std::size_t j = 1; j < n_ / 2; ++j) {
            if (mask_[j] == 0.0) continue;
            sum += 2.0 * (v[j] * std::exp(Complex(0.0, theta * double(j)))).real();
        }
        sum += (v[n_ / 2] * std::cos(theta * double(n_ / 2))).real();
        return sum / double(n_);
    }

  private:
    BurgersSettings s_;
    std::size_t n_;
    std::vector<double> k_, mask_, lin_;
    std::vector<double> real_;
    Spectrum tmp_;
    Eigen::FFT<double> fft_;
    EtdCoefficients coef_;
    double dt_ = -1.0;
};

}  // namespace

BurgersSolution solve_burgers_spectral(const BurgersSettings& settings, const Grid& out) {
    out.validate();
    if (out.t_lo != 0.0) throw std::invalid_argument("Burgers output grid must start at t = 0");
    if (!(settings.dt > 0.0)) throw std::invalid_argument("Burgers time step must be positive");
    BurgersStepper stepper(settings);
    const std::size_t n = stepper.size();

    std::vector<double> u0(n);
    for (std::size_t j = 0; j < n; ++j) u0[j] = std::sin(pi * stepper.x(j) / 2.0);
    Spectrum v = stepper.forward(u0);
    const double u0_max = 1.0;
    const Complex mass0 = v[0];

    // Output columns either sit on collocation points or are interpolated.
    std::vector<long> native_index(std::size_t(out.nx), -1);
    for (Eigen::Index i = 0; i < out.nx; ++i) {
        const double s = (out.x(i) - settings.period_lo) / stepper.h();
        const double r = std::round(s);
        if (std::abs(s - r) < 1e-9) native_index[std::size_t(i)] = long(r) % long(n);
    }

    BurgersSolution sol;
    Eigen::MatrixXd values(out.nx, out.nt);
    auto record = [&](Eigen::Index col) {
        const auto u = stepper.inverse(v);
        for (Eigen::Index i = 0; i < out.nx; ++i) {
            const long idx = native_index[std::size_t(i)];
            values(i, col) = idx >= 0 ? u[std::size_t(idx)] : stepper.interpolate(v, out.x(i));
        }
        double umax = 0.0;
        for (double s : u) {
            if (!std::isfinite(s)) umax = std::numeric_limits<double>::infinity();
            else umax = std::max(umax, std::abs(s));
        }
        if (!(umax <= 10.0 * (u0_max + 1.0))) {
            std::ostringstream msg;
            msg << "Burgers solution blew up by t = " << out.t(col) << " (max |u| = " << umax
                << "); retry with dt <= " << settings.dt / 2.0;
            throw SolverError(msg.str());
        }
        sol.max_mass_drift = std::max(sol.max_mass_drift, std::abs((v[0] - mass0).real()) * stepper.h());
    };

    record(0);
    const double interval = out.dt();
    const long sub = std::max(1L, long(std::ceil(interval / settings.dt - 1e-9)));
    stepper.set_dt(interval / double(sub));
    for (Eigen::Index col = 1; col < out.nt; ++col) {
        for (long s = 0; s < sub; ++s) stepper.step(v);
        sol.steps += sub;
        record(col);
    }

    sol.final_profile.resize(Eigen::Index(n));
    sol.native_x.resize(Eigen::Index(n));
    const auto u_final = stepper.inverse(v);
    for (std::size_t j = 0; j < n; ++j) {
        sol.final_profile(Eigen::Index(j)) = u_final[j];
        sol.native_x(Eigen::Index(j)) = stepper.x(j);
    }
    sol.final_max_slope = stepper.max_slope(v);

    std::ostringstream mu, nu, dt, slope, drift;
    for (auto* os : {&mu, &nu, &dt, &slope, &drift}) os->precision(17);
    mu << settings.mu;
    nu << settings.nu;
    dt << interval / double(sub);
    slope << sol.final_max_slope;
    drift << sol.max_mass_drift;
    sol.field = SolutionField(out, std::move(values),
                              {{"solver", "burgers-spectral-etdrk4"},
                               {"mu", mu.str()},
                               {"nu", nu.str()},
                               {"modes", std::to_string(settings.modes)},
                               {"dt", dt.str()},
                               {"final_max_slope", slope.str()},
                               {"max_mass_drift", drift.str()}});
    return sol;
}

}  // namespace pinnlab
