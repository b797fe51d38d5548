#pragma once

#include "pinnlab/cauchy.hpp"
#include "pinnlab/field.hpp"
#include "pinnlab/jet.hpp"

#include <Eigen/Dense>

#include <optional>

namespace pinnlab {

// ---- transport, constant coefficients -------------------------------------

// u(x, t) = phi(x - b t) + c t
SolutionField solve_transport_exact(double b, double c, const ScalarFunction& phi, const Grid& grid);

enum class FootKind { initial_axis, lateral_boundary };

struct CharacteristicFoot {
    double x0 = 0.0;
    double t0 = 0.0;
    FootKind kind = FootKind::initial_axis;
};

// Backward trace of x' = b from (x, t) to the first exit from the domain.
// An exit exactly through a corner counts as the initial axis.
CharacteristicFoot characteristic_foot(double x, double t, double b, const Domain& domain = {});

// ---- Hamilton-Jacobi family ------------------------------------------------

// u_a(x, t): 0 for |x| >= a t, a|x| - a^2 t inside the wedge.
double hj_value(double a, double x, double t);
// One-sided derivatives; at a kink the branch with |x| >= a t wins.
Jet2d hj_jet(double a, double x, double t);
SolutionField hj_family(double a, const Grid& grid);
// ||u_a - u_b||_{L2(D)} integrated piecewise exactly (Gauss rules on the polynomial pieces).
double hj_l2_distance(double a, double b, const Domain& domain = {});

// ---- heat kernel -----------------------------------------------------------

// Heat kernel for u_t = u_xx: exp(-x^2 / 4t) / (2 sqrt(pi t)).
double heat_kernel(double x, double t);

struct InitialData {
    ScalarFunction f;
    double support_lo = -1.0;
    double support_hi = 1.0;
    double sup_norm = 1.0;  // bound on |f|, used for the truncation tail estimate
};

struct HeatQuadrature {
    double radius_factor = 10.0;    // window half-width is radius_factor * sqrt(2 t)
    std::optional<double> radius;   // fixed window half-width overrides the factor
    int nodes = 16;                 // Gauss-Legendre nodes per panel
    double panel_factor = 0.5;      // panel width <= panel_factor * sqrt(2 t)
    double max_panel = 0.125;
    double tolerance = 1e-12;       // admissible truncated kernel mass times sup|f|
};

class HeatKernelSolution {
  public:
    explicit HeatKernelSolution(InitialData data, HeatQuadrature quad = {});

    // Throws SolverError when the truncation tail exceeds the tolerance.
    double operator()(double x, double t) const;
    double tail_estimate(double x, double t) const;
    SolutionField solve(const Grid& grid) const;

    // u_t - u_xx from fourth-order central differences with step h in x and t.
    double fd_residual(double x, double t, double h = 1e-3) const;

  private:
    double window_radius(double t) const;

    InitialData data_;
    HeatQuadrature quad_;
};

SolutionField solve_heat_kernel(const InitialData& data, const Grid& grid, const HeatQuadrature& quad = {});

// ---- viscous Burgers, Fourier pseudo-spectral ------------------------------

struct BurgersSettings {
    double mu = -1.0;
    double nu = 1e-3;
    int modes = 16000;     // collocation points on the periodic extension
    double dt = 1e-4;      // upper bound; each output interval is split evenly
    double period_lo = -2.0;
    double period = 4.0;   // sin(pi x / 2) is 4-periodic
};

struct BurgersSolution {
    SolutionField field;           // on the requested output grid
    Eigen::VectorXd native_x;      // periodic collocation points
    Eigen::VectorXd final_profile; // u(native_x, t_final)
    double final_max_slope = 0.0;  // max |u_x(., t_final)| from the spectrum
    double max_mass_drift = 0.0;   // max_t |int u dx - int u_0 dx| over the period
    long steps = 0;
};

// ETDRK4 in time, 2/3-rule dealiasing. Throws SolverError on blow-up.
BurgersSolution solve_burgers_spectral(const BurgersSettings& settings, const Grid& out);

}  // namespace pinnlab
