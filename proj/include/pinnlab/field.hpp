#pragma once

#include <Eigen/Dense>

#include <functional>
#include <map>
#include <string>

namespace pinnlab {

// Equispaced rectangular (x, t) grid.
struct Grid {
    double x_lo = -1.0;
    double x_hi = 1.0;
    Eigen::Index nx = 201;
    double t_lo = 0.0;
    double t_hi = 1.0;
    Eigen::Index nt = 101;

    double dx() const { return (x_hi - x_lo) / double(nx - 1); }
    double dt() const { return (t_hi - t_lo) / double(nt - 1); }
    double x(Eigen::Index i) const { return i + 1 == nx ? x_hi : x_lo + double(i) * dx(); }
    double t(Eigen::Index j) const { return j + 1 == nt ? t_hi : t_lo + double(j) * dt(); }
    void validate() const;

    bool operator==(const Grid&) const = default;
};

// Values u(x_i, t_j) stored nx x nt.
struct SolutionField {
    Grid grid;
    Eigen::MatrixXd values;
    std::map<std::string, std::string> metadata;

    SolutionField() = default;
    SolutionField(Grid g, Eigen::MatrixXd v, std::map<std::string, std::string> meta = {});

    double at(Eigen::Index i, Eigen::Index j) const { return values(i, j); }
    void validate() const;

    friend bool operator==(const SolutionField& a, const SolutionField& b) {
        return a.grid == b.grid && a.metadata == b.metadata && a.values.rows() == b.values.rows() &&
               a.values.cols() == b.values.cols() && a.values == b.values;
    }

    static SolutionField tabulate(const Grid& g, const std::function<double(double, double)>& f,
                                  std::map<std::string, std::string> meta = {});
};

// Space-time L2 distance with composite trapezoid weights. Grids must match.
double l2_field_error(const SolutionField& a, const SolutionField& b);

}  // namespace pinnlab
