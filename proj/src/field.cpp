#include "pinnlab/field.hpp"

#include "pinnlab/errors.hpp"
#include "pinnlab/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace pinnlab {

void Grid::validate() const {
    if (nx < 2 || nt < 2) throw std::invalid_argument("grid needs at least 2 points per axis");
    if (!(x_hi > x_lo) || !(t_hi > t_lo)) throw std::invalid_argument("grid spacings must be positive");
}

SolutionField::SolutionField(Grid g, Eigen::MatrixXd v, std::map<std::string, std::string> meta)
    : grid(g), values(std::move(v)), metadata(std::move(meta)) {
    validate();
}

void SolutionField::validate() const {
    grid.validate();
    if (values.rows() != grid.nx || values.cols() != grid.nt)
        throw StructureError("field values are " + std::to_string(values.rows()) + "x" +
                             std::to_string(values.cols()) + ", grid is " + std::to_string(grid.nx) + "x" +
                             std::to_string(grid.nt));
    if (!values.allFinite()) throw std::domain_error("field contains non-finite values");
}

SolutionField SolutionField::tabulate(const Grid& g, const std::function<double(double, double)>& f,
                                      std::map<std::string, std::string> meta) {
    g.validate();
    Eigen::MatrixXd v(g.nx, g.nt);
    for (Eigen::Index j = 0; j < g.nt; ++j)
        for (Eigen::Index i = 0; i < g.nx; ++i) v(i, j) = f(g.x(i), g.t(j));
    return {g, std::move(v), std::move(meta)};
}

double l2_field_error(const SolutionField& a, const SolutionField& b) {
    if (!(a.grid == b.grid)) throw StructureError("l2_field_error: grids differ");
    const Eigen::VectorXd wx = trapezoid_weights(a.grid.nx, a.grid.dx());
    const Eigen::VectorXd wt = trapezoid_weights(a.grid.nt, a.grid.dt());
    const Eigen::MatrixXd d2 = (a.values - b.values).array().square().matrix();
    return std::sqrt(wx.dot(d2 * wt));
}

}  // namespace pinnlab
