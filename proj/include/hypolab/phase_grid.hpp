#pragma once

#include <Eigen/Core>

#include <string>
#include <vector>

#include "hypolab/domain.hpp"

namespace hypo {

/// Tensor grid on position x velocity phase space (d = 1).
/// x nodes are periodic with uniform weight hx (torus: x_k = k hx,
/// line box: cell centers); v nodes span [-vmax, vmax] with trapezoid weights.
struct PhaseGrid {
  PositionDomain domain;
  int nx = 0, nv = 0;
  double vmax = 6.0;
  double hx = 0.0, hv = 0.0;
  std::vector<double> xs, vs, wv;

  static PhaseGrid make(const PositionDomain& domain, int nx, int nv, double vmax = 6.0);

  bool compatible(const PhaseGrid& other) const {
    return nx == other.nx && nv == other.nv && vmax == other.vmax &&
           domain.kind == other.domain.kind && domain.extent == other.domain.extent;
  }
};

/// Nonnegative density on a PhaseGrid; values(i, j) = f(x_i, v_j).
struct DensityField {
  PhaseGrid grid;
  Eigen::ArrayXXd values;  // nx rows, nv cols

  static DensityField zero(const PhaseGrid& grid) {
    DensityField f;
    f.grid = grid;
    f.values = Eigen::ArrayXXd::Zero(grid.nx, grid.nv);
    return f;
  }

  double mass() const;
  void normalize();  // throws EvaluationError on nonpositive mass
  /// x-marginal rho(x_i) = sum_j f(i,j) wv_j
  std::vector<double> x_marginal() const;
  double min_value() const { return values.minCoeff(); }
};

double l1_distance(const DensityField& f, const DensityField& g);

void write_density_csv(const DensityField& f, const std::string& path);
DensityField read_density_csv(const std::string& path, const PositionDomain& domain);

}  // namespace hypo
