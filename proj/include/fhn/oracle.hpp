#pragma once

#include <array>
#include <vector>

#include <Eigen/Dense>

#include "fhn/model.hpp"

namespace fhn {

/// Reference solution on an (n+1) x (n+1) vertex lattice. Node (i, j) sits at
/// (x_min + i dx, y_min + j dy) and has index i (n+1) + j.
struct OracleSolution {
  Domain domain;
  int n = 0;
  std::vector<double> times;
  std::vector<std::array<Eigen::VectorXd, 2>> frames;

  double dx() const { return domain.width() / n; }
  double dy() const { return domain.height() / n; }
  double node_x(int i) const { return domain.x_min + i * dx(); }
  double node_y(int j) const { return domain.y_min + j * dy(); }

  /// Bilinear interpolation in a stored frame.
  Vec2 sample(std::size_t frame, double x, double y) const;
  /// Bilinear in space, linear in time between stored frames.
  Vec2 at(double t, double x, double y) const;
};

struct OracleOptions {
  /// Store every k-th step; 0 keeps only the initial and final frames.
  int store_stride = 0;
  double picard_tol = 1e-12;
  int picard_max = 100;
};

/// Second-order centred differences in space (ghost nodes for Robin/Neumann,
/// pinned nodes for Dirichlet), Crank–Nicolson in time with Picard iteration
/// on the reaction and source terms.
OracleSolution oracle_solve(const ProblemSpec& problem, int nx, int nt, const OracleOptions& options = {});

/// max over lattice nodes of |w - exact| / max |exact| at the final frame, per component.
Vec2 oracle_relative_max_error(const OracleSolution& sol, const SpaceTimeField& exact);

}  // namespace fhn
