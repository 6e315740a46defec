#pragma once

#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "fhn/basis.hpp"
#include "fhn/mesh.hpp"
#include "fhn/model.hpp"
#include "fhn/stepper.hpp"
#include "fhn/timegrid.hpp"

namespace fhn {

/// Errors in the max-over-levels discrete L2 norm, per component.
struct ErrorReport {
  Vec2 error{0.0, 0.0};
  double h = 0.0;
  double tau = 0.0;
  std::optional<Vec2> order;  // vs the previous (coarser) report
  double wall_seconds = 0.0;
};

/// Discrete L2 norm of a per-point field.
double discrete_norm(const Eigen::VectorXd& values, const CollocationGrid& grid);

/// Streaming version of error_linf_l2; feed it levels as a run observer.
class ErrorTracker {
 public:
  ErrorTracker(const BasisSet& basis, const CollocationGrid& grid, SpaceTimeField reference);

  /// Per-component error at one level; updates the running maximum.
  Vec2 observe(double t, const Eigen::VectorXd& coeffs);
  Vec2 max_error() const { return max_; }
  int levels() const { return levels_; }

 private:
  const BasisSet* basis_;
  const CollocationGrid* grid_;
  SpaceTimeField reference_;
  Vec2 max_{0.0, 0.0};
  int levels_ = 0;
};

/// max over stored levels (nodes and midpoints) of ||w_h - w||, per component.
Vec2 error_linf_l2(const Trajectory& trajectory, const SpaceTimeField& exact, const BasisSet& basis,
                   const CollocationGrid& grid);

/// log2(coarse / fine); both errors must be positive and finite.
double convergence_order(double coarse_err, double fine_err);

/// For n = 0..N-1: ||e^{n+1}||^2 + ||e^{n+1/2}||^2 + ||e^n||^2 plus the
/// weighted half-step sum over s = 1..n-1. The trajectory must hold every level.
std::vector<double> stability_functional(const Trajectory& trajectory, const SpaceTimeField& reference,
                                         const TimeGrid& timegrid, const BasisSet& basis,
                                         const CollocationGrid& grid);

/// Least-squares slope of y against its index.
double trend_slope(const std::vector<double>& y);

}  // namespace fhn
