#include "fhn/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "fhn/error.hpp"

namespace fhn {

namespace {

std::array<Eigen::VectorXd, 2> error_values(const BasisSet& basis, const CollocationGrid& grid,
                                            const SpaceTimeField& reference, double t, const Eigen::VectorXd& c) {
  FieldValues w = reconstruct(basis, grid, c);
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const Vec2 ex = reference(grid.points[p].x, grid.points[p].y, t);
    const auto i = static_cast<Eigen::Index>(p);
    w.value[0](i) -= ex[0];
    w.value[1](i) -= ex[1];
  }
  return w.value;
}

}  // namespace

double discrete_norm(const Eigen::VectorXd& values, const CollocationGrid& grid) {
  FHN_REQUIRE(values.size() == static_cast<Eigen::Index>(grid.size()), ErrorKind::InvalidArgument,
              "field length does not match the grid");
  double s = 0.0;
  for (std::size_t p = 0; p < grid.size(); ++p) {
    const double v = values(static_cast<Eigen::Index>(p));
    s += grid.points[p].weight * v * v;
  }
  return std::sqrt(s);
}

ErrorTracker::ErrorTracker(const BasisSet& basis, const CollocationGrid& grid, SpaceTimeField reference)
    : basis_(&basis), grid_(&grid), reference_(std::move(reference)) {
  FHN_REQUIRE(static_cast<bool>(reference_), ErrorKind::InvalidArgument, "no exact solution to compare against");
}

Vec2 ErrorTracker::observe(double t, const Eigen::VectorXd& coeffs) {
  const auto e = error_values(*basis_, *grid_, reference_, t, coeffs);
  const Vec2 err{discrete_norm(e[0], *grid_), discrete_norm(e[1], *grid_)};
  for (int c = 0; c < 2; ++c) {
    // NaN must win the max so a blown-up run never looks accurate.
    if (std::isnan(max_[c])) continue;
    if (!(err[c] <= max_[c])) max_[c] = err[c];
  }
  ++levels_;
  return err;
}

Vec2 error_linf_l2(const Trajectory& trajectory, const SpaceTimeField& exact, const BasisSet& basis,
                   const CollocationGrid& grid) {
  ErrorTracker tracker(basis, grid, exact);
  for (std::size_t k = 0; k < trajectory.coeffs.size(); ++k) tracker.observe(trajectory.times[k], trajectory.coeffs[k]);
  return tracker.max_error();
}

double convergence_order(double coarse_err, double fine_err) {
  FHN_REQUIRE(coarse_err > 0.0 && fine_err > 0.0 && std::isfinite(coarse_err) && std::isfinite(fine_err),
              ErrorKind::UndefinedOrder,
              "convergence order needs positive finite errors, got " + std::to_string(coarse_err) + " and " +
                  std::to_string(fine_err));
  return std::log2(coarse_err / fine_err);
}

std::vector<double> stability_functional(const Trajectory& trajectory, const SpaceTimeField& reference,
                                         const TimeGrid& timegrid, const BasisSet& basis,
                                         const CollocationGrid& grid) {
  const int N = timegrid.steps();
  const std::size_t levels = static_cast<std::size_t>(2 * N + 1);
  FHN_REQUIRE(trajectory.coeffs.size() == levels, ErrorKind::InvalidArgument,
              "stability functional needs every half-level of the run");
  std::vector<std::array<Eigen::VectorXd, 2>> err(levels);
  std::vector<double> sq(levels);
  for (std::size_t k = 0; k < levels; ++k) {
    FHN_REQUIRE(trajectory.levels[k] == static_cast<int>(k), ErrorKind::InvalidArgument, "trajectory levels out of order");
    err[k] = error_values(basis, grid, reference, trajectory.times[k], trajectory.coeffs[k]);
    const double a = discrete_norm(err[k][0], grid), b = discrete_norm(err[k][1], grid);
    sq[k] = a * a + b * b;
  }
  auto diff_sq = [&](std::size_t k1, std::size_t k2) {
    const double a = discrete_norm(err[k1][0] - err[k2][0], grid);
    const double b = discrete_norm(err[k1][1] - err[k2][1], grid);
    return a * a + b * b;
  };

  std::vector<double> out(static_cast<std::size_t>(N));
  for (int n = 0; n < N; ++n) {
    const auto k = static_cast<std::size_t>(2 * n);
    double v = sq[k + 2] + sq[k + 1] + sq[k];
    if (n >= 1) {
      const double tl = timegrid.local_step(n - 1);
      for (int s = 1; s <= n - 1; ++s) {
        const double ts = timegrid.local_step(s), tp = timegrid.local_step(s - 1);
        const auto ks = static_cast<std::size_t>(2 * s);
        v += 2.0 * (ts * ts - tp * tp) / (tl * tl) * diff_sq(ks + 1, ks);
      }
    }
    out[static_cast<std::size_t>(n)] = v;
  }
  return out;
}

double trend_slope(const std::vector<double>& y) {
  const std::size_t n = y.size();
  if (n < 2) return 0.0;
  double mx = 0.5 * static_cast<double>(n - 1), my = 0.0;
  for (double v : y) my += v;
  my /= static_cast<double>(n);
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const double dx = static_cast<double>(i) - mx;
    sxy += dx * (y[i] - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

}  // namespace fhn
