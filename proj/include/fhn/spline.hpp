#pragma once

#include <array>
#include <vector>

namespace fhn {

/// Which one-sided limit to take when a point sits exactly on a knot.
enum class KnotSide { Left, Right };

/// Nonzero B-splines at one point: indices first..first+degree with values and
/// up to two derivatives.
struct LocalBasis {
  int first = 0;
  std::vector<std::array<double, 3>> ders;  // [local index][derivative order]
};

/// Clamped B-spline basis of degree m on a 1D partition with interior knot
/// multiplicity m - 1, i.e. piecewise polynomials of degree m that are C^1.
class SplineAxis {
 public:
  SplineAxis() = default;
  SplineAxis(std::vector<double> breakpoints, int degree);

  int degree() const { return degree_; }
  int size() const { return static_cast<int>(knots_.size()) - degree_ - 1; }
  int intervals() const { return static_cast<int>(breaks_.size()) - 1; }
  const std::vector<double>& breakpoints() const { return breaks_; }
  const std::vector<double>& knots() const { return knots_; }

  /// Interval index containing x; on an interior breakpoint `side` decides.
  int locate(double x, KnotSide side = KnotSide::Right) const;

  LocalBasis evaluate(double x, KnotSide side = KnotSide::Right) const;

 private:
  std::vector<double> breaks_;
  std::vector<double> knots_;
  int degree_ = 0;
};

}  // namespace fhn
