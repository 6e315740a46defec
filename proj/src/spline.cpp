#include "fhn/spline.hpp"

#include <algorithm>
#include <cmath>
#include <utility>

#include "fhn/error.hpp"

namespace fhn {

SplineAxis::SplineAxis(std::vector<double> breakpoints, int degree)
    : breaks_(std::move(breakpoints)), degree_(degree) {
  FHN_REQUIRE(degree_ >= 2, ErrorKind::InvalidArgument, "C^1 splines need degree >= 2");
  FHN_REQUIRE(breaks_.size() >= 2, ErrorKind::InvalidArgument, "need at least one interval");
  for (std::size_t i = 0; i + 1 < breaks_.size(); ++i) {
    FHN_REQUIRE(breaks_[i] < breaks_[i + 1], ErrorKind::InvalidArgument, "breakpoints must increase strictly");
  }
  knots_.assign(static_cast<std::size_t>(degree_) + 1, breaks_.front());
  for (std::size_t i = 1; i + 1 < breaks_.size(); ++i) {
    knots_.insert(knots_.end(), static_cast<std::size_t>(degree_ - 1), breaks_[i]);
  }
  knots_.insert(knots_.end(), static_cast<std::size_t>(degree_) + 1, breaks_.back());
}

int SplineAxis::locate(double x, KnotSide side) const {
  const int n = intervals();
  if (x <= breaks_.front()) return 0;
  if (x >= breaks_.back()) return n - 1;
  auto it = side == KnotSide::Right ? std::upper_bound(breaks_.begin(), breaks_.end(), x)
                                    : std::lower_bound(breaks_.begin(), breaks_.end(), x);
  const int idx = static_cast<int>(it - breaks_.begin()) - 1;
  return std::clamp(idx, 0, n - 1);
}

LocalBasis SplineAxis::evaluate(double x, KnotSide side) const {
  const int p = degree_;
  const int cell = locate(x, side);
  // Knot span: last knot index with knots_[span] == breaks_[cell].
  const int span = p + cell * (p - 1);

  // Derivatives of the nonzero basis functions (de Boor / Cox recursion with
  // the triangular table of knot differences).
  std::vector<std::vector<double>> ndu(p + 1, std::vector<double>(p + 1, 0.0));
  std::vector<double> left(p + 1), right(p + 1);
  ndu[0][0] = 1.0;
  for (int j = 1; j <= p; ++j) {
    left[j] = x - knots_[span + 1 - j];
    right[j] = knots_[span + j] - x;
    double saved = 0.0;
    for (int r = 0; r < j; ++r) {
      ndu[j][r] = right[r + 1] + left[j - r];
      const double temp = ndu[r][j - 1] / ndu[j][r];
      ndu[r][j] = saved + right[r + 1] * temp;
      saved = left[j - r] * temp;
    }
    ndu[j][j] = saved;
  }

  const int max_order = std::min(2, p);
  LocalBasis out;
  out.first = span - p;
  out.ders.assign(p + 1, {0.0, 0.0, 0.0});
  for (int j = 0; j <= p; ++j) out.ders[j][0] = ndu[j][p];

  std::vector<std::vector<double>> a(2, std::vector<double>(p + 1, 0.0));
  for (int r = 0; r <= p; ++r) {
    int s1 = 0;
    int s2 = 1;
    a[0][0] = 1.0;
    for (int k = 1; k <= max_order; ++k) {
      double d = 0.0;
      const int rk = r - k;
      const int pk = p - k;
      if (r >= k) {
        a[s2][0] = a[s1][0] / ndu[pk + 1][rk];
        d = a[s2][0] * ndu[rk][pk];
      }
      const int j1 = rk >= -1 ? 1 : -rk;
      const int j2 = (r - 1 <= pk) ? k - 1 : p - r;
      for (int j = j1; j <= j2; ++j) {
        a[s2][j] = (a[s1][j] - a[s1][j - 1]) / ndu[pk + 1][rk + j];
        d += a[s2][j] * ndu[rk + j][pk];
      }
      if (r <= pk) {
        a[s2][k] = -a[s1][k - 1] / ndu[pk + 1][r];
        d += a[s2][k] * ndu[r][pk];
      }
      out.ders[r][k] = d;
      std::swap(s1, s2);
    }
  }
  double factor = p;
  for (int k = 1; k <= max_order; ++k) {
    for (int j = 0; j <= p; ++j) out.ders[j][k] *= factor;
    factor *= (p - k);
  }
  return out;
}

}  // namespace fhn
