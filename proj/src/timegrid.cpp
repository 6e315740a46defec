#include "fhn/timegrid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "fhn/error.hpp"

namespace fhn {

GridMode parse_grid_mode(const std::string& text) {
  if (text == "uniform") return GridMode::Uniform;
  if (text == "graded") return GridMode::Graded;
  throw Error(ErrorKind::InvalidArgument, "unknown time grid mode '" + text + "'");
}

const char* to_string(GridMode mode) { return mode == GridMode::Uniform ? "uniform" : "graded"; }

TimeGrid::TimeGrid(std::vector<double> nodes, GridMode mode) : nodes_(std::move(nodes)), mode_(mode) { validate(); }

void TimeGrid::validate() const {
  FHN_REQUIRE(nodes_.size() >= 2, ErrorKind::InternalConsistency, "time grid needs at least one step");
  for (std::size_t n = 0; n + 1 < nodes_.size(); ++n) {
    FHN_REQUIRE(nodes_[n] < nodes_[n + 1], ErrorKind::InternalConsistency, "time nodes must increase strictly");
  }
  const int N = steps();
  const double scale = nodes_.back();
  for (int n = 1; n < N; ++n) {
    const double prev = local_step(n - 1);
    const double cur = local_step(n);
    // Local steps never decrease.
    FHN_REQUIRE(cur >= prev * (1.0 - 1e-12), ErrorKind::InternalConsistency, "local time steps must be nondecreasing");
    if (mode_ == GridMode::Graded) {
      FHN_REQUIRE(cur - prev > 1e-15 * scale, ErrorKind::InternalConsistency, "graded steps must increase strictly");
      FHN_REQUIRE(node(n) < 0.5 * (node(n - 1) + node(n + 1)), ErrorKind::InternalConsistency,
                  "graded nodes must satisfy t_{n+1} < (t_n + t_{n+2}) / 2");
    }
  }
}

double TimeGrid::max_local_step() const {
  double m = 0.0;
  for (int n = 0; n < steps(); ++n) m = std::max(m, local_step(n));
  return m;
}

double TimeGrid::step_ratio_bound() const { return max_local_step() / local_step(0); }

double TimeGrid::level_time(int k) const { return (k % 2 == 0) ? node(k / 2) : midpoint(k / 2); }

TimeGrid build_graded(double T, int N) {
  FHN_REQUIRE(T > 0.0 && std::isfinite(T), ErrorKind::InvalidArgument, "final time must be positive");
  FHN_REQUIRE(N >= 2, ErrorKind::InvalidArgument, "graded grid needs N >= 2");
  std::vector<double> nodes(static_cast<std::size_t>(N) + 1);
  const double denom = std::numbers::e - 1.0;
  for (int n = 0; n <= N; ++n) nodes[static_cast<std::size_t>(n)] = T * std::expm1(static_cast<double>(n) / N) / denom;
  nodes.front() = 0.0;
  nodes.back() = T;
  return TimeGrid(std::move(nodes), GridMode::Graded);
}

TimeGrid build_uniform(double T, int N) {
  FHN_REQUIRE(T > 0.0 && std::isfinite(T), ErrorKind::InvalidArgument, "final time must be positive");
  FHN_REQUIRE(N >= 1, ErrorKind::InvalidArgument, "uniform grid needs N >= 1");
  std::vector<double> nodes(static_cast<std::size_t>(N) + 1);
  for (int n = 0; n <= N; ++n) nodes[static_cast<std::size_t>(n)] = T * n / N;
  nodes.back() = T;
  return TimeGrid(std::move(nodes), GridMode::Uniform);
}

TimeGrid build_time_grid(GridMode mode, double T, int N) {
  return mode == GridMode::Uniform ? build_uniform(T, N) : build_graded(T, N);
}

int choose_N_for_target(double T, double tau_target, GridMode mode) {
  FHN_REQUIRE(T > 0.0, ErrorKind::InvalidArgument, "final time must be positive");
  FHN_REQUIRE(tau_target > 0.0 && tau_target < 0.5 * T, ErrorKind::InvalidArgument,
              "target local step must lie in (0, T/2)");
  if (mode == GridMode::Uniform) {
    const double ratio = T / (2.0 * tau_target);
    return std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-12))));
  }
  // The largest graded step is the last one, T (e - e^{(N-1)/N}) / (2 (e - 1)),
  // which decreases monotonically in N.
  auto last_step = [T](int N) {
    return 0.5 * T * (std::numbers::e - std::exp(static_cast<double>(N - 1) / N)) / (std::numbers::e - 1.0);
  };
  int lo = 2;
  int hi = 2;
  while (last_step(hi) > tau_target) hi *= 2;
  if (hi == 2) return 2;
  lo = hi / 2;
  while (hi - lo > 1) {
    const int mid = lo + (hi - lo) / 2;
    if (last_step(mid) > tau_target) lo = mid; else hi = mid;
  }
  return hi;
}

}  // namespace fhn
