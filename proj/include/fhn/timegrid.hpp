#pragma once

#include <string>
#include <vector>

namespace fhn {

enum class GridMode { Uniform, Graded };

GridMode parse_grid_mode(const std::string& text);
const char* to_string(GridMode mode);

/// Macro nodes t_0..t_N with exact midpoints. The local step of macro
/// interval n is tau_n = (t_{n+1} - t_n) / 2, which is both t_{n+1/2} - t_n
/// and t_{n+1} - t_{n+1/2}.
class TimeGrid {
 public:
  TimeGrid(std::vector<double> nodes, GridMode mode);

  GridMode mode() const { return mode_; }
  int steps() const { return static_cast<int>(nodes_.size()) - 1; }
  double final_time() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }
  double node(int n) const { return nodes_[static_cast<std::size_t>(n)]; }
  double midpoint(int n) const { return 0.5 * (node(n) + node(n + 1)); }
  double local_step(int n) const { return 0.5 * (node(n + 1) - node(n)); }
  double max_local_step() const;
  /// max_s tau_s / tau_0.
  double step_ratio_bound() const;

  /// Time of half-level k: k even is node k/2, k odd is midpoint (k-1)/2.
  double level_time(int k) const;

 private:
  void validate() const;

  std::vector<double> nodes_;
  GridMode mode_;
};

/// t_n = T (e^{n/N} - 1) / (e - 1).
TimeGrid build_graded(double T, int N);
TimeGrid build_uniform(double T, int N);
TimeGrid build_time_grid(GridMode mode, double T, int N);

/// Smallest N whose grid has max local step <= tau_target.
int choose_N_for_target(double T, double tau_target, GridMode mode);

}  // namespace fhn
