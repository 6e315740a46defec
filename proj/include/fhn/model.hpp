#pragma once

#include <functional>
#include <string>

#include "fhn/field.hpp"
#include "fhn/mesh.hpp"

namespace fhn {

/// FitzHugh–Nagumo parameters. Defaults give f2(u, v) = u - v with theta3 = 1/2.
struct FhnParams {
  Vec2 gamma{1.0, 1.0};  // diffusivities
  Vec2 beta{0.0, 0.0};   // Robin coefficients
  double theta1 = 1.0;
  double theta2 = 1.0;
  double theta3 = 0.5;
  double eps0 = 1.0;
  double theta0 = 0.0;

  void validate() const;
};

/// F(w) = (u(1-u)(u-theta3) - v, eps0 (theta1 u - theta2 v - theta0)).
Vec2 reaction_F(double u, double v, const FhnParams& p);

/// Closed-form Lipschitz constant of F on functions bounded by c_sup in the
/// discrete norm, for an L-point rule with largest weight `max_weight` and
/// overlap parameter `p_overlap`.
double lipschitz_constant_CF(const FhnParams& p, double c_sup, int L, int p_overlap, double max_weight);

enum class BoundaryKind { Robin, Dirichlet };

/// Source term; may depend on the current discrete state (u, v).
using SourceFn = std::function<Vec2(double x, double y, double t, double u, double v)>;
using SpaceTimeField = std::function<Vec2(double x, double y, double t)>;

struct ProblemSpec {
  std::string name;
  Domain domain;
  double final_time = 1.0;
  FhnParams params;
  /// Per-component boundary treatment. Dirichlet data are homogeneous.
  std::array<BoundaryKind, 2> boundary{BoundaryKind::Robin, BoundaryKind::Robin};
  VectorField initial;
  SourceFn source;        // empty means zero
  SpaceTimeField exact;   // empty when no closed form is known

  bool has_exact() const { return static_cast<bool>(exact); }
  /// F(w) + s(x, y, t, w).
  Vec2 forcing(double x, double y, double t, double u, double v) const;
  void validate() const;
};

/// The three reference experiments (ids 1, 2, 3).
ProblemSpec example_problem(int id);

}  // namespace fhn
