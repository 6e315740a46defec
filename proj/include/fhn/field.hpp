#pragma once

#include <array>
#include <functional>
#include <optional>

#include <Eigen/Dense>

namespace fhn {

using Vec2 = std::array<double, 2>;

/// Values of a two-component field at every collocation point, optionally with
/// gradients. gradient[2 * c + a] is d(component c)/d(axis a).
struct FieldValues {
  std::array<Eigen::VectorXd, 2> value;
  std::optional<std::array<Eigen::VectorXd, 4>> gradient;

  Eigen::Index size() const { return value[0].size(); }
};

/// Value, gradient and Laplacian of a two-component field at a single point.
struct PointSample {
  Vec2 value{0.0, 0.0};
  std::array<Vec2, 2> gradient{};  // gradient[c] = (d/dx, d/dy)
  Vec2 laplacian{0.0, 0.0};
};

using VectorField = std::function<Vec2(double x, double y)>;

}  // namespace fhn
