#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace fhn {

struct Domain {
  double x_min = 0.0;
  double x_max = 1.0;
  double y_min = 0.0;
  double y_max = 1.0;

  double width() const { return x_max - x_min; }
  double height() const { return y_max - y_min; }
  double area() const { return width() * height(); }
  double perimeter() const { return 2.0 * (width() + height()); }
  bool contains(double x, double y, double tol = 1e-12) const;
  void validate() const;
};

enum class Side { Left, Right, Bottom, Top };

std::array<double, 2> outward_normal(Side side);

struct Rect {
  double x0, x1, y0, y1;
  double area() const { return (x1 - x0) * (y1 - y0); }
  double diameter() const;
};

struct BoundaryEdge {
  std::size_t element;
  Side side;
  std::array<double, 2> normal;
  double length;
};

/// Uniform tensor-product partition of a rectangle. Element (ex, ey) has index
/// ex * ny + ey.
struct Mesh {
  Domain domain;
  int nx = 0;
  int ny = 0;
  std::vector<double> x_lines;  // nx + 1 entries
  std::vector<double> y_lines;  // ny + 1 entries
  std::vector<Rect> elements;
  std::vector<BoundaryEdge> boundary_edges;
  double h = 0.0;  // max element diameter

  std::size_t element_index(int ex, int ey) const {
    return static_cast<std::size_t>(ex) * static_cast<std::size_t>(ny) + static_cast<std::size_t>(ey);
  }
};

/// n = ceil(side / h_target) elements per axis.
Mesh build_mesh(const Domain& domain, double h_target);
Mesh build_mesh(const Domain& domain, int nx, int ny);

/// L-point Gauss–Legendre rule mapped to [0, 1].
struct GaussRule {
  std::vector<double> nodes;
  std::vector<double> weights;
  int size() const { return static_cast<int>(nodes.size()); }
};

GaussRule gauss_rule(int L);

/// Gauss points of one axis: L points per interval, in increasing order.
struct AxisPoints {
  std::vector<double> points;
  std::vector<double> weights;  // c_l scaled by interval length
  std::vector<int> interval;
  std::size_t size() const { return points.size(); }
};

AxisPoints axis_points(const std::vector<double>& lines, const GaussRule& rule);

struct CollocationPoint {
  double x, y;
  double weight;  // c_{l1} c_{l2} |Q_i|
  std::size_t element;
};

struct BoundaryPoint {
  double x, y;
  double weight;  // c_l times edge length
  std::array<double, 2> normal;
  Side side;
  std::size_t element;
};

/// Gauss point on an interior face shared by elements `minus` and `plus`;
/// `normal` points out of `minus`.
struct FacePoint {
  double x, y;
  double weight;
  std::array<double, 2> normal;
  std::size_t minus;
  std::size_t plus;
};

struct InteriorFace {
  std::size_t minus;
  std::size_t plus;
  std::array<double, 2> normal;
  double length;
};

/// Tensor-product Gauss collocation grid. Point (px, py) has index
/// px * y_axis.size() + py, so per-point arrays can be viewed as
/// column-major (Py x Px) matrices.
struct CollocationGrid {
  GaussRule rule;
  AxisPoints x_axis;
  AxisPoints y_axis;
  std::vector<CollocationPoint> points;
  std::vector<InteriorFace> interior_faces;
  std::vector<FacePoint> face_points;
  std::vector<BoundaryPoint> boundary_points;

  std::size_t size() const { return points.size(); }
};

CollocationGrid build_collocation(const Mesh& mesh, const GaussRule& rule);

}  // namespace fhn
