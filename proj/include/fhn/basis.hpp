#pragma once

#include <array>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fhn/field.hpp"
#include "fhn/mesh.hpp"
#include "fhn/spline.hpp"

namespace fhn {

/// Scalar C^1 spline space of degree m on a rectangular mesh, as the tensor
/// product of two per-axis B-spline bases.
struct SplineSpace {
  Domain domain;
  int degree = 0;
  SplineAxis x_axis;
  SplineAxis y_axis;

  int dim_scalar() const { return x_axis.size() * y_axis.size(); }
};

SplineSpace build_spline_space(const Mesh& mesh, int m);

/// Upper-triangular Q with Q^T G Q = I, computed by modified Gram–Schmidt with
/// one reorthogonalization pass in the inner product induced by `gram`.
/// Column k of Q holds the raw coefficients of the k-th orthonormal function.
Eigen::MatrixXd modified_gram_schmidt(const Eigen::MatrixXd& gram);

/// Ratio of extreme eigenvalues of a symmetric positive semidefinite matrix.
double condition_estimate(const Eigen::MatrixXd& gram);

/// One axis of an orthonormal basis: the active raw B-splines (optionally
/// without the two endpoint-interpolating ones) and their orthonormal
/// combinations, tabulated at the axis collocation points.
struct AxisBasis {
  SplineAxis spline;
  int dropped_front = 0;        // 1 when the left endpoint function is eliminated
  int active = 0;               // number of raw functions kept
  Eigen::MatrixXd gram;         // discrete Gram matrix of the active raw functions
  Eigen::MatrixXd change;       // Q: raw -> orthonormal
  std::array<Eigen::MatrixXd, 3> table;  // [derivative](k, point) at axis points
  Eigen::VectorXd weights;      // axis quadrature weights
  double condition = 1.0;

  int size() const { return active; }
  /// Orthonormal functions (and derivatives) at a single coordinate.
  Eigen::Matrix<double, Eigen::Dynamic, 3> at(double x, KnotSide side = KnotSide::Right) const;
};

struct ComponentBasis {
  AxisBasis x;
  AxisBasis y;
  int size() const { return x.size() * y.size(); }
};

/// Orthonormal basis of W_h = U_h x U_h with respect to the discrete product.
/// Index layout: component block c starts at offset(c); inside a block the
/// function rho_x(i) rho_y(j) has local index i * ny + j.
struct BasisSet {
  Domain domain;
  int degree = 0;
  std::array<bool, 2> dirichlet{false, false};
  std::array<ComponentBasis, 2> comp;

  Eigen::Index offset(int c) const { return c == 0 ? 0 : comp[0].size(); }
  Eigen::Index size() const { return comp[0].size() + comp[1].size(); }
  double gram_condition() const;
};

/// Builds the orthonormal basis. Components flagged in `dirichlet` drop the
/// boundary-interpolating raw functions, so their members vanish on the boundary.
BasisSet orthonormalize(const SplineSpace& space, const CollocationGrid& grid,
                        std::array<bool, 2> dirichlet = {false, false});

struct Point2 {
  double x, y;
};

/// Tables for basis functions at arbitrary points. Row k refers to the
/// nonzero component of rho_k.
struct BasisTables {
  Eigen::MatrixXd value;
  Eigen::MatrixXd grad_x;
  Eigen::MatrixXd grad_y;
};

BasisTables eval_basis(const BasisSet& basis, std::span<const Point2> points);

/// Field with coefficient vector `coeffs` at every collocation point.
FieldValues reconstruct(const BasisSet& basis, const CollocationGrid& grid, const Eigen::VectorXd& coeffs,
                        bool with_gradient = false);

/// Laplacian of the field at every collocation point (component-wise).
std::array<Eigen::VectorXd, 2> reconstruct_laplacian(const BasisSet& basis, const CollocationGrid& grid,
                                                     const Eigen::VectorXd& coeffs);

/// Discrete products (values, rho_k) for every k.
Eigen::VectorXd project_values(const BasisSet& basis, const CollocationGrid& grid,
                               const std::array<Eigen::VectorXd, 2>& values);

/// Field at one point; `sx`/`sy` choose one-sided limits on element edges.
PointSample evaluate(const BasisSet& basis, const Eigen::VectorXd& coeffs, double x, double y,
                     KnotSide sx = KnotSide::Right, KnotSide sy = KnotSide::Right);

}  // namespace fhn
