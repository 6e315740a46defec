#pragma once

#include <span>
#include <vector>

#include <Eigen/Dense>

#include "fhn/basis.hpp"
#include "fhn/field.hpp"
#include "fhn/mesh.hpp"

namespace fhn {

/// Discrete product (U, V)_. : weighted sum of U^t V over all collocation points.
double ip_scalar(const FieldValues& u, const FieldValues& v, const CollocationGrid& grid);

/// Discrete gradient product (grad U, grad V)_{*,.}; both fields need gradients.
double ip_grad(const FieldValues& u, const FieldValues& v, const CollocationGrid& grid);

double norm_dot(const FieldValues& u, const CollocationGrid& grid);
double norm_grad(const FieldValues& u, const CollocationGrid& grid);

/// Boundary form with Robin substitution: sum over boundary Gauss points of
/// V^t (scale .* U), where the scheme passes scale = gamma .* beta.
double boundary_form(std::span<const PointSample> u, std::span<const PointSample> v, const CollocationGrid& grid,
                     Vec2 scale = {1.0, 1.0});

/// Boundary flux form <U, V>: sum over boundary Gauss points of V^t (grad U) n.
double normal_flux_form(std::span<const PointSample> u, std::span<const PointSample> v, const CollocationGrid& grid);

/// Interior jump form <U, V>_. : sum over interior face Gauss points of
/// V^t (scale .* [[grad U]]). `u_minus`/`u_plus` are one-sided traces.
double jump_form(std::span<const PointSample> u_minus, std::span<const PointSample> u_plus,
                 std::span<const PointSample> v, const CollocationGrid& grid, Vec2 scale = {1.0, 1.0});

/// Samples a field at the boundary points of the grid.
std::vector<PointSample> boundary_trace(const BasisSet& basis, const CollocationGrid& grid,
                                        const Eigen::VectorXd& coeffs);

/// One-sided traces at the interior face points (minus side, plus side).
std::pair<std::vector<PointSample>, std::vector<PointSample>> face_traces(const BasisSet& basis,
                                                                          const CollocationGrid& grid,
                                                                          const Eigen::VectorXd& coeffs);

/// Evaluates a vector field at every collocation point.
FieldValues sample(const VectorField& f, const CollocationGrid& grid);

/// Coefficients c_k = (f, rho_k)_. of the discrete L2 projection.
Eigen::VectorXd l2_project(const VectorField& f, const BasisSet& basis, const CollocationGrid& grid);

struct IbpTerms {
  double laplacian_term = 0.0;  // (Lap U, V)_.
  double boundary_term = 0.0;   // <U, V>
  double jump_term = 0.0;       // <U, V>_.
  double gradient_term = 0.0;   // (grad U, grad V)_{*,.}
  double residual = 0.0;        // |lap - (bnd + jump - grad)|
  double scale = 0.0;           // max magnitude of the four terms
};

/// Integration-by-parts identity evaluated for two members of the space.
IbpTerms integration_by_parts_residual(const BasisSet& basis, const CollocationGrid& grid, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& v);

}  // namespace fhn
