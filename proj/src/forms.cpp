#include "fhn/forms.hpp"

#include <algorithm>
#include <cmath>

#include "fhn/error.hpp"

namespace fhn {

namespace {

Eigen::VectorXd weights_of(const CollocationGrid& grid) {
  Eigen::VectorXd w(static_cast<Eigen::Index>(grid.points.size()));
  for (std::size_t i = 0; i < grid.points.size(); ++i) w(static_cast<Eigen::Index>(i)) = grid.points[i].weight;
  return w;
}

void check_field(const FieldValues& f, const CollocationGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.points.size());
  FHN_REQUIRE(f.value[0].size() == n && f.value[1].size() == n, ErrorKind::InvalidArgument,
              "field length does not match the collocation grid");
}

}  // namespace

double ip_scalar(const FieldValues& u, const FieldValues& v, const CollocationGrid& grid) {
  check_field(u, grid);
  check_field(v, grid);
  const Eigen::VectorXd w = weights_of(grid);
  return (w.array() * (u.value[0].array() * v.value[0].array() + u.value[1].array() * v.value[1].array())).sum();
}

double ip_grad(const FieldValues& u, const FieldValues& v, const CollocationGrid& grid) {
  check_field(u, grid);
  check_field(v, grid);
  FHN_REQUIRE(u.gradient && v.gradient, ErrorKind::InvalidArgument, "gradient product needs gradients");
  const Eigen::VectorXd w = weights_of(grid);
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(w.size());
  for (int i = 0; i < 4; ++i) acc += (*u.gradient)[i].array() * (*v.gradient)[i].array();
  return (w.array() * acc).sum();
}

double norm_dot(const FieldValues& u, const CollocationGrid& grid) {
  return std::sqrt(std::max(0.0, ip_scalar(u, u, grid)));
}

double norm_grad(const FieldValues& u, const CollocationGrid& grid) {
  return std::sqrt(std::max(0.0, ip_grad(u, u, grid)));
}

double boundary_form(std::span<const PointSample> u, std::span<const PointSample> v, const CollocationGrid& grid,
                     Vec2 scale) {
  if (grid.boundary_points.empty()) return 0.0;
  FHN_REQUIRE(u.size() == grid.boundary_points.size() && v.size() == grid.boundary_points.size(),
              ErrorKind::InvalidArgument, "boundary samples do not match the grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double integrand = v[i].value[0] * scale[0] * u[i].value[0] + v[i].value[1] * scale[1] * u[i].value[1];
    sum += grid.boundary_points[i].weight * integrand;
  }
  return sum;
}

double normal_flux_form(std::span<const PointSample> u, std::span<const PointSample> v, const CollocationGrid& grid) {
  if (grid.boundary_points.empty()) return 0.0;
  FHN_REQUIRE(u.size() == grid.boundary_points.size() && v.size() == grid.boundary_points.size(),
              ErrorKind::InvalidArgument, "boundary samples do not match the grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const auto& n = grid.boundary_points[i].normal;
    double integrand = 0.0;
    for (int c = 0; c < 2; ++c) {
      integrand += v[i].value[c] * (u[i].gradient[c][0] * n[0] + u[i].gradient[c][1] * n[1]);
    }
    sum += grid.boundary_points[i].weight * integrand;
  }
  return sum;
}

double jump_form(std::span<const PointSample> u_minus, std::span<const PointSample> u_plus,
                 std::span<const PointSample> v, const CollocationGrid& grid, Vec2 scale) {
  const std::size_t n = grid.face_points.size();
  if (n == 0) return 0.0;
  FHN_REQUIRE(u_minus.size() == n && u_plus.size() == n && v.size() == n, ErrorKind::InvalidArgument,
              "face samples do not match the grid");
  double sum = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& nm = grid.face_points[i].normal;  // outward for the minus side, inward for plus
    double integrand = 0.0;
    for (int c = 0; c < 2; ++c) {
      const double jump = (u_minus[i].gradient[c][0] - u_plus[i].gradient[c][0]) * nm[0] +
                          (u_minus[i].gradient[c][1] - u_plus[i].gradient[c][1]) * nm[1];
      integrand += v[i].value[c] * scale[c] * jump;
    }
    sum += grid.face_points[i].weight * integrand;
  }
  return sum;
}

std::vector<PointSample> boundary_trace(const BasisSet& basis, const CollocationGrid& grid,
                                        const Eigen::VectorXd& coeffs) {
  std::vector<PointSample> out;
  out.reserve(grid.boundary_points.size());
  for (const BoundaryPoint& bp : grid.boundary_points) out.push_back(evaluate(basis, coeffs, bp.x, bp.y));
  return out;
}

std::pair<std::vector<PointSample>, std::vector<PointSample>> face_traces(const BasisSet& basis,
                                                                          const CollocationGrid& grid,
                                                                          const Eigen::VectorXd& coeffs) {
  std::vector<PointSample> minus;
  std::vector<PointSample> plus;
  minus.reserve(grid.face_points.size());
  plus.reserve(grid.face_points.size());
  for (const FacePoint& fp : grid.face_points) {
    const bool vertical = fp.normal[0] != 0.0;
    minus.push_back(evaluate(basis, coeffs, fp.x, fp.y, vertical ? KnotSide::Left : KnotSide::Right,
                             vertical ? KnotSide::Right : KnotSide::Left));
    plus.push_back(evaluate(basis, coeffs, fp.x, fp.y, KnotSide::Right, KnotSide::Right));
  }
  return {std::move(minus), std::move(plus)};
}

FieldValues sample(const VectorField& f, const CollocationGrid& grid) {
  const auto n = static_cast<Eigen::Index>(grid.points.size());
  FieldValues out;
  out.value[0].resize(n);
  out.value[1].resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& p = grid.points[static_cast<std::size_t>(i)];
    const Vec2 val = f(p.x, p.y);
    FHN_REQUIRE(std::isfinite(val[0]) && std::isfinite(val[1]), ErrorKind::InvalidData,
                "non-finite field value at (" + std::to_string(p.x) + ", " + std::to_string(p.y) + ")");
    out.value[0](i) = val[0];
    out.value[1](i) = val[1];
  }
  return out;
}

Eigen::VectorXd l2_project(const VectorField& f, const BasisSet& basis, const CollocationGrid& grid) {
  return project_values(basis, grid, sample(f, grid).value);
}

IbpTerms integration_by_parts_residual(const BasisSet& basis, const CollocationGrid& grid, const Eigen::VectorXd& u,
                                       const Eigen::VectorXd& v) {
  IbpTerms t;
  const FieldValues uf = reconstruct(basis, grid, u, true);
  const FieldValues vf = reconstruct(basis, grid, v, true);
  FieldValues lap;
  lap.value = reconstruct_laplacian(basis, grid, u);
  t.laplacian_term = ip_scalar(lap, vf, grid);
  t.gradient_term = ip_grad(uf, vf, grid);
  t.boundary_term = normal_flux_form(boundary_trace(basis, grid, u), boundary_trace(basis, grid, v), grid);
  const auto [um, up] = face_traces(basis, grid, u);
  const auto [vm, vp] = face_traces(basis, grid, v);
  (void)vp;
  t.jump_term = jump_form(um, up, vm, grid);
  t.residual = std::abs(t.laplacian_term - (t.boundary_term + t.jump_term - t.gradient_term));
  t.scale = std::max({std::abs(t.laplacian_term), std::abs(t.boundary_term), std::abs(t.jump_term),
                      std::abs(t.gradient_term)});
  return t;
}

}  // namespace fhn
