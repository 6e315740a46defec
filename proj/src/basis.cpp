#include "fhn/basis.hpp"

#include <cmath>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "fhn/error.hpp"

namespace fhn {

namespace {

constexpr double kMaxGramCondition = 1e14;

using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using MatMap = Eigen::Map<Eigen::MatrixXd>;

AxisBasis build_axis(const SplineAxis& spline, const AxisPoints& points, bool drop_ends) {
  AxisBasis axis;
  axis.spline = spline;
  axis.dropped_front = drop_ends ? 1 : 0;
  axis.active = spline.size() - (drop_ends ? 2 : 0);
  FHN_REQUIRE(axis.active > 0, ErrorKind::InvalidArgument, "axis has no free functions after boundary elimination");

  const Eigen::Index n = axis.active;
  const Eigen::Index np = static_cast<Eigen::Index>(points.size());
  std::array<Eigen::MatrixXd, 3> raw;
  for (auto& r : raw) r = Eigen::MatrixXd::Zero(n, np);
  for (Eigen::Index p = 0; p < np; ++p) {
    const LocalBasis local = spline.evaluate(points.points[static_cast<std::size_t>(p)]);
    for (int j = 0; j < static_cast<int>(local.ders.size()); ++j) {
      const int k = local.first + j - axis.dropped_front;
      if (k < 0 || k >= n) continue;
      for (int d = 0; d < 3; ++d) raw[d](k, p) = local.ders[j][d];
    }
  }
  axis.weights = Eigen::Map<const Eigen::VectorXd>(points.weights.data(), np);
  axis.gram = raw[0] * axis.weights.asDiagonal() * raw[0].transpose();
  axis.condition = condition_estimate(axis.gram);
  axis.change = modified_gram_schmidt(axis.gram);
  for (int d = 0; d < 3; ++d) axis.table[d] = axis.change.transpose() * raw[d];
  return axis;
}

}  // namespace

SplineSpace build_spline_space(const Mesh& mesh, int m) {
  FHN_REQUIRE(m >= 3, ErrorKind::InvalidArgument, "spline degree must be at least 3, got " + std::to_string(m));
  SplineSpace space;
  space.domain = mesh.domain;
  space.degree = m;
  space.x_axis = SplineAxis(mesh.x_lines, m);
  space.y_axis = SplineAxis(mesh.y_lines, m);
  return space;
}

Eigen::MatrixXd modified_gram_schmidt(const Eigen::MatrixXd& gram) {
  FHN_REQUIRE(gram.rows() == gram.cols(), ErrorKind::InvalidArgument, "Gram matrix must be square");
  const Eigen::Index n = gram.rows();
  Eigen::MatrixXd q = Eigen::MatrixXd::Zero(n, n);
  Eigen::MatrixXd gq = Eigen::MatrixXd::Zero(n, n);  // G * q_j, cached
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::VectorXd v = Eigen::VectorXd::Zero(n);
    v(k) = 1.0;
    for (int pass = 0; pass < 2; ++pass) {
      for (Eigen::Index j = 0; j < k; ++j) {
        const double r = gq.col(j).dot(v);
        v.noalias() -= r * q.col(j);
      }
    }
    const Eigen::VectorXd gv = gram * v;
    const double nrm2 = v.dot(gv);
    FHN_REQUIRE(nrm2 > 0.0 && std::isfinite(nrm2), ErrorKind::IllConditionedBasis,
                "Gram–Schmidt met a (numerically) dependent function at index " + std::to_string(k));
    const double nrm = std::sqrt(nrm2);
    q.col(k) = v / nrm;
    gq.col(k) = gv / nrm;
  }
  return q;
}

double condition_estimate(const Eigen::MatrixXd& gram) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
  const double lo = eig.eigenvalues().minCoeff();
  const double hi = eig.eigenvalues().maxCoeff();
  if (lo <= 0.0) return std::numeric_limits<double>::infinity();
  return hi / lo;
}

Eigen::Matrix<double, Eigen::Dynamic, 3> AxisBasis::at(double x, KnotSide side) const {
  const LocalBasis local = spline.evaluate(x, side);
  Eigen::Matrix<double, Eigen::Dynamic, 3> raw = Eigen::Matrix<double, Eigen::Dynamic, 3>::Zero(active, 3);
  for (int j = 0; j < static_cast<int>(local.ders.size()); ++j) {
    const int k = local.first + j - dropped_front;
    if (k < 0 || k >= active) continue;
    for (int d = 0; d < 3; ++d) raw(k, d) = local.ders[j][d];
  }
  return change.transpose() * raw;
}

double BasisSet::gram_condition() const {
  double worst = 1.0;
  for (const auto& c : comp) worst = std::max(worst, c.x.condition * c.y.condition);
  return worst;
}

BasisSet orthonormalize(const SplineSpace& space, const CollocationGrid& grid, std::array<bool, 2> dirichlet) {
  FHN_REQUIRE(space.degree >= 3, ErrorKind::InvalidArgument, "spline space not initialized");
  BasisSet basis;
  basis.domain = space.domain;
  basis.degree = space.degree;
  basis.dirichlet = dirichlet;
  for (int c = 0; c < 2; ++c) {
    basis.comp[c].x = build_axis(space.x_axis, grid.x_axis, dirichlet[c]);
    basis.comp[c].y = build_axis(space.y_axis, grid.y_axis, dirichlet[c]);
  }
  const double cond = basis.gram_condition();
  FHN_REQUIRE(cond <= kMaxGramCondition, ErrorKind::IllConditionedBasis,
              "discrete Gram matrix condition estimate " + std::to_string(cond) +
                  " exceeds 1e14; increase L or coarsen the spline space");
  return basis;
}

BasisTables eval_basis(const BasisSet& basis, std::span<const Point2> points) {
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  BasisTables t{Eigen::MatrixXd::Zero(basis.size(), n), Eigen::MatrixXd::Zero(basis.size(), n),
                Eigen::MatrixXd::Zero(basis.size(), n)};
  for (Eigen::Index p = 0; p < n; ++p) {
    const Point2 pt = points[static_cast<std::size_t>(p)];
    FHN_REQUIRE(basis.domain.contains(pt.x, pt.y), ErrorKind::OutOfDomain,
                "evaluation point (" + std::to_string(pt.x) + ", " + std::to_string(pt.y) + ") lies outside the domain");
    for (int c = 0; c < 2; ++c) {
      const ComponentBasis& cb = basis.comp[c];
      const auto rx = cb.x.at(pt.x);
      const auto ry = cb.y.at(pt.y);
      const Eigen::Index off = basis.offset(c);
      for (int i = 0; i < cb.x.size(); ++i) {
        for (int j = 0; j < cb.y.size(); ++j) {
          const Eigen::Index k = off + static_cast<Eigen::Index>(i) * cb.y.size() + j;
          t.value(k, p) = rx(i, 0) * ry(j, 0);
          t.grad_x(k, p) = rx(i, 1) * ry(j, 0);
          t.grad_y(k, p) = rx(i, 0) * ry(j, 1);
        }
      }
    }
  }
  return t;
}

FieldValues reconstruct(const BasisSet& basis, const CollocationGrid& grid, const Eigen::VectorXd& coeffs,
                        bool with_gradient) {
  FHN_REQUIRE(coeffs.size() == basis.size(), ErrorKind::InvalidArgument, "coefficient vector has wrong length");
  const Eigen::Index px = static_cast<Eigen::Index>(grid.x_axis.size());
  const Eigen::Index py = static_cast<Eigen::Index>(grid.y_axis.size());
  FieldValues f;
  std::array<Eigen::VectorXd, 4> grad;
  for (int c = 0; c < 2; ++c) {
    const ComponentBasis& cb = basis.comp[c];
    FHN_REQUIRE(cb.x.table[0].cols() == px && cb.y.table[0].cols() == py, ErrorKind::InvalidArgument,
                "basis was tabulated on a different collocation grid");
    const ConstMatMap ct(coeffs.data() + basis.offset(c), cb.y.size(), cb.x.size());
    f.value[c].resize(px * py);
    MatMap(f.value[c].data(), py, px).noalias() = cb.y.table[0].transpose() * (ct * cb.x.table[0]);
    if (with_gradient) {
      grad[2 * c].resize(px * py);
      grad[2 * c + 1].resize(px * py);
      MatMap(grad[2 * c].data(), py, px).noalias() = cb.y.table[0].transpose() * (ct * cb.x.table[1]);
      MatMap(grad[2 * c + 1].data(), py, px).noalias() = cb.y.table[1].transpose() * (ct * cb.x.table[0]);
    }
  }
  if (with_gradient) f.gradient = std::move(grad);
  return f;
}

std::array<Eigen::VectorXd, 2> reconstruct_laplacian(const BasisSet& basis, const CollocationGrid& grid,
                                                     const Eigen::VectorXd& coeffs) {
  FHN_REQUIRE(coeffs.size() == basis.size(), ErrorKind::InvalidArgument, "coefficient vector has wrong length");
  const Eigen::Index px = static_cast<Eigen::Index>(grid.x_axis.size());
  const Eigen::Index py = static_cast<Eigen::Index>(grid.y_axis.size());
  std::array<Eigen::VectorXd, 2> lap;
  for (int c = 0; c < 2; ++c) {
    const ComponentBasis& cb = basis.comp[c];
    const ConstMatMap ct(coeffs.data() + basis.offset(c), cb.y.size(), cb.x.size());
    lap[c].resize(px * py);
    MatMap(lap[c].data(), py, px).noalias() =
        cb.y.table[0].transpose() * (ct * cb.x.table[2]) + cb.y.table[2].transpose() * (ct * cb.x.table[0]);
  }
  return lap;
}

Eigen::VectorXd project_values(const BasisSet& basis, const CollocationGrid& grid,
                               const std::array<Eigen::VectorXd, 2>& values) {
  const Eigen::Index px = static_cast<Eigen::Index>(grid.x_axis.size());
  const Eigen::Index py = static_cast<Eigen::Index>(grid.y_axis.size());
  Eigen::VectorXd out(basis.size());
  for (int c = 0; c < 2; ++c) {
    FHN_REQUIRE(values[c].size() == px * py, ErrorKind::InvalidArgument, "field length does not match the grid");
    const ComponentBasis& cb = basis.comp[c];
    const ConstMatMap ft(values[c].data(), py, px);
    const Eigen::MatrixXd weighted = cb.y.weights.asDiagonal() * ft * cb.x.weights.asDiagonal();
    MatMap(out.data() + basis.offset(c), cb.y.size(), cb.x.size()).noalias() =
        cb.y.table[0] * (weighted * cb.x.table[0].transpose());
  }
  return out;
}

PointSample evaluate(const BasisSet& basis, const Eigen::VectorXd& coeffs, double x, double y, KnotSide sx,
                     KnotSide sy) {
  FHN_REQUIRE(coeffs.size() == basis.size(), ErrorKind::InvalidArgument, "coefficient vector has wrong length");
  FHN_REQUIRE(basis.domain.contains(x, y), ErrorKind::OutOfDomain,
              "evaluation point (" + std::to_string(x) + ", " + std::to_string(y) + ") lies outside the domain");
  PointSample s;
  for (int c = 0; c < 2; ++c) {
    const ComponentBasis& cb = basis.comp[c];
    const auto rx = cb.x.at(x, sx);
    const auto ry = cb.y.at(y, sy);
    const ConstMatMap ct(coeffs.data() + basis.offset(c), cb.y.size(), cb.x.size());
    // value = sum_ij C(i,j) rx_i ry_j = ry^T Ct rx
    const Eigen::VectorXd c_rx0 = ct * rx.col(0);
    const Eigen::VectorXd c_rx1 = ct * rx.col(1);
    const Eigen::VectorXd c_rx2 = ct * rx.col(2);
    s.value[c] = ry.col(0).dot(c_rx0);
    s.gradient[c] = {ry.col(0).dot(c_rx1), ry.col(1).dot(c_rx0)};
    s.laplacian[c] = ry.col(0).dot(c_rx2) + ry.col(2).dot(c_rx0);
  }
  return s;
}

}  // namespace fhn
