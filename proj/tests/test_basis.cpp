#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "fhn/basis.hpp"
#include "fhn/error.hpp"
#include "fhn/forms.hpp"

using namespace fhn;

namespace {

struct Space {
  Mesh mesh;
  CollocationGrid grid;
  SplineSpace space;
  BasisSet basis;
};

Space make(const Domain& d, int n, int m, int L, std::array<bool, 2> dirichlet = {false, false}) {
  Space s;
  s.mesh = build_mesh(d, n, n);
  s.grid = build_collocation(s.mesh, gauss_rule(L));
  s.space = build_spline_space(s.mesh, m);
  s.basis = orthonormalize(s.space, s.grid, dirichlet);
  return s;
}

double max_offdiag_gram(const AxisBasis& a) {
  const Eigen::MatrixXd g = a.table[0] * a.weights.asDiagonal() * a.table[0].transpose();
  return (g - Eigen::MatrixXd::Identity(g.rows(), g.cols())).cwiseAbs().maxCoeff();
}

}  // namespace

TEST(Spline, Dimensions) {
  const Mesh one = build_mesh({0, 1, 0, 1}, 1, 1);
  EXPECT_EQ(build_spline_space(one, 3).dim_scalar(), 16);
  for (int n : {1, 2, 5, 9}) {
    const Mesh mesh = build_mesh({0, 1, 0, 1}, n, n);
    EXPECT_EQ(build_spline_space(mesh, 3).x_axis.size(), 2 * n + 2);
    EXPECT_EQ(build_spline_space(mesh, 4).x_axis.size(), 3 * n + 2);
  }
  EXPECT_THROW(build_spline_space(one, 2), Error);
}

TEST(Spline, PartitionOfUnityAndC1) {
  const SplineAxis ax({0.0, 0.3, 0.7, 1.0}, 4);
  for (double x : {0.0, 0.1, 0.3, 0.55, 0.7, 0.99, 1.0}) {
    const LocalBasis b = ax.evaluate(x);
    double s = 0, ds = 0;
    for (const auto& d : b.ders) {
      s += d[0];
      ds += d[1];
    }
    EXPECT_NEAR(s, 1.0, 1e-14);
    EXPECT_NEAR(ds, 0.0, 1e-12);
  }
  // Value and slope continuity at an interior knot for every raw function.
  const LocalBasis l = ax.evaluate(0.3, KnotSide::Left), r = ax.evaluate(0.3, KnotSide::Right);
  std::vector<std::array<double, 3>> lf(ax.size()), rf(ax.size());
  for (std::size_t j = 0; j < l.ders.size(); ++j) lf[l.first + j] = l.ders[j];
  for (std::size_t j = 0; j < r.ders.size(); ++j) rf[r.first + j] = r.ders[j];
  for (int k = 0; k < ax.size(); ++k) {
    EXPECT_NEAR(lf[k][0], rf[k][0], 1e-12);
    EXPECT_NEAR(lf[k][1], rf[k][1], 1e-10);
  }
}

TEST(GramSchmidt, IdentityIsFixed) {
  const Eigen::MatrixXd q = modified_gram_schmidt(Eigen::MatrixXd::Identity(5, 5));
  EXPECT_LE((q - Eigen::MatrixXd::Identity(5, 5)).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(GramSchmidt, DependentInputFails) {
  Eigen::MatrixXd g = Eigen::MatrixXd::Ones(3, 3);
  EXPECT_THROW(modified_gram_schmidt(g), Error);
}

TEST(Basis, Orthonormal) {
  for (int m : {3, 4, 5}) {
    const Space s = make({0, std::numbers::pi, 0, std::numbers::pi}, 6, m, m + 1, {true, false});
    for (const auto& c : s.basis.comp) {
      EXPECT_LE(max_offdiag_gram(c.x), 1e-10);
      EXPECT_LE(max_offdiag_gram(c.y), 1e-10);
    }
  }
}

TEST(Basis, FullRankChangeOfBasis) {
  const Space s = make({0, 1, 0, 1}, 2, 3, 4);
  EXPECT_EQ(s.basis.size(), 2 * s.space.dim_scalar());
  // Each raw function is recovered from the orthonormal ones: Q is invertible
  // and Q^T G Q = I.
  for (const auto& c : s.basis.comp) {
    const Eigen::MatrixXd& q = c.x.change;
    const Eigen::MatrixXd r = q.transpose() * c.x.gram * q;
    EXPECT_LE((r - Eigen::MatrixXd::Identity(q.rows(), q.cols())).cwiseAbs().maxCoeff(), 1e-10);
    EXPECT_EQ(Eigen::FullPivLU<Eigen::MatrixXd>(q).rank(), q.rows());
  }
}

TEST(Basis, ConstantsRepresented) {
  const Space s = make({0, 1, 0, 2}, 3, 4, 5);
  const Eigen::VectorXd c = l2_project([](double, double) { return Vec2{1.0, -2.0}; }, s.basis, s.grid);
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ux(0, 1), uy(0, 2);
  for (int k = 0; k < 20; ++k) {
    const PointSample p = evaluate(s.basis, c, ux(rng), uy(rng));
    EXPECT_NEAR(p.value[0], 1.0, 1e-12);
    EXPECT_NEAR(p.value[1], -2.0, 1e-12);
    EXPECT_NEAR(p.gradient[0][0], 0.0, 1e-10);
    EXPECT_NEAR(p.gradient[1][1], 0.0, 1e-10);
  }
}

TEST(Basis, DirichletMembersVanishOnBoundary) {
  const Space s = make({0, 1, 0, 1}, 3, 4, 5, {true, false});
  std::mt19937 rng(3);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(s.basis.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = nd(rng);
  for (double t : {0.0, 0.2, 0.5, 1.0}) {
    EXPECT_NEAR(evaluate(s.basis, c, 0.0, t).value[0], 0.0, 1e-12);
    EXPECT_NEAR(evaluate(s.basis, c, 1.0, t).value[0], 0.0, 1e-12);
    EXPECT_NEAR(evaluate(s.basis, c, t, 1.0).value[0], 0.0, 1e-12);
  }
  EXPECT_GT(std::abs(evaluate(s.basis, c, 0.0, 0.5).value[1]), 1e-6);
}

TEST(Basis, CornerContinuity) {
  const Space s = make({0, 1, 0, 1}, 2, 4, 5);
  std::mt19937 rng(11);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(s.basis.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = nd(rng);
  const KnotSide sides[2] = {KnotSide::Left, KnotSide::Right};
  const PointSample ref = evaluate(s.basis, c, 0.5, 0.5);
  for (KnotSide sx : sides)
    for (KnotSide sy : sides) {
      const PointSample p = evaluate(s.basis, c, 0.5, 0.5, sx, sy);
      for (int k = 0; k < 2; ++k) {
        EXPECT_NEAR(p.value[k], ref.value[k], 1e-10);
        EXPECT_NEAR(p.gradient[k][0], ref.gradient[k][0], 1e-10);
        EXPECT_NEAR(p.gradient[k][1], ref.gradient[k][1], 1e-10);
      }
    }
}

TEST(Basis, GradientMatchesFiniteDifference) {
  const Space s = make({0, 1, 0, 1}, 3, 4, 5);
  std::mt19937 rng(5);
  std::normal_distribution<double> nd;
  std::uniform_real_distribution<double> ud(0.01, 0.99);
  std::vector<Point2> pts;
  for (int k = 0; k < 100; ++k) pts.push_back({ud(rng), ud(rng)});
  const BasisTables t = eval_basis(s.basis, pts);
  const double d = 1e-6;
  std::vector<Point2> px, mx, py, my;
  for (const auto& p : pts) {
    px.push_back({p.x + d, p.y});
    mx.push_back({p.x - d, p.y});
    py.push_back({p.x, p.y + d});
    my.push_back({p.x, p.y - d});
  }
  const Eigen::MatrixXd fdx = (eval_basis(s.basis, px).value - eval_basis(s.basis, mx).value) / (2 * d);
  const Eigen::MatrixXd fdy = (eval_basis(s.basis, py).value - eval_basis(s.basis, my).value) / (2 * d);
  EXPECT_LE((fdx - t.grad_x).cwiseAbs().maxCoeff(), 1e-5);
  EXPECT_LE((fdy - t.grad_y).cwiseAbs().maxCoeff(), 1e-5);
}

TEST(Basis, EvalOutsideDomainThrows) {
  const Space s = make({0, 1, 0, 1}, 2, 3, 4);
  const std::vector<Point2> pts{{1.5, 0.5}};
  try {
    eval_basis(s.basis, pts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::OutOfDomain);
  }
}

TEST(Basis, TooFewPointsIsIllConditioned) {
  const Mesh mesh = build_mesh({0, 1, 0, 1}, 2, 2);
  const CollocationGrid g = build_collocation(mesh, gauss_rule(1));
  try {
    orthonormalize(build_spline_space(mesh, 4), g);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::IllConditionedBasis);
  }
}

TEST(Basis, ReconstructMatchesPointEvaluation) {
  const Space s = make({0, 2, -1, 1}, 3, 4, 5, {false, true});
  std::mt19937 rng(9);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(s.basis.size());
  for (Eigen::Index k = 0; k < c.size(); ++k) c(k) = nd(rng);
  const FieldValues f = reconstruct(s.basis, s.grid, c, true);
  const auto lap = reconstruct_laplacian(s.basis, s.grid, c);
  for (std::size_t p = 0; p < s.grid.size(); p += 37) {
    const PointSample q = evaluate(s.basis, c, s.grid.points[p].x, s.grid.points[p].y);
    const auto i = static_cast<Eigen::Index>(p);
    for (int k = 0; k < 2; ++k) {
      EXPECT_NEAR(f.value[k](i), q.value[k], 1e-11);
      EXPECT_NEAR((*f.gradient)[2 * k](i), q.gradient[k][0], 1e-10);
      EXPECT_NEAR((*f.gradient)[2 * k + 1](i), q.gradient[k][1], 1e-10);
      EXPECT_NEAR(lap[k](i), q.laplacian[k], 1e-8);
    }
  }
}
