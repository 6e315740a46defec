#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "fhn/analysis.hpp"
#include "fhn/error.hpp"
#include "fhn/forms.hpp"
#include "fhn/stepper.hpp"

using namespace fhn;

namespace {

double p3(double x) { return x * x * (3.0 - 2.0 * x); }  // p'(0) = p'(1) = 0
double d2p3(double x) { return 6.0 - 12.0 * x; }

// Space-exact manufactured problem on the unit square with zero Neumann data:
// u = a(t) p(x) p(y), v = b(t) (p(x) + p(y)).
ProblemSpec polynomial_problem(Vec2 gamma, std::function<Vec2(double)> amp, std::function<Vec2(double)> damp) {
  ProblemSpec p;
  p.name = "polynomial";
  p.domain = {0, 1, 0, 1};
  p.final_time = 1.0;
  p.params.gamma = gamma;
  p.exact = [amp](double x, double y, double t) {
    const Vec2 a = amp(t);
    return Vec2{a[0] * p3(x) * p3(y), a[1] * (p3(x) + p3(y))};
  };
  p.initial = [ex = p.exact](double x, double y) { return ex(x, y, 0.0); };
  p.source = [amp, damp, gamma, params = p.params](double x, double y, double t, double, double) {
    const Vec2 a = amp(t), da = damp(t);
    const double u = a[0] * p3(x) * p3(y), v = a[1] * (p3(x) + p3(y));
    const double lap_u = a[0] * (d2p3(x) * p3(y) + p3(x) * d2p3(y));
    const double lap_v = a[1] * (d2p3(x) + d2p3(y));
    const Vec2 f = reaction_F(u, v, params);
    return Vec2{da[0] * p3(x) * p3(y) - gamma[0] * lap_u - f[0], da[1] * (p3(x) + p3(y)) - gamma[1] * lap_v - f[1]};
  };
  return p;
}

ProblemSpec linear_in_time(Vec2 gamma) {
  return polynomial_problem(
      gamma, [](double t) { return Vec2{1.0 + t, 2.0 - 0.5 * t}; }, [](double) { return Vec2{1.0, -0.5}; });
}

Eigen::VectorXd random_vec(Eigen::Index n, unsigned seed) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd;
  Eigen::VectorXd c(n);
  for (Eigen::Index k = 0; k < n; ++k) c(k) = nd(rng);
  return c;
}

double max_error(const ProblemSpec& p, const Discretization& d, const TimeGrid& tg) {
  const RunResult r = run(p, d, tg);
  const Vec2 e = error_linf_l2(r.trajectory, p.exact, d.basis, d.grid);
  return std::max(e[0], e[1]);
}

}  // namespace

TEST(Stencil, PredictorWeights) {
  const auto w = stencil_predictor_dt(0.2, 0.1);
  EXPECT_NEAR(w[0], 5.0 / 3.0, 1e-13);
  EXPECT_NEAR(w[1], 5.0, 1e-13);
  EXPECT_NEAR(w[2], -20.0 / 3.0, 1e-13);
  EXPECT_NEAR(w[0] + w[1] + w[2], 0.0, 1e-12);
  const auto e = stencil_predictor_dt(0.25, 0.25);
  EXPECT_NEAR(e[0], 2.0, 1e-15);
  EXPECT_NEAR(e[1], 0.0, 1e-15);
  EXPECT_NEAR(e[2], -2.0, 1e-15);
}

TEST(Stencil, PredictorExactOnQuadratics) {
  auto w = [](double t) { return 3 * t * t - 2 * t + 1; };
  const double tn = 0.7, tau = 0.13, tau_prev = 0.08;
  const auto s = stencil_predictor_dt(tau, tau_prev);
  const double approx = s[0] * w(tn + tau) + s[1] * w(tn) + s[2] * w(tn - tau_prev);
  EXPECT_NEAR(approx, 6 * tn - 2, 1e-12);
}

TEST(Stencil, CorrectorWeightsAndRemainder) {
  const auto s = stencil_corrector_dt(0.5);
  EXPECT_DOUBLE_EQ(s[0], 3.0);
  EXPECT_DOUBLE_EQ(s[1], -4.0);
  EXPECT_DOUBLE_EQ(s[2], 1.0);
  // w = t^3 at t = 1, 0.5, 0: weighted value 2.5, remainder tau^2 w'''/3 = 0.5.
  const double approx = s[0] * 1.0 + s[1] * 0.125 + s[2] * 0.0;
  EXPECT_DOUBLE_EQ(approx, 2.5);
  EXPECT_DOUBLE_EQ(3.0 - approx, 0.5 * 0.5 * 6.0 / 3.0);
  EXPECT_THROW(stencil_corrector_dt(0.0), Error);
}

TEST(Stencil, Extrapolation) {
  Eigen::VectorXd a(2), b(2);
  a << 0.5, 0.25;  // F at t = 1/2 for F = t, t^2
  b << 0.0, 0.0;
  const Eigen::VectorXd e = extrapolate_F(a, b);
  EXPECT_DOUBLE_EQ(e(0), 1.0);
  EXPECT_DOUBLE_EQ(e(1), 0.5);
  EXPECT_THROW(extrapolate_F(a, Eigen::VectorXd(3)), Error);
}

class OperatorTest : public ::testing::Test {
 protected:
  void SetUp() override {
    problem = example_problem(2);
    problem.params.gamma = {0.7, 1.3};
    problem.params.beta = {0.4, 2.0};
    disc = discretize(problem, 0.5, 4);
  }
  ProblemSpec problem;
  Discretization disc;
};

TEST_F(OperatorTest, StiffnessMatchesGradientProduct) {
  const Eigen::MatrixXd A = disc.ops.dense_stiffness();
  for (unsigned seed = 0; seed < 3; ++seed) {
    const Eigen::VectorXd a = random_vec(disc.basis.size(), seed), b = random_vec(disc.basis.size(), seed + 7);
    // gamma-weighted gradient product, assembled component-wise by hand
    Eigen::VectorXd a0 = a, b0 = b, a1 = a, b1 = b;
    a0.tail(disc.basis.comp[1].size()).setZero();
    b0.tail(disc.basis.comp[1].size()).setZero();
    a1.head(disc.basis.comp[0].size()).setZero();
    b1.head(disc.basis.comp[0].size()).setZero();
    const double ref = 0.7 * ip_grad(reconstruct(disc.basis, disc.grid, a0, true),
                                     reconstruct(disc.basis, disc.grid, b0, true), disc.grid) +
                       1.3 * ip_grad(reconstruct(disc.basis, disc.grid, a1, true),
                                     reconstruct(disc.basis, disc.grid, b1, true), disc.grid);
    EXPECT_NEAR(b.dot(A * a), ref, 1e-9 * std::abs(ref));
    EXPECT_NEAR(b.dot(disc.ops.apply_stiffness(a)), ref, 1e-9 * std::abs(ref));
  }
  EXPECT_LE((A - A.transpose()).cwiseAbs().maxCoeff(), 1e-9 * A.cwiseAbs().maxCoeff());
}

TEST_F(OperatorTest, BoundaryMatchesTraceForm) {
  const Eigen::MatrixXd B = disc.ops.dense_boundary();
  const Eigen::VectorXd a = random_vec(disc.basis.size(), 3), b = random_vec(disc.basis.size(), 4);
  const auto ta = boundary_trace(disc.basis, disc.grid, a), tb = boundary_trace(disc.basis, disc.grid, b);
  const double ref = boundary_form(ta, tb, disc.grid, {0.7 * 0.4, 1.3 * 2.0});
  EXPECT_NEAR(b.dot(B * a), ref, 1e-10 * std::abs(ref));
  EXPECT_NEAR(b.dot(disc.ops.apply_boundary(a)), ref, 1e-10 * std::abs(ref));
}

TEST_F(OperatorTest, JumpVanishesOnC1Space) {
  const Eigen::MatrixXd J = disc.ops.dense_jump();
  EXPECT_LE(J.cwiseAbs().maxCoeff(), 1e-9);
  const Eigen::VectorXd a = random_vec(disc.basis.size(), 5);
  EXPECT_LE(disc.ops.apply_jump(a).cwiseAbs().maxCoeff(), 1e-9);
}

TEST_F(OperatorTest, ApplyMatchesDense) {
  const Eigen::MatrixXd S = disc.ops.dense_stiffness() + disc.ops.dense_boundary() - disc.ops.dense_jump();
  const Eigen::VectorXd a = random_vec(disc.basis.size(), 6);
  EXPECT_LE((S * a - disc.ops.apply(a)).cwiseAbs().maxCoeff(), 1e-9 * (S * a).cwiseAbs().maxCoeff());
}

TEST_F(OperatorTest, SolverMatchesDenseFactorization) {
  const Eigen::MatrixXd S = disc.ops.dense_stiffness() + disc.ops.dense_boundary() - disc.ops.dense_jump();
  const CorrectorSolver solver(disc.ops);
  const Eigen::VectorXd rhs = random_vec(disc.basis.size(), 8);
  for (double s : {0.0, 1e-3, 0.37, 20.0}) {
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(S.rows(), S.cols()) + s * S;
    const Eigen::VectorXd ref = M.partialPivLu().solve(rhs);
    const auto r = solver.solve(s, rhs);
    EXPECT_LE((r.x - ref).cwiseAbs().maxCoeff(), 1e-9 * ref.cwiseAbs().maxCoeff()) << s;
    EXPECT_LE(r.relative_residual, 1e-10);
  }
}

TEST_F(OperatorTest, CorrectorMatrixPositiveDefinite) {
  const Eigen::MatrixXd S = disc.ops.dense_stiffness() + disc.ops.dense_boundary() - disc.ops.dense_jump();
  const CorrectorSolver solver(disc.ops);
  std::mt19937 rng(2);
  std::uniform_real_distribution<double> ud(1e-6, 1.0);
  for (int k = 0; k < 10; ++k) {
    const double tau = ud(rng);
    const Eigen::MatrixXd M = Eigen::MatrixXd::Identity(S.rows(), S.cols()) + (2 * tau / 3) * S;
    const Eigen::MatrixXd Ms = 0.5 * (M + M.transpose());
    EXPECT_EQ(Eigen::LLT<Eigen::MatrixXd>(Ms).info(), Eigen::Success);
    EXPECT_GT(solver.min_system_eigenvalue(2 * tau / 3), 0.0);
  }
}

TEST_F(OperatorTest, CriticalStepFromSpectrum) {
  const Eigen::MatrixXd S = disc.ops.dense_stiffness() + disc.ops.dense_boundary() - disc.ops.dense_jump();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (S + S.transpose()));
  const double lam = eig.eigenvalues().maxCoeff();
  EXPECT_NEAR(max_operator_eigenvalue(disc.ops), lam, 1e-9 * lam);
  EXPECT_NEAR(critical_local_step(disc.ops), 1.0 / lam, 1e-9 / lam);
}

TEST(Amplification, StabilityBoundary) {
  EXPECT_NEAR(amplification_factor(0.0), 1.0, 1e-15);
  EXPECT_NEAR(amplification_factor(1.0), 1.0, 1e-12);
  for (double z : {0.05, 0.3, 0.7, 0.99}) EXPECT_LE(amplification_factor(z), 1.0 + 1e-12) << z;
  for (double z : {1.1, 2.0, 10.0, 1e3}) EXPECT_GT(amplification_factor(z), 1.0) << z;
  EXPECT_NEAR(amplification_factor(1e9), 3.0, 1e-6);
}

TEST(Amplification, MatchesScalarRecurrence) {
  // Drive the predictor/corrector on a single decoupled mode and compare the
  // late-time growth rate with the spectral radius.
  for (double z : {0.5, 2.0, 10.0}) {
    const double lambda = 1.0, tau = z;
    double prev_half = 1.0, cn = 1.0;
    double growth = 0;
    for (int n = 0; n < 400; ++n) {
      const double half = prev_half - 2 * tau * lambda * cn;
      const double next = ((4.0 / 3) * half - (1.0 / 3) * cn) / (1 + 2 * tau * lambda / 3);
      const double norm_old = std::hypot(prev_half, cn), norm_new = std::hypot(half, next);
      growth = norm_new / norm_old;
      prev_half = half / norm_new;
      cn = next / norm_new;
    }
    EXPECT_NEAR(growth, amplification_factor(z), 1e-3 * amplification_factor(z)) << z;
  }
}

TEST(Predictor, NoSolveZeroInZeroOut) {
  ProblemSpec p = linear_in_time({0.1, 0.1});
  const Discretization d = discretize(p, 0.5, 4);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(d.basis.size());
  EXPECT_EQ(predictor_step(z, z, d.ops, 0.1, 0.1, z).cwiseAbs().maxCoeff(), 0.0);
}

TEST(Predictor, LeapfrogOnHeatEquation) {
  ProblemSpec p = linear_in_time({0.3, 0.6});
  const Discretization d = discretize(p, 0.5, 4);
  const Eigen::MatrixXd S = d.ops.dense_stiffness() + d.ops.dense_boundary() - d.ops.dense_jump();
  const Eigen::VectorXd a = random_vec(d.basis.size(), 1), b = random_vec(d.basis.size(), 2);
  const Eigen::VectorXd z = Eigen::VectorXd::Zero(d.basis.size());
  const double tau = 0.01;
  const Eigen::VectorXd ref = a - 2 * tau * (S * b);
  EXPECT_LE((predictor_step(a, b, d.ops, tau, tau, z) - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Initialize, ZeroDataStaysZero) {
  ProblemSpec p = linear_in_time({0.1, 0.1});
  p.initial = [](double, double) { return Vec2{0, 0}; };
  p.source = {};
  const Discretization d = discretize(p, 0.5, 4);
  const CorrectorSolver solver(d.ops);
  const InitialState s = initialize(p, d, solver, 0.05);
  EXPECT_EQ(s.c0.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(s.c_half.cwiseAbs().maxCoeff(), 0.0);
}

TEST(Stationary, HalfStepAndPredictorKeepState) {
  const ProblemSpec p = polynomial_problem(
      {0.2, 0.5}, [](double) { return Vec2{0.8, -0.3}; }, [](double) { return Vec2{0, 0}; });
  const Discretization d = discretize(p, 0.5, 4);
  const CorrectorSolver solver(d.ops);
  const InitialState s = initialize(p, d, solver, 0.01);
  EXPECT_LE((s.c_half - s.c0).cwiseAbs().maxCoeff(), 1e-10);
  const Eigen::VectorXd g = project_forcing(p, d.basis, d.grid, s.c0, 0.3);
  EXPECT_LE((predictor_step(s.c0, s.c0, d.ops, 0.01, 0.01, g) - s.c0).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Exactness, LinearInTimeUniformAndGraded) {
  const ProblemSpec p = linear_in_time({0.005, 0.01});
  const Discretization d = discretize(p, 0.5, 4);
  const double tau = std::ldexp(1.0, -5);
  ASSERT_LT(tau, critical_local_step(d.ops));
  for (GridMode mode : {GridMode::Uniform, GridMode::Graded}) {
    const TimeGrid tg = build_time_grid(mode, 1.0, choose_N_for_target(1.0, tau, mode));
    EXPECT_LE(max_error(p, d, tg), 1e-8) << to_string(mode);
  }
}

TEST(Exactness, CorrectorReproducesLinearSolution) {
  const ProblemSpec p = linear_in_time({0.05, 0.05});
  const Discretization d = discretize(p, 0.5, 4);
  const CorrectorSolver solver(d.ops);
  const double tau = 0.05, t = 0.4;
  auto coeffs = [&](double s) {
    return l2_project([&](double x, double y) { return p.exact(x, y, s); }, d.basis, d.grid);
  };
  const Eigen::VectorXd cn = coeffs(t), ch = coeffs(t + tau);
  const Eigen::VectorXd gn = project_forcing(p, d.basis, d.grid, cn, t);
  const Eigen::VectorXd gh = project_forcing(p, d.basis, d.grid, ch, t + tau);
  const auto r = corrector_step(cn, ch, solver, tau, gn, gh);
  EXPECT_LE((r.x - coeffs(t + 2 * tau)).cwiseAbs().maxCoeff(), 1e-9);
}

TEST(Run, ZeroProblemTrajectory) {
  ProblemSpec p = linear_in_time({0.1, 0.1});
  p.initial = [](double, double) { return Vec2{0, 0}; };
  p.source = {};
  const Discretization d = discretize(p, 0.5, 3);
  const RunResult r = run(p, d, build_uniform(1.0, 2));
  ASSERT_EQ(r.trajectory.coeffs.size(), 5u);
  for (int k = 0; k < 5; ++k) {
    EXPECT_EQ(r.trajectory.levels[k], k);
    EXPECT_EQ(r.trajectory.coeffs[k].cwiseAbs().maxCoeff(), 0.0);
  }
  EXPECT_DOUBLE_EQ(r.trajectory.times[3], 0.75);
}

TEST(Run, SuperpositionWithoutReaction) {
  ProblemSpec p = example_problem(2);
  p.params.gamma = {0.002, 0.004};
  p.params.beta = {0.5, 1.0};
  p.final_time = 0.5;
  p.source = [params = p.params](double, double, double, double u, double v) {
    const Vec2 f = reaction_F(u, v, params);
    return Vec2{-f[0], -f[1]};
  };
  const Discretization d = discretize(p, 0.5, 4);
  const TimeGrid tg = build_graded(0.5, 12);
  ASSERT_LT(tg.max_local_step(), critical_local_step(d.ops));
  auto field = [](unsigned seed) {
    std::mt19937 rng(seed);
    std::uniform_real_distribution<double> ud(-1, 1);
    const double a = ud(rng), b = ud(rng), c = ud(rng);
    return VectorField([a, b, c](double x, double y) { return Vec2{a * std::cos(x) + b * y * y, c * x * y + b}; });
  };
  for (unsigned seed = 0; seed < 3; ++seed) {
    const VectorField f = field(seed), g = field(seed + 10);
    ProblemSpec pa = p, pb = p, pab = p;
    pa.initial = f;
    pb.initial = g;
    pab.initial = [f, g](double x, double y) {
      const Vec2 a = f(x, y), b = g(x, y);
      return Vec2{a[0] + b[0], a[1] + b[1]};
    };
    const Eigen::VectorXd ra = run(pa, d, tg).final_coeffs, rb = run(pb, d, tg).final_coeffs;
    const Eigen::VectorXd rab = run(pab, d, tg).final_coeffs;
    EXPECT_LE((rab - ra - rb).norm(), 1e-10 * rab.norm());
  }
}

TEST(Run, ZeroDiffusionMatchesScalarOracle) {
  // With gamma = 0 every coefficient follows w' = -k w independently.
  const double k = 1.7;
  ProblemSpec p = example_problem(2);
  p.params.gamma = {0, 0};
  p.final_time = 1.0;
  p.source = [k, params = p.params](double, double, double, double u, double v) {
    const Vec2 f = reaction_F(u, v, params);
    return Vec2{-f[0] - k * u, -f[1] - k * v};
  };
  const Discretization d = discretize(p, 1.0, 4);
  const TimeGrid tg = build_graded(1.0, 10);
  const RunResult r = run(p, d, tg);

  const Eigen::VectorXd c0 = l2_project(p.initial, d.basis, d.grid);
  auto f = [k](double w) { return -k * w; };
  for (Eigen::Index i = 0; i < c0.size(); i += 7) {
    const double t0 = tg.local_step(0);
    double cn = c0(i);
    double half = cn * (1 - k * t0 / 2) / (1 + k * t0 / 2);
    cn = (4.0 / 3) * half - cn / 3 + (2 * t0 / 3) * (2 * f(half) - f(cn));
    for (int n = 1; n < tg.steps(); ++n) {
      const double tn = tg.local_step(n), tm = tg.local_step(n - 1);
      const double r2 = tn * tn / (tm * tm);
      half = -(r2 - 1) * cn + r2 * half + tn * (tn + tm) / tm * f(cn);
      cn = (4.0 / 3) * half - cn / 3 + (2 * tn / 3) * (2 * f(half) - f(cn));
    }
    EXPECT_NEAR(r.final_coeffs(i), cn, 1e-12 * std::max(1.0, std::abs(cn)));
  }
}

TEST(Run, NonFiniteForcingIsBlowUp) {
  ProblemSpec p = linear_in_time({0.05, 0.05});
  auto inner = p.source;
  p.source = [inner](double x, double y, double t, double u, double v) {
    if (t > 0.3) return Vec2{std::nan(""), 0.0};
    return inner(x, y, t, u, v);
  };
  const Discretization d = discretize(p, 0.5, 4);
  try {
    run(p, d, build_uniform(1.0, 8));
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BlowUp);
    EXPECT_NE(std::string(e.what()).find("step"), std::string::npos);
  }
}

TEST(Run, ExplicitDiffusionLimitIsSharp) {
  // Same problem, local steps just below and well above 1 / lambda_max.
  const ProblemSpec p = linear_in_time({1.0, 1.0});
  const Discretization d = discretize(p, 0.5, 4);
  const double crit = critical_local_step(d.ops);
  const int N_stable = static_cast<int>(std::ceil(1.0 / (2 * 0.9 * crit)));
  EXPECT_LE(max_error(p, d, build_uniform(1.0, N_stable)), 1e-8);
  const int N_unstable = static_cast<int>(std::ceil(1.0 / (2 * 4.0 * crit)));
  try {
    const double e = max_error(p, d, build_uniform(1.0, N_unstable));
    EXPECT_TRUE(!(e <= 1e-3)) << e;
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::BlowUp);
  }
}

TEST(TemporalOrder, SecondOrderInsideStabilityRegion) {
  const ProblemSpec p = polynomial_problem(
      {0.005, 0.004},
      [](double t) { return Vec2{std::exp(t), 1.0 + std::sin(2 * t)}; },
      [](double t) { return Vec2{std::exp(t), 2 * std::cos(2 * t)}; });
  const Discretization d = discretize(p, 0.5, 4);
  std::vector<double> err;
  for (int k = 4; k <= 7; ++k) {
    const double tau = std::ldexp(1.0, -k);
    ASSERT_LT(tau, critical_local_step(d.ops));
    err.push_back(max_error(p, d, build_uniform(1.0, choose_N_for_target(1.0, tau, GridMode::Uniform))));
  }
  for (std::size_t k = 1; k < err.size(); ++k) {
    const double co = convergence_order(err[k - 1], err[k]);
    EXPECT_GE(co, 1.7) << k;
    EXPECT_LE(co, 2.5) << k;
  }
}
