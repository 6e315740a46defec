#include "fhn/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <string>

#include <Eigen/Eigenvalues>

#include "fhn/error.hpp"
#include "fhn/forms.hpp"

namespace fhn {

namespace {

using ConstMatMap = Eigen::Map<const Eigen::MatrixXd>;
using MatMap = Eigen::Map<Eigen::MatrixXd>;

constexpr double kSolveTolerance = 1e-10;
constexpr double kInitTolerance = 1e-12;
constexpr int kInitMaxIterations = 50;

AxisOperators axis_operators(const AxisBasis& axis) {
  AxisOperators op;
  op.stiffness = axis.table[1] * axis.weights.asDiagonal() * axis.table[1].transpose();

  const auto& breaks = axis.spline.breakpoints();
  const auto a = axis.at(breaks.front());
  const auto b = axis.at(breaks.back(), KnotSide::Left);
  op.boundary = a.col(0) * a.col(0).transpose() + b.col(0) * b.col(0).transpose();

  op.jump = Eigen::MatrixXd::Zero(axis.size(), axis.size());
  for (std::size_t k = 1; k + 1 < breaks.size(); ++k) {
    const auto left = axis.at(breaks[k], KnotSide::Left);
    const auto right = axis.at(breaks[k], KnotSide::Right);
    op.jump += left.col(0) * (left.col(1) - right.col(1)).transpose();
  }
  return op;
}

Eigen::MatrixXd kron(const Eigen::MatrixXd& a, const Eigen::MatrixXd& b) {
  Eigen::MatrixXd out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j) out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Applies sum_c scale_c (X_c (x) I + I (x) Y_c) block-wise.
template <class PickX, class PickY>
Eigen::VectorXd apply_sum(const AssembledOperators& ops, const Eigen::VectorXd& c, PickX px, PickY py) {
  FHN_REQUIRE(c.size() == ops.size, ErrorKind::InvalidArgument, "coefficient vector has wrong length");
  Eigen::VectorXd out(c.size());
  for (int k = 0; k < 2; ++k) {
    const ComponentOperators& co = ops.comp[k];
    const ConstMatMap ct(c.data() + ops.offset[k], ops.ny[k], ops.nx[k]);
    MatMap o(out.data() + ops.offset[k], ops.ny[k], ops.nx[k]);
    o.noalias() = ct * px(co).transpose();
    o.noalias() += py(co) * ct;
  }
  return out;
}

template <class PickX, class PickY>
Eigen::MatrixXd dense_sum(const AssembledOperators& ops, PickX px, PickY py) {
  Eigen::MatrixXd out = Eigen::MatrixXd::Zero(ops.size, ops.size);
  for (int k = 0; k < 2; ++k) {
    const ComponentOperators& co = ops.comp[k];
    const Eigen::MatrixXd ix = Eigen::MatrixXd::Identity(ops.nx[k], ops.nx[k]);
    const Eigen::MatrixXd iy = Eigen::MatrixXd::Identity(ops.ny[k], ops.ny[k]);
    const Eigen::Index n = ops.nx[k] * ops.ny[k];
    out.block(ops.offset[k], ops.offset[k], n, n) = kron(px(co), iy) + kron(ix, py(co));
  }
  return out;
}

Eigen::MatrixXd symmetric_part(const Eigen::MatrixXd& m) { return 0.5 * (m + m.transpose()); }

void require_finite(const Eigen::VectorXd& c, int step, Phase phase) {
  FHN_REQUIRE(c.allFinite(), ErrorKind::BlowUp,
              std::string("non-finite coefficients at step ") + std::to_string(step) + " (" + to_string(phase) + ")");
}

Eigen::VectorXd guarded_forcing(const ProblemSpec& problem, const Discretization& disc, const Eigen::VectorXd& c,
                                double t, int step, Phase phase) {
  try {
    return project_forcing(problem, disc.basis, disc.grid, c, t);
  } catch (const Error& e) {
    if (e.kind() != ErrorKind::InvalidData) throw;
    throw Error(ErrorKind::BlowUp, std::string("non-finite forcing at step ") + std::to_string(step) + " (" +
                                       to_string(phase) + ")");
  }
}

}  // namespace

Eigen::VectorXd AssembledOperators::apply(const Eigen::VectorXd& c) const {
  return apply_sum(*this, c, [](const ComponentOperators& o) -> const Eigen::MatrixXd& { return o.combined_x; },
                   [](const ComponentOperators& o) -> const Eigen::MatrixXd& { return o.combined_y; });
}

Eigen::VectorXd AssembledOperators::apply_stiffness(const Eigen::VectorXd& c) const {
  return apply_sum(*this, c, [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.x.stiffness; },
                   [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.y.stiffness; });
}

Eigen::VectorXd AssembledOperators::apply_boundary(const Eigen::VectorXd& c) const {
  return apply_sum(
      *this, c, [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.beta * o.x.boundary; },
      [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.beta * o.y.boundary; });
}

Eigen::VectorXd AssembledOperators::apply_jump(const Eigen::VectorXd& c) const {
  return apply_sum(*this, c, [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.x.jump; },
                   [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.y.jump; });
}

Eigen::MatrixXd AssembledOperators::dense_stiffness() const {
  return dense_sum(*this, [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.x.stiffness; },
                   [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.y.stiffness; });
}

Eigen::MatrixXd AssembledOperators::dense_boundary() const {
  return dense_sum(
      *this, [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.beta * o.x.boundary; },
      [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.beta * o.y.boundary; });
}

Eigen::MatrixXd AssembledOperators::dense_jump() const {
  return dense_sum(*this, [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.x.jump; },
                   [](const ComponentOperators& o) -> Eigen::MatrixXd { return o.gamma * o.y.jump; });
}

AssembledOperators assemble_operators(const BasisSet& basis, const FhnParams& params) {
  params.validate();
  AssembledOperators ops;
  for (int c = 0; c < 2; ++c) {
    ComponentOperators& co = ops.comp[c];
    co.gamma = params.gamma[c];
    co.beta = params.beta[c];
    co.x = axis_operators(basis.comp[c].x);
    co.y = axis_operators(basis.comp[c].y);
    co.combined_x = co.gamma * (co.x.stiffness + co.beta * co.x.boundary - co.x.jump);
    co.combined_y = co.gamma * (co.y.stiffness + co.beta * co.y.boundary - co.y.jump);
    ops.nx[c] = basis.comp[c].x.size();
    ops.ny[c] = basis.comp[c].y.size();
    ops.offset[c] = basis.offset(c);
  }
  ops.size = basis.size();
  return ops;
}

double max_operator_eigenvalue(const AssembledOperators& ops) {
  double worst = 0.0;
  for (const auto& co : ops.comp) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(symmetric_part(co.combined_x), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(symmetric_part(co.combined_y), Eigen::EigenvaluesOnly);
    worst = std::max(worst, ex.eigenvalues().maxCoeff() + ey.eigenvalues().maxCoeff());
  }
  return worst;
}

double amplification_factor(double z) {
  // State (c^{n-1/2}, c^n) -> (c^{n+1/2}, c^{n+1}) for w' = -lambda w, z = tau lambda.
  const double d = 3.0 + 2.0 * z;
  const double a = 1.0, b = -2.0 * z, c = 4.0 / d, e = -(8.0 * z + 1.0) / d;
  const double tr = a + e;
  const double det = a * e - b * c;
  const std::complex<double> root = std::sqrt(std::complex<double>(tr * tr - 4.0 * det, 0.0));
  return std::max(std::abs(0.5 * (tr + root)), std::abs(0.5 * (tr - root)));
}

double critical_local_step(const AssembledOperators& ops) {
  const double lam = max_operator_eigenvalue(ops);
  return lam > 0.0 ? 1.0 / lam : std::numeric_limits<double>::infinity();
}

std::array<double, 3> stencil_predictor_dt(double tau_n, double tau_prev) {
  FHN_REQUIRE(tau_n > 0.0 && tau_prev > 0.0, ErrorKind::InvalidArgument, "local steps must be positive");
  const double denom = tau_n * (tau_n + tau_prev);
  const double a = tau_prev / denom;
  const double b = (tau_n * tau_n - tau_prev * tau_prev) / (tau_prev * denom);
  const double c = -tau_n * tau_n / (tau_prev * denom);
  return {a, b, c};
}

std::array<double, 3> stencil_corrector_dt(double tau_n) {
  FHN_REQUIRE(tau_n > 0.0, ErrorKind::InvalidArgument, "local step must be positive");
  return {1.5 / tau_n, -2.0 / tau_n, 0.5 / tau_n};
}

Eigen::VectorXd extrapolate_F(const Eigen::VectorXd& f_half, const Eigen::VectorXd& f_n) {
  FHN_REQUIRE(f_half.size() == f_n.size(), ErrorKind::InvalidArgument, "forcing vectors differ in length");
  return 2.0 * f_half - f_n;
}

CorrectorSolver::CorrectorSolver(const AssembledOperators& ops) : ops_(&ops) {
  for (int c = 0; c < 2; ++c) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ex(symmetric_part(ops.comp[c].combined_x));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> ey(symmetric_part(ops.comp[c].combined_y));
    FHN_REQUIRE(ex.info() == Eigen::Success && ey.info() == Eigen::Success, ErrorKind::SolverFailure,
                "eigendecomposition of the corrector operator failed");
    factor_[c] = {ex.eigenvectors(), ey.eigenvectors(), ex.eigenvalues(), ey.eigenvalues()};
  }
}

double CorrectorSolver::min_system_eigenvalue(double s) const {
  double lo = std::numeric_limits<double>::infinity();
  for (const auto& f : factor_) {
    if (f.lx.size() == 0 || f.ly.size() == 0) continue;
    lo = std::min(lo, 1.0 + s * (f.lx.minCoeff() + f.ly.minCoeff()));
  }
  return lo;
}

CorrectorSolver::Result CorrectorSolver::solve(double s, const Eigen::VectorXd& rhs) const {
  const AssembledOperators& ops = *ops_;
  FHN_REQUIRE(rhs.size() == ops.size, ErrorKind::InvalidArgument, "right-hand side has wrong length");
  FHN_REQUIRE(s >= 0.0 && std::isfinite(s), ErrorKind::InvalidArgument, "corrector scale must be finite and >= 0");
  FHN_REQUIRE(min_system_eigenvalue(s) > 0.0, ErrorKind::SolverFailure, "corrector matrix is singular or indefinite");

  Result r;
  r.x.resize(rhs.size());
  for (int c = 0; c < 2; ++c) {
    const Factor& f = factor_[c];
    const ConstMatMap rt(rhs.data() + ops.offset[c], ops.ny[c], ops.nx[c]);
    Eigen::MatrixXd t = f.uy.transpose() * rt * f.ux;
    for (Eigen::Index i = 0; i < t.cols(); ++i)
      for (Eigen::Index j = 0; j < t.rows(); ++j) t(j, i) /= 1.0 + s * (f.lx(i) + f.ly(j));
    MatMap(r.x.data() + ops.offset[c], ops.ny[c], ops.nx[c]).noalias() = f.uy * t * f.ux.transpose();
  }
  const Eigen::VectorXd res = r.x + s * ops.apply(r.x) - rhs;
  const double scale = std::max(rhs.norm(), std::numeric_limits<double>::min());
  r.relative_residual = rhs.norm() == 0.0 ? res.norm() : res.norm() / scale;
  FHN_REQUIRE(r.x.allFinite() && r.relative_residual <= kSolveTolerance, ErrorKind::SolverFailure,
              "corrector solve residual " + std::to_string(r.relative_residual) + " exceeds 1e-10");
  return r;
}

Eigen::VectorXd project_forcing(const ProblemSpec& problem, const BasisSet& basis, const CollocationGrid& grid,
                                const Eigen::VectorXd& c, double t) {
  const FieldValues w = reconstruct(basis, grid, c);
  std::array<Eigen::VectorXd, 2> f{Eigen::VectorXd(w.size()), Eigen::VectorXd(w.size())};
  for (Eigen::Index p = 0; p < w.size(); ++p) {
    const CollocationPoint& pt = grid.points[static_cast<std::size_t>(p)];
    const Vec2 v = problem.forcing(pt.x, pt.y, t, w.value[0](p), w.value[1](p));
    FHN_REQUIRE(std::isfinite(v[0]) && std::isfinite(v[1]), ErrorKind::InvalidData,
                "forcing is not finite at (" + std::to_string(pt.x) + ", " + std::to_string(pt.y) + ")");
    f[0](p) = v[0];
    f[1](p) = v[1];
  }
  return project_values(basis, grid, f);
}

Discretization discretize(const ProblemSpec& problem, double h_target, int m, int L) {
  problem.validate();
  FHN_REQUIRE(m >= 3, ErrorKind::InvalidArgument, "spline degree must be at least 3");
  if (L == 0) L = m + 1;
  FHN_REQUIRE(L >= m, ErrorKind::InvalidArgument, "need at least m Gauss points per direction");
  Discretization d;
  d.mesh = build_mesh(problem.domain, h_target);
  d.grid = build_collocation(d.mesh, gauss_rule(L));
  const SplineSpace space = build_spline_space(d.mesh, m);
  std::array<bool, 2> dirichlet{};
  for (int c = 0; c < 2; ++c)
    dirichlet[c] = problem.boundary[c] == BoundaryKind::Dirichlet && problem.params.gamma[c] > 0.0;
  d.basis = orthonormalize(space, d.grid, dirichlet);
  d.ops = assemble_operators(d.basis, problem.params);
  return d;
}

InitialState initialize(const ProblemSpec& problem, const Discretization& disc, const CorrectorSolver& solver,
                        double tau0) {
  FHN_REQUIRE(tau0 > 0.0, ErrorKind::InvalidArgument, "initial local step must be positive");
  InitialState st;
  try {
    st.c0 = l2_project(problem.initial, disc.basis, disc.grid);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidData, "initial data: " + e.detail());
  }
  const double h = 0.5 * tau0;
  const Eigen::VectorXd g0 = guarded_forcing(problem, disc, st.c0, 0.0, 0, Phase::Initialization);
  const Eigen::VectorXd base = st.c0 - h * disc.ops.apply(st.c0) + h * g0;

  Eigen::VectorXd y = st.c0;
  for (int it = 1; it <= kInitMaxIterations; ++it) {
    const Eigen::VectorXd gy = guarded_forcing(problem, disc, y, tau0, 0, Phase::Initialization);
    Eigen::VectorXd next = solver.solve(h, base + h * gy).x;
    require_finite(next, 0, Phase::Initialization);
    st.last_change = (next - y).lpNorm<Eigen::Infinity>();
    y = std::move(next);
    st.iterations = it;
    if (st.last_change <= kInitTolerance * std::max(1.0, y.lpNorm<Eigen::Infinity>())) {
      st.c_half = std::move(y);
      return st;
    }
  }
  throw Error(ErrorKind::InitializationFailure,
              "half-step fixed point did not converge in 50 iterations (last change " +
                  std::to_string(st.last_change) + ")");
}

Eigen::VectorXd predictor_step(const Eigen::VectorXd& c_prev_half, const Eigen::VectorXd& c_n,
                               const AssembledOperators& ops, double tau_n, double tau_prev,
                               const Eigen::VectorXd& forcing_n) {
  FHN_REQUIRE(tau_n > 0.0 && tau_prev > 0.0, ErrorKind::InvalidArgument, "local steps must be positive");
  const double r2 = tau_n * tau_n / (tau_prev * tau_prev);
  return -(r2 - 1.0) * c_n + r2 * c_prev_half + (tau_n * (tau_n + tau_prev) / tau_prev) * (forcing_n - ops.apply(c_n));
}

CorrectorSolver::Result corrector_step(const Eigen::VectorXd& c_n, const Eigen::VectorXd& c_half,
                                       const CorrectorSolver& solver, double tau_n, const Eigen::VectorXd& forcing_n,
                                       const Eigen::VectorXd& forcing_half) {
  FHN_REQUIRE(tau_n > 0.0, ErrorKind::InvalidArgument, "local step must be positive");
  const double s = 2.0 * tau_n / 3.0;
  const Eigen::VectorXd rhs = (4.0 / 3.0) * c_half - (1.0 / 3.0) * c_n + s * extrapolate_F(forcing_half, forcing_n);
  return solver.solve(s, rhs);
}

const char* to_string(Phase phase) {
  switch (phase) {
    case Phase::Initialization: return "initialization";
    case Phase::Predictor: return "predictor";
    case Phase::Corrector: return "corrector";
  }
  return "unknown";
}

Vec2 component_norms(const BasisSet& basis, const Eigen::VectorXd& c) {
  return {c.segment(basis.offset(0), basis.comp[0].size()).norm(),
          c.segment(basis.offset(1), basis.comp[1].size()).norm()};
}

RunResult run(const ProblemSpec& problem, const Discretization& disc, const TimeGrid& timegrid,
              const RunOptions& options) {
  FHN_REQUIRE(std::abs(timegrid.final_time() - problem.final_time) <= 1e-12 * problem.final_time,
              ErrorKind::InvalidArgument, "time grid does not end at the problem's final time");
  const CorrectorSolver solver(disc.ops);
  RunResult out;

  auto emit = [&](int level, const Eigen::VectorXd& c) {
    const double t = timegrid.level_time(level);
    if (options.store_trajectory) {
      out.trajectory.levels.push_back(level);
      out.trajectory.times.push_back(t);
      out.trajectory.coeffs.push_back(c);
    }
    if (options.observer) options.observer(level, t, c);
  };
  auto report = [&](int step, Phase phase, double t, int iterations, double residual, const Eigen::VectorXd& c) {
    out.reports.push_back({step, phase, t, iterations, residual, component_norms(disc.basis, c)});
  };

  const double tau0 = timegrid.local_step(0);
  InitialState init = initialize(problem, disc, solver, tau0);
  report(0, Phase::Initialization, timegrid.midpoint(0), init.iterations, init.last_change, init.c_half);
  emit(0, init.c0);
  emit(1, init.c_half);

  Eigen::VectorXd c_n = std::move(init.c0);
  Eigen::VectorXd c_half = std::move(init.c_half);
  Eigen::VectorXd g_n = guarded_forcing(problem, disc, c_n, timegrid.node(0), 0, Phase::Corrector);

  for (int n = 0; n < timegrid.steps(); ++n) {
    const double tau_n = timegrid.local_step(n);
    if (n > 0) {
      c_half = predictor_step(c_half, c_n, disc.ops, tau_n, timegrid.local_step(n - 1), g_n);
      require_finite(c_half, n, Phase::Predictor);
      report(n, Phase::Predictor, timegrid.midpoint(n), 0, 0.0, c_half);
      emit(2 * n + 1, c_half);
    }
    const Eigen::VectorXd g_half = guarded_forcing(problem, disc, c_half, timegrid.midpoint(n), n, Phase::Corrector);
    CorrectorSolver::Result next;
    try {
      next = corrector_step(c_n, c_half, solver, tau_n, g_n, g_half);
    } catch (const Error& e) {
      throw Error(e.kind(), e.detail() + " at step " + std::to_string(n) + " (corrector)");
    }
    require_finite(next.x, n, Phase::Corrector);
    c_n = std::move(next.x);
    report(n, Phase::Corrector, timegrid.node(n + 1), 1, next.relative_residual, c_n);
    emit(2 * n + 2, c_n);
    if (n + 1 < timegrid.steps())
      g_n = guarded_forcing(problem, disc, c_n, timegrid.node(n + 1), n + 1, Phase::Predictor);
  }
  out.final_coeffs = std::move(c_n);
  return out;
}

}  // namespace fhn
