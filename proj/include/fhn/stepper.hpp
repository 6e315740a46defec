#pragma once

#include <array>
#include <functional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "fhn/basis.hpp"
#include "fhn/mesh.hpp"
#include "fhn/model.hpp"
#include "fhn/timegrid.hpp"

namespace fhn {

/// Per-axis factors of one component's spatial operators in the orthonormal
/// basis. The 2D operators are Kronecker sums X (x) I + I (x) Y.
struct AxisOperators {
  Eigen::MatrixXd stiffness;  // (rho_k', rho_j')
  Eigen::MatrixXd boundary;   // rho_j(a) rho_k(a) + rho_j(b) rho_k(b)
  Eigen::MatrixXd jump;       // sum over interior knots of rho_j [[rho_k']]
};

struct ComponentOperators {
  double gamma = 0.0;
  double beta = 0.0;
  AxisOperators x;
  AxisOperators y;
  Eigen::MatrixXd combined_x;  // gamma (K + beta B - J), x factor
  Eigen::MatrixXd combined_y;
};

/// Stiffness A, boundary B and jump J forms of the weak problem, kept in
/// factored form. The mass matrix is the identity.
struct AssembledOperators {
  std::array<ComponentOperators, 2> comp;
  std::array<Eigen::Index, 2> nx{0, 0};
  std::array<Eigen::Index, 2> ny{0, 0};
  std::array<Eigen::Index, 2> offset{0, 0};
  Eigen::Index size = 0;

  /// (A + B - J) c.
  Eigen::VectorXd apply(const Eigen::VectorXd& c) const;
  Eigen::VectorXd apply_stiffness(const Eigen::VectorXd& c) const;
  Eigen::VectorXd apply_boundary(const Eigen::VectorXd& c) const;
  Eigen::VectorXd apply_jump(const Eigen::VectorXd& c) const;

  /// Dense M x M matrices; only sensible for small bases.
  Eigen::MatrixXd dense_stiffness() const;
  Eigen::MatrixXd dense_boundary() const;
  Eigen::MatrixXd dense_jump() const;
};

AssembledOperators assemble_operators(const BasisSet& basis, const FhnParams& params);

/// Largest eigenvalue of the symmetric part of A + B - J.
double max_operator_eigenvalue(const AssembledOperators& ops);

/// Spectral radius of one equal-step predictor + corrector cycle applied to a
/// decoupled mode w' = -lambda w, as a function of z = tau * lambda.
double amplification_factor(double z);

/// Largest equal local step for which every mode of A + B - J is
/// non-growing under the predictor-corrector cycle (tau * lambda_max <= 1).
double critical_local_step(const AssembledOperators& ops);

/// Weights (a, b, c) with w_t(t_n) ~ a w(t_{n+1/2}) + b w(t_n) + c w(t_{n-1/2}).
std::array<double, 3> stencil_predictor_dt(double tau_n, double tau_prev);

/// Weights on (w^{n+1}, w^{n+1/2}, w^n) approximating w_t(t_{n+1}).
std::array<double, 3> stencil_corrector_dt(double tau_n);

/// 2 F(w^{n+1/2}) - F(w^n).
Eigen::VectorXd extrapolate_F(const Eigen::VectorXd& f_half, const Eigen::VectorXd& f_n);

/// Solves (I + s (A + B - J)) x = r using per-axis eigendecompositions of the
/// symmetrized factors, computed once per operator set.
class CorrectorSolver {
 public:
  explicit CorrectorSolver(const AssembledOperators& ops);

  struct Result {
    Eigen::VectorXd x;
    double relative_residual = 0.0;
  };

  Result solve(double s, const Eigen::VectorXd& rhs) const;
  /// Smallest eigenvalue of I + s (A + B - J)_sym.
  double min_system_eigenvalue(double s) const;

 private:
  struct Factor {
    Eigen::MatrixXd ux, uy;
    Eigen::VectorXd lx, ly;
  };
  const AssembledOperators* ops_;
  std::array<Factor, 2> factor_;
};

/// Projected forcing P(F(w_h) + s(t)) for the field with coefficients `c`.
Eigen::VectorXd project_forcing(const ProblemSpec& problem, const BasisSet& basis, const CollocationGrid& grid,
                                const Eigen::VectorXd& c, double t);

/// Everything the scheme needs in space.
struct Discretization {
  Mesh mesh;
  CollocationGrid grid;
  BasisSet basis;
  AssembledOperators ops;
};

/// L defaults to m + 1 when passed as 0.
Discretization discretize(const ProblemSpec& problem, double h_target, int m, int L = 0);

struct InitialState {
  Eigen::VectorXd c0;
  Eigen::VectorXd c_half;
  int iterations = 0;
  double last_change = 0.0;
};

/// Projected initial data and the trapezoidal half-step value. The linear part
/// is solved implicitly inside each fixed-point sweep; the nonlinear forcing
/// is iterated.
InitialState initialize(const ProblemSpec& problem, const Discretization& disc, const CorrectorSolver& solver,
                        double tau0);

/// Explicit predictor: c^{n+1/2} from c^{n-1/2}, c^n and g_n = P(F(w^n) + s^n).
Eigen::VectorXd predictor_step(const Eigen::VectorXd& c_prev_half, const Eigen::VectorXd& c_n,
                               const AssembledOperators& ops, double tau_n, double tau_prev,
                               const Eigen::VectorXd& forcing_n);

/// Linearized implicit corrector: c^{n+1} from c^n, c^{n+1/2} and the two
/// projected forcings.
CorrectorSolver::Result corrector_step(const Eigen::VectorXd& c_n, const Eigen::VectorXd& c_half,
                                       const CorrectorSolver& solver, double tau_n, const Eigen::VectorXd& forcing_n,
                                       const Eigen::VectorXd& forcing_half);

enum class Phase { Initialization, Predictor, Corrector };
const char* to_string(Phase phase);

struct StepReport {
  int step = 0;
  Phase phase = Phase::Initialization;
  double time = 0.0;
  int iterations = 0;
  double residual = 0.0;
  Vec2 norm{0.0, 0.0};
};

/// Coefficient snapshots at half-levels: level k is t_{k/2}.
struct Trajectory {
  std::vector<int> levels;
  std::vector<double> times;
  std::vector<Eigen::VectorXd> coeffs;
};

using LevelObserver = std::function<void(int level, double t, const Eigen::VectorXd& coeffs)>;

struct RunOptions {
  bool store_trajectory = true;
  LevelObserver observer;
};

struct RunResult {
  Trajectory trajectory;
  std::vector<StepReport> reports;
  Eigen::VectorXd final_coeffs;
};

/// Initialization, the n = 0 corrector, then predictor + corrector for
/// n = 1..N-1. Failures propagate as fhn::Error naming step and phase.
RunResult run(const ProblemSpec& problem, const Discretization& disc, const TimeGrid& timegrid,
              const RunOptions& options = {});

/// Per-component discrete norms of a coefficient vector (orthonormal basis).
Vec2 component_norms(const BasisSet& basis, const Eigen::VectorXd& c);

}  // namespace fhn
