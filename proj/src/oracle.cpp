#include "fhn/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Sparse>
#include <Eigen/SparseLU>

#include "fhn/error.hpp"

namespace fhn {

namespace {

using SpMat = Eigen::SparseMatrix<double>;

// Discrete gamma * Laplacian with homogeneous Robin (or Neumann) ghost rows;
// Dirichlet lattices get zero rows on the boundary.
SpMat laplacian(const Domain& d, int n, double gamma, double beta, bool dirichlet) {
  const int m = n + 1;
  const double hx = d.width() / n, hy = d.height() / n;
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(static_cast<std::size_t>(5 * m * m));
  auto id = [m](int i, int j) { return i * m + j; };
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const bool edge = i == 0 || j == 0 || i == n || j == n;
      if (dirichlet && edge) continue;
      const int row = id(i, j);
      auto axis = [&](int k, double h, auto nb) {
        const double h2 = gamma / (h * h);
        if (k == 0) {
          trip.emplace_back(row, nb(1), 2.0 * h2);
          trip.emplace_back(row, row, -2.0 * h2 - 2.0 * h * beta * h2);
        } else if (k == n) {
          trip.emplace_back(row, nb(n - 1), 2.0 * h2);
          trip.emplace_back(row, row, -2.0 * h2 - 2.0 * h * beta * h2);
        } else {
          trip.emplace_back(row, nb(k - 1), h2);
          trip.emplace_back(row, nb(k + 1), h2);
          trip.emplace_back(row, row, -2.0 * h2);
        }
      };
      axis(i, hx, [&](int k) { return id(k, j); });
      axis(j, hy, [&](int k) { return id(i, k); });
    }
  }
  SpMat L(m * m, m * m);
  L.setFromTriplets(trip.begin(), trip.end());
  return L;
}

}  // namespace

Vec2 OracleSolution::sample(std::size_t frame, double x, double y) const {
  FHN_REQUIRE(frame < frames.size(), ErrorKind::InvalidArgument, "oracle frame out of range");
  FHN_REQUIRE(domain.contains(x, y), ErrorKind::OutOfDomain, "oracle sample outside the domain");
  const double fx = std::clamp((x - domain.x_min) / dx(), 0.0, static_cast<double>(n));
  const double fy = std::clamp((y - domain.y_min) / dy(), 0.0, static_cast<double>(n));
  const int i = std::min(static_cast<int>(fx), n - 1), j = std::min(static_cast<int>(fy), n - 1);
  const double a = fx - i, b = fy - j;
  const int m = n + 1;
  Vec2 out{};
  for (int c = 0; c < 2; ++c) {
    const Eigen::VectorXd& f = frames[frame][c];
    out[c] = (1 - a) * (1 - b) * f(i * m + j) + a * (1 - b) * f((i + 1) * m + j) + (1 - a) * b * f(i * m + j + 1) +
             a * b * f((i + 1) * m + j + 1);
  }
  return out;
}

Vec2 OracleSolution::at(double t, double x, double y) const {
  FHN_REQUIRE(!times.empty(), ErrorKind::InvalidArgument, "oracle holds no frames");
  const double slack = 1e-12 * std::max(1.0, times.back());
  FHN_REQUIRE(t >= times.front() - slack && t <= times.back() + slack, ErrorKind::InvalidArgument,
              "time outside the oracle horizon");
  auto it = std::lower_bound(times.begin(), times.end(), t - slack);
  std::size_t k = static_cast<std::size_t>(it - times.begin());
  if (k >= times.size()) k = times.size() - 1;
  if (std::abs(times[k] - t) <= slack || k == 0) return sample(k, x, y);
  const double s = (t - times[k - 1]) / (times[k] - times[k - 1]);
  const Vec2 a = sample(k - 1, x, y), b = sample(k, x, y);
  return {(1 - s) * a[0] + s * b[0], (1 - s) * a[1] + s * b[1]};
}

OracleSolution oracle_solve(const ProblemSpec& problem, int nx, int nt, const OracleOptions& options) {
  problem.validate();
  FHN_REQUIRE(nx >= 2 && nt >= 1, ErrorKind::InvalidArgument, "oracle needs nx >= 2 and nt >= 1");
  OracleSolution sol;
  sol.domain = problem.domain;
  sol.n = nx;
  const int m = nx + 1;
  const Eigen::Index nodes = static_cast<Eigen::Index>(m) * m;
  const double dt = problem.final_time / nt;

  std::array<bool, 2> pinned{};
  std::array<SpMat, 2> lap;
  std::array<Eigen::SparseLU<SpMat>, 2> lu;
  for (int c = 0; c < 2; ++c) {
    const double g = problem.params.gamma[c];
    pinned[c] = problem.boundary[c] == BoundaryKind::Dirichlet && g > 0.0;
    if (g == 0.0) continue;
    lap[c] = laplacian(problem.domain, nx, g, problem.params.beta[c], pinned[c]);
    SpMat sys(nodes, nodes);
    sys.setIdentity();
    sys -= 0.5 * dt * lap[c];
    lu[c].compute(sys);
    FHN_REQUIRE(lu[c].info() == Eigen::Success, ErrorKind::OracleFailure, "oracle factorization failed");
  }

  std::vector<double> xs(static_cast<std::size_t>(m)), ys(static_cast<std::size_t>(m));
  for (int i = 0; i < m; ++i) {
    xs[static_cast<std::size_t>(i)] = sol.node_x(i);
    ys[static_cast<std::size_t>(i)] = sol.node_y(i);
  }
  auto on_edge = [nx, m](Eigen::Index k) {
    const auto i = k / m, j = k % m;
    return i == 0 || j == 0 || i == nx || j == nx;
  };

  std::array<Eigen::VectorXd, 2> w{Eigen::VectorXd(nodes), Eigen::VectorXd(nodes)};
  for (Eigen::Index k = 0; k < nodes; ++k) {
    const Vec2 v = problem.initial(xs[static_cast<std::size_t>(k / m)], ys[static_cast<std::size_t>(k % m)]);
    for (int c = 0; c < 2; ++c) w[c](k) = (pinned[c] && on_edge(k)) ? 0.0 : v[c];
  }
  auto forcing = [&](const std::array<Eigen::VectorXd, 2>& s, double t) {
    std::array<Eigen::VectorXd, 2> f{Eigen::VectorXd(nodes), Eigen::VectorXd(nodes)};
    for (Eigen::Index k = 0; k < nodes; ++k) {
      const Vec2 v = problem.forcing(xs[static_cast<std::size_t>(k / m)], ys[static_cast<std::size_t>(k % m)], t,
                                     s[0](k), s[1](k));
      f[0](k) = v[0];
      f[1](k) = v[1];
    }
    return f;
  };

  sol.times.push_back(0.0);
  sol.frames.push_back(w);
  auto f_old = forcing(w, 0.0);
  for (int step = 0; step < nt; ++step) {
    const double t1 = (step + 1) * dt;
    std::array<Eigen::VectorXd, 2> base;
    for (int c = 0; c < 2; ++c) {
      base[c] = w[c] + 0.5 * dt * f_old[c];
      if (problem.params.gamma[c] > 0.0) base[c] += 0.5 * dt * (lap[c] * w[c]);
    }
    std::array<Eigen::VectorXd, 2> next = w;
    std::array<Eigen::VectorXd, 2> f_new;
    bool converged = false;
    double change = 0.0;
    for (int it = 0; it < options.picard_max; ++it) {
      f_new = forcing(next, t1);
      change = 0.0;
      double scale = 1.0;
      for (int c = 0; c < 2; ++c) {
        Eigen::VectorXd rhs = base[c] + 0.5 * dt * f_new[c];
        if (pinned[c])
          for (Eigen::Index k = 0; k < nodes; ++k)
            if (on_edge(k)) rhs(k) = 0.0;
        Eigen::VectorXd sol_c = problem.params.gamma[c] > 0.0 ? Eigen::VectorXd(lu[c].solve(rhs)) : rhs;
        FHN_REQUIRE(sol_c.allFinite(), ErrorKind::OracleFailure,
                    "oracle produced non-finite values at step " + std::to_string(step));
        change = std::max(change, (sol_c - next[c]).lpNorm<Eigen::Infinity>());
        scale = std::max(scale, sol_c.lpNorm<Eigen::Infinity>());
        next[c] = std::move(sol_c);
      }
      if (change <= options.picard_tol * scale) {
        converged = true;
        break;
      }
    }
    FHN_REQUIRE(converged, ErrorKind::OracleFailure,
                "Picard iteration stalled at step " + std::to_string(step) + " (change " + std::to_string(change) + ")");
    w = std::move(next);
    f_old = forcing(w, t1);
    const bool last = step + 1 == nt;
    if (last || (options.store_stride > 0 && (step + 1) % options.store_stride == 0)) {
      sol.times.push_back(last ? problem.final_time : t1);
      sol.frames.push_back(w);
    }
  }
  return sol;
}

Vec2 oracle_relative_max_error(const OracleSolution& sol, const SpaceTimeField& exact) {
  FHN_REQUIRE(static_cast<bool>(exact), ErrorKind::InvalidArgument, "no exact solution to compare against");
  const int m = sol.n + 1;
  const auto& f = sol.frames.back();
  const double t = sol.times.back();
  Vec2 err{}, peak{};
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Vec2 ex = exact(sol.node_x(i), sol.node_y(j), t);
      for (int c = 0; c < 2; ++c) {
        err[c] = std::max(err[c], std::abs(f[c](i * m + j) - ex[c]));
        peak[c] = std::max(peak[c], std::abs(ex[c]));
      }
    }
  }
  for (int c = 0; c < 2; ++c) err[c] = peak[c] > 0.0 ? err[c] / peak[c] : err[c];
  return err;
}

}  // namespace fhn
