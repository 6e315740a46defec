#include "fhn/model.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fhn/error.hpp"

namespace fhn {

void FhnParams::validate() const {
  FHN_REQUIRE(gamma[0] >= 0.0 && gamma[1] >= 0.0, ErrorKind::InvalidArgument, "diffusivities must be nonnegative");
  FHN_REQUIRE(beta[0] >= 0.0 && beta[1] >= 0.0, ErrorKind::InvalidArgument, "Robin coefficients must be nonnegative");
  FHN_REQUIRE(theta1 > 0.0, ErrorKind::InvalidArgument, "theta1 must be positive");
  FHN_REQUIRE(theta2 >= 0.0, ErrorKind::InvalidArgument, "theta2 must be nonnegative");
  FHN_REQUIRE(theta3 > 0.0 && theta3 < 1.0, ErrorKind::InvalidArgument, "theta3 must lie in (0, 1)");
  FHN_REQUIRE(eps0 >= 0.0, ErrorKind::InvalidArgument, "eps0 must be nonnegative");
}

Vec2 reaction_F(double u, double v, const FhnParams& p) {
  return {u * (1.0 - u) * (u - p.theta3) - v, p.eps0 * (p.theta1 * u - p.theta2 * v - p.theta0)};
}

double lipschitz_constant_CF(const FhnParams& p, double c_sup, int L, int p_overlap, double max_weight) {
  FHN_REQUIRE(c_sup >= 0.0 && L >= 0 && p_overlap >= 0 && max_weight >= 0.0, ErrorKind::InvalidArgument,
              "Lipschitz constant inputs must be nonnegative");
  const double k = L * (p_overlap + 2.0) * max_weight;
  const double c2 = c_sup * c_sup;
  const double theta_max2 = std::max(p.theta1 * p.theta1, p.theta2 * p.theta2);
  const double t3 = 1.0 + p.theta3;
  const double cf2 = 2.0 * (1.0 + theta_max2 + 10.0 * k * c2 * (k * c2 + 1.5 + 2.0 * t3 * t3));
  return std::sqrt(cf2);
}

Vec2 ProblemSpec::forcing(double x, double y, double t, double u, double v) const {
  Vec2 f = reaction_F(u, v, params);
  if (source) {
    const Vec2 s = source(x, y, t, u, v);
    f[0] += s[0];
    f[1] += s[1];
  }
  return f;
}

void ProblemSpec::validate() const {
  domain.validate();
  params.validate();
  FHN_REQUIRE(final_time > 0.0, ErrorKind::InvalidArgument, "final time must be positive");
  FHN_REQUIRE(static_cast<bool>(initial), ErrorKind::InvalidArgument, "initial data missing");
}

namespace {

double cubic(double u, double theta3) { return u * (1.0 - u) * (u - theta3); }

ProblemSpec example_one() {
  using std::sin;
  ProblemSpec p;
  p.name = "example1";
  p.domain = {0.0, std::numbers::pi, 0.0, std::numbers::pi};
  p.final_time = 1.0;
  p.params.gamma = {1.0, 0.0};
  p.params.theta1 = 1.0;
  p.params.theta2 = 1.0;
  p.params.theta3 = 0.5;
  // v carries no diffusion, so only u needs (and gets) the Dirichlet constraint.
  p.boundary = {BoundaryKind::Dirichlet, BoundaryKind::Robin};
  p.exact = [](double x, double y, double t) {
    const double a = t * t * t + 1.0;
    return Vec2{a * sin(2.0 * x) * sin(2.0 * y), a * sin(x) * sin(y)};
  };
  p.initial = [ex = p.exact](double x, double y) { return ex(x, y, 0.0); };
  // The u-source cancels the cubic at the discrete u, as in the reference setup.
  p.source = [](double x, double y, double t, double u, double) {
    const double s2 = sin(2.0 * x) * sin(2.0 * y);
    const double s1 = sin(x) * sin(y);
    const double t2 = t * t;
    const double t3 = t2 * t;
    return Vec2{(8.0 * t3 + 3.0 * t2 + 8.0) * s2 - cubic(u, 0.5) + (t3 + 1.0) * s1,
                (t3 + 3.0 * t2 + 1.0) * s1 - (t3 + 1.0) * s2};
  };
  return p;
}

ProblemSpec example_two() {
  using std::cos;
  using std::exp;
  constexpr double pi = std::numbers::pi;
  ProblemSpec p;
  p.name = "example2";
  p.domain = {-1.0, 1.0, -1.0, 1.0};
  p.final_time = 2.0;
  p.params.gamma = {0.0, 1.0};
  p.params.beta = {0.0, 0.0};
  p.params.theta1 = 1.0;
  p.params.theta2 = 1.0;
  p.params.theta3 = 0.5;
  p.boundary = {BoundaryKind::Robin, BoundaryKind::Robin};
  p.exact = [](double x, double y, double t) {
    return Vec2{exp(t) * cos(pi * x) * cos(3.0 * pi * y), exp(2.0 * t) * cos(2.0 * pi * x) * cos(4.0 * pi * y)};
  };
  p.initial = [ex = p.exact](double x, double y) { return ex(x, y, 0.0); };
  // u_t = f1(u) - v + s1 and v_t - Lap v = u - v + s2 with the exact pair substituted.
  p.source = [ex = p.exact](double x, double y, double t, double, double) {
    const Vec2 w = ex(x, y, t);
    const double u = w[0];
    const double v = w[1];
    const double lap_v = -20.0 * pi * pi * v;
    return Vec2{u - cubic(u, 0.5) + v, 2.0 * v - lap_v - u + v};
  };
  return p;
}

ProblemSpec example_three() {
  ProblemSpec p;
  p.name = "example3";
  p.domain = {0.0, 2.5, 0.0, 2.5};
  p.final_time = 1.0;
  p.params.gamma = {1e-4, 0.0};
  p.params.theta1 = 0.5;
  p.params.theta2 = 1.0;
  p.params.theta3 = 1e-2;
  p.params.eps0 = 1e-2;
  p.params.theta0 = 0.0;
  p.boundary = {BoundaryKind::Dirichlet, BoundaryKind::Robin};
  // Quadrant data; on the shared lines x = 1.25 / y = 1.25 the first listed
  // quadrant wins.
  p.initial = [](double x, double y) {
    const double u = (x <= 1.25 && y <= 1.25) ? 1.0 : 0.0;
    const double v = (y > 1.25) ? 0.1 : 0.0;
    return Vec2{u, v};
  };
  return p;
}

}  // namespace

ProblemSpec example_problem(int id) {
  switch (id) {
    case 1: return example_one();
    case 2: return example_two();
    case 3: return example_three();
    default: break;
  }
  throw Error(ErrorKind::InvalidArgument, "unknown example id " + std::to_string(id));
}

}  // namespace fhn
