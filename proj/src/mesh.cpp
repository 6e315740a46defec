#include "fhn/mesh.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fhn/error.hpp"

namespace fhn {

bool Domain::contains(double x, double y, double tol) const {
  const double tx = tol * std::max(1.0, width());
  const double ty = tol * std::max(1.0, height());
  return x >= x_min - tx && x <= x_max + tx && y >= y_min - ty && y <= y_max + ty;
}

void Domain::validate() const {
  FHN_REQUIRE(std::isfinite(x_min) && std::isfinite(x_max) && std::isfinite(y_min) && std::isfinite(y_max),
              ErrorKind::InvalidArgument, "domain bounds must be finite");
  FHN_REQUIRE(x_min < x_max && y_min < y_max, ErrorKind::InvalidArgument, "domain must satisfy min < max on both axes");
}

std::array<double, 2> outward_normal(Side side) {
  switch (side) {
    case Side::Left: return {-1.0, 0.0};
    case Side::Right: return {1.0, 0.0};
    case Side::Bottom: return {0.0, -1.0};
    case Side::Top: return {0.0, 1.0};
  }
  return {0.0, 0.0};
}

double Rect::diameter() const { return std::hypot(x1 - x0, y1 - y0); }

namespace {

int cells_for(double side, double h_target) {
  const double ratio = side / h_target;
  // Absorb rounding in ratios that are integers in exact arithmetic (pi / (pi/4)).
  return std::max(1, static_cast<int>(std::ceil(ratio * (1.0 - 1e-12))));
}

std::vector<double> uniform_lines(double a, double b, int n) {
  std::vector<double> lines(static_cast<std::size_t>(n) + 1);
  for (int i = 0; i <= n; ++i) lines[static_cast<std::size_t>(i)] = a + (b - a) * i / n;
  lines.back() = b;
  return lines;
}

}  // namespace

Mesh build_mesh(const Domain& domain, double h_target) {
  domain.validate();
  FHN_REQUIRE(h_target > 0.0 && std::isfinite(h_target), ErrorKind::InvalidArgument, "h_target must be positive");
  const double min_side = std::min(domain.width(), domain.height());
  FHN_REQUIRE(h_target <= min_side * (1.0 + 1e-12), ErrorKind::InvalidArgument,
              "h_target must not exceed the shortest domain side");
  return build_mesh(domain, cells_for(domain.width(), h_target), cells_for(domain.height(), h_target));
}

Mesh build_mesh(const Domain& domain, int nx, int ny) {
  domain.validate();
  FHN_REQUIRE(nx >= 1 && ny >= 1, ErrorKind::InvalidArgument, "mesh needs at least one element per axis");

  Mesh mesh;
  mesh.domain = domain;
  mesh.nx = nx;
  mesh.ny = ny;
  mesh.x_lines = uniform_lines(domain.x_min, domain.x_max, nx);
  mesh.y_lines = uniform_lines(domain.y_min, domain.y_max, ny);
  mesh.elements.reserve(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  for (int ex = 0; ex < nx; ++ex) {
    for (int ey = 0; ey < ny; ++ey) {
      const Rect r{mesh.x_lines[ex], mesh.x_lines[ex + 1], mesh.y_lines[ey], mesh.y_lines[ey + 1]};
      mesh.h = std::max(mesh.h, r.diameter());
      mesh.elements.push_back(r);
    }
  }

  auto add_edge = [&](int ex, int ey, Side side) {
    const Rect& r = mesh.elements[mesh.element_index(ex, ey)];
    const bool vertical = side == Side::Left || side == Side::Right;
    mesh.boundary_edges.push_back({mesh.element_index(ex, ey), side, outward_normal(side),
                                   vertical ? r.y1 - r.y0 : r.x1 - r.x0});
  };
  for (int ey = 0; ey < ny; ++ey) add_edge(0, ey, Side::Left);
  for (int ey = 0; ey < ny; ++ey) add_edge(nx - 1, ey, Side::Right);
  for (int ex = 0; ex < nx; ++ex) add_edge(ex, 0, Side::Bottom);
  for (int ex = 0; ex < nx; ++ex) add_edge(ex, ny - 1, Side::Top);
  return mesh;
}

GaussRule gauss_rule(int L) {
  FHN_REQUIRE(L >= 1 && L <= 16, ErrorKind::InvalidArgument, "Gauss rule size must lie in [1, 16]");
  GaussRule rule;
  rule.nodes.resize(static_cast<std::size_t>(L));
  rule.weights.resize(static_cast<std::size_t>(L));
  for (int i = 0; i < L; ++i) {
    // Newton on P_L starting from the Tricomi-type guess.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (L + 0.5));
    double dp = 1.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= L; ++k) {
        const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      const double pl = L == 0 ? 1.0 : p1;
      const double plm1 = L == 1 ? 1.0 : p0;
      dp = L * (x * pl - plm1) / (x * x - 1.0);
      const double dx = pl / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Recompute the derivative at the converged root for the weight.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= L; ++k) {
      const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = L * (x * p1 - (L == 1 ? 1.0 : p0)) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[static_cast<std::size_t>(i)] = 0.5 * (1.0 + x);
    rule.weights[static_cast<std::size_t>(i)] = 0.5 * w;
  }
  std::vector<std::size_t> order(rule.nodes.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return rule.nodes[a] < rule.nodes[b]; });
  GaussRule sorted;
  for (std::size_t i : order) {
    sorted.nodes.push_back(rule.nodes[i]);
    sorted.weights.push_back(rule.weights[i]);
  }
  // Symmetrize against accumulated rounding: nodes pair as a, 1-a.
  const std::size_t n = sorted.nodes.size();
  for (std::size_t i = 0; i < n / 2; ++i) {
    const double a = 0.5 * (sorted.nodes[i] + (1.0 - sorted.nodes[n - 1 - i]));
    sorted.nodes[i] = a;
    sorted.nodes[n - 1 - i] = 1.0 - a;
    const double w = 0.5 * (sorted.weights[i] + sorted.weights[n - 1 - i]);
    sorted.weights[i] = w;
    sorted.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) sorted.nodes[n / 2] = 0.5;
  return sorted;
}

AxisPoints axis_points(const std::vector<double>& lines, const GaussRule& rule) {
  AxisPoints axis;
  const std::size_t cells = lines.size() - 1;
  axis.points.reserve(cells * rule.nodes.size());
  for (std::size_t c = 0; c < cells; ++c) {
    const double a = lines[c];
    const double len = lines[c + 1] - a;
    for (std::size_t l = 0; l < rule.nodes.size(); ++l) {
      axis.points.push_back(a + rule.nodes[l] * len);
      axis.weights.push_back(rule.weights[l] * len);
      axis.interval.push_back(static_cast<int>(c));
    }
  }
  return axis;
}

CollocationGrid build_collocation(const Mesh& mesh, const GaussRule& rule) {
  FHN_REQUIRE(rule.size() >= 1 && rule.nodes.size() == rule.weights.size(), ErrorKind::InvalidArgument,
              "malformed Gauss rule");
  FHN_REQUIRE(mesh.nx >= 1 && mesh.ny >= 1, ErrorKind::InvalidArgument, "empty mesh");

  CollocationGrid grid;
  grid.rule = rule;
  grid.x_axis = axis_points(mesh.x_lines, rule);
  grid.y_axis = axis_points(mesh.y_lines, rule);

  const std::size_t px_count = grid.x_axis.size();
  const std::size_t py_count = grid.y_axis.size();
  grid.points.reserve(px_count * py_count);
  for (std::size_t px = 0; px < px_count; ++px) {
    for (std::size_t py = 0; py < py_count; ++py) {
      grid.points.push_back({grid.x_axis.points[px], grid.y_axis.points[py],
                             grid.x_axis.weights[px] * grid.y_axis.weights[py],
                             mesh.element_index(grid.x_axis.interval[px], grid.y_axis.interval[py])});
    }
  }

  // Interior faces: vertical lines x = x_lines[i], 0 < i < nx, and horizontal ones.
  for (int ex = 0; ex + 1 < mesh.nx; ++ex) {
    const double x = mesh.x_lines[ex + 1];
    for (int ey = 0; ey < mesh.ny; ++ey) {
      const std::size_t minus = mesh.element_index(ex, ey);
      const std::size_t plus = mesh.element_index(ex + 1, ey);
      const double y0 = mesh.y_lines[ey];
      const double len = mesh.y_lines[ey + 1] - y0;
      grid.interior_faces.push_back({minus, plus, {1.0, 0.0}, len});
      for (std::size_t l = 0; l < rule.nodes.size(); ++l) {
        grid.face_points.push_back({x, y0 + rule.nodes[l] * len, rule.weights[l] * len, {1.0, 0.0}, minus, plus});
      }
    }
  }
  for (int ey = 0; ey + 1 < mesh.ny; ++ey) {
    const double y = mesh.y_lines[ey + 1];
    for (int ex = 0; ex < mesh.nx; ++ex) {
      const std::size_t minus = mesh.element_index(ex, ey);
      const std::size_t plus = mesh.element_index(ex, ey + 1);
      const double x0 = mesh.x_lines[ex];
      const double len = mesh.x_lines[ex + 1] - x0;
      grid.interior_faces.push_back({minus, plus, {0.0, 1.0}, len});
      for (std::size_t l = 0; l < rule.nodes.size(); ++l) {
        grid.face_points.push_back({x0 + rule.nodes[l] * len, y, rule.weights[l] * len, {0.0, 1.0}, minus, plus});
      }
    }
  }

  for (const BoundaryEdge& edge : mesh.boundary_edges) {
    const Rect& r = mesh.elements[edge.element];
    for (std::size_t l = 0; l < rule.nodes.size(); ++l) {
      const double a = rule.nodes[l];
      BoundaryPoint bp{};
      bp.weight = rule.weights[l] * edge.length;
      bp.normal = edge.normal;
      bp.side = edge.side;
      bp.element = edge.element;
      switch (edge.side) {
        case Side::Left: bp.x = mesh.domain.x_min; bp.y = r.y0 + a * (r.y1 - r.y0); break;
        case Side::Right: bp.x = mesh.domain.x_max; bp.y = r.y0 + a * (r.y1 - r.y0); break;
        case Side::Bottom: bp.x = r.x0 + a * (r.x1 - r.x0); bp.y = mesh.domain.y_min; break;
        case Side::Top: bp.x = r.x0 + a * (r.x1 - r.x0); bp.y = mesh.domain.y_max; break;
      }
      grid.boundary_points.push_back(bp);
    }
  }
  return grid;
}

}  // namespace fhn
