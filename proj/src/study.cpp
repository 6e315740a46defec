#include "fhn/study.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>

#include "fhn/error.hpp"

namespace fhn {

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

int parse_int(const std::string& key, const std::string& text) {
  std::size_t used = 0;
  int v = 0;
  try {
    v = std::stoi(text, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  FHN_REQUIRE(used == text.size() && used > 0, ErrorKind::InvalidArgument, key + ": not an integer: '" + text + "'");
  return v;
}

std::vector<double> ladder(int from, int to) {
  std::vector<double> out;
  for (int k = from; k <= to; ++k) out.push_back(std::ldexp(1.0, -k));
  return out;
}

std::string base_key(const std::string& key) {
  const auto dot = key.rfind('.');
  return dot == std::string::npos ? key : key.substr(dot + 1);
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  FHN_REQUIRE(out.good(), ErrorKind::InvalidArgument, "cannot write " + path.string());
  return out;
}

}  // namespace

void RunConfig::validate() const {
  FHN_REQUIRE(example >= 1 && example <= 3, ErrorKind::InvalidArgument, "example id must be 1, 2 or 3");
  FHN_REQUIRE(m >= 3, ErrorKind::InvalidArgument, "spline degree must be at least 3");
  FHN_REQUIRE(L == 0 || L >= m, ErrorKind::InvalidArgument, "L must be 0 (default) or at least m");
  for (double v : h) FHN_REQUIRE(v > 0.0 && std::isfinite(v), ErrorKind::InvalidArgument, "h values must be positive");
  for (double v : tau) FHN_REQUIRE(v > 0.0 && std::isfinite(v), ErrorKind::InvalidArgument, "tau values must be positive");
  FHN_REQUIRE(!(h.size() > 1 && tau.size() > 1), ErrorKind::InvalidArgument,
              "sweep either h or tau, not both at once");
  FHN_REQUIRE(snapshot_resolution >= 1, ErrorKind::InvalidArgument, "snapshot resolution must be >= 1");
}

double parse_number(const std::string& raw) {
  const std::string text = trim(raw);
  FHN_REQUIRE(!text.empty(), ErrorKind::InvalidArgument, "empty number");
  auto to_double = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    FHN_REQUIRE(used == s.size() && used > 0, ErrorKind::InvalidArgument, "not a number: '" + text + "'");
    return v;
  };
  const auto caret = text.find('^');
  if (caret == std::string::npos) return to_double(text);
  return std::pow(to_double(trim(text.substr(0, caret))), to_double(trim(text.substr(caret + 1))));
}

std::vector<double> parse_number_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(parse_number(item));
  FHN_REQUIRE(!out.empty(), ErrorKind::InvalidArgument, "empty list");
  return out;
}

std::map<std::string, std::string> parse_config_text(const std::string& text) {
  std::map<std::string, std::string> out;
  std::stringstream ss(text);
  std::string line, section;
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[') {
      FHN_REQUIRE(line.back() == ']' && line.size() > 2, ErrorKind::InvalidArgument,
                  "line " + std::to_string(lineno) + ": malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    FHN_REQUIRE(eq != std::string::npos, ErrorKind::InvalidArgument,
                "line " + std::to_string(lineno) + ": expected key=value");
    const std::string key = trim(line.substr(0, eq));
    FHN_REQUIRE(!key.empty(), ErrorKind::InvalidArgument, "line " + std::to_string(lineno) + ": empty key");
    out[section.empty() ? key : section + "." + key] = trim(line.substr(eq + 1));
  }
  return out;
}

RunConfig apply_config(const std::map<std::string, std::string>& entries, RunConfig cfg) {
  for (const auto& [full, value] : entries) {
    const std::string key = base_key(full);
    if (key == "example") cfg.example = parse_int(key, value);
    else if (key == "m") cfg.m = parse_int(key, value);
    else if (key == "L") cfg.L = parse_int(key, value);
    else if (key == "h") cfg.h = parse_number_list(value);
    else if (key == "tau") cfg.tau = parse_number_list(value);
    else if (key == "grid") cfg.grid = parse_grid_mode(value);
    else if (key == "out") cfg.out_dir = value;
    else if (key == "snapshots") cfg.snapshots = parse_number_list(value);
    else if (key == "resolution") cfg.snapshot_resolution = parse_int(key, value);
    else if (key == "seed") cfg.seed = static_cast<std::uint64_t>(std::stoull(value));
    else throw Error(ErrorKind::InvalidArgument, "unknown config key '" + full + "'");
  }
  cfg.validate();
  return cfg;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  FHN_REQUIRE(in.good(), ErrorKind::InvalidArgument, "cannot read config " + path.string());
  std::stringstream ss;
  ss << in.rdbuf();
  return apply_config(parse_config_text(ss.str()), std::move(base));
}

const char* to_string(SweepKind kind) {
  switch (kind) {
    case SweepKind::Spatial: return "spatial";
    case SweepKind::Temporal: return "temporal";
    case SweepKind::Single: return "single";
  }
  return "unknown";
}

std::vector<Sweep> plan_sweeps(const RunConfig& cfg) {
  cfg.validate();
  if (cfg.example == 3 && cfg.h.empty() && cfg.tau.empty())
    return {{SweepKind::Single, {2.5 * std::ldexp(1.0, -5)}, {std::ldexp(1.0, -6)}}};
  if (cfg.h.empty() && cfg.tau.empty())
    return {{SweepKind::Spatial, ladder(2, 5), {std::ldexp(1.0, -6)}},
            {SweepKind::Temporal, {std::ldexp(1.0, -4)}, ladder(4, 7)}};
  Sweep s;
  s.h = cfg.h.empty() ? std::vector<double>{std::ldexp(1.0, -4)} : cfg.h;
  s.tau = cfg.tau.empty() ? std::vector<double>{std::ldexp(1.0, -6)} : cfg.tau;
  s.kind = s.h.size() > 1 ? SweepKind::Spatial : s.tau.size() > 1 ? SweepKind::Temporal : SweepKind::Single;
  return {s};
}

bool SweepResult::all_ok() const {
  for (const auto& r : rows)
    if (r.status != "ok") return false;
  return true;
}

SingleRun run_single(const ProblemSpec& problem, double h, double tau, int m, int L, GridMode grid,
                     bool keep_trajectory) {
  SingleRun out;
  out.row.report.h = h;
  out.row.report.tau = tau;
  out.row.report.error = {kNaN, kNaN};
  const auto start = std::chrono::steady_clock::now();
  try {
    out.disc = discretize(problem, h, m, L);
    out.row.critical_step = critical_local_step(out.disc.ops);
    const TimeGrid tg = build_time_grid(grid, problem.final_time, choose_N_for_target(problem.final_time, tau, grid));
    std::optional<ErrorTracker> tracker;
    if (problem.has_exact()) tracker.emplace(out.disc.basis, out.disc.grid, problem.exact);
    RunOptions opts;
    opts.store_trajectory = keep_trajectory;
    if (tracker) opts.observer = [&](int, double t, const Eigen::VectorXd& c) { tracker->observe(t, c); };
    out.result = run(problem, out.disc, tg, opts);
    if (tracker) out.row.report.error = tracker->max_error();
  } catch (const Error& e) {
    out.row.status = e.what();
  }
  out.row.report.wall_seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<SweepResult> run_convergence_study(const RunConfig& cfg, std::ostream* log) {
  const ProblemSpec problem = example_problem(cfg.example);
  std::filesystem::create_directories(cfg.out_dir);
  std::vector<SweepResult> results;
  for (const Sweep& sweep : plan_sweeps(cfg)) {
    SweepResult res;
    res.sweep = sweep;
    const std::size_t rows = std::max(sweep.h.size(), sweep.tau.size());
    for (std::size_t k = 0; k < rows; ++k) {
      const double h = sweep.h.size() > 1 ? sweep.h[k] : sweep.h.front();
      const double tau = sweep.tau.size() > 1 ? sweep.tau[k] : sweep.tau.front();
      const bool finest = k + 1 == rows && !cfg.snapshots.empty();
      SingleRun run = run_single(problem, h, tau, cfg.m, cfg.L, cfg.grid, finest);
      if (log) {
        *log << problem.name << ' ' << to_string(sweep.kind) << " h=" << h << " tau=" << tau << ": " << run.row.status;
        if (run.row.status == "ok" && tau > run.row.critical_step)
          *log << " (warning: tau exceeds the explicit-diffusion stability limit " << run.row.critical_step << ")";
        *log << '\n';
      }
      if (!res.rows.empty()) {
        const ErrorReport& prev = res.rows.back().report;
        try {
          run.row.report.order = Vec2{convergence_order(prev.error[0], run.row.report.error[0]),
                                      convergence_order(prev.error[1], run.row.report.error[1])};
        } catch (const Error&) {
          run.row.report.order.reset();
        }
      }
      if (finest && run.row.status == "ok") {
        try {
          dump_snapshots(problem, run.disc, run.result.trajectory, cfg.snapshots, cfg.snapshot_resolution, cfg.out_dir,
                         problem.name + "_" + to_string(sweep.kind));
        } catch (const Error& e) {
          run.row.status = e.what();
        }
      }
      res.rows.push_back(std::move(run.row));
    }
    res.csv = cfg.out_dir / (problem.name + "_" + to_string(sweep.kind) + ".csv");
    write_sweep_csv(res, res.csv);
    results.push_back(std::move(res));
  }
  return results;
}

std::string format_number(double v) {
  if (std::isnan(v)) return {};
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9e", v);
  return buf;
}

std::string csv_header() { return "h,tau_N,err_u,CO_u,err_v,CO_v,wall_seconds,status"; }

std::string csv_row(const StudyRow& row) {
  const ErrorReport& r = row.report;
  const double co_u = r.order ? (*r.order)[0] : kNaN;
  const double co_v = r.order ? (*r.order)[1] : kNaN;
  std::string status = row.status;
  for (char& ch : status)
    if (ch == ',' || ch == '\n' || ch == '\r') ch = ';';
  return format_number(r.h) + ',' + format_number(r.tau) + ',' + format_number(r.error[0]) + ',' +
         format_number(co_u) + ',' + format_number(r.error[1]) + ',' + format_number(co_v) + ',' +
         format_number(r.wall_seconds) + ',' + status;
}

void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path) {
  std::ofstream out = open_out(path);
  out << csv_header() << '\n';
  for (const auto& row : sweep.rows) out << csv_row(row) << '\n';
}

std::vector<std::filesystem::path> dump_snapshots(const ProblemSpec& problem, const Discretization& disc,
                                                  const Trajectory& trajectory, const std::vector<double>& times,
                                                  int resolution, const std::filesystem::path& out_dir,
                                                  const std::string& prefix) {
  FHN_REQUIRE(resolution >= 1, ErrorKind::InvalidArgument, "snapshot resolution must be >= 1");
  FHN_REQUIRE(!trajectory.times.empty(), ErrorKind::InvalidArgument, "no stored levels to sample");
  const double T = problem.final_time;
  std::filesystem::create_directories(out_dir);
  std::vector<std::filesystem::path> paths;
  for (double t : times) {
    FHN_REQUIRE(t >= -1e-12 * T && t <= T * (1.0 + 1e-12), ErrorKind::InvalidArgument,
                "snapshot time " + std::to_string(t) + " lies outside [0, T]");
    std::size_t best = 0;
    for (std::size_t k = 1; k < trajectory.times.size(); ++k)
      if (std::abs(trajectory.times[k] - t) < std::abs(trajectory.times[best] - t)) best = k;
    const double ts = trajectory.times[best];
    const Eigen::VectorXd& c = trajectory.coeffs[best];

    char name[64];
    std::snprintf(name, sizeof name, "_t%.6f.csv", t);
    const std::filesystem::path path = out_dir / (prefix + name);
    std::ofstream out = open_out(path);
    out << "x,y,t,u_h,v_h";
    if (problem.has_exact()) out << ",u_exact,v_exact,e_u,e_v";
    out << '\n';
    const Domain& d = problem.domain;
    for (int i = 0; i < resolution; ++i) {
      const double x = d.x_min + (i + 0.5) * d.width() / resolution;
      for (int j = 0; j < resolution; ++j) {
        const double y = d.y_min + (j + 0.5) * d.height() / resolution;
        const PointSample s = evaluate(disc.basis, c, x, y);
        out << format_number(x) << ',' << format_number(y) << ',' << format_number(ts) << ','
            << format_number(s.value[0]) << ',' << format_number(s.value[1]);
        if (problem.has_exact()) {
          const Vec2 ex = problem.exact(x, y, ts);
          out << ',' << format_number(ex[0]) << ',' << format_number(ex[1]) << ','
              << format_number(s.value[0] - ex[0]) << ',' << format_number(s.value[1] - ex[1]);
        }
        out << '\n';
      }
    }
    paths.push_back(path);
  }
  return paths;
}

}  // namespace fhn
