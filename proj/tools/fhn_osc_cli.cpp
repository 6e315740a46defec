// fhn-osc: convergence sweeps and reference solves for the FitzHugh–Nagumo examples.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fhn/error.hpp"
#include "fhn/oracle.hpp"
#include "fhn/study.hpp"

namespace {

int run_solve(const fhn::RunConfig& cfg) {
  const auto sweeps = fhn::run_convergence_study(cfg, &std::cerr);
  bool ok = true;
  for (const auto& s : sweeps) {
    std::cout << s.csv.string() << '\n';
    ok = ok && s.all_ok();
  }
  return ok ? 0 : 2;
}

int run_oracle(int example, int nx, int nt, const std::filesystem::path& out_dir) {
  const fhn::ProblemSpec problem = fhn::example_problem(example);
  fhn::OracleSolution sol;
  try {
    sol = fhn::oracle_solve(problem, nx, nt);
  } catch (const fhn::Error& e) {
    if (e.kind() != fhn::ErrorKind::OracleFailure) throw;
    std::cerr << e.what() << '\n';
    return 2;
  }
  std::filesystem::create_directories(out_dir);
  const auto path = out_dir / (problem.name + "_oracle.csv");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw fhn::Error(fhn::ErrorKind::InvalidArgument, "cannot write " + path.string());
  out << "x,y,t,u,v\n";
  const int m = nx + 1;
  const auto& f = sol.frames.back();
  for (int i = 0; i < m; ++i)
    for (int j = 0; j < m; ++j)
      out << fhn::format_number(sol.node_x(i)) << ',' << fhn::format_number(sol.node_y(j)) << ','
          << fhn::format_number(sol.times.back()) << ',' << fhn::format_number(f[0](i * m + j)) << ','
          << fhn::format_number(f[1](i * m + j)) << '\n';
  if (problem.has_exact()) {
    const fhn::Vec2 e = fhn::oracle_relative_max_error(sol, problem.exact);
    std::cerr << "relative max error at T: u " << e[0] << ", v " << e[1] << '\n';
  }
  std::cout << path.string() << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Predictor-corrector spline collocation solver for FitzHugh–Nagumo"};
  app.require_subcommand(1);

  auto* solve = app.add_subcommand("solve", "run a convergence sweep and write CSV tables");
  solve->set_help_flag("--help", "print this help and exit");
  int example = 1;
  std::string config_file, h_list, tau_list, grid = "uniform", snapshots;
  std::string out_dir = "out";
  int m = 4, L = 0, resolution = 64;
  solve->add_option("--config", config_file, "key=value config file; flags given here override it");
  auto* ex_opt = solve->add_option("--example", example, "example id")->check(CLI::Range(1, 3));
  auto* h_opt = solve->add_option("--h", h_list, "mesh sizes, comma separated (2^-3 style allowed)");
  auto* tau_opt = solve->add_option("--tau", tau_list, "target local time steps, comma separated");
  auto* m_opt = solve->add_option("--m", m, "spline degree");
  auto* l_opt = solve->add_option("--L", L, "Gauss points per direction (0: m + 1)");
  auto* grid_opt = solve->add_option("--grid", grid, "uniform or graded")->check(CLI::IsMember({"uniform", "graded"}));
  auto* out_opt = solve->add_option("--out", out_dir, "output directory");
  auto* snap_opt = solve->add_option("--snapshots", snapshots, "snapshot times of the finest run");
  auto* res_opt = solve->add_option("--resolution", resolution, "snapshot lattice size per axis");

  auto* oracle = app.add_subcommand("oracle", "finite-difference reference solve");
  int o_example = 1, nx = 128, nt = 512;
  std::string o_out = "out";
  oracle->add_option("--example", o_example, "example id")->required()->check(CLI::Range(1, 3));
  oracle->add_option("--nx", nx, "intervals per axis")->check(CLI::PositiveNumber);
  oracle->add_option("--nt", nt, "time steps")->check(CLI::PositiveNumber);
  oracle->add_option("--out", o_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*solve) {
      fhn::RunConfig cfg;
      if (!config_file.empty()) cfg = fhn::load_config_file(config_file);
      if (*ex_opt) cfg.example = example;
      if (*h_opt) cfg.h = fhn::parse_number_list(h_list);
      if (*tau_opt) cfg.tau = fhn::parse_number_list(tau_list);
      if (*m_opt) cfg.m = m;
      if (*l_opt) cfg.L = L;
      if (*grid_opt) cfg.grid = fhn::parse_grid_mode(grid);
      if (*out_opt) cfg.out_dir = out_dir;
      if (*snap_opt) cfg.snapshots = fhn::parse_number_list(snapshots);
      if (*res_opt) cfg.snapshot_resolution = resolution;
      cfg.validate();
      return run_solve(cfg);
    }
    return run_oracle(o_example, nx, nt, o_out);
  } catch (const fhn::Error& e) {
    std::cerr << e.what() << '\n';
    return 1;
  }
}
