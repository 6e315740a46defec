#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "fhn/analysis.hpp"
#include "fhn/stepper.hpp"
#include "fhn/timegrid.hpp"

namespace fhn {

struct RunConfig {
  int example = 1;
  int m = 4;
  int L = 0;  // 0 means m + 1
  std::vector<double> h;
  std::vector<double> tau;
  GridMode grid = GridMode::Uniform;
  std::filesystem::path out_dir = "out";
  std::vector<double> snapshots;
  int snapshot_resolution = 64;
  std::uint64_t seed = 0;

  void validate() const;
};

/// Number or power literal such as "0.25" or "2^-4".
double parse_number(const std::string& text);
/// Comma-separated list of parse_number literals.
std::vector<double> parse_number_list(const std::string& text);

/// key=value lines grouped under [section] headers; '#' starts a comment.
/// Keys come back as "section.key" (or "key" before the first header).
std::map<std::string, std::string> parse_config_text(const std::string& text);
/// Applies a parsed file on top of `base`; unknown keys are rejected.
RunConfig apply_config(const std::map<std::string, std::string>& entries, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});

enum class SweepKind { Spatial, Temporal, Single };
const char* to_string(SweepKind kind);

struct Sweep {
  SweepKind kind = SweepKind::Single;
  std::vector<double> h;
  std::vector<double> tau;
};

/// Sweeps implied by a config: one list may have several entries, not both.
/// Empty lists fall back to the reference ladders for the example.
std::vector<Sweep> plan_sweeps(const RunConfig& config);

struct StudyRow {
  ErrorReport report;
  std::string status = "ok";
  double critical_step = 0.0;  // stability limit of the explicit diffusion term
};

struct SweepResult {
  Sweep sweep;
  std::vector<StudyRow> rows;
  std::filesystem::path csv;
  bool all_ok() const;
};

/// One solve: errors vs the exact solution (NaN when there is none).
struct SingleRun {
  StudyRow row;
  Discretization disc;
  RunResult result;
};
SingleRun run_single(const ProblemSpec& problem, double h, double tau, int m, int L, GridMode grid,
                     bool keep_trajectory);

/// Runs every sweep, writes one CSV per sweep into out_dir and snapshots of
/// the finest run when requested. Row failures are recorded, not thrown.
std::vector<SweepResult> run_convergence_study(const RunConfig& config, std::ostream* log = nullptr);

/// "%.9e", or empty for NaN.
std::string format_number(double v);
std::string csv_header();
std::string csv_row(const StudyRow& row);
void write_sweep_csv(const SweepResult& sweep, const std::filesystem::path& path);

/// Cell-centred r x r lattice sample of the stored level nearest each time.
/// Writes one CSV per time and returns the paths.
std::vector<std::filesystem::path> dump_snapshots(const ProblemSpec& problem, const Discretization& disc,
                                                  const Trajectory& trajectory, const std::vector<double>& times,
                                                  int resolution, const std::filesystem::path& out_dir,
                                                  const std::string& prefix);

}  // namespace fhn
