#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fftlr/solvers/solvers.hpp"

namespace fftlr::harness {

enum class Reference { none, full };

struct RunConfig {
  std::size_t dim = 2;
  std::size_t grid_n = 15;
  MaterialSpec material;
  Scheme scheme = Scheme::ga;
  Method solver = Method::pcg;
  Format format = Format::full;
  std::size_t rank = 5;
  std::vector<std::size_t> rank_schedule;
  double tol = 1e-6;
  std::size_t max_iter = 500;
  std::size_t stagnation_window = 1;
  bool allow_lowrank_richardson = false;
  // Low-rank runs compared against a full reference solve on grid_n are
  // themselves solved on grid_multiplier * grid_n.
  std::size_t grid_multiplier = 3;
  Reference reference = Reference::none;
  double reference_tol = 1e-8;
  // Rank continuation stops at the first rank whose relative error is at or
  // below this value.
  double target_rel_error = 0.0;
  std::string out;

  void validate() const;
  /// Grid the case itself is solved on.
  std::size_t solve_grid_n() const;
};

/// Sets one key. Keys use underscores; dashes are accepted as well.
void apply_key(RunConfig& c, std::string key, const std::string& value);
/// Flat "key = value" text; '#' starts a comment.
RunConfig parse_config_text(const std::string& text, RunConfig base = {});
RunConfig load_config_file(const std::filesystem::path& path, RunConfig base = {});
/// Every key with its current value, in a fixed order.
std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& c);

struct ExperimentResult {
  std::string label;
  RunConfig config;
  std::vector<IterationRecord> iterations;
  bool converged = false;
  StopReason stop = StopReason::max_iter;
  double a_eff = 0.0;
  std::optional<double> a_ref;
  std::optional<double> relative_error;
  std::size_t param_count = 0;
  RankVector ranks;
  std::size_t matvecs = 0;
  double wall_s = 0.0;
  std::size_t solve_grid_n = 0;
  bool approximate = false;
  std::optional<std::size_t> achieved_rank;
  std::vector<std::pair<std::size_t, double>> stage_errors;
  bool norm_shortcut_fallback = false;
};

/// Validates, builds grid, material and context, runs the configured solver.
/// A known reference value skips the reference solve.
ExperimentResult run_case(const RunConfig& config, std::optional<double> known_a_ref = std::nullopt);

/// Memory of a tensor of order d, shape (N,...,N), maximum rank r.
std::size_t memory_formula(Format f, std::size_t d, std::size_t n, std::size_t r);

// ---------------------------------------------------------------------------
// Outputs

std::string iterations_csv(const ExperimentResult& r);
/// Summary document; floats carry 17 significant digits.
std::string summary_json(const ExperimentResult& r);
/// Inverse of summary_json for the result fields (the config echo is parsed
/// back through apply_key).
ExperimentResult parse_summary(const std::string& text);

struct SweepRow {
  std::string case_label;
  std::size_t n = 0;
  std::size_t rank = 0;
  std::map<std::string, std::string> values;
};

struct ExperimentSet {
  std::string family;
  std::vector<ExperimentResult> results;
  std::vector<SweepRow> rows;
  // residual series, one row per iteration (residuum family)
  std::vector<SweepRow> series;
};

/// Header "case,N,rank" followed by `columns`; rows sorted by (N, rank).
std::string sweep_csv(std::vector<SweepRow> rows, const std::vector<std::string>& columns);

/// One directory per result (iterations.csv, summary.json) plus the sweep
/// tables. A single result with an empty label is written straight into dir.
void write_outputs(const std::vector<ExperimentResult>& results, const std::filesystem::path& dir);
void write_outputs(const ExperimentSet& set, const std::filesystem::path& dir);

// ---------------------------------------------------------------------------
// Experiment families

enum class Family { residuum, error_vs_rank, rank_table, scaling };
std::string_view family_name(Family f);
Family parse_family(std::string_view s);

enum class Scale { smoke, desk };
Scale parse_scale(std::string_view s);

ExperimentSet replicate_experiment(Family family, Scale scale = Scale::desk);

}  // namespace fftlr::harness
