#include <cmath>
#include <cstdio>
#include <fstream>

#include "fftlr/harness/harness.hpp"

namespace fftlr::harness {

namespace {

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

const std::vector<std::string> kColumns = {
    "dim",          "scheme",     "material",       "anisotropic", "format",      "solve_N",
    "a_eff",        "a_ref",      "relative_error", "param_count", "memory_formula", "rank_max",
    "achieved_rank", "iterations", "stop_reason",    "final_residual", "wall_s"};

const std::vector<std::string> kSeriesColumns = {"iter", "residual_norm"};

struct Case {
  std::string name;
  std::size_t dim;
  std::size_t n;
  Scheme scheme;
  MaterialSpec::Kind material;
  bool anisotropic;
  Format format;
};

RunConfig base_config(const Case& c) {
  RunConfig cfg;
  cfg.dim = c.dim;
  cfg.grid_n = c.n;
  cfg.scheme = c.scheme;
  cfg.material.kind = c.material;
  cfg.material.anisotropic = c.anisotropic;
  cfg.format = c.format;
  cfg.solver = c.format == Format::full ? Method::pcg : Method::minres;
  return cfg;
}

std::string label_of(const Case& c, std::size_t rank) {
  return c.name + "_d" + std::to_string(c.dim) + "_n" + std::to_string(c.n) + "_" +
         std::string(format_name(c.format)) + (rank ? "_r" + std::to_string(rank) : std::string());
}

SweepRow row_of(const std::string& case_label, const ExperimentResult& r, std::size_t rank) {
  const auto& c = r.config;
  SweepRow row{case_label, c.grid_n, rank, {}};
  auto& v = row.values;
  v["dim"] = std::to_string(c.dim);
  v["scheme"] = scheme_name(c.scheme);
  v["material"] = material_kind_name(c.material.kind);
  v["anisotropic"] = c.material.anisotropic ? "true" : "false";
  v["format"] = format_name(c.format);
  v["solve_N"] = std::to_string(r.solve_grid_n);
  v["a_eff"] = num(r.a_eff);
  v["a_ref"] = r.a_ref ? num(*r.a_ref) : "";
  v["relative_error"] = r.relative_error ? num(*r.relative_error) : "";
  v["param_count"] = std::to_string(r.param_count);
  v["rank_max"] = std::to_string(max_rank(r.ranks));
  v["memory_formula"] =
      c.format == Format::full ? std::to_string(memory_formula(Format::full, c.dim, r.solve_grid_n, 0))
                               : std::to_string(memory_formula(c.format, c.dim, r.solve_grid_n, max_rank(r.ranks)));
  v["achieved_rank"] = r.achieved_rank ? std::to_string(*r.achieved_rank) : "";
  v["iterations"] = std::to_string(r.iterations.size());
  v["stop_reason"] = stop_reason_name(r.stop);
  v["final_residual"] = r.iterations.empty() ? "" : num(r.iterations.back().residual_norm);
  v["wall_s"] = num(r.wall_s);
  return row;
}

void add(ExperimentSet& set, const std::string& case_label, ExperimentResult r, std::size_t rank) {
  set.rows.push_back(row_of(case_label, r, rank));
  set.results.push_back(std::move(r));
}

std::vector<std::size_t> odd_schedule(std::size_t max_rank) {
  std::vector<std::size_t> s;
  for (std::size_t r = 1; r <= max_rank; r += 2) s.push_back(r);
  return s;
}

// Fig. 3 analogue: residual histories of minres for several fixed ranks.
ExperimentSet residuum(Scale scale) {
  const bool desk = scale == Scale::desk;
  const std::size_t n2 = desk ? 135 : 15, n3 = desk ? 15 : 5;
  const std::vector<Case> cases = {
      {"square", 2, n2, Scheme::ga, MaterialSpec::Kind::square, false, Format::cp},
      {"stochastic", 2, n2, Scheme::gani, MaterialSpec::Kind::stochastic, false, Format::cp},
      {"square", 3, n3, Scheme::ga, MaterialSpec::Kind::square, false, Format::tucker},
      {"stochastic", 3, n3, Scheme::gani, MaterialSpec::Kind::stochastic, false, Format::tt},
  };
  const std::vector<std::size_t> ranks = desk ? std::vector<std::size_t>{1, 3, 5, 10} : std::vector<std::size_t>{1, 3};
  ExperimentSet set{"residuum", {}, {}, {}};
  for (const auto& c : cases)
    for (auto r : ranks) {
      RunConfig cfg = base_config(c);
      cfg.rank = r;
      cfg.tol = 1e-10;
      cfg.max_iter = 300;
      auto res = run_case(cfg);
      res.label = label_of(c, r);
      const std::string case_label = label_of(c, 0);
      for (const auto& it : res.iterations)
        set.series.push_back(
            {case_label, c.n, r, {{"iter", std::to_string(it.index)}, {"residual_norm", num(it.residual_norm)}}});
      add(set, case_label, std::move(res), r);
    }
  return set;
}

// Fig. 4 analogue: relative error of the effective coefficient against a
// full solve of the same discrete problem, over the rank.
ExperimentSet error_vs_rank(Scale scale) {
  const bool desk = scale == Scale::desk;
  const std::size_t n2 = desk ? 135 : 15, n3 = desk ? 15 : 5;
  std::vector<Case> cases;
  for (auto [dim, n] : {std::pair{std::size_t{2}, n2}, std::pair{std::size_t{3}, n3}})
    for (auto f : {Format::cp, Format::tucker, Format::tt}) {
      if (f == Format::cp && dim == 3) continue;
      cases.push_back({"square", dim, n, Scheme::ga, MaterialSpec::Kind::square, false, f});
      cases.push_back({"stochastic", dim, n, Scheme::gani, MaterialSpec::Kind::stochastic, false, f});
    }
  // odd ranks: the symmetric square problems gain little from even ones
  const std::vector<std::size_t> ranks = odd_schedule(desk ? 11 : 5);
  ExperimentSet set{"error-vs-rank", {}, {}, {}};
  for (const auto& c : cases) {
    std::optional<double> a_ref;
    for (auto r : ranks) {
      RunConfig cfg = base_config(c);
      cfg.rank = r;
      cfg.tol = 1e-10;
      cfg.max_iter = 300;
      cfg.reference = Reference::full;
      cfg.grid_multiplier = 1;
      auto res = run_case(cfg, a_ref);
      a_ref = res.a_ref;
      res.label = label_of(c, r);
      add(set, label_of(c, 0), std::move(res), r);
    }
  }
  return set;
}

// Table 4 analogue: smallest rank on the grid 3N whose effective coefficient
// is at least as accurate as the full Ga solve on N.
ExperimentSet rank_table(Scale scale) {
  const bool desk = scale == Scale::desk;
  std::vector<std::pair<std::size_t, std::size_t>> grids =
      desk ? std::vector<std::pair<std::size_t, std::size_t>>{{2, 45}, {2, 135}, {3, 5}, {3, 15}}
           : std::vector<std::pair<std::size_t, std::size_t>>{{2, 15}, {3, 5}};
  ExperimentSet set{"rank-table", {}, {}, {}};
  for (bool aniso : {false, true})
    for (auto [dim, n] : grids) {
      const Case c{aniso ? "anisotropic" : "isotropic", dim, n, Scheme::ga, MaterialSpec::Kind::square, aniso, Format::tt};
      RunConfig cfg = base_config(c);
      cfg.reference = Reference::full;
      cfg.reference_tol = 1e-6;
      cfg.grid_multiplier = 3;
      cfg.tol = 1e-10;
      cfg.max_iter = 300;
      cfg.rank_schedule = odd_schedule(dim == 2 ? 41 : 21);
      auto res = run_case(cfg);
      res.label = label_of(c, 0);
      const std::size_t rank = res.achieved_rank.value_or(0);
      add(set, label_of(c, 0), std::move(res), rank);
    }
  return set;
}

// Figs. 5-6 analogue: wall time and memory of full and compressed solves at
// matched accuracy.
ExperimentSet scaling(Scale scale) {
  const bool desk = scale == Scale::desk;
  const std::vector<std::pair<std::size_t, std::size_t>> grids =
      desk ? std::vector<std::pair<std::size_t, std::size_t>>{{2, 45}, {2, 135}, {3, 5}, {3, 15}}
           : std::vector<std::pair<std::size_t, std::size_t>>{{2, 5}, {2, 15}, {3, 5}};
  ExperimentSet set{"scaling", {}, {}, {}};
  bool warm = false;
  for (auto [dim, n] : grids) {
    // Ga, square: full on N against compressed on 3N
    {
      const Case fc{"ga_square", dim, n, Scheme::ga, MaterialSpec::Kind::square, false, Format::full};
      RunConfig cfg = base_config(fc);
      cfg.tol = 1e-6;
      if (!warm) {
        run_case(cfg);
        warm = true;
      }
      auto full = run_case(cfg);
      const double a_ref = full.a_eff;
      full.label = label_of(fc, 0);
      add(set, "ga_square_d" + std::to_string(dim), std::move(full), 0);
      for (auto f : {Format::cp, Format::tucker, Format::tt}) {
        if (f == Format::cp && dim == 3) continue;
        Case c = fc;
        c.format = f;
        RunConfig lc = base_config(c);
        lc.reference = Reference::full;
        lc.reference_tol = 1e-6;
        lc.grid_multiplier = 3;
        lc.tol = 1e-10;
        lc.max_iter = 300;
        lc.rank_schedule = odd_schedule(21);
        auto res = run_case(lc, a_ref);
        res.label = label_of(c, 0);
        const std::size_t rank = res.achieved_rank.value_or(0);
        add(set, "ga_square_d" + std::to_string(dim), std::move(res), rank);
      }
    }
    // GaNi, stochastic: both on the same grid, relative error below 1e-3
    {
      const Case fc{"gani_stochastic", dim, n, Scheme::gani, MaterialSpec::Kind::stochastic, false, Format::full};
      RunConfig cfg = base_config(fc);
      cfg.tol = 1e-6;
      auto full = run_case(cfg);
      full.label = label_of(fc, 0);
      add(set, "gani_stochastic_d" + std::to_string(dim), std::move(full), 0);
      Case c = fc;
      c.format = Format::tt;
      RunConfig lc = base_config(c);
      lc.reference = Reference::full;
      lc.reference_tol = 1e-8;
      lc.grid_multiplier = 1;
      lc.tol = 1e-10;
      lc.max_iter = 300;
      lc.rank_schedule = odd_schedule(21);
      lc.target_rel_error = 1e-3;
      auto res = run_case(lc);
      res.label = label_of(c, 0);
      const std::size_t rank = res.achieved_rank.value_or(0);
      add(set, "gani_stochastic_d" + std::to_string(dim), std::move(res), rank);
    }
  }
  return set;
}

void write_text(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "outputs: cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  require(static_cast<bool>(out), "outputs: write failed for '" + path.string() + "'");
}

}  // namespace

std::string_view family_name(Family f) {
  switch (f) {
    case Family::residuum:
      return "residuum";
    case Family::error_vs_rank:
      return "error-vs-rank";
    case Family::rank_table:
      return "rank-table";
    case Family::scaling:
      return "scaling";
  }
  return "?";
}

Family parse_family(std::string_view s) {
  for (auto f : {Family::residuum, Family::error_vs_rank, Family::rank_table, Family::scaling})
    if (family_name(f) == s) return f;
  throw Error("unknown experiment family '" + std::string(s) +
              "' (expected residuum, error-vs-rank, rank-table or scaling)");
}

Scale parse_scale(std::string_view s) {
  if (s == "desk") return Scale::desk;
  if (s == "smoke") return Scale::smoke;
  throw Error("unknown scale '" + std::string(s) + "' (expected desk or smoke)");
}

ExperimentSet replicate_experiment(Family family, Scale scale) {
  switch (family) {
    case Family::residuum:
      return residuum(scale);
    case Family::error_vs_rank:
      return error_vs_rank(scale);
    case Family::rank_table:
      return rank_table(scale);
    case Family::scaling:
      return scaling(scale);
  }
  throw Error("unreachable experiment family");
}

void write_outputs(const ExperimentSet& set, const std::filesystem::path& dir) {
  write_outputs(set.results, dir);
  write_text(dir / (set.family + ".csv"), sweep_csv(set.rows, kColumns));
  if (!set.series.empty()) write_text(dir / (set.family + "_series.csv"), sweep_csv(set.series, kSeriesColumns));
}

}  // namespace fftlr::harness
