#include <CLI11.hpp>
#include <cstdio>
#include <iostream>
#include <map>

#include "fftlr/harness/harness.hpp"

using namespace fftlr;
using namespace fftlr::harness;

namespace {

void print_result(const ExperimentResult& r) {
  std::printf("%-28s A_eff=%.12f", r.label.empty() ? "run" : r.label.c_str(), r.a_eff);
  if (r.relative_error) std::printf(" rel_err=% .3e", *r.relative_error);
  std::printf(" rank=%zu params=%zu iters=%zu stop=%s wall=%.3fs\n", max_rank(r.ranks), r.param_count,
              r.iterations.size(), std::string(stop_reason_name(r.stop)).c_str(), r.wall_s);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"FFT-based homogenisation with low-rank tensors"};
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "solve one cell problem");
  std::string config_path;
  run->add_option("--config", config_path, "flat key = value file, overridden by flags")->check(CLI::ExistingFile);
  // flag name -> config key
  const std::vector<std::pair<std::string, std::string>> flags = {
      {"--dim", "dim"},
      {"--grid-n", "grid_n"},
      {"--material", "material"},
      {"--contrast", "contrast"},
      {"--seed", "seed"},
      {"--scheme", "scheme"},
      {"--solver", "solver"},
      {"--format", "format"},
      {"--rank", "rank"},
      {"--rank-schedule", "rank_schedule"},
      {"--tol", "tol"},
      {"--max-iter", "max_iter"},
      {"--grid-multiplier", "grid_multiplier"},
      {"--reference", "reference"},
      {"--target-rel-error", "target_rel_error"},
      {"--out", "out"},
  };
  std::map<std::string, std::string> values;
  for (const auto& [flag, key] : flags) run->add_option(flag, values[key]);
  bool anisotropic = false;
  run->add_flag("--anisotropic", anisotropic, "add the constant anisotropic shift");
  bool allow_richardson = false;
  run->add_flag("--allow-lowrank-richardson", allow_richardson, "permit richardson on compressed formats");

  auto* rep = app.add_subcommand("replicate", "run one experiment family at reduced size");
  std::string family = "residuum", scale = "desk", rep_out;
  rep->add_option("--family", family, "residuum | error-vs-rank | rank-table | scaling");
  rep->add_option("--scale", scale, "desk | smoke");
  rep->add_option("--out", rep_out, "output directory");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      RunConfig cfg = config_path.empty() ? RunConfig{} : load_config_file(config_path);
      for (const auto& [flag, key] : flags)
        if (run->count(flag) > 0) apply_key(cfg, key, values[key]);
      if (anisotropic) cfg.material.anisotropic = true;
      if (allow_richardson) cfg.allow_lowrank_richardson = true;
      const ExperimentResult res = run_case(cfg);
      print_result(res);
      if (!cfg.out.empty()) write_outputs({res}, cfg.out);
    } else {
      const ExperimentSet set = replicate_experiment(parse_family(family), parse_scale(scale));
      for (const auto& r : set.results) print_result(r);
      if (!rep_out.empty()) write_outputs(set, rep_out);
    }
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
