#include "fftlr/harness/harness.hpp"

namespace fftlr::harness {

namespace {

template <class T> MaterialField<FullTensor> densify(const MaterialField<T>& m) {
  MaterialField<FullTensor> out;
  out.scheme = m.scheme;
  out.grid_n = m.grid_n;
  out.c_min = m.c_min;
  out.c_max = m.c_max;
  out.approximate = m.approximate;
  out.comp.resize(m.comp.size());
  for (std::size_t a = 0; a < m.comp.size(); ++a)
    for (const auto& c : m.comp[a]) {
      MaterialComponent<FullTensor> fc;
      fc.constant = c.constant;
      if (c.field) fc.field = reconstruct(*c.field);
      out.comp[a].push_back(std::move(fc));
    }
  return out;
}

double reference_solve(const RunConfig& c, const GridSpec& grid, MaterialField<FullTensor> material) {
  const auto ctx = make_context<FullTensor>(grid, std::move(material), TruncationPolicy::fixed(1));
  SolverConfig sc;
  sc.method = Method::pcg;
  sc.residual_tol = c.reference_tol;
  sc.max_iter = 10000;
  return pcg_full(ctx, build_rhs(ctx), sc).a_eff;
}

template <class T> void copy_report(ExperimentResult& res, SolveReport<T>& rep) {
  res.iterations = std::move(rep.iterations);
  res.converged = rep.converged;
  res.stop = rep.stop;
  res.a_eff = rep.a_eff;
  res.param_count = rep.param_count;
  res.ranks = rank_vector(rep.solution);
  res.matvecs = rep.matvecs;
  res.wall_s = rep.wall_s;
  res.achieved_rank = rep.achieved_rank;
  res.stage_errors = std::move(rep.stage_errors);
  res.norm_shortcut_fallback = rep.norm_shortcut_fallback;
}

template <class T>
void solve(const RunConfig& c, const GridSpec& grid, std::optional<double> known, ExperimentResult& res) {
  MaterialField<T> material = material_field<T>(c.scheme, c.material, grid);
  res.approximate = material.approximate;
  if (c.reference == Reference::full && known) {
    res.a_ref = known;
  } else if (c.reference == Reference::full) {
    const GridSpec ref_grid = build_grid(c.dim, c.grid_n);
    // Same grid: solve exactly the compressed problem in full format.
    // Otherwise the reference uses its own exact material.
    res.a_ref = ref_grid.n == grid.n ? reference_solve(c, ref_grid, densify(material))
                                     : reference_solve(c, ref_grid, material_field<FullTensor>(c.scheme, c.material, ref_grid));
  }
  const auto policy = TruncationPolicy::fixed(c.rank);
  const auto ctx = make_context<T>(grid, std::move(material), policy);

  SolverConfig sc;
  sc.method = c.solver;
  sc.max_iter = c.max_iter;
  sc.residual_tol = c.tol;
  sc.stagnation_window = c.stagnation_window;
  sc.policy = policy;
  sc.rank_schedule = c.rank_schedule;
  sc.allow_lowrank_richardson = c.allow_lowrank_richardson;

  SolveReport<T> rep;
  if (!c.rank_schedule.empty()) {
    if constexpr (!std::is_same_v<T, FullTensor>)
      rep = rank_continuation(ctx, sc, ContinuationTarget{res.a_ref, c.target_rel_error});
  } else {
    const T rhs = build_rhs(ctx);
    switch (c.solver) {
      case Method::pcg:
        if constexpr (std::is_same_v<T, FullTensor>) rep = pcg_full(ctx, rhs, sc);
        break;
      case Method::richardson:
        rep = richardson(ctx, rhs, sc);
        break;
      case Method::minres:
        rep = minres_truncated(ctx, rhs, sc);
        break;
    }
  }
  copy_report(res, rep);
  if (res.a_ref) res.relative_error = relative_error(res.a_eff, *res.a_ref);
}

}  // namespace

ExperimentResult run_case(const RunConfig& config, std::optional<double> known_a_ref) {
  config.validate();
  ExperimentResult res;
  res.config = config;
  res.solve_grid_n = config.solve_grid_n();
  const GridSpec grid = build_grid(config.dim, res.solve_grid_n);
  switch (config.format) {
    case Format::full:
      solve<FullTensor>(config, grid, known_a_ref, res);
      break;
    case Format::cp:
      solve<CpTensor>(config, grid, known_a_ref, res);
      break;
    case Format::tucker:
      solve<TuckerTensor>(config, grid, known_a_ref, res);
      break;
    case Format::tt:
      solve<TtTensor>(config, grid, known_a_ref, res);
      break;
  }
  return res;
}

std::size_t memory_formula(Format f, std::size_t d, std::size_t n, std::size_t r) {
  std::size_t nd = 1, rd = 1;
  for (std::size_t j = 0; j < d; ++j) {
    nd *= n;
    rd *= r;
  }
  switch (f) {
    case Format::full:
      return nd;
    case Format::cp:
      return d * n * r;
    case Format::tucker:
      return d * n * r + rd;
    case Format::tt:
      return 2 * n * r + (d - 2) * n * r * r;
  }
  return 0;
}

}  // namespace fftlr::harness
