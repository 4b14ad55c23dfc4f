#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "fftlr/harness/harness.hpp"

namespace fftlr::harness {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

std::size_t to_size(const std::string& key, const std::string& v) {
  std::size_t out = 0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  require(res.ec == std::errc{} && res.ptr == end, "config: '" + key + "' expects a non-negative integer, got '" + v + "'");
  return out;
}

double to_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const auto* end = v.data() + v.size();
  const auto res = std::from_chars(v.data(), end, out);
  require(res.ec == std::errc{} && res.ptr == end && std::isfinite(out),
          "config: '" + key + "' expects a finite number, got '" + v + "'");
  return out;
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw Error("config: '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::size_t> to_list(const std::string& key, const std::string& v) {
  std::vector<std::size_t> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(to_size(key, item));
  }
  return out;
}

std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

void RunConfig::validate() const {
  require(dim == 2 || dim == 3, "config: dim must be 2 or 3");
  require(grid_n >= 1 && grid_n % 2 == 1, "config: grid_n must be odd (even N introduces Nyquist frequencies)");
  require(format != Format::cp || dim == 2, "config: cp format requires dim = 2 (CP construction for d>=3 not supported)");
  require(grid_multiplier >= 1 && grid_multiplier % 2 == 1, "config: grid_multiplier must be an odd positive integer");
  require(tol >= 0.0, "config: tol must be >= 0");
  require(reference_tol > 0.0, "config: reference_tol must be > 0");
  require(rank >= 1, "config: rank must be >= 1");
  require(stagnation_window >= 1, "config: stagnation_window must be >= 1");
  for (std::size_t i = 1; i < rank_schedule.size(); ++i)
    require(rank_schedule[i] > rank_schedule[i - 1], "config: rank_schedule must be strictly increasing");
  if (solver == Method::pcg) require(format == Format::full, "config: pcg runs on format=full only");
  if (solver == Method::richardson && format != Format::full)
    require(allow_lowrank_richardson, "config: richardson on compressed formats needs allow_lowrank_richardson");
  if (!rank_schedule.empty())
    require(format != Format::full && solver == Method::minres, "config: rank_schedule needs minres on a compressed format");
  if (scheme == Scheme::ga && material.kind == MaterialSpec::Kind::stochastic) {
    double pts = 1.0;
    for (std::size_t j = 0; j < dim; ++j) pts *= static_cast<double>(4 * solve_grid_n() - 1);
    require(pts <= static_cast<double>(material.quadrature_cap),
            "config: Ga quadrature grid (4N-1)^d exceeds the cap; use scheme=gani or a smaller N");
  }
  material.validate();
}

std::size_t RunConfig::solve_grid_n() const {
  return reference == Reference::full && format != Format::full ? grid_multiplier * grid_n : grid_n;
}

void apply_key(RunConfig& c, std::string key, const std::string& raw) {
  std::replace(key.begin(), key.end(), '-', '_');
  const std::string v = trim(raw);
  auto& m = c.material;
  if (key == "dim") c.dim = to_size(key, v);
  else if (key == "grid_n") c.grid_n = to_size(key, v);
  else if (key == "material") m.kind = parse_material_kind(v);
  else if (key == "contrast") m.contrast = to_double(key, v);
  else if (key == "threshold") m.threshold = to_double(key, v);
  else if (key == "value") m.value = to_double(key, v);
  else if (key == "seed") m.seed = to_size(key, v);
  else if (key == "modes") m.modes = to_size(key, v);
  else if (key == "material_rank") m.lowrank_rank = to_size(key, v);
  else if (key == "anisotropic") m.anisotropic = to_bool(key, v);
  else if (key == "scheme") c.scheme = parse_scheme(v);
  else if (key == "solver") c.solver = parse_method(v);
  else if (key == "format") c.format = parse_format(v);
  else if (key == "rank") c.rank = to_size(key, v);
  else if (key == "rank_schedule") c.rank_schedule = to_list(key, v);
  else if (key == "tol") c.tol = to_double(key, v);
  else if (key == "max_iter") c.max_iter = to_size(key, v);
  else if (key == "stagnation_window") c.stagnation_window = to_size(key, v);
  else if (key == "allow_lowrank_richardson") c.allow_lowrank_richardson = to_bool(key, v);
  else if (key == "grid_multiplier") c.grid_multiplier = to_size(key, v);
  else if (key == "reference") {
    if (v == "none") c.reference = Reference::none;
    else if (v == "full") c.reference = Reference::full;
    else throw Error("config: reference must be none or full, got '" + v + "'");
  } else if (key == "reference_tol") c.reference_tol = to_double(key, v);
  else if (key == "target_rel_error") c.target_rel_error = to_double(key, v);
  else if (key == "out") c.out = v;
  else throw Error("config: unknown key '" + key + "'");
}

RunConfig parse_config_text(const std::string& text, RunConfig base) {
  std::stringstream ss(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (const auto h = line.find('#'); h != std::string::npos) line.resize(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    require(eq != std::string::npos, "config line " + std::to_string(lineno) + ": expected key = value");
    apply_key(base, trim(line.substr(0, eq)), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config_file(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  require(static_cast<bool>(in), "config: cannot open '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::vector<std::pair<std::string, std::string>> config_items(const RunConfig& c) {
  std::string sched;
  for (std::size_t i = 0; i < c.rank_schedule.size(); ++i) sched += (i ? "," : "") + std::to_string(c.rank_schedule[i]);
  const auto& m = c.material;
  return {
      {"dim", std::to_string(c.dim)},
      {"grid_n", std::to_string(c.grid_n)},
      {"material", std::string(material_kind_name(m.kind))},
      {"contrast", num(m.contrast)},
      {"threshold", num(m.threshold)},
      {"value", num(m.value)},
      {"seed", std::to_string(m.seed)},
      {"modes", std::to_string(m.modes)},
      {"material_rank", std::to_string(m.lowrank_rank)},
      {"anisotropic", m.anisotropic ? "true" : "false"},
      {"scheme", std::string(scheme_name(c.scheme))},
      {"solver", std::string(method_name(c.solver))},
      {"format", std::string(format_name(c.format))},
      {"rank", std::to_string(c.rank)},
      {"rank_schedule", sched},
      {"tol", num(c.tol)},
      {"max_iter", std::to_string(c.max_iter)},
      {"stagnation_window", std::to_string(c.stagnation_window)},
      {"allow_lowrank_richardson", c.allow_lowrank_richardson ? "true" : "false"},
      {"grid_multiplier", std::to_string(c.grid_multiplier)},
      {"reference", c.reference == Reference::full ? "full" : "none"},
      {"reference_tol", num(c.reference_tol)},
      {"target_rel_error", num(c.target_rel_error)},
      {"out", c.out},
  };
}

}  // namespace fftlr::harness
