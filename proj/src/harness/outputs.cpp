#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>

#include "fftlr/harness/harness.hpp"

namespace fftlr::harness {

namespace {

using json = nlohmann::ordered_json;

std::string num(double x) {
  require(std::isfinite(x), "outputs: refusing to write a non-finite number");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  std::string s = buf;
  // keep it a JSON float even when integral
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void dump(const json& j, std::string& out, int indent) {
  const std::string pad(static_cast<std::size_t>(indent + 2), ' ');
  switch (j.type()) {
    case json::value_t::object: {
      if (j.empty()) {
        out += "{}";
        return;
      }
      out += "{\n";
      bool first = true;
      for (const auto& [k, v] : j.items()) {
        if (!first) out += ",\n";
        first = false;
        out += pad + json(k).dump() + ": ";
        dump(v, out, indent + 2);
      }
      out += "\n" + std::string(static_cast<std::size_t>(indent), ' ') + "}";
      return;
    }
    case json::value_t::array: {
      out += "[";
      for (std::size_t i = 0; i < j.size(); ++i) {
        if (i) out += ", ";
        dump(j[i], out, indent);
      }
      out += "]";
      return;
    }
    case json::value_t::number_float:
      out += num(j.get<double>());
      return;
    default:
      out += j.dump();
  }
}

std::string dump_json(const json& j) {
  std::string out;
  dump(j, out, 0);
  out += "\n";
  return out;
}

json optional_number(const std::optional<double>& x) { return x ? json(*x) : json(nullptr); }

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  require(static_cast<bool>(out), "outputs: cannot open '" + path.string() + "' for writing");
  out << text;
  out.close();
  require(static_cast<bool>(out), "outputs: write failed for '" + path.string() + "'");
}

void make_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  require(!ec, "outputs: cannot create '" + dir.string() + "': " + ec.message());
}

StopReason parse_stop(std::string_view s) {
  for (auto r : {StopReason::tolerance, StopReason::stagnation, StopReason::max_iter})
    if (stop_reason_name(r) == s) return r;
  throw Error("summary: unknown stop reason '" + std::string(s) + "'");
}

}  // namespace

std::string iterations_csv(const ExperimentResult& r) {
  std::string out = "iter,residual_norm,omega,rank_max,elapsed_s\n";
  for (const auto& it : r.iterations)
    out += std::to_string(it.index) + "," + num(it.residual_norm) + "," + num(it.omega) + "," +
           std::to_string(max_rank(it.ranks)) + "," + num(it.elapsed_s) + "\n";
  return out;
}

std::string summary_json(const ExperimentResult& r) {
  json cfg = json::object();
  for (const auto& [k, v] : config_items(r.config)) cfg[k] = v;
  json stages = json::array();
  for (const auto& [rank, err] : r.stage_errors)
    stages.push_back(json{{"rank", rank}, {"relative_error", std::isfinite(err) ? json(err) : json(nullptr)}});
  const json j = {
      {"label", r.label},
      {"config", cfg},
      {"a_eff", r.a_eff},
      {"a_ref", optional_number(r.a_ref)},
      {"relative_error", optional_number(r.relative_error)},
      {"param_count", r.param_count},
      {"ranks", r.ranks},
      {"stop_reason", std::string(stop_reason_name(r.stop))},
      {"converged", r.converged},
      {"iterations", r.iterations.size()},
      {"final_residual", r.iterations.empty() ? 0.0 : r.iterations.back().residual_norm},
      {"matvecs", r.matvecs},
      {"solve_grid_n", r.solve_grid_n},
      {"approximate_integration", r.approximate},
      {"achieved_rank", r.achieved_rank ? json(*r.achieved_rank) : json(nullptr)},
      {"stage_errors", stages},
      {"norm_shortcut_fallback", r.norm_shortcut_fallback},
      {"wall_s", r.wall_s},
  };
  return dump_json(j);
}

ExperimentResult parse_summary(const std::string& text) {
  const json j = json::parse(text);
  ExperimentResult r;
  r.label = j.at("label").get<std::string>();
  for (const auto& [k, v] : j.at("config").items()) apply_key(r.config, k, v.get<std::string>());
  r.a_eff = j.at("a_eff").get<double>();
  if (!j.at("a_ref").is_null()) r.a_ref = j.at("a_ref").get<double>();
  if (!j.at("relative_error").is_null()) r.relative_error = j.at("relative_error").get<double>();
  r.param_count = j.at("param_count").get<std::size_t>();
  r.ranks = j.at("ranks").get<RankVector>();
  r.stop = parse_stop(j.at("stop_reason").get<std::string>());
  r.converged = j.at("converged").get<bool>();
  r.matvecs = j.at("matvecs").get<std::size_t>();
  r.solve_grid_n = j.at("solve_grid_n").get<std::size_t>();
  r.approximate = j.at("approximate_integration").get<bool>();
  if (!j.at("achieved_rank").is_null()) r.achieved_rank = j.at("achieved_rank").get<std::size_t>();
  for (const auto& s : j.at("stage_errors")) {
    const auto& e = s.at("relative_error");
    r.stage_errors.emplace_back(s.at("rank").get<std::size_t>(),
                                e.is_null() ? std::numeric_limits<double>::quiet_NaN() : e.get<double>());
  }
  r.norm_shortcut_fallback = j.at("norm_shortcut_fallback").get<bool>();
  r.wall_s = j.at("wall_s").get<double>();
  // per-iteration data lives in iterations.csv; only the count is kept here
  r.iterations.resize(j.at("iterations").get<std::size_t>());
  if (!r.iterations.empty()) r.iterations.back().residual_norm = j.at("final_residual").get<double>();
  return r;
}

std::string sweep_csv(std::vector<SweepRow> rows, const std::vector<std::string>& columns) {
  std::stable_sort(rows.begin(), rows.end(),
                   [](const SweepRow& a, const SweepRow& b) { return std::tie(a.n, a.rank) < std::tie(b.n, b.rank); });
  std::string out = "case,N,rank";
  for (const auto& c : columns) out += "," + c;
  out += "\n";
  for (const auto& r : rows) {
    out += r.case_label + "," + std::to_string(r.n) + "," + std::to_string(r.rank);
    for (const auto& c : columns) {
      const auto it = r.values.find(c);
      out += "," + (it == r.values.end() ? std::string() : it->second);
    }
    out += "\n";
  }
  return out;
}

void write_outputs(const std::vector<ExperimentResult>& results, const std::filesystem::path& dir) {
  make_dir(dir);
  for (const auto& r : results) {
    const auto sub = r.label.empty() ? dir : dir / r.label;
    if (!r.label.empty()) make_dir(sub);
    write_file(sub / "iterations.csv", iterations_csv(r));
    write_file(sub / "summary.json", summary_json(r));
  }
}

}  // namespace fftlr::harness
