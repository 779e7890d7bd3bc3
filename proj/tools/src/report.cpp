#include "nmfcheck_cli/report.hpp"

#include "nmfcheck/matrix_io.hpp"

#include <cstdio>

#ifndef NMFCHECK_VERSION
#define NMFCHECK_VERSION "0.0.0"
#endif

namespace nmfcheck::cli {
namespace {

std::string_view to_string(StatisticScale s) {
  return s == StatisticScale::sqrt_entries ? "sqrt_entries" : "entries";
}

}  // namespace

std::string_view toolkit_version() { return NMFCHECK_VERSION; }

std::string fnv1a64_hex(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

ordered_json to_json(const RunManifest& m) {
  ordered_json inputs = ordered_json::array();
  for (const auto& in : m.inputs) {
    inputs.push_back({{"role", in.role}, {"path", in.path}, {"fnv1a64", in.fnv1a64}});
  }
  return {{"tool", "nmfcheck"},
          {"version", toolkit_version()},
          {"subcommand", m.subcommand},
          {"seed", m.seed},
          {"argv", m.argv},
          {"config", m.config},
          {"inputs", inputs}};
}

RunManifest manifest_from_json(const ordered_json& j) {
  RunManifest m;
  m.subcommand = j.at("subcommand").get<std::string>();
  m.argv = j.at("argv").get<std::vector<std::string>>();
  m.seed = j.at("seed").get<std::uint64_t>();
  m.config = j.value("config", ordered_json::object());
  for (const auto& in : j.value("inputs", ordered_json::array())) {
    m.inputs.push_back({in.at("role").get<std::string>(), in.at("path").get<std::string>(),
                        in.at("fnv1a64").get<std::string>()});
  }
  return m;
}

ordered_json to_json(const NmfConfig& c) {
  return {{"max_iterations", c.max_iterations},
          {"relative_tolerance", c.relative_tolerance},
          {"epsilon_floor", c.epsilon_floor},
          {"n_restarts", c.n_restarts}};
}

ordered_json to_json(const DpbsConfig& c) {
  return {{"k", c.k},
          {"b1", c.b1},
          {"b2", c.b2},
          {"master_seed", c.master_seed},
          {"statistic_scale", to_string(c.scale)},
          {"nmf", to_json(c.nmf)}};
}

ordered_json to_json(const SimulationConfig& c) {
  return {{"rows", c.rows},
          {"cols", c.cols},
          {"k", c.k},
          {"shape_w", c.shape_w},
          {"scale_w", c.scale_w},
          {"shape_h", c.shape_h},
          {"scale_h", c.scale_h},
          {"gamma_convention", "shape_scale"},
          {"n_replicates", c.n_replicates},
          {"ks_repetitions", c.ks_repetitions},
          {"factors_redrawn_per_replicate", true},
          {"dpbs", to_json(c.dpbs)}};
}

ordered_json to_json(const KsResult& ks) {
  return {{"statistic", ks.statistic}, {"p_value", ks.p_value}, {"n1", ks.n1}, {"n2", ks.n2}};
}

ordered_json to_json(const Factorization& f, const CountMatrix& x) {
  const RateMatrix xhat = reconstruct(f);
  return {{"rows", x.rows()},
          {"cols", x.cols()},
          {"k", f.k},
          {"iterations_run", f.iterations_run},
          {"final_objective", f.final_objective()},
          {"ell", normalized_statistic(x, xhat)},
          {"objective_trace", f.objective_trace}};
}

ordered_json to_json(const DpbsResult& r) {
  return {{"ell", r.ell},
          {"rho_star", r.rho_star},
          {"rho", r.rho},
          {"rho_convention",
           "2*min(#{rho_star <= p_i}, #{rho_star > p_i})/b1 over second-level p_i; small rho signals misfit"},
          {"factorizations", r.factorizations()},
          {"first_level_ells", r.first_level_ells},
          {"second_level_pvalues", r.second_level_pvalues},
          {"second_level_ells", r.second_level_ells}};
}

ordered_json to_json(const PpPlotData& pp) {
  ordered_json points = ordered_json::array();
  for (const auto& p : pp.points) points.push_back({p.theoretical, p.empirical});
  return {{"error_band", pp.error_band},
          {"max_deviation", pp.max_deviation()},
          {"within_band", pp.within_band()},
          {"points", points}};
}

ordered_json to_json(const CalibrationReport& r) {
  ordered_json reps = ordered_json::array();
  for (const auto& ks : r.ks_repetitions) reps.push_back(to_json(ks));
  return {{"size", std::to_string(r.config.rows) + "x" + std::to_string(r.config.cols)},
          {"config", to_json(r.config)},
          {"mean_p_value", mean(r.p_values)},
          {"mean_ell", mean(r.ells)},
          {"ks", to_json(r.ks)},
          {"ks_repetitions", reps},
          {"p_values", r.p_values},
          {"ells", r.ells},
          {"rho_stars", r.rho_stars},
          {"pp", to_json(r.pp)}};
}

ordered_json to_json(const ViolationReport& r) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"distribution", row.spec.name()},
                    {"violation_parameters", to_string(row.spec.parameters)},
                    {"mean_p_value", row.mean_p_value},
                    {"mean_ell", row.mean_ell},
                    {"p_values", row.p_values},
                    {"ells", row.ells}});
  }
  return {{"config", to_json(r.config)}, {"rows", rows}};
}

ordered_json to_json(const GroupTestReport& r) {
  ordered_json rows = ordered_json::array();
  for (const auto& row : r.rows) {
    rows.push_back({{"label", row.label},
                    {"mean_p_value", row.mean_p_value},
                    {"rejects", row.rejects},
                    {"trials", row.trials},
                    {"trial_p_values", row.trial_p_values}});
  }
  return {{"alpha", r.alpha}, {"reject_rule", "p <= alpha"}, {"config", to_json(r.config)},
          {"rows", rows}};
}

void JsonlWriter::add(std::string_view record_type, ordered_json body) {
  ordered_json line = {{"record", record_type}, {"schema_version", kSchemaVersion}};
  for (auto& [key, value] : body.items()) line[key] = std::move(value);
  text_ += line.dump();
  text_ += '\n';
}

void JsonlWriter::write(const std::filesystem::path& path) const { write_text_file(path, text_); }

}  // namespace nmfcheck::cli
