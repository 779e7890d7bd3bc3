#include "nmfcheck_cli/cli.hpp"

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <stdexcept>

#include <CLI11.hpp>

#include "nmfcheck/matrix_io.hpp"
#include "nmfcheck_cli/records.hpp"
#include "nmfcheck_cli/report.hpp"

namespace nmfcheck::cli {
namespace fs = std::filesystem;

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::io: return kExitIo;
    case ErrorKind::shape:
    case ErrorKind::bounds: return kExitShape;
    case ErrorKind::domain:
    case ErrorKind::degenerate:
    case ErrorKind::ingestion: return kExitDomain;
    case ErrorKind::numerical: return kExitNumerical;
  }
  return kExitInternal;
}

namespace {

// Argument combinations CLI11 cannot express; reported like a parse error.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::uint64_t seed = 0;
  unsigned threads = 1;
  std::string out = "nmfcheck-out";
};

struct SolverOptions {
  NmfConfig nmf;
  std::size_t b1 = 25;
  std::size_t b2 = 25;
  std::string scale = "sqrt";
};

struct Options {
  CommonOptions common;
  SolverOptions solver;
  std::size_t k = 0;

  // factorize / test
  std::string matrix;

  // simulate
  std::string preset;
  std::string size;
  std::optional<std::size_t> replicates;
  std::optional<std::size_t> ks_repetitions;
  std::vector<std::string> dists;
  std::string violation_parameters = "all_equal_rate";

  // group-test
  std::string corpus;
  std::string vocab;
  std::size_t top_n = 0;
  RecordFields fields;
  bool aggregate_by_date = false;
  std::size_t trials = 10;
  double alpha = 0.05;

  // pp-plot
  std::string pvalues;
  std::string column;
  bool svg = false;

  // rerun
  std::string report;
};

class Context {
 public:
  Context(std::ostream& out, std::ostream& err) : out_(out), err_(err) {}

  std::ostream& out() { return out_; }
  std::ostream& err() { return err_; }

  void note(const std::string& line) { err_ << "nmfcheck: " << line << '\n'; }

 private:
  std::ostream& out_;
  std::ostream& err_;
};

std::string fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string pad(std::string s, std::size_t width) {
  if (s.size() < width) s.append(width - s.size(), ' ');
  return s;
}

std::string lpad(std::string s, std::size_t width) {
  if (s.size() < width) s.insert(0, width - s.size(), ' ');
  return s;
}

Execution execution(const CommonOptions& c) {
  return c.threads == 0 ? Execution::hardware() : Execution{c.threads};
}

StatisticScale parse_scale(const std::string& s) {
  if (s == "sqrt") return StatisticScale::sqrt_entries;
  if (s == "entries") return StatisticScale::entries;
  throw DomainError("unknown --scale '" + s + "' (expected sqrt or entries)");
}

DpbsConfig dpbs_config(const Options& o) {
  DpbsConfig cfg;
  cfg.k = o.k;
  cfg.b1 = o.solver.b1;
  cfg.b2 = o.solver.b2;
  cfg.nmf = o.solver.nmf;
  cfg.master_seed = o.common.seed;
  cfg.scale = parse_scale(o.solver.scale);
  cfg.validate();
  return cfg;
}

fs::path prepare_out_dir(const CommonOptions& c) {
  const fs::path dir(c.out);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string() + ": " + ec.message());
  return dir;
}

struct LoadedText {
  std::string text;
  InputDigest digest;
};

LoadedText load_input(const std::string& role, const std::string& path) {
  LoadedText in;
  in.text = read_text_file(path);
  in.digest = {role, path, fnv1a64_hex(in.text)};
  return in;
}

// Original arguments minus the ones that do not affect results.
std::vector<std::string> reproducing_argv(const std::vector<std::string>& args) {
  std::vector<std::string> kept;
  for (std::size_t n = 1; n < args.size(); ++n) {
    const std::string& a = args[n];
    if (a == "--out" || a == "--threads") {
      ++n;
      continue;
    }
    if (a.starts_with("--out=") || a.starts_with("--threads=")) continue;
    kept.push_back(a);
  }
  return kept;
}

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void add_solver_flags(CLI::App& app, Options& o) {
  app.add_option("--max-iter", o.solver.nmf.max_iterations, "NMF iteration cap")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--tol", o.solver.nmf.relative_tolerance,
                 "stop when the relative objective decrease falls below this")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--eps", o.solver.nmf.epsilon_floor, "floor for denominators and logs")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--restarts", o.solver.nmf.n_restarts, "random restarts, best kept")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
}

void add_bootstrap_flags(CLI::App& app, Options& o) {
  app.add_option("--b1", o.solver.b1, "first-level bootstrap replicates")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--b2", o.solver.b2, "second-level replicates per first-level one")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  app.add_option("--scale", o.solver.scale, "statistic denominator: sqrt or entries")
      ->capture_default_str()
      ->check(CLI::IsMember({"sqrt", "entries"}));
}

void add_common_flags(CLI::App& app, Options& o) {
  app.add_option("--seed", o.common.seed, "master seed")->capture_default_str();
  app.add_option("--threads", o.common.threads, "worker threads (0 = all cores)")
      ->capture_default_str();
  app.add_option("--out", o.common.out, "output directory")->capture_default_str();
}

void write_labeled(const fs::path& path, const RateMatrix& m, const LabeledMatrix& in) {
  write_text_file(path, format_matrix_csv(m, in.row_labels, in.col_labels));
}

// ---------------------------------------------------------------- factorize

int run_factorize(const Options& o, const std::vector<std::string>& args, Context& ctx) {
  const auto in = load_input("matrix", o.matrix);
  const LabeledMatrix lm = parse_matrix_csv(in.text, o.matrix);
  Stream stream = derive_stream(SeedPath(o.common.seed, {seed_paths::kObservedFit}));
  Timer timer;
  const Factorization f = factorize(lm.matrix, o.k, o.solver.nmf, stream);

  RunManifest m{"factorize", reproducing_argv(args), o.common.seed,
                {{"k", o.k}, {"nmf", to_json(o.solver.nmf)}}, {in.digest}};
  JsonlWriter w;
  w.add("manifest", to_json(m));
  w.add("factorization", to_json(f, lm.matrix));

  const fs::path dir = prepare_out_dir(o.common);
  w.write(dir / "factorize.jsonl");
  std::vector<std::string> topics;
  for (std::size_t c = 0; c < f.k; ++c) topics.push_back("topic" + std::to_string(c + 1));
  write_text_file(dir / "w.csv", format_matrix_csv(f.w, lm.row_labels, topics));
  write_text_file(dir / "h.csv", format_matrix_csv(f.h, topics, lm.col_labels));
  write_labeled(dir / "xhat.csv", reconstruct(f), lm);

  const RateMatrix xhat = reconstruct(f);
  auto& out = ctx.out();
  out << "factorize  " << lm.matrix.rows() << "x" << lm.matrix.cols() << "  k=" << f.k << "\n";
  out << "  iterations   " << f.iterations_run << "\n";
  out << "  objective    " << fixed(f.final_objective(), 6) << "\n";
  out << "  ell          " << fixed(normalized_statistic(lm.matrix, xhat), 6) << "\n";
  ctx.note("factorize finished in " + fixed(timer.seconds(), 2) + " s; wrote " + dir.string());
  return kExitOk;
}

// --------------------------------------------------------------------- test

int run_test(const Options& o, const std::vector<std::string>& args, Context& ctx) {
  const auto in = load_input("matrix", o.matrix);
  const LabeledMatrix lm = parse_matrix_csv(in.text, o.matrix);
  const DpbsConfig cfg = dpbs_config(o);
  ctx.note("dpbs on " + std::to_string(lm.matrix.rows()) + "x" +
           std::to_string(lm.matrix.cols()) + ", " +
           std::to_string(1 + cfg.b1 * (1 + cfg.b2)) + " factorizations");
  Timer timer;
  const DpbsResult r = dpbs_test(lm.matrix, cfg, execution(o.common));

  RunManifest m{"test", reproducing_argv(args), o.common.seed, to_json(cfg), {in.digest}};
  JsonlWriter w;
  w.add("manifest", to_json(m));
  w.add("dpbs_result", to_json(r));

  const fs::path dir = prepare_out_dir(o.common);
  w.write(dir / "test.jsonl");
  std::string csv = "replicate,ell_star,rho_star_star\n";
  for (std::size_t i = 0; i < r.first_level_ells.size(); ++i) {
    csv += std::to_string(i) + "," + format_number(r.first_level_ells[i]) + "," +
           format_number(r.second_level_pvalues[i]) + "\n";
  }
  write_text_file(dir / "replicates.csv", csv);

  auto& out = ctx.out();
  out << "dpbs test  " << lm.matrix.rows() << "x" << lm.matrix.cols() << "  k=" << cfg.k
      << "  B1=" << cfg.b1 << "  B2=" << cfg.b2 << "  seed=" << cfg.master_seed << "\n";
  out << "  ell        " << fixed(r.ell, 6) << "\n";
  out << "  rho*       " << fixed(r.rho_star) << "\n";
  out << "  rho        " << fixed(r.rho) << "\n";
  ctx.note("test finished in " + fixed(timer.seconds(), 2) + " s; wrote " + dir.string());
  return kExitOk;
}

// ----------------------------------------------------------------- simulate

bool parse_size(const std::string& s, std::size_t& rows, std::size_t& cols) {
  const auto x = s.find('x');
  if (x == std::string::npos) return false;
  try {
    std::size_t used = 0;
    rows = std::stoul(s.substr(0, x), &used);
    if (used != x) return false;
    cols = std::stoul(s.substr(x + 1), &used);
    return used == s.size() - x - 1 && rows > 0 && cols > 0;
  } catch (const std::exception&) {
    return false;
  }
}

void apply_overrides(SimulationConfig& c, const Options& o) {
  if (o.replicates) c.n_replicates = *o.replicates;
  if (o.ks_repetitions) c.ks_repetitions = *o.ks_repetitions;
  c.dpbs.b1 = o.solver.b1;
  c.dpbs.b2 = o.solver.b2;
  c.dpbs.nmf = o.solver.nmf;
  c.dpbs.scale = parse_scale(o.solver.scale);
}

std::vector<SimulationConfig> resolve_left(const Options& o) {
  auto presets = table1_left_presets(o.common.seed);
  if (!o.size.empty()) {
    std::size_t rows = 0, cols = 0;
    if (!parse_size(o.size, rows, cols)) {
      throw DomainError("--size must look like 10x16, got '" + o.size + "'");
    }
    SimulationConfig chosen = presets.front();
    bool known = false;
    for (const auto& p : presets) {
      if (p.rows == rows && p.cols == cols) {
        chosen = p;
        known = true;
      }
    }
    if (!known && o.k == 0) throw UsageError("--size " + o.size + " is not a preset; pass --k");
    chosen.rows = rows;
    chosen.cols = cols;
    presets = {chosen};
  }
  for (auto& p : presets) {
    if (o.k) p.k = o.k;
    apply_overrides(p, o);
    p.validate();
  }
  return presets;
}

int run_simulate_left(const Options& o, const std::vector<std::string>& args, Context& ctx) {
  const auto configs = resolve_left(o);
  const fs::path dir = prepare_out_dir(o.common);
  Timer timer;

  ordered_json sizes = ordered_json::array();
  for (const auto& c : configs) sizes.push_back(to_json(c));
  RunManifest m{"simulate", reproducing_argv(args), o.common.seed,
                {{"preset", o.preset}, {"calibrations", sizes}}, {}};
  JsonlWriter w;
  w.add("manifest", to_json(m));

  auto& out = ctx.out();
  out << "null calibration (KS of rho against uniform, averaged over repetitions)\n";
  out << "  " << pad("size", 8) << pad("k", 4) << lpad("n", 5) << lpad("mean rho", 10)
      << lpad("mean ell", 10) << lpad("KS T", 9) << lpad("KS p", 9) << "  P-P in band\n";
  for (const auto& c : configs) {
    const std::string size = std::to_string(c.rows) + "x" + std::to_string(c.cols);
    ctx.note("calibrating " + size + " k=" + std::to_string(c.k) + ", " +
             std::to_string(c.n_replicates) + " replicates");
    const CalibrationReport r = run_calibration(c, execution(o.common));
    w.add("calibration", to_json(r));

    std::string csv = "replicate,rho,ell,rho_star\n";
    for (std::size_t n = 0; n < r.p_values.size(); ++n) {
      csv += std::to_string(n) + "," + format_number(r.p_values[n]) + "," +
             format_number(r.ells[n]) + "," + format_number(r.rho_stars[n]) + "\n";
    }
    write_text_file(dir / ("calibration_" + size + ".csv"), csv);
    write_text_file(dir / ("pp_" + size + ".csv"), format_pp_csv(r.pp));

    out << "  " << pad(size, 8) << pad(std::to_string(c.k), 4)
        << lpad(std::to_string(c.n_replicates), 5) << lpad(fixed(mean(r.p_values)), 10)
        << lpad(fixed(mean(r.ells)), 10) << lpad(fixed(r.ks.statistic), 9)
        << lpad(fixed(r.ks.p_value), 9) << "  " << (r.pp.within_band() ? "yes" : "no") << "\n";
  }
  w.write(dir / "simulate.jsonl");
  ctx.note("simulate finished in " + fixed(timer.seconds(), 2) + " s; wrote " + dir.string());
  return kExitOk;
}

int run_simulate_right(const Options& o, const std::vector<std::string>& args, Context& ctx) {
  SimulationConfig c = table1_right_preset(o.common.seed);
  if (!o.size.empty()) {
    if (!parse_size(o.size, c.rows, c.cols)) {
      throw DomainError("--size must look like 10x16, got '" + o.size + "'");
    }
  }
  if (o.k) c.k = o.k;
  apply_overrides(c, o);
  c.validate();

  const ViolationParameters params = o.violation_parameters == "moment_matched"
                                         ? ViolationParameters::moment_matched
                                         : ViolationParameters::all_equal_rate;
  std::vector<ViolationSpec> specs;
  if (o.dists.empty()) {
    specs = default_violation_specs();
  } else {
    for (const auto& d : o.dists) specs.push_back(parse_violation_spec(d));
  }
  for (auto& s : specs) s.parameters = params;

  ordered_json names = ordered_json::array();
  for (const auto& s : specs) names.push_back(s.name());
  RunManifest m{"simulate", reproducing_argv(args), o.common.seed,
                {{"preset", o.preset},
                 {"simulation", to_json(c)},
                 {"distributions", names},
                 {"violation_parameters", to_string(params)}},
                {}};

  ctx.note("violation suite " + std::to_string(c.rows) + "x" + std::to_string(c.cols) + " k=" +
           std::to_string(c.k) + ", " + std::to_string(specs.size()) + " distributions x " +
           std::to_string(c.n_replicates) + " replicates");
  Timer timer;
  const ViolationReport r = run_violation_suite(c, specs, execution(o.common));

  JsonlWriter w;
  w.add("manifest", to_json(m));
  w.add("violation_report", to_json(r));
  const fs::path dir = prepare_out_dir(o.common);
  w.write(dir / "simulate.jsonl");
  std::string csv = "distribution,replicate,rho,ell\n";
  for (const auto& row : r.rows) {
    for (std::size_t n = 0; n < row.p_values.size(); ++n) {
      csv += row.spec.name() + "," + std::to_string(n) + "," + format_number(row.p_values[n]) +
             "," + format_number(row.ells[n]) + "\n";
    }
  }
  write_text_file(dir / "violations.csv", csv);

  auto& out = ctx.out();
  out << "violation suite  " << c.rows << "x" << c.cols << "  k=" << c.k << "  "
      << c.n_replicates << " replicates  (" << to_string(params) << ")\n";
  out << "  " << pad("distribution", 14) << lpad("mean rho", 10) << lpad("mean ell", 12) << "\n";
  for (const auto& row : r.rows) {
    out << "  " << pad(row.spec.name(), 14) << lpad(fixed(row.mean_p_value), 10)
        << lpad(fixed(row.mean_ell), 12) << "\n";
  }
  ctx.note("simulate finished in " + fixed(timer.seconds(), 2) + " s; wrote " + dir.string());
  return kExitOk;
}

// --------------------------------------------------------------- group-test

int run_group_test(const Options& o, const std::vector<std::string>& args, Context& ctx) {
  const auto corpus_in = load_input("corpus", o.corpus);
  const auto docs = parse_document_records(corpus_in.text, o.fields, o.corpus);
  std::vector<InputDigest> digests{corpus_in.digest};

  std::vector<std::string> vocabulary;
  if (!o.vocab.empty()) {
    const auto vocab_in = load_input("vocabulary", o.vocab);
    vocabulary = parse_vocabulary(vocab_in.text);
    digests.push_back(vocab_in.digest);
  } else {
    vocabulary = top_terms(docs, o.top_n);
  }

  const GroupedCorpus corpus = build_grouped_corpus(docs, vocabulary, o.aggregate_by_date);
  const DpbsConfig cfg = dpbs_config(o);
  ctx.note("group test over " + std::to_string(corpus.groups.size()) + " groups, " +
           std::to_string(o.trials) + " trials, vocabulary of " +
           std::to_string(vocabulary.size()));
  Timer timer;
  const GroupTestReport r = group_test(corpus, cfg, o.trials, o.alpha, execution(o.common));

  ordered_json groups = ordered_json::array();
  for (std::size_t g = 0; g < corpus.groups.size(); ++g) {
    groups.push_back({{"label", corpus.labels[g]},
                      {"documents", corpus.groups[g].cols()},
                      {"begin", corpus.offsets[g].begin},
                      {"end", corpus.offsets[g].end}});
  }
  RunManifest m{"group-test",
                reproducing_argv(args),
                o.common.seed,
                {{"dpbs", to_json(cfg)},
                 {"trials", o.trials},
                 {"alpha", o.alpha},
                 {"aggregate_by_date", o.aggregate_by_date},
                 {"fields", {{"text", o.fields.text}, {"group", o.fields.group},
                             {"date", o.fields.date}}},
                 {"vocabulary", vocabulary},
                 {"groups", groups}},
                digests};
  JsonlWriter w;
  w.add("manifest", to_json(m));
  w.add("group_test_report", to_json(r));
  const fs::path dir = prepare_out_dir(o.common);
  w.write(dir / "group_test.jsonl");
  std::string csv = "matrix,trial,rho\n";
  for (const auto& row : r.rows) {
    for (std::size_t t = 0; t < row.trial_p_values.size(); ++t) {
      csv += row.label + "," + std::to_string(t) + "," + format_number(row.trial_p_values[t]) +
             "\n";
    }
  }
  write_text_file(dir / "group_test.csv", csv);

  auto& out = ctx.out();
  out << "group test  k=" << cfg.k << "  B1=" << cfg.b1 << "  B2=" << cfg.b2
      << "  alpha=" << format_number(r.alpha) << " (reject when rho <= alpha)\n";
  out << "  " << pad("matrix", 16) << lpad("docs", 6) << lpad("mean rho", 10)
      << lpad("rejects", 10) << "\n";
  for (std::size_t n = 0; n < r.rows.size(); ++n) {
    const auto& row = r.rows[n];
    const std::size_t docs_in = n == 0 ? corpus.combined.cols() : corpus.groups[n - 1].cols();
    out << "  " << pad(row.label, 16) << lpad(std::to_string(docs_in), 6)
        << lpad(fixed(row.mean_p_value), 10)
        << lpad(std::to_string(row.rejects) + "/" + std::to_string(row.trials), 10) << "\n";
  }
  ctx.note("group-test finished in " + fixed(timer.seconds(), 2) + " s; wrote " + dir.string());
  return kExitOk;
}

// ------------------------------------------------------------------ pp-plot

int run_pp_plot(const Options& o, const std::vector<std::string>& args, Context& ctx) {
  const auto in = load_input("pvalues", o.pvalues);
  const auto p = parse_value_column(in.text, o.column, o.pvalues);
  const std::size_t reps = o.ks_repetitions.value_or(20);
  if (reps < 1) throw DomainError("--ks-repetitions must be at least 1");
  const KsResult ks = averaged_uniformity_ks(p, reps, o.common.seed);
  const PpPlotData pp = pp_plot_points(p, ks);

  RunManifest m{"pp-plot", reproducing_argv(args), o.common.seed,
                {{"column", o.column}, {"ks_repetitions", reps}}, {in.digest}};
  JsonlWriter w;
  w.add("manifest", to_json(m));
  ordered_json body = to_json(pp);
  body["ks"] = to_json(ks);
  w.add("pp_plot", body);

  const fs::path dir = prepare_out_dir(o.common);
  w.write(dir / "pp_plot.jsonl");
  write_text_file(dir / "pp.csv", format_pp_csv(pp));
  if (o.svg) {
    write_text_file(dir / "pp.svg", render_pp_svg(pp, "P-P plot, n = " + std::to_string(p.size())));
  }

  auto& out = ctx.out();
  out << "P-P against uniform  n=" << p.size() << "\n";
  out << "  KS T (avg)      " << fixed(ks.statistic) << "\n";
  out << "  KS p (avg)      " << fixed(ks.p_value) << "\n";
  out << "  max deviation   " << fixed(pp.max_deviation()) << "\n";
  out << "  within +/-T     " << (pp.within_band() ? "yes" : "no") << "\n";
  return kExitOk;
}

// -------------------------------------------------------------------- rerun

int run_command(const std::vector<std::string>& args, Context& ctx);

int run_rerun(const Options& o, Context& ctx) {
  const std::string text = read_text_file(o.report);
  const auto first = text.substr(0, text.find('\n'));
  ordered_json j;
  try {
    j = ordered_json::parse(first);
  } catch (const ordered_json::parse_error& e) {
    throw IoError(o.report + ": first line is not a JSON record: " + e.what());
  }
  if (j.value("record", "") != "manifest") {
    throw IoError(o.report + ": first record is not a manifest");
  }
  const RunManifest m = manifest_from_json(j);
  for (const auto& in : m.inputs) {
    const std::string now = fnv1a64_hex(read_text_file(in.path));
    if (now != in.fnv1a64) {
      throw IoError(in.path + ": contents changed since the report was written (fnv1a64 " +
                    now + ", manifest has " + in.fnv1a64 + ")");
    }
  }
  std::vector<std::string> args{"nmfcheck"};
  args.insert(args.end(), m.argv.begin(), m.argv.end());
  args.push_back("--out");
  args.push_back(o.common.out);
  args.push_back("--threads");
  args.push_back(std::to_string(o.common.threads));
  ctx.note("re-running: " + m.subcommand);
  return run_command(args, ctx);
}

// ---------------------------------------------------------------- dispatch

int run_command(const std::vector<std::string>& args, Context& ctx) {
  Options o;
  CLI::App app{"Goodness-of-fit checks for Poisson NMF via a double parametric bootstrap",
               "nmfcheck"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(toolkit_version()));

  auto* fac = app.add_subcommand("factorize", "fit a rank-k KL NMF and write W, H and WH");
  fac->add_option("--matrix", o.matrix, "matrix CSV (words x documents)")->required();
  fac->add_option("--k", o.k, "rank")->required()->check(CLI::PositiveNumber);
  add_solver_flags(*fac, o);
  add_common_flags(*fac, o);

  auto* test = app.add_subcommand("test", "double parametric bootstrap test of a matrix");
  test->add_option("--matrix", o.matrix, "matrix CSV (words x documents)")->required();
  test->add_option("--k", o.k, "rank")->required()->check(CLI::PositiveNumber);
  add_bootstrap_flags(*test, o);
  add_solver_flags(*test, o);
  add_common_flags(*test, o);

  auto* sim = app.add_subcommand("simulate", "null calibration or violation suite");
  sim->add_option("--preset", o.preset, "table1-left or table1-right")
      ->required()
      ->check(CLI::IsMember({"table1-left", "table1-right"}));
  sim->add_option("--size", o.size, "override matrix shape, e.g. 23x23");
  sim->add_option("--k", o.k, "override rank")->check(CLI::PositiveNumber);
  sim->add_option("--replicates", o.replicates, "independent instances per size")
      ->check(CLI::PositiveNumber);
  sim->add_option("--ks-repetitions", o.ks_repetitions, "KS repetitions to average")
      ->check(CLI::PositiveNumber);
  sim->add_option("--dists", o.dists, "violation distributions (table1-right)")->delimiter(',');
  sim->add_option("--violation-parameters", o.violation_parameters,
                  "all_equal_rate or moment_matched")
      ->capture_default_str()
      ->check(CLI::IsMember({"all_equal_rate", "moment_matched"}));
  add_bootstrap_flags(*sim, o);
  add_solver_flags(*sim, o);
  add_common_flags(*sim, o);

  auto* grp = app.add_subcommand("group-test", "combined vs per-group tests on a corpus");
  grp->add_option("--corpus", o.corpus, "records as JSON lines or CSV")->required();
  auto* vocab = grp->add_option("--vocab", o.vocab, "vocabulary, one term per line");
  auto* top = grp->add_option("--top-n", o.top_n, "use the N most frequent tokens instead")
                  ->check(CLI::PositiveNumber);
  vocab->excludes(top);
  grp->add_option("--text-field", o.fields.text, "record field holding the text")
      ->capture_default_str();
  grp->add_option("--group-field", o.fields.group, "record field naming the group")
      ->capture_default_str();
  grp->add_option("--date-field", o.fields.date, "record field holding the date")
      ->capture_default_str();
  grp->add_flag("--aggregate-by-date", o.aggregate_by_date,
                "merge records sharing (group, date) into one document");
  grp->add_option("--k", o.k, "rank, shared by every matrix")
      ->required()
      ->check(CLI::PositiveNumber);
  grp->add_option("--trials", o.trials, "independent DPBS runs per matrix")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  grp->add_option("--alpha", o.alpha, "rejection boundary")
      ->capture_default_str()
      ->check(CLI::Range(0.0, 1.0));
  add_bootstrap_flags(*grp, o);
  add_solver_flags(*grp, o);
  add_common_flags(*grp, o);

  auto* pp = app.add_subcommand("pp-plot", "P-P plot and KS check of p-values vs uniform");
  pp->add_option("--pvalues", o.pvalues, "CSV holding the p-values")->required();
  pp->add_option("--column", o.column, "column name when the CSV has a header");
  pp->add_option("--ks-repetitions", o.ks_repetitions, "KS repetitions to average")
      ->check(CLI::PositiveNumber);
  pp->add_flag("--svg", o.svg, "also write pp.svg");
  add_common_flags(*pp, o);

  auto* rerun = app.add_subcommand("rerun", "reproduce a report from its manifest");
  rerun->add_option("report", o.report, "a .jsonl report written by nmfcheck")->required();
  rerun->add_option("--threads", o.common.threads)->capture_default_str();
  rerun->add_option("--out", o.common.out)->capture_default_str();

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, ctx.out(), ctx.err());
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, ctx.out(), ctx.err());
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, ctx.out(), ctx.err());
  } catch (const CLI::ParseError& e) {
    ctx.err() << "nmfcheck: " << e.what() << "\n";
    ctx.err() << ((e.get_name() == "RequiredError" || app.get_subcommands().empty())
                      ? app.help()
                      : app.get_subcommands().front()->help());
    return kExitUsage;
  }

  if (fac->parsed()) return run_factorize(o, args, ctx);
  if (test->parsed()) return run_test(o, args, ctx);
  if (sim->parsed()) {
    return o.preset == "table1-left" ? run_simulate_left(o, args, ctx)
                                     : run_simulate_right(o, args, ctx);
  }
  if (grp->parsed()) {
    if (o.vocab.empty() && o.top_n == 0) {
      ctx.err() << "nmfcheck: group-test needs --vocab or --top-n\n";
      return kExitUsage;
    }
    return run_group_test(o, args, ctx);
  }
  if (pp->parsed()) return run_pp_plot(o, args, ctx);
  return run_rerun(o, ctx);
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Context ctx(out, err);
  try {
    return run_command(args.empty() ? std::vector<std::string>{"nmfcheck"} : args, ctx);
  } catch (const UsageError& e) {
    err << "nmfcheck: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    err << "nmfcheck: " << to_string(e.kind()) << " error: " << e.what() << "\n";
    return exit_code_for(e.kind());
  } catch (const nlohmann::json::exception& e) {
    err << "nmfcheck: io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "nmfcheck: internal error: " << e.what() << "\n";
    return kExitInternal;
  }
}

int dispatch(int argc, char** argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args(argv, argv + argc);
  return dispatch(args, out, err);
}

}  // namespace nmfcheck::cli
