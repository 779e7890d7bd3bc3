#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nmfcheck/dpbs.hpp"
#include "nmfcheck/matrix.hpp"

namespace nmfcheck {

struct DocumentRecord {
  std::string text;
  std::string group_key;
  std::optional<std::string> date_key;
};

/// Document-term matrices for several groups over one shared vocabulary,
/// plus their column-wise stack.
struct GroupedCorpus {
  std::vector<std::string> vocabulary;
  std::vector<std::string> labels;
  std::vector<CountMatrix> groups;
  CountMatrix combined;
  std::vector<ColumnRange> offsets;

  /// Builds the combined matrix and offsets from already-counted groups.
  static GroupedCorpus from_groups(std::vector<std::string> vocabulary,
                                   std::vector<std::string> labels,
                                   std::vector<CountMatrix> groups);
};

/// Lowercase ASCII, split on runs of non-alphanumeric characters.
std::vector<std::string> tokenize(std::string_view text);

/// Counts each record's tokens against `vocabulary` (unknown tokens are
/// dropped). With `aggregate_by_date`, records sharing (group, date) become a
/// single document column; records without a date stay separate. Groups and
/// documents appear in order of first occurrence.
GroupedCorpus build_grouped_corpus(std::span<const DocumentRecord> docs,
                                   std::span<const std::string> vocabulary,
                                   bool aggregate_by_date);

/// The `n` most frequent tokens across `docs`; ties broken alphabetically.
std::vector<std::string> top_terms(std::span<const DocumentRecord> docs, std::size_t n);

struct GroupTestRow {
  std::string label;
  std::vector<double> trial_p_values;
  double mean_p_value = 0.0;
  std::size_t rejects = 0;  // trials with ρ <= alpha
  std::size_t trials = 0;
};

struct GroupTestReport {
  double alpha = 0.05;
  DpbsConfig config;
  /// rows[0] is the combined matrix, then one row per group in corpus order.
  std::vector<GroupTestRow> rows;
};

inline constexpr std::string_view kCombinedLabel = "combined";

/// Runs dpbs_test n_trials times on the combined matrix and on every group.
/// Trial t on matrix m (0 = combined, g + 1 = group g) uses the master seed
/// derive_seed({cfg.master_seed, {t, m}}).
GroupTestReport group_test(const GroupedCorpus& corpus, const DpbsConfig& cfg,
                           std::size_t n_trials, double alpha,
                           Execution exec = Execution::serial());

GroupTestRow summarize_trials(std::string label, std::vector<double> p_values, double alpha);

}  // namespace nmfcheck
