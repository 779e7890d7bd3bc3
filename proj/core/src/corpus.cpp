#include "nmfcheck/corpus.hpp"

#include <algorithm>
#include <map>
#include <unordered_map>

namespace nmfcheck {

GroupedCorpus GroupedCorpus::from_groups(std::vector<std::string> vocabulary,
                                         std::vector<std::string> labels,
                                         std::vector<CountMatrix> groups) {
  if (vocabulary.empty()) throw IngestionError("grouped corpus: empty vocabulary");
  if (groups.empty()) throw IngestionError("grouped corpus: no groups");
  if (labels.size() != groups.size()) {
    throw ShapeError("grouped corpus: " + std::to_string(labels.size()) + " labels for " +
                     std::to_string(groups.size()) + " groups");
  }
  for (std::size_t g = 0; g < groups.size(); ++g) {
    if (groups[g].rows() != vocabulary.size()) {
      throw ShapeError("grouped corpus: group " + std::to_string(g) + " ('" + labels[g] +
                       "') has " + std::to_string(groups[g].rows()) + " rows for a " +
                       std::to_string(vocabulary.size()) + "-term vocabulary");
    }
  }
  GroupedCorpus c;
  c.combined = stack(groups);
  c.offsets = column_ranges(groups);
  c.vocabulary = std::move(vocabulary);
  c.labels = std::move(labels);
  c.groups = std::move(groups);
  return c;
}

std::vector<std::string> tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto c = static_cast<unsigned char>(ch);
    const bool alnum = (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z');
    if (alnum) {
      current += static_cast<char>(c >= 'A' && c <= 'Z' ? c - 'A' + 'a' : c);
    } else if (!current.empty()) {
      tokens.push_back(std::move(current));
      current.clear();
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

GroupedCorpus build_grouped_corpus(std::span<const DocumentRecord> docs,
                                   std::span<const std::string> vocabulary,
                                   bool aggregate_by_date) {
  if (vocabulary.empty()) throw IngestionError("build_grouped_corpus: empty vocabulary");
  std::unordered_map<std::string, std::size_t> term_index;
  for (std::size_t v = 0; v < vocabulary.size(); ++v) {
    if (!term_index.emplace(vocabulary[v], v).second) {
      throw IngestionError("build_grouped_corpus: duplicate vocabulary term '" + vocabulary[v] +
                           "'");
    }
  }

  struct Group {
    std::string label;
    std::vector<std::vector<double>> columns;
    std::map<std::string, std::size_t> by_date;
  };
  std::vector<Group> groups;
  std::unordered_map<std::string, std::size_t> group_index;

  for (std::size_t n = 0; n < docs.size(); ++n) {
    const auto& doc = docs[n];
    if (doc.group_key.empty()) {
      throw IngestionError("build_grouped_corpus: record " + std::to_string(n) +
                           " has an empty group key");
    }
    auto [it, inserted] = group_index.emplace(doc.group_key, groups.size());
    if (inserted) groups.push_back({doc.group_key, {}, {}});
    Group& g = groups[it->second];

    std::size_t column = g.columns.size();
    if (aggregate_by_date && doc.date_key) {
      auto [dit, fresh] = g.by_date.emplace(*doc.date_key, column);
      column = dit->second;
      if (fresh) g.columns.emplace_back(vocabulary.size(), 0.0);
    } else {
      g.columns.emplace_back(vocabulary.size(), 0.0);
    }
    for (const auto& token : tokenize(doc.text)) {
      const auto t = term_index.find(token);
      if (t != term_index.end()) g.columns[column][t->second] += 1.0;
    }
  }
  if (groups.empty()) throw IngestionError("build_grouped_corpus: no documents");

  std::vector<std::string> labels;
  std::vector<CountMatrix> matrices;
  const std::size_t rows = vocabulary.size();
  for (auto& g : groups) {
    if (g.columns.empty()) {
      throw IngestionError("build_grouped_corpus: group '" + g.label + "' has no documents");
    }
    const std::size_t cols = g.columns.size();
    std::vector<double> entries(rows * cols);
    for (std::size_t j = 0; j < cols; ++j) {
      for (std::size_t i = 0; i < rows; ++i) entries[i * cols + j] = g.columns[j][i];
    }
    labels.push_back(g.label);
    matrices.emplace_back(rows, cols, std::move(entries));
  }
  return GroupedCorpus::from_groups(std::vector<std::string>(vocabulary.begin(), vocabulary.end()),
                                    std::move(labels), std::move(matrices));
}

std::vector<std::string> top_terms(std::span<const DocumentRecord> docs, std::size_t n) {
  std::unordered_map<std::string, std::size_t> freq;
  for (const auto& d : docs) {
    for (auto& t : tokenize(d.text)) ++freq[std::move(t)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(freq.begin(), freq.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < std::min(n, ranked.size()); ++i) out.push_back(ranked[i].first);
  return out;
}

GroupTestRow summarize_trials(std::string label, std::vector<double> p_values, double alpha) {
  GroupTestRow row;
  row.label = std::move(label);
  row.trials = p_values.size();
  row.rejects = static_cast<std::size_t>(
      std::count_if(p_values.begin(), p_values.end(), [&](double p) { return p <= alpha; }));
  row.mean_p_value = mean(p_values);
  row.trial_p_values = std::move(p_values);
  return row;
}

GroupTestReport group_test(const GroupedCorpus& corpus, const DpbsConfig& cfg,
                           std::size_t n_trials, double alpha, Execution exec) {
  cfg.validate();
  if (n_trials < 1) throw DomainError("group_test: n_trials must be at least 1");
  if (!(alpha > 0.0 && alpha < 1.0)) throw DomainError("group_test: alpha must lie in (0, 1)");

  std::vector<const CountMatrix*> matrices{&corpus.combined};
  std::vector<std::string> labels{std::string(kCombinedLabel)};
  for (std::size_t g = 0; g < corpus.groups.size(); ++g) {
    const auto& m = corpus.groups[g];
    if (cfg.k > std::min(m.rows(), m.cols())) {
      throw ShapeError("group_test: group '" + corpus.labels[g] + "' is " +
                       std::to_string(m.rows()) + "x" + std::to_string(m.cols()) +
                       ", too small for rank " + std::to_string(cfg.k));
    }
    matrices.push_back(&m);
    labels.push_back(corpus.labels[g]);
  }
  if (cfg.k > std::min(corpus.combined.rows(), corpus.combined.cols())) {
    throw ShapeError("group_test: combined matrix too small for rank " + std::to_string(cfg.k));
  }

  const std::size_t n_matrices = matrices.size();
  std::vector<std::vector<double>> p(n_matrices, std::vector<double>(n_trials, 0.0));
  parallel_for(n_matrices * n_trials, exec, [&](std::size_t job) {
    const std::size_t m = job / n_trials;
    const std::size_t t = job % n_trials;
    DpbsConfig trial_cfg = cfg;
    trial_cfg.master_seed = derive_seed(SeedPath(cfg.master_seed, {t, m}));
    p[m][t] = dpbs_test(*matrices[m], trial_cfg).rho;
  });

  GroupTestReport report;
  report.alpha = alpha;
  report.config = cfg;
  for (std::size_t m = 0; m < n_matrices; ++m) {
    report.rows.push_back(summarize_trials(labels[m], std::move(p[m]), alpha));
  }
  return report;
}

}  // namespace nmfcheck
