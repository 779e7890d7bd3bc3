#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "nmfcheck/corpus.hpp"
#include "nmfcheck/dpbs.hpp"
#include "nmfcheck/nmf.hpp"
#include "nmfcheck/simulate.hpp"

namespace nmfcheck::cli {

using nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

std::string_view toolkit_version();

/// FNV-1a, 64 bit, rendered as 16 lowercase hex digits.
std::string fnv1a64_hex(std::string_view bytes);

struct InputDigest {
  std::string role;  // "matrix", "corpus", ...
  std::string path;  // as given on the command line
  std::string fnv1a64;
};

/// Everything needed to reproduce a report. Wall-clock timing is
/// deliberately absent so that repeated runs serialize identically.
struct RunManifest {
  std::string subcommand;
  std::vector<std::string> argv;  // reproducing arguments, without --out/--threads
  std::uint64_t seed = 0;
  ordered_json config;
  std::vector<InputDigest> inputs;
};

ordered_json to_json(const RunManifest& m);
RunManifest manifest_from_json(const ordered_json& j);

ordered_json to_json(const NmfConfig& c);
ordered_json to_json(const DpbsConfig& c);
ordered_json to_json(const SimulationConfig& c);
ordered_json to_json(const KsResult& ks);
ordered_json to_json(const Factorization& f, const CountMatrix& x);
ordered_json to_json(const DpbsResult& r);
ordered_json to_json(const CalibrationReport& r);
ordered_json to_json(const ViolationReport& r);
ordered_json to_json(const GroupTestReport& r);
ordered_json to_json(const PpPlotData& pp);

/// One record per line, each tagged with "record" and "schema_version".
class JsonlWriter {
 public:
  void add(std::string_view record_type, ordered_json body);
  const std::string& text() const { return text_; }
  void write(const std::filesystem::path& path) const;

 private:
  std::string text_;
};

}  // namespace nmfcheck::cli
