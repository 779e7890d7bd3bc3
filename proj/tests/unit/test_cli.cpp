#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "nmfcheck_cli/cli.hpp"
#include "nmfcheck_cli/report.hpp"

namespace fs = std::filesystem;
using namespace nmfcheck;
using namespace nmfcheck::cli;

namespace {

struct Run {
  int code = 0;
  std::string out;
  std::string err;
};

Run run(std::vector<std::string> args) {
  args.insert(args.begin(), "nmfcheck");
  std::ostringstream out, err;
  const int code = dispatch(args, out, err);
  return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::path("cli_scratch") / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void put(const fs::path& p, const std::string& text) {
  std::ofstream(p, std::ios::binary) << text;
}

const char* kToyCsv =
    ",d1,d2,d3,d4\n"
    "apple,3,0,1,7\n"
    "pear,2,5,0,1\n"
    "plum,0,4,6,2\n"
    "fig,1,1,3,9\n";

}  // namespace

TEST_CASE("exit-code mapping") {
  CHECK(exit_code_for(ErrorKind::io) == kExitIo);
  CHECK(exit_code_for(ErrorKind::shape) == kExitShape);
  CHECK(exit_code_for(ErrorKind::domain) == kExitDomain);
  CHECK(exit_code_for(ErrorKind::degenerate) == kExitDomain);
  CHECK(exit_code_for(ErrorKind::ingestion) == kExitDomain);
  CHECK(exit_code_for(ErrorKind::numerical) == kExitNumerical);
}

TEST_CASE("usage errors and help") {
  CHECK(run({}).code == kExitUsage);
  CHECK(run({"frobnicate"}).code == kExitUsage);
  const auto bad_flag = run({"factorize", "--matrix", "x.csv", "--k", "2", "--bogus"});
  CHECK(bad_flag.code == kExitUsage);
  CHECK(bad_flag.out.empty());
  CHECK(run({"test", "--k", "2"}).code == kExitUsage);
  CHECK(run({"factorize", "--matrix", "x.csv", "--k", "0"}).code == kExitUsage);
  const auto help = run({"--help"});
  CHECK(help.code == kExitOk);
  CHECK(help.out.find("group-test") != std::string::npos);
  CHECK(run({"group-test", "--corpus", "c.jsonl", "--k", "2"}).code == kExitUsage);
  CHECK(run({"group-test", "--corpus", "c.jsonl", "--k", "2", "--vocab", "v", "--top-n", "3"})
            .code == kExitUsage);
}

TEST_CASE("error kinds surface as exit codes") {
  const auto dir = scratch("errors");
  const auto missing = run({"factorize", "--matrix", (dir / "nope.csv").string(), "--k", "2",
                            "--out", dir.string()});
  CHECK(missing.code == kExitIo);
  CHECK(missing.err.find("nope.csv") != std::string::npos);

  put(dir / "toy.csv", kToyCsv);
  CHECK(run({"factorize", "--matrix", (dir / "toy.csv").string(), "--k", "5", "--out",
             dir.string()})
            .code == kExitShape);

  put(dir / "zero.csv", "0,0\n0,0\n");
  CHECK(run({"test", "--matrix", (dir / "zero.csv").string(), "--k", "1", "--out",
             dir.string()})
            .code == kExitDomain);

  put(dir / "ragged.csv", "1,2\n3\n");
  CHECK(run({"factorize", "--matrix", (dir / "ragged.csv").string(), "--k", "1", "--out",
             dir.string()})
            .code == kExitIo);
}

TEST_CASE("factorize writes factors and a manifest") {
  const auto dir = scratch("factorize");
  put(dir / "toy.csv", kToyCsv);
  const auto r = run({"factorize", "--matrix", (dir / "toy.csv").string(), "--k", "2", "--out",
                      (dir / "o").string()});
  REQUIRE(r.code == kExitOk);
  for (const char* f : {"factorize.jsonl", "w.csv", "h.csv", "xhat.csv"}) {
    CHECK(fs::exists(dir / "o" / f));
  }
  CHECK(slurp(dir / "o" / "w.csv").rfind("term,topic1,topic2\napple,", 0) == 0);
  std::istringstream lines(slurp(dir / "o" / "factorize.jsonl"));
  std::string first;
  std::getline(lines, first);
  const auto m = nlohmann::ordered_json::parse(first);
  CHECK(m["record"] == "manifest");
  CHECK(m["schema_version"] == kSchemaVersion);
  REQUIRE(m["inputs"].size() == 1);
  CHECK(m["inputs"][0]["fnv1a64"] == fnv1a64_hex(kToyCsv));
  CHECK(r.out.find("nmfcheck:") == std::string::npos);
}

TEST_CASE("test is byte-identical across repeats and thread counts; rerun reproduces it") {
  const auto dir = scratch("determinism");
  put(dir / "toy.csv", kToyCsv);
  const std::vector<std::string> base{"test",  "--matrix", (dir / "toy.csv").string(),
                                      "--k",   "2",        "--b1",
                                      "4",     "--b2",     "3",
                                      "--seed", "11"};
  auto with = [&](const std::string& out, const std::string& threads) {
    auto a = base;
    a.insert(a.end(), {"--out", (dir / out).string(), "--threads", threads});
    return run(a);
  };
  REQUIRE(with("a", "1").code == kExitOk);
  REQUIRE(with("b", "1").code == kExitOk);
  REQUIRE(with("c", "3").code == kExitOk);
  const std::string a = slurp(dir / "a" / "test.jsonl");
  CHECK(!a.empty());
  CHECK(a == slurp(dir / "b" / "test.jsonl"));
  CHECK(a == slurp(dir / "c" / "test.jsonl"));
  CHECK(slurp(dir / "a" / "replicates.csv") == slurp(dir / "c" / "replicates.csv"));
  CHECK(a.find("\"record\":\"dpbs_result\"") != std::string::npos);

  REQUIRE(run({"rerun", (dir / "a" / "test.jsonl").string(), "--out", (dir / "r").string(),
               "--threads", "2"})
              .code == kExitOk);
  CHECK(slurp(dir / "r" / "test.jsonl") == a);

  put(dir / "toy.csv", std::string(kToyCsv) + "kiwi,1,1,1,1\n");
  CHECK(run({"rerun", (dir / "a" / "test.jsonl").string(), "--out", (dir / "r2").string()})
            .code == kExitIo);
}

TEST_CASE("simulate table1-right with small overrides") {
  const auto dir = scratch("simulate");
  const auto r = run({"simulate", "--preset", "table1-right", "--replicates", "2", "--b1", "3",
                      "--b2", "2", "--size", "6x8", "--k", "2", "--seed", "3", "--out",
                      dir.string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(dir / "violations.csv");
  std::size_t lines = 0;
  for (char c : csv) lines += c == '\n';
  CHECK(lines == 1 + 4 * 2);  // header + (4 distributions x 2 replicates)
  for (const char* name : {"poisson", "gamma", "normal", "zip:0.5"}) {
    CHECK(r.out.find(name) != std::string::npos);
  }
  CHECK(slurp(dir / "simulate.jsonl").find("violation_report") != std::string::npos);

  CHECK(run({"simulate", "--preset", "table1-left", "--size", "7x7", "--out", dir.string()})
            .code == kExitUsage);
  CHECK(run({"simulate", "--preset", "table1-right", "--dists", "cauchy", "--out",
             dir.string()})
            .code != kExitOk);
}

TEST_CASE("simulate table1-left with one small size") {
  const auto dir = scratch("calibrate");
  const auto r = run({"simulate", "--preset", "table1-left", "--size", "6x8", "--k", "2",
                      "--replicates", "3", "--ks-repetitions", "2", "--b1", "3", "--b2", "2",
                      "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(fs::exists(dir / "calibration_6x8.csv"));
  CHECK(fs::exists(dir / "pp_6x8.csv"));
  CHECK(slurp(dir / "simulate.jsonl").find("\"record\":\"calibration\"") != std::string::npos);
}

TEST_CASE("group-test on a small JSON-lines corpus") {
  const auto dir = scratch("group");
  put(dir / "corpus.jsonl",
      "{\"text\":\"red red blue\",\"group\":\"a\",\"date\":\"1\"}\n"
      "{\"text\":\"blue green\",\"group\":\"a\",\"date\":\"1\"}\n"
      "{\"text\":\"green green red\",\"group\":\"a\",\"date\":\"2\"}\n"
      "{\"text\":\"red blue blue\",\"group\":\"b\",\"date\":\"1\"}\n"
      "{\"text\":\"green\",\"group\":\"b\",\"date\":\"2\"}\n"
      "{\"text\":\"blue blue green red\",\"group\":\"b\",\"date\":\"3\"}\n");
  put(dir / "vocab.txt", "red\nBlue\n\ngreen\n");
  const auto r = run({"group-test", "--corpus", (dir / "corpus.jsonl").string(), "--vocab",
                      (dir / "vocab.txt").string(), "--aggregate-by-date", "--k", "1",
                      "--trials", "2", "--b1", "3", "--b2", "2", "--out",
                      (dir / "o").string()});
  REQUIRE(r.code == kExitOk);
  const std::string csv = slurp(dir / "o" / "group_test.csv");
  CHECK(csv.find("combined") != std::string::npos);
  CHECK(csv.find("\na,") != std::string::npos);
  CHECK(csv.find("\nb,") != std::string::npos);
  const std::string jsonl = slurp(dir / "o" / "group_test.jsonl");
  CHECK(jsonl.find("\"blue\"") != std::string::npos);  // vocabulary recorded, lowercased

  const auto top = run({"group-test", "--corpus", (dir / "corpus.jsonl").string(), "--top-n",
                        "3", "--k", "1", "--trials", "1", "--b1", "2", "--b2", "2", "--out",
                        (dir / "t").string()});
  CHECK(top.code == kExitOk);

  put(dir / "nogroup.jsonl", "{\"text\":\"red\"}\n");
  CHECK(run({"group-test", "--corpus", (dir / "nogroup.jsonl").string(), "--top-n", "1", "--k",
             "1", "--out", (dir / "n").string()})
            .code == kExitDomain);
}

TEST_CASE("pp-plot from a headed CSV, with SVG") {
  const auto dir = scratch("pp");
  put(dir / "p.csv", "replicate,rho\n0,0.1\n1,0.5\n2,0.9\n3,0.3\n");
  const auto r = run({"pp-plot", "--pvalues", (dir / "p.csv").string(), "--column", "rho",
                      "--ks-repetitions", "3", "--svg", "--out", dir.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(dir / "pp.csv").rfind("theoretical,empirical,lower,upper\n", 0) == 0);
  CHECK(slurp(dir / "pp.svg").rfind("<svg", 0) == 0);
  CHECK(r.out.find("KS p (avg)") != std::string::npos);

  put(dir / "bad.csv", "rho\n0.1\n1.5\n");
  CHECK(run({"pp-plot", "--pvalues", (dir / "bad.csv").string(), "--out", dir.string()}).code ==
        kExitDomain);
}
