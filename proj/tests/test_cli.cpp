#include <doctest.h>

#include <charconv>
#include <filesystem>
#include <json.hpp>
#include <sstream>

#include "gpfusion/cli.hpp"
#include "gpfusion/datasets.hpp"
#include "gpfusion/io.hpp"
#include "gpfusion/metrics.hpp"

using namespace gpfusion;
namespace fs = std::filesystem;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  std::ostringstream out, err;
  int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path fresh_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / "gpfusion_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

nlohmann::json load_json(const fs::path& p) { return nlohmann::json::parse(read_file(p)); }

const nlohmann::json& method(const nlohmann::json& report, const std::string& name) {
  for (const auto& m : report["methods"])
    if (m["method"] == name) return m;
  throw std::runtime_error("method not in report: " + name);
}

std::string exact(double v) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, p);
}

}  // namespace

TEST_CASE("gen-synth") {
  auto dir = fresh_dir("synth");
  SUBCASE("BSSR1-shaped preset") {
    auto r = cli({"gen-synth", "--preset", "bssr1", "--out", (dir / "b.csv").string()});
    REQUIRE(r.code == 0);
    auto ds = load_dataset(dir / "b.csv", 4);
    CHECK(ds.genuine().size() == 512);
    CHECK(ds.impostor().size() == 261632);
  }
  SUBCASE("custom spec round-trips through load") {
    auto r = cli({"gen-synth", "--modalities", "3", "--genuine-mean", "1,2,3", "--genuine-std", "0.5",
                  "--impostor-mean", "0", "--impostor-std", "1", "--genuine-count", "40",
                  "--impostor-count", "70", "--seed", "9", "--out", (dir / "c.csv").string()});
    REQUIRE(r.code == 0);
    auto ds = load_dataset(dir / "c.csv", 3);
    CHECK(ds.genuine().size() == 40);
    CHECK(ds.impostor().size() == 70);
    SyntheticSpec spec;
    spec.name = "c";
    spec.modalities = {{1, 0.5, 0, 1}, {2, 0.5, 0, 1}, {3, 0.5, 0, 1}};
    spec.genuine_count = 40;
    spec.impostor_count = 70;
    spec.seed = 9;
    CHECK(ds == generate_synthetic(spec));
    CHECK_FALSE(fs::exists(dir / "c.csv.tmp"));
  }
  SUBCASE("invalid spec is a usage error") {
    auto r = cli({"gen-synth", "--modalities", "2", "--genuine-std", "0", "--genuine-count", "4",
                  "--impostor-count", "4", "--out", (dir / "x.csv").string()});
    CHECK(r.code == kExitUsage);
    CHECK(cli({"gen-synth", "--modalities", "3", "--genuine-mean", "1,2", "--genuine-count", "4",
               "--impostor-count", "4", "--out", (dir / "x.csv").string()})
              .code == kExitUsage);
  }
}

TEST_CASE("run: usage errors") {
  auto dir = fresh_dir("usage");
  CHECK(cli({}).code == kExitUsage);
  CHECK(cli({"frobnicate"}).code == kExitUsage);
  CHECK(cli({"run", "--synthetic", "separable", "--methods", "sum,svm", "--out", dir.string()}).code ==
        kExitUsage);
  CHECK(cli({"run", "--input", (dir / "missing.csv").string(), "--modalities", "2", "--out",
             dir.string()})
            .code == kExitUsage);
  CHECK(cli({"run", "--out", dir.string()}).code == kExitUsage);
  CHECK(cli({"run", "--synthetic", "nope", "--out", dir.string()}).code == kExitUsage);
  CHECK(cli({"run", "--synthetic", "separable", "--ga-preset", "huge", "--out", dir.string()}).code ==
        kExitUsage);
  CHECK(cli({"--help"}).code == kExitOk);
}

TEST_CASE("run: separable synthetic data, GP only") {
  auto dir = fresh_dir("separable");
  auto r = cli({"run", "--synthetic", "separable", "--methods", "gp", "--gp-generations", "5",
                "--gp-population", "60", "--seed", "3", "--out", dir.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto report = load_json(dir / "report.json");
  CHECK(report["methods"].size() == 1);
  CHECK(method(report, "gp")["validation_eer"] == 0.0);
  CHECK_FALSE(report.contains("gains_vs_weight"));
  CHECK(fs::exists(dir / "best_tree.sexp"));
  CHECK(fs::exists(dir / "gp_history.csv"));
  CHECK(fs::exists(dir / "roc_gp.csv"));
}

TEST_CASE("run: gains against the weighted sum") {
  auto dir = fresh_dir("gains");
  auto r = cli({"run", "--synthetic", "banca", "--methods", "sum,weight", "--seed", "4", "--out",
                dir.string()});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto report = load_json(dir / "report.json");
  const double w = method(report, "weight")["validation_eer"];
  const double s = method(report, "sum")["validation_eer"];
  REQUIRE(report["gains_vs_weight"].size() == 1);
  CHECK(report["gains_vs_weight"][0]["method"] == "sum");
  CHECK(report["gains_vs_weight"][0]["eer"].get<double>() == gain(w, s));
  const double wa = method(report, "weight")["validation_auc"];
  const double sa = method(report, "sum")["validation_auc"];
  CHECK(report["gains_vs_weight"][0]["auc"].get<double>() == gain(wa, sa));
  CHECK(report["tuned_weights"].size() == 4);
}

TEST_CASE("run + eval-tree: determinism and replay") {
  auto dir = fresh_dir("replay");
  REQUIRE(cli({"gen-synth", "--preset", "banca", "--seed", "5", "--out", (dir / "d.csv").string()}).code ==
          0);
  const std::vector<std::string> base{"run", "--input", (dir / "d.csv").string(), "--modalities", "4",
                                      "--methods", "singles,sum,gp", "--gp-generations", "4",
                                      "--gp-population", "80", "--seed", "11", "--out"};
  auto a = base, b = base;
  a.push_back((dir / "a").string());
  b.push_back((dir / "b").string());
  REQUIRE(cli(a).code == 0);
  REQUIRE(cli(b).code == 0);
  for (const char* f : {"report.json", "best_tree.sexp", "gp_history.csv", "roc_gp.csv", "roc_sum.csv",
                        "normalization.json"})
    CHECK_MESSAGE(read_file(dir / "a" / f) == read_file(dir / "b" / f), f);
  for (const auto& entry : fs::directory_iterator(dir / "a"))
    CHECK(entry.path().extension() != ".tmp");

  auto report = load_json(dir / "a" / "report.json");
  const auto& gp = method(report, "gp");
  auto r = cli({"eval-tree", "--tree", (dir / "a" / "best_tree.sexp").string(), "--input",
                (dir / "d.csv").string(), "--params", (dir / "a" / "normalization.json").string(),
                "--modalities", "4", "--split", "validation", "--threshold",
                exact(gp["train_threshold"].get<double>())});
  REQUIRE_MESSAGE(r.code == 0, r.err);
  auto replay = nlohmann::json::parse(r.out);
  CHECK(replay["eer"].get<double>() == gp["validation_eer"].get<double>());
  CHECK(replay["hter"].get<double>() == gp["validation_hter"].get<double>());
  CHECK(replay["auc"].get<double>() == gp["validation_auc"].get<double>());

  auto t = cli({"eval-tree", "--tree", (dir / "a" / "best_tree.sexp").string(), "--input",
                (dir / "d.csv").string(), "--params", (dir / "a" / "normalization.json").string(),
                "--modalities", "4", "--split", "train"});
  REQUIRE(t.code == 0);
  CHECK(nlohmann::json::parse(t.out)["eer"].get<double>() == gp["train_eer"].get<double>());
}

TEST_CASE("eval-tree: errors") {
  auto dir = fresh_dir("evalerr");
  REQUIRE(cli({"gen-synth", "--preset", "banca", "--out", (dir / "d.csv").string()}).code == 0);
  write_file_atomic(dir / "p.json", R"({"modalities":[)"
                                    R"({"index":0,"genuine_mean":0,"genuine_stddev":1},)"
                                    R"({"index":1,"genuine_mean":0,"genuine_stddev":1},)"
                                    R"({"index":2,"genuine_mean":0,"genuine_stddev":1},)"
                                    R"({"index":3,"genuine_mean":0,"genuine_stddev":1}]})");
  auto eval = [&](const std::string& tree) {
    write_file_atomic(dir / "t.sexp", tree);
    return cli({"eval-tree", "--tree", (dir / "t.sexp").string(), "--input", (dir / "d.csv").string(),
                "--params", (dir / "p.json").string(), "--modalities", "4"});
  };
  auto ok = eval("(add (var 0) (var 3))");
  CHECK(ok.code == 0);
  auto bad_op = eval("(pow (var 0) (var 1))");
  CHECK(bad_op.code == kExitRuntime);
  CHECK(bad_op.err.find("'pow'") != std::string::npos);
  auto mismatch = eval("(add (var 0) (var 7))");
  CHECK(mismatch.code == kExitRuntime);
  CHECK(mismatch.err.find("modality 7") != std::string::npos);
}
