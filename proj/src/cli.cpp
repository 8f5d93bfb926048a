#include "gpfusion/cli.hpp"

#include <CLI11.hpp>
#include <charconv>
#include <iostream>
#include <json.hpp>
#include <optional>

#include "gpfusion/datasets.hpp"
#include "gpfusion/error.hpp"
#include "gpfusion/experiment.hpp"
#include "gpfusion/io.hpp"
#include "gpfusion/kernels.hpp"
#include "gpfusion/metrics.hpp"
#include "gpfusion/normalization.hpp"
#include "gpfusion/tree.hpp"

namespace gpfusion {

namespace {

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::optional<SyntheticSpec> preset_spec(const std::string& name, std::uint64_t seed) {
  if (name == "bssr1") return presets::bssr1(seed);
  if (name == "private") return presets::private_db(seed);
  if (name == "banca") return presets::banca(seed);
  if (name == "separable") return presets::separable(seed);
  if (name == "graded") return presets::graded_overlap(seed, 1000, 5000);
  return std::nullopt;
}

const std::vector<std::string> kPresets{"bssr1", "private", "banca", "separable", "graded"};

// One value broadcasts to every modality.
std::vector<double> broadcast(const std::vector<double>& v, std::size_t n, const char* flag) {
  if (v.size() == 1) return std::vector<double>(n, v.front());
  if (v.size() != n)
    throw UsageError(std::string(flag) + " needs 1 or " + std::to_string(n) + " values");
  return v;
}

double parse_exact(const std::string& s, const char* flag) {
  double v = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc{} || ptr != s.data() + s.size())
    throw UsageError(std::string(flag) + ": not a number: " + s);
  return v;
}

void warn_degenerate(const ExperimentReport& report, std::ostream& err) {
  for (const auto& r : report.methods)
    if (r.degenerate)
      err << "warning: method '" << r.name
          << "' produced identical fused scores; EER pinned to 0.5\n";
}

struct RunArgs {
  std::string input;
  std::string synthetic;
  std::size_t modalities = 0;
  std::string methods = "singles,sum,min,mul,weight,gp";
  std::uint64_t seed = 1;
  std::string out;
  std::vector<std::size_t> negate;
  std::string ga_preset = "desk";
  std::size_t gp_generations = 0;
  std::size_t gp_population = 0;
};

struct SynthArgs {
  std::string out;
  std::string preset;
  std::size_t modalities = 0;
  std::vector<double> genuine_mean{1.0}, genuine_std{1.0}, impostor_mean{0.0}, impostor_std{1.0};
  std::size_t genuine_count = 0, impostor_count = 0;
  std::uint64_t seed = 1;
};

struct EvalArgs {
  std::string tree;
  std::string input;
  std::string params;
  std::size_t modalities = 0;
  std::string split = "all";
  std::string threshold;
  std::vector<std::size_t> negate;
  std::string roc;
};

int cmd_run(const RunArgs& a, std::ostream& out, std::ostream& err) {
  if (a.input.empty() == a.synthetic.empty())
    throw UsageError("exactly one of --input and --synthetic is required");
  ExperimentConfig cfg;
  try {
    cfg.methods = parse_methods(a.methods);
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  cfg.seed = a.seed;
  cfg.gp.seed = a.seed;
  if (a.gp_generations) cfg.gp.max_generations = a.gp_generations;
  if (a.gp_population) cfg.gp.population_size = a.gp_population;
  cfg.ga = a.ga_preset == "full" ? GaConfig::full(a.seed) : GaConfig::desk(a.seed);
  cfg.ga_preset = a.ga_preset;
  cfg.negated_modalities = a.negate;

  ScoreDataset data;
  if (!a.input.empty()) {
    if (a.modalities < 2) throw UsageError("--modalities N (N >= 2) is required with --input");
    data = load_dataset(a.input, a.modalities, {a.negate, {}});
    cfg.source = a.input;
  } else {
    if (!a.negate.empty()) throw UsageError("--negate-modality applies to --input only");
    data = generate_synthetic(*preset_spec(a.synthetic, a.seed));
    cfg.source = "synthetic:" + a.synthetic;
  }

  auto report = run_experiment(data, cfg);
  warn_degenerate(report, err);
  write_artifacts(report, a.out);
  out << "wrote " << a.out << "/report.json (" << report.methods.size() << " methods)\n";
  for (const auto& r : report.methods)
    out << "  " << r.name << ": validation EER " << format_fixed(100 * r.validation_eer, 2)
        << "%, HTER " << format_fixed(100 * r.validation_hter, 2) << "%, AUC "
        << format_fixed(r.validation_auc, 4) << "\n";
  return kExitOk;
}

int cmd_gen_synth(const SynthArgs& a, std::ostream& out) {
  SyntheticSpec spec;
  if (!a.preset.empty()) {
    spec = *preset_spec(a.preset, a.seed);
    if (a.genuine_count) spec.genuine_count = a.genuine_count;
    if (a.impostor_count) spec.impostor_count = a.impostor_count;
  } else {
    if (a.modalities < 2) throw UsageError("--modalities N (N >= 2) or --preset is required");
    if (!a.genuine_count || !a.impostor_count)
      throw UsageError("--genuine-count and --impostor-count are required without --preset");
    const auto gm = broadcast(a.genuine_mean, a.modalities, "--genuine-mean");
    const auto gs = broadcast(a.genuine_std, a.modalities, "--genuine-std");
    const auto im = broadcast(a.impostor_mean, a.modalities, "--impostor-mean");
    const auto is = broadcast(a.impostor_std, a.modalities, "--impostor-std");
    for (std::size_t m = 0; m < a.modalities; ++m) spec.modalities.push_back({gm[m], gs[m], im[m], is[m]});
    spec.genuine_count = a.genuine_count;
    spec.impostor_count = a.impostor_count;
    spec.seed = a.seed;
  }
  try {
    spec.validate();
  } catch (const ValidationError& e) {
    throw UsageError(e.what());
  }
  const auto ds = generate_synthetic(spec);
  save_dataset(ds, a.out);
  out << "wrote " << a.out << ": " << ds.genuine().size() << " genuine, " << ds.impostor().size()
      << " impostor, " << ds.modality_count() << " modalities\n";
  return kExitOk;
}

int cmd_eval_tree(const EvalArgs& a, std::ostream& out) {
  if (a.modalities < 2) throw UsageError("--modalities N (N >= 2) is required");
  const auto tree = parse_sexpr(read_file(a.tree));
  const auto params = params_from_json(read_file(a.params));
  auto data = load_dataset(a.input, a.modalities, {a.negate, {}});
  if (a.split != "all") {
    auto split = split_dataset(data);
    data = a.split == "train" ? std::move(split.train) : std::move(split.validation);
  }
  const auto norm = normalize_dataset(data, params);
  const auto fused = eval_population(tree, ColumnarDataset::from(norm));
  const auto curve = sweep_roc(fused);
  const double threshold =
      a.threshold.empty() ? curve.eer_threshold : parse_exact(a.threshold, "--threshold");

  nlohmann::ordered_json doc{{"tree", to_sexpr(tree)},
                             {"split", a.split},
                             {"genuine", fused.genuine.size()},
                             {"impostor", fused.impostor.size()},
                             {"eer", curve.eer},
                             {"eer_threshold", curve.eer_threshold},
                             {"hter", hter(fused, threshold)},
                             {"hter_threshold", threshold},
                             {"auc", auc(curve)},
                             {"degenerate", curve.degenerate}};
  if (!a.roc.empty()) write_file_atomic(a.roc, roc_to_csv(curve));
  out << doc.dump(2) << "\n";
  return kExitOk;
}

}  // namespace

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Score-level multibiometric fusion with genetic programming"};
  app.require_subcommand(1);

  RunArgs run;
  auto* run_cmd = app.add_subcommand("run", "Evaluate fusion methods on a score file or synthetic preset");
  run_cmd->add_option("--input", run.input, "Score CSV file")->check(CLI::ExistingFile);
  run_cmd->add_option("--synthetic", run.synthetic, "Synthetic preset instead of --input")
      ->check(CLI::IsMember(kPresets));
  run_cmd->add_option("--modalities", run.modalities, "Scores per tuple");
  run_cmd->add_option("--methods", run.methods, "Comma list of singles,sum,min,mul,weight,gp")
      ->capture_default_str();
  run_cmd->add_option("--seed", run.seed, "Seed for every stochastic stage")->capture_default_str();
  run_cmd->add_option("--out", run.out, "Output directory")->required();
  run_cmd->add_option("--negate-modality", run.negate, "Zero-based modality to negate (repeatable)")
      ->take_all();
  run_cmd->add_option("--ga-preset", run.ga_preset, "Weighted-sum GA size")
      ->check(CLI::IsMember({"full", "desk"}))
      ->capture_default_str();
  run_cmd->add_option("--gp-generations", run.gp_generations, "Override GP generation count")
      ->check(CLI::PositiveNumber);
  run_cmd->add_option("--gp-population", run.gp_population, "Override GP population size")
      ->check(CLI::Range(2, 1000000));

  SynthArgs synth;
  auto* synth_cmd = app.add_subcommand("gen-synth", "Write a Gaussian synthetic score file");
  synth_cmd->add_option("--out", synth.out, "Output CSV")->required();
  synth_cmd->add_option("--preset", synth.preset, "Named shape")->check(CLI::IsMember(kPresets));
  synth_cmd->add_option("--modalities", synth.modalities, "Scores per tuple");
  synth_cmd->add_option("--genuine-mean", synth.genuine_mean, "Per-modality genuine means (comma list)")->delimiter(',');
  synth_cmd->add_option("--genuine-std", synth.genuine_std, "Per-modality genuine stddevs")->delimiter(',');
  synth_cmd->add_option("--impostor-mean", synth.impostor_mean, "Per-modality impostor means")->delimiter(',');
  synth_cmd->add_option("--impostor-std", synth.impostor_std, "Per-modality impostor stddevs")->delimiter(',');
  synth_cmd->add_option("--genuine-count", synth.genuine_count, "Genuine tuples");
  synth_cmd->add_option("--impostor-count", synth.impostor_count, "Impostor tuples");
  synth_cmd->add_option("--seed", synth.seed, "Generator seed")->capture_default_str();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval-tree", "Re-evaluate a saved fusion tree");
  eval_cmd->add_option("--tree", eval.tree, "S-expression file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--input", eval.input, "Score CSV file")->required()->check(CLI::ExistingFile);
  eval_cmd->add_option("--params", eval.params, "normalization.json from a run")
      ->required()
      ->check(CLI::ExistingFile);
  eval_cmd->add_option("--modalities", eval.modalities, "Scores per tuple")->required();
  eval_cmd->add_option("--split", eval.split, "Which half of the file to evaluate")
      ->check(CLI::IsMember({"all", "train", "validation"}))
      ->capture_default_str();
  eval_cmd->add_option("--threshold", eval.threshold, "HTER threshold (default: EER threshold)");
  eval_cmd->add_option("--negate-modality", eval.negate, "Zero-based modality to negate (repeatable)")->take_all();
  eval_cmd->add_option("--roc", eval.roc, "Also write the ROC CSV here");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run, out, err);
    if (*synth_cmd) return cmd_gen_synth(synth, out);
    if (*eval_cmd) return cmd_eval_tree(eval, out);
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return kExitUsage;
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  std::vector<const char*> argv{"gpfusion"};
  for (const auto& a : args) argv.push_back(a.c_str());
  return run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
}

}  // namespace gpfusion
