#include "gpfusion/experiment.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>

#include "gpfusion/error.hpp"
#include "gpfusion/io.hpp"

namespace gpfusion {

namespace {

constexpr std::pair<std::string_view, Method> kMethodNames[] = {
    {"singles", Method::Singles}, {"sum", Method::Sum},       {"min", Method::Min},
    {"mul", Method::Mul},         {"weight", Method::Weight}, {"gp", Method::Gp}};

bool wants(const ExperimentConfig& cfg, Method m) {
  return std::find(cfg.methods.begin(), cfg.methods.end(), m) != cfg.methods.end();
}

nlohmann::ordered_json optional_number(const std::optional<double>& v) {
  return v ? nlohmann::ordered_json(*v) : nlohmann::ordered_json(nullptr);
}

}  // namespace

std::vector<Method> parse_methods(const std::string& list) {
  std::vector<Method> out;
  std::stringstream ss(list);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(' '));
    item.erase(item.find_last_not_of(' ') + 1);
    if (item.empty()) continue;
    auto it = std::find_if(std::begin(kMethodNames), std::end(kMethodNames),
                           [&](const auto& p) { return p.first == item; });
    if (it == std::end(kMethodNames)) throw ValidationError("unknown method '" + item + "'");
    if (std::find(out.begin(), out.end(), it->second) == out.end()) out.push_back(it->second);
  }
  if (out.empty()) throw ValidationError("no methods requested");
  return out;
}

std::string_view method_name(Method m) noexcept {
  for (const auto& [name, value] : kMethodNames)
    if (value == m) return name;
  return "?";
}

ExperimentReport run_experiment(const ScoreDataset& raw, const ExperimentConfig& config) {
  raw.require_non_empty();
  const auto split = split_dataset(raw);
  const auto params = fit_normalization(split.train);
  const SplitPair norm{normalize_dataset(split.train, params),
                       normalize_dataset(split.validation, params)};

  ExperimentReport report;
  report.dataset = raw.name();
  report.modality_count = raw.modality_count();
  report.genuine = raw.genuine().size();
  report.impostor = raw.impostor().size();
  report.train_genuine = split.train.genuine().size();
  report.train_impostor = split.train.impostor().size();
  report.validation_genuine = split.validation.genuine().size();
  report.validation_impostor = split.validation.impostor().size();
  report.normalization = params;
  report.config = config;

  BaselineOptions options;
  options.singles = wants(config, Method::Singles);
  options.rules.clear();
  for (auto [m, rule] : {std::pair{Method::Sum, FusionRule::Sum}, std::pair{Method::Min, FusionRule::Min},
                         std::pair{Method::Mul, FusionRule::Mul}})
    if (wants(config, m)) options.rules.push_back(rule);
  if (wants(config, Method::Weight)) options.weighted = config.ga;

  auto baselines = evaluate_baselines(norm, options);
  report.methods = std::move(baselines.methods);
  if (baselines.tuned) report.tuned_weights = baselines.tuned->weights;

  if (wants(config, Method::Gp)) {
    auto evolved = evolve(norm.train, config.gp);
    const auto train_data = ColumnarDataset::from(norm.train);
    const auto val_data = ColumnarDataset::from(norm.validation);
    report.methods.push_back(evaluate_fused("gp", eval_population(evolved.best, train_data),
                                            eval_population(evolved.best, val_data)));
    report.best_tree = to_sexpr(evolved.best);
    report.gp_history = std::move(evolved.history);
  }

  auto weight = std::find_if(report.methods.begin(), report.methods.end(),
                             [](const MethodResult& r) { return r.name == "weight"; });
  if (weight != report.methods.end()) {
    std::vector<MethodGain> gains;
    for (const auto& r : report.methods) {
      if (r.name == "weight") continue;
      MethodGain g{r.name, std::nullopt, std::nullopt};
      if (weight->validation_eer != 0.0) g.eer = gain(weight->validation_eer, r.validation_eer);
      if (weight->validation_auc != 0.0) g.auc = gain(weight->validation_auc, r.validation_auc);
      gains.push_back(std::move(g));
    }
    report.gains = std::move(gains);
  }
  return report;
}

std::string report_to_json(const ExperimentReport& report) {
  using json = nlohmann::ordered_json;
  json doc;
  doc["dataset"] = {{"name", report.dataset},
                    {"modalities", report.modality_count},
                    {"genuine", report.genuine},
                    {"impostor", report.impostor},
                    {"train", {{"genuine", report.train_genuine}, {"impostor", report.train_impostor}}},
                    {"validation",
                     {{"genuine", report.validation_genuine},
                      {"impostor", report.validation_impostor}}}};
  doc["normalization"] = json::parse(params_to_json(report.normalization));

  auto& methods = doc["methods"] = json::array();
  for (const auto& r : report.methods) {
    methods.push_back({{"method", r.name},
                       {"train_eer", r.train_eer},
                       {"train_threshold", r.train_threshold},
                       {"validation_eer", r.validation_eer},
                       {"validation_hter", r.validation_hter},
                       {"validation_auc", r.validation_auc},
                       {"degenerate", r.degenerate}});
  }
  if (report.gains) {
    auto& gains = doc["gains_vs_weight"] = json::array();
    for (const auto& g : *report.gains)
      gains.push_back({{"method", g.method}, {"eer", optional_number(g.eer)},
                       {"auc", optional_number(g.auc)}});
  }
  if (report.tuned_weights) doc["tuned_weights"] = *report.tuned_weights;
  if (report.best_tree) {
    doc["best_tree"] = *report.best_tree;
    doc["gp_generations_run"] = report.gp_history.size();
  }

  const auto& c = report.config;
  json methods_echo = json::array();
  for (auto m : c.methods) methods_echo.push_back(std::string(method_name(m)));
  doc["config"] = {
      {"source", c.source},
      {"seed", c.seed},
      {"methods", methods_echo},
      {"negated_modalities", c.negated_modalities},
      {"gp",
       {{"population_size", c.gp.population_size},
        {"max_generations", c.gp.max_generations},
        {"max_depth", c.gp.max_depth},
        {"init_depth", {c.gp.init_depth_min, c.gp.init_depth_max}},
        {"p_crossover", c.gp.p_crossover},
        {"p_mutation", c.gp.p_mutation},
        {"p_reproduction", c.gp.p_reproduction},
        {"tournament_size", c.gp.tournament_size},
        {"tournament_p", c.gp.tournament_p},
        {"n_constants", c.gp.n_constants},
        {"fitness_target", c.gp.fitness_target},
        {"seed", c.gp.seed}}},
      {"ga",
       {{"preset", c.ga_preset},
        {"population_size", c.ga.population_size},
        {"generations", c.ga.generations},
        {"selection_q", c.ga.selection_q},
        {"elitism", c.ga.elitism},
        {"weight_interval", {c.ga.weight_lo, c.ga.weight_hi}},
        {"crossover_rate", c.ga.crossover_rate},
        {"mutation_rate", c.ga.mutation_rate},
        {"seed", c.ga.seed}}}};
  return doc.dump(2) + "\n";
}

void write_artifacts(const ExperimentReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file_atomic(dir / "report.json", report_to_json(report));
  write_file_atomic(dir / "normalization.json", params_to_json(report.normalization));
  for (const auto& r : report.methods)
    write_file_atomic(dir / ("roc_" + r.name + ".csv"), roc_to_csv(r.validation_curve));
  if (report.best_tree) {
    write_file_atomic(dir / "best_tree.sexp", *report.best_tree + "\n");
    write_file_atomic(dir / "gp_history.csv", history_to_csv(report.gp_history));
  }
}

}  // namespace gpfusion
