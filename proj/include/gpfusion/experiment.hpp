#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "gpfusion/baselines.hpp"
#include "gpfusion/gp.hpp"
#include "gpfusion/normalization.hpp"

namespace gpfusion {

enum class Method { Singles, Sum, Min, Mul, Weight, Gp };

// Parses a comma separated list such as "sum,weight,gp". Throws
// ValidationError on unknown names.
std::vector<Method> parse_methods(const std::string& list);
std::string_view method_name(Method m) noexcept;

struct ExperimentConfig {
  std::vector<Method> methods{Method::Singles, Method::Sum, Method::Min,
                              Method::Mul,     Method::Weight, Method::Gp};
  std::uint64_t seed = 0;
  EvolutionConfig gp;
  GaConfig ga = GaConfig::desk(0);
  std::string ga_preset = "desk";
  // Echoed into the report only.
  std::string source;
  std::vector<std::size_t> negated_modalities;
};

struct MethodGain {
  std::string method;
  std::optional<double> eer;
  std::optional<double> auc;
};

struct ExperimentReport {
  std::string dataset;
  std::size_t modality_count = 0;
  std::size_t genuine = 0, impostor = 0;
  std::size_t train_genuine = 0, train_impostor = 0;
  std::size_t validation_genuine = 0, validation_impostor = 0;
  NormalizationParams normalization;
  std::vector<MethodResult> methods;
  // Present iff the weighted sum ran.
  std::optional<std::vector<MethodGain>> gains;
  std::optional<std::vector<double>> tuned_weights;
  std::optional<std::string> best_tree;
  std::vector<GenerationStats> gp_history;
  ExperimentConfig config;
};

// load -> split -> train-fitted normalization -> requested methods.
ExperimentReport run_experiment(const ScoreDataset& raw, const ExperimentConfig& config);

std::string report_to_json(const ExperimentReport& report);

// report.json, normalization.json, roc_<method>.csv for every method and,
// when GP ran, best_tree.sexp and gp_history.csv. Each file is written
// atomically.
void write_artifacts(const ExperimentReport& report, const std::filesystem::path& dir);

}  // namespace gpfusion
