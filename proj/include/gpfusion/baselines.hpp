#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "gpfusion/datasets.hpp"
#include "gpfusion/kernels.hpp"
#include "gpfusion/metrics.hpp"

namespace gpfusion {

enum class FusionRule { Sum, Min, Mul };

std::string_view rule_name(FusionRule rule) noexcept;

double fuse_rule(FusionRule rule, std::span<const double> scores);
// sum_m w[m] * s[m]; throws ValidationError on a length mismatch.
double fuse_weighted(std::span<const double> weights, std::span<const double> scores);

FusedScores fuse_dataset(FusionRule rule, const ScoreDataset& ds);
FusedScores fuse_dataset_weighted(std::span<const double> weights, const ScoreDataset& ds);
// Scores of one modality on its own.
FusedScores project_modality(const ScoreDataset& ds, std::size_t modality);

struct GaConfig {
  std::size_t population_size = 5000;
  std::size_t generations = 500;
  double selection_q = 0.9;
  bool elitism = true;
  double weight_lo = -10.0;
  double weight_hi = 10.0;
  double crossover_rate = 0.8;
  double mutation_rate = 0.1;
  std::uint64_t seed = 0;
  Execution execution = Execution::Parallel;

  static GaConfig full(std::uint64_t seed);
  static GaConfig desk(std::uint64_t seed);
  void validate() const;
};

// P(rank r) = q' (1 - q)^(r - 1), r = 1..P, q' = q / (1 - (1 - q)^P).
std::vector<double> geometric_selection_probabilities(std::size_t population, double q);

struct GaResult {
  std::vector<double> weights;
  double train_eer = 0.5;
  // Best fitness after each generation.
  std::vector<double> best_history;
};

// Real-coded GA over weight vectors minimizing the sweep EER of the
// weighted sum on `train`. The all-ones chromosome is part of the initial
// population.
GaResult ga_tune_weights(const ScoreDataset& train, const GaConfig& cfg);

/// Train/validation figures of one fusion method. The decision threshold
/// is the train-set EER threshold; HTER is measured on validation there.
struct MethodResult {
  std::string name;
  double train_eer = 0.5;
  double train_threshold = 0.0;
  double validation_eer = 0.5;
  double validation_hter = 0.5;
  double validation_auc = 0.5;
  RocCurve validation_curve;
  bool degenerate = false;
};

MethodResult evaluate_fused(std::string name, const FusedScores& train,
                            const FusedScores& validation);

struct BaselineOptions {
  bool singles = true;
  std::vector<FusionRule> rules{FusionRule::Sum, FusionRule::Min, FusionRule::Mul};
  std::optional<GaConfig> weighted;
};

struct BaselineReport {
  std::vector<MethodResult> methods;
  std::optional<GaResult> tuned;
};

// Singles are named s1..sn, rules by rule_name, the tuned sum "weight".
BaselineReport evaluate_baselines(const SplitPair& split, const BaselineOptions& options);

}  // namespace gpfusion
