#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "gpfusion/datasets.hpp"

namespace gpfusion {

/// Genuine-score location and scale for one modality.
struct GenuineStats {
  double mean = 0.0;
  double stddev = 1.0;

  bool operator==(const GenuineStats&) const = default;
};

/// tanh-estimator parameters, fitted on genuine training scores only.
struct NormalizationParams {
  std::vector<GenuineStats> modalities;

  std::size_t modality_count() const noexcept { return modalities.size(); }
  bool operator==(const NormalizationParams&) const = default;
};

// Mean and population stddev of each modality's genuine scores.
// Throws ValidationError if a modality has zero spread.
NormalizationParams fit_normalization(const ScoreDataset& train);

// 0.5 * (tanh((score - mean) / (100 * stddev)) + 1), always in (0, 1).
double normalize(double score, std::size_t modality, const NormalizationParams& params);

ScoreDataset normalize_dataset(const ScoreDataset& ds, const NormalizationParams& params);

std::string params_to_json(const NormalizationParams& params);
NormalizationParams params_from_json(const std::string& text);

}  // namespace gpfusion
