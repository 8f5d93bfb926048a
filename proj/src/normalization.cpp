#include "gpfusion/normalization.hpp"

#include <cmath>
#include <json.hpp>

#include "gpfusion/error.hpp"

namespace gpfusion {

NormalizationParams fit_normalization(const ScoreDataset& train) {
  if (train.genuine().size() < 2)
    throw ValidationError("normalization needs at least 2 genuine training tuples");
  NormalizationParams params;
  const double n = static_cast<double>(train.genuine().size());
  for (std::size_t m = 0; m < train.modality_count(); ++m) {
    double sum = 0.0;
    for (const auto& t : train.genuine()) sum += t.scores[m];
    const double mean = sum / n;
    double ss = 0.0;
    for (const auto& t : train.genuine()) {
      const double d = t.scores[m] - mean;
      ss += d * d;
    }
    const double stddev = std::sqrt(ss / n);
    if (!(stddev > 0.0))
      throw ValidationError("modality " + std::to_string(m) +
                            " is degenerate: genuine scores have zero variance");
    params.modalities.push_back({mean, stddev});
  }
  return params;
}

double normalize(double score, std::size_t modality, const NormalizationParams& params) {
  const auto& s = params.modalities.at(modality);
  return 0.5 * (std::tanh((score - s.mean) / (100.0 * s.stddev)) + 1.0);
}

ScoreDataset normalize_dataset(const ScoreDataset& ds, const NormalizationParams& params) {
  if (ds.modality_count() != params.modality_count())
    throw ValidationError("dataset has " + std::to_string(ds.modality_count()) +
                          " modalities but normalization params have " +
                          std::to_string(params.modality_count()));
  auto apply = [&](const std::vector<ScoreTuple>& tuples) {
    std::vector<ScoreTuple> out = tuples;
    for (auto& t : out)
      for (std::size_t m = 0; m < t.scores.size(); ++m) t.scores[m] = normalize(t.scores[m], m, params);
    return out;
  };
  return ScoreDataset(ds.name(), ds.modality_count(), apply(ds.genuine()), apply(ds.impostor()));
}

std::string params_to_json(const NormalizationParams& params) {
  nlohmann::ordered_json doc;
  doc["method"] = "tanh";
  auto& arr = doc["modalities"] = nlohmann::ordered_json::array();
  for (std::size_t m = 0; m < params.modalities.size(); ++m) {
    arr.push_back({{"index", m},
                   {"genuine_mean", params.modalities[m].mean},
                   {"genuine_stddev", params.modalities[m].stddev}});
  }
  return doc.dump(2) + "\n";
}

NormalizationParams params_from_json(const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ParseError(std::string("normalization params: ") + e.what());
  }
  NormalizationParams params;
  try {
    const auto& arr = doc.at("modalities");
    params.modalities.resize(arr.size());
    for (const auto& entry : arr) {
      auto idx = entry.at("index").get<std::size_t>();
      if (idx >= arr.size()) throw ParseError("normalization params: index out of range");
      params.modalities[idx] = {entry.at("genuine_mean").get<double>(),
                                entry.at("genuine_stddev").get<double>()};
    }
  } catch (const nlohmann::json::exception& e) {
    throw ParseError(std::string("normalization params: ") + e.what());
  }
  for (const auto& s : params.modalities)
    if (!(s.stddev > 0.0)) throw ValidationError("normalization params: stddev must be positive");
  return params;
}

}  // namespace gpfusion
