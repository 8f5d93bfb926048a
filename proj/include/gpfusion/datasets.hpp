#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace gpfusion {

enum class Label { Genuine, Impostor };

/// One comparison event: a score per modality plus its ground truth.
struct ScoreTuple {
  std::vector<double> scores;
  Label label = Label::Genuine;

  bool operator==(const ScoreTuple&) const = default;
};

/// Labeled score tuples for one database, genuine and impostor kept in
/// file order. Higher scores mean "more genuine".
class ScoreDataset {
 public:
  ScoreDataset() = default;
  ScoreDataset(std::string name, std::size_t modality_count, std::vector<ScoreTuple> genuine,
               std::vector<ScoreTuple> impostor);

  const std::string& name() const noexcept { return name_; }
  std::size_t modality_count() const noexcept { return modality_count_; }
  const std::vector<ScoreTuple>& genuine() const noexcept { return genuine_; }
  const std::vector<ScoreTuple>& impostor() const noexcept { return impostor_; }

  // Throws ValidationError when either class is empty.
  void require_non_empty() const;

  // Column m of the genuine (or impostor) block.
  std::vector<double> genuine_column(std::size_t m) const;
  std::vector<double> impostor_column(std::size_t m) const;

  bool operator==(const ScoreDataset&) const = default;

 private:
  std::string name_;
  std::size_t modality_count_ = 0;
  std::vector<ScoreTuple> genuine_;
  std::vector<ScoreTuple> impostor_;
};

struct SplitPair {
  ScoreDataset train;
  ScoreDataset validation;
};

struct ModalityDistribution {
  double genuine_mean = 1.0;
  double genuine_stddev = 1.0;
  double impostor_mean = 0.0;
  double impostor_stddev = 1.0;
};

/// Gaussian class-conditional generator parameters, one entry per modality.
struct SyntheticSpec {
  std::string name = "synthetic";
  std::vector<ModalityDistribution> modalities;
  std::size_t genuine_count = 0;
  std::size_t impostor_count = 0;
  std::uint64_t seed = 0;

  void validate() const;
};

struct LoadOptions {
  // Zero-based modality indices whose scores are negated at ingestion
  // (distance-convention matchers).
  std::vector<std::size_t> negate_modalities;
  std::string name;
};

ScoreDataset parse_dataset(const std::string& text, std::size_t modality_count,
                           const LoadOptions& options = {});
ScoreDataset load_dataset(const std::filesystem::path& path, std::size_t modality_count,
                          const LoadOptions& options = {});

// Canonical form: all genuine rows, then all impostor rows, shortest
// round-trip decimals, lowercase labels, no header.
std::string format_dataset(const ScoreDataset& ds);
void save_dataset(const ScoreDataset& ds, const std::filesystem::path& path);

// First ceil(n/2) tuples of each class go to train.
SplitPair split_dataset(const ScoreDataset& ds);

ScoreDataset generate_synthetic(const SyntheticSpec& spec);

// Keeps the listed modalities, in the given order.
ScoreDataset select_modalities(const ScoreDataset& ds, std::span<const std::size_t> modalities);

namespace presets {

// Shapes of the three benchmark databases (tuple counts and modality
// count). Score distributions are placeholders with moderate overlap.
SyntheticSpec bssr1(std::uint64_t seed);
SyntheticSpec private_db(std::uint64_t seed);
SyntheticSpec banca(std::uint64_t seed);

// Two modalities ten standard deviations apart; every rule separates it.
SyntheticSpec separable(std::uint64_t seed, std::size_t per_class = 100);

// Four unit-variance modalities whose single-modality EERs are close to
// 0.15, 0.20, 0.25 and 0.30.
SyntheticSpec graded_overlap(std::uint64_t seed, std::size_t genuine_count,
                             std::size_t impostor_count);

}  // namespace presets

}  // namespace gpfusion
