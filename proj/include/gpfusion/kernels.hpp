#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "gpfusion/datasets.hpp"
#include "gpfusion/metrics.hpp"
#include "gpfusion/tree.hpp"

namespace gpfusion {

enum class Execution { Serial, Parallel };

/// Column-major copy of one class block, the layout the batched
/// evaluators read.
class ScoreMatrix {
 public:
  ScoreMatrix() = default;
  ScoreMatrix(const std::vector<ScoreTuple>& tuples, std::size_t modality_count);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }
  std::span<const double> column(std::size_t m) const noexcept {
    return {data_.data() + m * rows_, rows_};
  }

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

struct ColumnarDataset {
  ScoreMatrix genuine;
  ScoreMatrix impostor;
  std::size_t modality_count = 0;

  static ColumnarDataset from(const ScoreDataset& ds);
};

// Evaluates the tree on every row of `m`, writing one value per row.
// Parallel splits rows into blocks across OpenMP threads.
void evaluate_rows(const ExpressionTree& tree, const ScoreMatrix& m, std::span<double> out,
                   Execution exec = Execution::Serial);

// Per-tuple eval_tree loop; the reference for the batched path.
FusedScores eval_population_reference(const ExpressionTree& tree, const ScoreDataset& ds);

// Throws ValidationError if the tree references a modality the data lacks.
FusedScores eval_population(const ExpressionTree& tree, const ColumnarDataset& data,
                            Execution exec = Execution::Serial);
FusedScores eval_population(const ExpressionTree& tree, const ScoreDataset& ds);

// Sweep EER of the fused scores; lower is better.
double fitness(const ExpressionTree& tree, const ColumnarDataset& data);
double fitness(const ExpressionTree& tree, const ScoreDataset& ds);

// Fitness of every tree. Parallel distributes trees over OpenMP threads;
// each entry is computed exactly as in the serial loop.
std::vector<double> population_fitness_serial(std::span<const ExpressionTree> trees,
                                              const ColumnarDataset& data);
std::vector<double> population_fitness_parallel(std::span<const ExpressionTree> trees,
                                                const ColumnarDataset& data);
std::vector<double> population_fitness(std::span<const ExpressionTree> trees,
                                       const ColumnarDataset& data, Execution exec);

// Weighted-sum fused scores, sum_m w[m] * s[m], accumulated left to right.
FusedScores fuse_weighted_columns(std::span<const double> weights, const ColumnarDataset& data);

std::vector<double> weighted_fitness_serial(std::span<const std::vector<double>> chromosomes,
                                            const ColumnarDataset& data);
std::vector<double> weighted_fitness_parallel(std::span<const std::vector<double>> chromosomes,
                                              const ColumnarDataset& data);

int max_threads() noexcept;

}  // namespace gpfusion
