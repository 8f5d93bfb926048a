#include "gpfusion/kernels.hpp"

#include <algorithm>
#include <omp.h>

#include "gpfusion/error.hpp"

namespace gpfusion {

namespace {

constexpr std::size_t kBlock = 256;

// Right-to-left pass over the prefix sequence with a stack of row blocks.
// The stack never exceeds depth + 2 entries.
class BlockEvaluator {
 public:
  explicit BlockEvaluator(const ExpressionTree& tree)
      : tree_(tree), stack_((tree.depth() + 2) * kBlock) {}

  void run(const ScoreMatrix& m, std::size_t begin, std::size_t end, double* out) {
    const std::size_t len = end - begin;
    const auto nodes = tree_.nodes();
    std::size_t top = 0;
    for (std::size_t k = nodes.size(); k-- > 0;) {
      const Node& n = nodes[k];
      if (n.op == Op::Var) {
        const double* src = m.column(n.variable).data() + begin;
        std::copy(src, src + len, slot(top++));
      } else if (n.op == Op::Const) {
        std::fill(slot(top), slot(top) + len, n.value);
        ++top;
      } else {
        double* left = slot(top - 1);
        double* right = slot(top - 2);
        for (std::size_t r = 0; r < len; ++r) right[r] = apply_function(n.op, left[r], right[r]);
        --top;
      }
    }
    std::copy(slot(0), slot(0) + len, out);
  }

 private:
  double* slot(std::size_t i) { return stack_.data() + i * kBlock; }

  const ExpressionTree& tree_;
  std::vector<double> stack_;
};

void check_modalities(const ExpressionTree& tree, std::size_t modality_count) {
  auto mv = tree.max_variable();
  if (mv && *mv >= modality_count)
    throw ValidationError("tree references modality " + std::to_string(*mv) +
                          " but the data has " + std::to_string(modality_count));
}

std::vector<double> evaluate_all(const ExpressionTree& tree, const ScoreMatrix& m,
                                 Execution exec) {
  std::vector<double> out(m.rows());
  evaluate_rows(tree, m, out, exec);
  return out;
}

}  // namespace

ScoreMatrix::ScoreMatrix(const std::vector<ScoreTuple>& tuples, std::size_t modality_count)
    : rows_(tuples.size()), cols_(modality_count), data_(rows_ * cols_) {
  for (std::size_t r = 0; r < rows_; ++r)
    for (std::size_t c = 0; c < cols_; ++c) data_[c * rows_ + r] = tuples[r].scores[c];
}

ColumnarDataset ColumnarDataset::from(const ScoreDataset& ds) {
  return {ScoreMatrix(ds.genuine(), ds.modality_count()),
          ScoreMatrix(ds.impostor(), ds.modality_count()), ds.modality_count()};
}

void evaluate_rows(const ExpressionTree& tree, const ScoreMatrix& m, std::span<double> out,
                   Execution exec) {
  check_modalities(tree, m.cols());
  const std::size_t rows = m.rows();
  const auto blocks = static_cast<std::ptrdiff_t>((rows + kBlock - 1) / kBlock);
  if (exec == Execution::Parallel) {
#pragma omp parallel
    {
      BlockEvaluator eval(tree);
#pragma omp for schedule(static)
      for (std::ptrdiff_t b = 0; b < blocks; ++b) {
        const auto begin = static_cast<std::size_t>(b) * kBlock;
        eval.run(m, begin, std::min(rows, begin + kBlock), out.data() + begin);
      }
    }
  } else {
    BlockEvaluator eval(tree);
    for (std::size_t begin = 0; begin < rows; begin += kBlock)
      eval.run(m, begin, std::min(rows, begin + kBlock), out.data() + begin);
  }
}

FusedScores eval_population_reference(const ExpressionTree& tree, const ScoreDataset& ds) {
  check_modalities(tree, ds.modality_count());
  FusedScores fs;
  fs.genuine.reserve(ds.genuine().size());
  fs.impostor.reserve(ds.impostor().size());
  for (const auto& t : ds.genuine()) fs.genuine.push_back(eval_tree(tree, t.scores));
  for (const auto& t : ds.impostor()) fs.impostor.push_back(eval_tree(tree, t.scores));
  return fs;
}

FusedScores eval_population(const ExpressionTree& tree, const ColumnarDataset& data,
                            Execution exec) {
  return {evaluate_all(tree, data.genuine, exec), evaluate_all(tree, data.impostor, exec)};
}

FusedScores eval_population(const ExpressionTree& tree, const ScoreDataset& ds) {
  return eval_population(tree, ColumnarDataset::from(ds));
}

double fitness(const ExpressionTree& tree, const ColumnarDataset& data) {
  return sweep_roc(eval_population(tree, data)).eer;
}

double fitness(const ExpressionTree& tree, const ScoreDataset& ds) {
  return fitness(tree, ColumnarDataset::from(ds));
}

std::vector<double> population_fitness_serial(std::span<const ExpressionTree> trees,
                                              const ColumnarDataset& data) {
  std::vector<double> out(trees.size());
  for (std::size_t i = 0; i < trees.size(); ++i) out[i] = fitness(trees[i], data);
  return out;
}

std::vector<double> population_fitness_parallel(std::span<const ExpressionTree> trees,
                                                const ColumnarDataset& data) {
  std::vector<double> out(trees.size());
  const auto n = static_cast<std::ptrdiff_t>(trees.size());
  // Exceptions must not cross the parallel region boundary.
  bool failed = false;
#pragma omp parallel for schedule(dynamic, 4)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      out[static_cast<std::size_t>(i)] = fitness(trees[static_cast<std::size_t>(i)], data);
    } catch (...) {
#pragma omp atomic write
      failed = true;
    }
  }
  if (failed) return population_fitness_serial(trees, data);  // rethrows the first error
  return out;
}

std::vector<double> population_fitness(std::span<const ExpressionTree> trees,
                                       const ColumnarDataset& data, Execution exec) {
  return exec == Execution::Parallel ? population_fitness_parallel(trees, data)
                                     : population_fitness_serial(trees, data);
}

FusedScores fuse_weighted_columns(std::span<const double> weights, const ColumnarDataset& data) {
  if (weights.size() != data.modality_count)
    throw ValidationError("weight vector has " + std::to_string(weights.size()) +
                          " entries, expected " + std::to_string(data.modality_count));
  auto fuse = [&](const ScoreMatrix& m) {
    std::vector<double> out(m.rows(), 0.0);
    for (std::size_t c = 0; c < m.cols(); ++c) {
      const auto col = m.column(c);
      const double w = weights[c];
      for (std::size_t r = 0; r < out.size(); ++r) out[r] += w * col[r];
    }
    return out;
  };
  return {fuse(data.genuine), fuse(data.impostor)};
}

std::vector<double> weighted_fitness_serial(std::span<const std::vector<double>> chromosomes,
                                            const ColumnarDataset& data) {
  std::vector<double> out(chromosomes.size());
  for (std::size_t i = 0; i < chromosomes.size(); ++i)
    out[i] = sweep_roc(fuse_weighted_columns(chromosomes[i], data)).eer;
  return out;
}

std::vector<double> weighted_fitness_parallel(std::span<const std::vector<double>> chromosomes,
                                              const ColumnarDataset& data) {
  for (const auto& c : chromosomes)
    if (c.size() != data.modality_count)
      throw ValidationError("weight vector length does not match modality count");
  std::vector<double> out(chromosomes.size());
  const auto n = static_cast<std::ptrdiff_t>(chromosomes.size());
#pragma omp parallel for schedule(dynamic, 8)
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    const auto k = static_cast<std::size_t>(i);
    out[k] = sweep_roc(fuse_weighted_columns(chromosomes[k], data)).eer;
  }
  return out;
}

int max_threads() noexcept { return omp_get_max_threads(); }

}  // namespace gpfusion
