#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "gpfusion/datasets.hpp"
#include "gpfusion/kernels.hpp"
#include "gpfusion/tree.hpp"

namespace gpfusion {

using Rng = std::mt19937_64;

// Independent generator for one stage of a run (0 = initial population,
// g = breeding of generation g).
Rng stream_for(std::uint64_t seed, std::uint64_t stream);

struct EvolutionConfig {
  std::size_t population_size = 500;
  std::size_t max_generations = 50;
  std::size_t max_depth = 8;
  std::size_t init_depth_min = 2;
  std::size_t init_depth_max = 8;
  double p_crossover = 0.45;
  double p_mutation = 0.50;
  double p_reproduction = 0.05;
  std::size_t tournament_size = 10;
  double tournament_p = 0.80;
  std::size_t n_constants = 50;
  double fitness_target = 0.001;
  std::size_t crossover_retries = 10;
  std::uint64_t seed = 0;
  Execution execution = Execution::Parallel;

  // Throws ValidationError on inconsistent settings.
  void validate() const;
  // Slots filled by copying the best individuals: round(p_reproduction * N).
  std::size_t elite_count() const;
};

struct GenerationStats {
  std::size_t generation = 0;
  double best = 0.0;
  double worst = 0.0;
  double mean = 0.0;
  double stddev = 0.0;
  ExpressionTree best_tree{{Node::function(Op::Add), Node::var(0), Node::var(0)}};
  std::size_t elites = 0;
  std::size_t crossovers = 0;
  std::size_t mutations = 0;
  // Crossovers that exhausted their retries and copied the first parent.
  std::size_t crossover_fallbacks = 0;
};

struct EvolutionResult {
  ExpressionTree best;
  double best_fitness = 0.5;
  std::vector<GenerationStats> history;
};

// Modality variables followed by constants j / (n_constants - 1).
std::vector<Node> terminal_set(std::size_t modality_count, std::size_t n_constants);

enum class BuildMethod { Full, Grow };

// Random prefix fragment of at most `depth` levels below its root. Levels
// above `forced_function_levels` always hold functions; below that, Grow
// picks a terminal with probability |T| / (|T| + |F|). Level `depth` is
// always a terminal.
std::vector<Node> build_fragment(BuildMethod method, std::size_t depth,
                                 std::span<const Node> terminals, Rng& rng,
                                 std::size_t forced_function_levels = 0);

// Trees for slot i target depth min + i mod (max - min + 1); alternate
// rounds of the depth cycle switch between Full and Grow.
std::vector<ExpressionTree> ramped_half_and_half(const EvolutionConfig& cfg,
                                                 std::span<const Node> terminals, Rng& rng);

// Rank (0 = fittest) chosen from a sorted tournament: rank r with
// probability p * (1 - p)^r, leftover mass on the last rank.
std::size_t tournament_rank(std::size_t contestants, double p, Rng& rng);

// Index of the winner among `tournament_size` uniform draws with
// replacement.
std::size_t tournament_select(std::span<const double> fitnesses, const EvolutionConfig& cfg,
                              Rng& rng);

// parent1 with the subtree at `slot1` replaced by parent2's subtree at
// `slot2`.
ExpressionTree crossover_at(const ExpressionTree& parent1, std::size_t slot1,
                            const ExpressionTree& parent2, std::size_t slot2);

struct CrossoverOutcome {
  ExpressionTree child;
  bool fell_back = false;
};

// Non-root slot in parent1, any slot in parent2; depth violations are
// redrawn up to cfg.crossover_retries times before copying parent1.
CrossoverOutcome crossover(const ExpressionTree& parent1, const ExpressionTree& parent2,
                           const EvolutionConfig& cfg, Rng& rng);

ExpressionTree mutate_at(const ExpressionTree& parent, std::size_t slot,
                         std::span<const Node> replacement);

// Replaces a random non-root subtree with a Grow fragment whose depth is
// drawn uniformly from what the depth limit leaves at that slot.
ExpressionTree mutate(const ExpressionTree& parent, const EvolutionConfig& cfg,
                      std::span<const Node> terminals, Rng& rng);

using TreeObserver = std::function<void(const ExpressionTree&)>;

// Generational loop minimizing sweep EER on `train` (already normalized).
// `observer` sees every tree the run creates.
EvolutionResult evolve(const ScoreDataset& train, const EvolutionConfig& cfg,
                       const TreeObserver& observer = {});

std::string history_to_csv(std::span<const GenerationStats> history);

}  // namespace gpfusion
