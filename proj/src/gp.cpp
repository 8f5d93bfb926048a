#include "gpfusion/gp.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <numeric>

#include "gpfusion/error.hpp"

namespace gpfusion {

namespace {

std::size_t uniform_index(std::size_t n, Rng& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

void append_fragment(std::vector<Node>& out, BuildMethod method, std::size_t level,
                     std::size_t depth, std::span<const Node> terminals, Rng& rng,
                     std::size_t forced) {
  bool terminal;
  if (level >= depth) {
    terminal = true;
  } else if (level < forced || method == BuildMethod::Full) {
    terminal = false;
  } else {
    const double t = static_cast<double>(terminals.size());
    terminal = uniform01(rng) < t / (t + static_cast<double>(kFunctionCount));
  }
  if (terminal) {
    out.push_back(terminals[uniform_index(terminals.size(), rng)]);
    return;
  }
  out.push_back(Node::function(kFunctions[uniform_index(kFunctionCount, rng)]));
  append_fragment(out, method, level + 1, depth, terminals, rng, forced);
  append_fragment(out, method, level + 1, depth, terminals, rng, forced);
}

std::string number(double v) {
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, ptr);
}

bool has_spread(const ScoreDataset& ds) {
  const double first = ds.genuine().front().scores.front();
  auto differs = [&](const std::vector<ScoreTuple>& tuples) {
    return std::any_of(tuples.begin(), tuples.end(), [&](const ScoreTuple& t) {
      return std::any_of(t.scores.begin(), t.scores.end(), [&](double s) { return s != first; });
    });
  };
  return differs(ds.genuine()) || differs(ds.impostor());
}

}  // namespace

Rng stream_for(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

void EvolutionConfig::validate() const {
  auto prob = [](double p) { return p >= 0.0 && p <= 1.0; };
  if (!prob(p_crossover) || !prob(p_mutation) || !prob(p_reproduction) || !prob(tournament_p))
    throw ValidationError("probabilities must lie in [0, 1]");
  if (std::abs(p_crossover + p_mutation + p_reproduction - 1.0) > 1e-9)
    throw ValidationError("crossover, mutation and reproduction probabilities must sum to 1");
  if (population_size == 0 || max_generations == 0 || tournament_size == 0)
    throw ValidationError("population size, generations and tournament size must be positive");
  if (n_constants < 2) throw ValidationError("need at least two constants");
  if (init_depth_min < 1 || init_depth_min > init_depth_max || init_depth_max > max_depth)
    throw ValidationError("initial depth range must satisfy 1 <= min <= max <= max_depth");
  if (elite_count() >= population_size && p_crossover + p_mutation > 0.0)
    throw ValidationError("elite block leaves no room for offspring");
}

std::size_t EvolutionConfig::elite_count() const {
  return static_cast<std::size_t>(
      std::llround(p_reproduction * static_cast<double>(population_size)));
}

std::vector<Node> terminal_set(std::size_t modality_count, std::size_t n_constants) {
  if (modality_count < 2) throw ValidationError("terminal set needs at least two modalities");
  if (n_constants < 2) throw ValidationError("terminal set needs at least two constants");
  std::vector<Node> out;
  out.reserve(modality_count + n_constants);
  for (std::size_t m = 0; m < modality_count; ++m)
    out.push_back(Node::var(static_cast<std::uint32_t>(m)));
  const double last = static_cast<double>(n_constants - 1);
  for (std::size_t j = 0; j < n_constants; ++j)
    out.push_back(Node::constant(static_cast<double>(j) / last));
  return out;
}

std::vector<Node> build_fragment(BuildMethod method, std::size_t depth,
                                 std::span<const Node> terminals, Rng& rng,
                                 std::size_t forced_function_levels) {
  std::vector<Node> out;
  append_fragment(out, method, 0, depth, terminals, rng, forced_function_levels);
  return out;
}

std::vector<ExpressionTree> ramped_half_and_half(const EvolutionConfig& cfg,
                                                 std::span<const Node> terminals, Rng& rng) {
  const std::size_t span = cfg.init_depth_max - cfg.init_depth_min + 1;
  std::vector<ExpressionTree> population;
  population.reserve(cfg.population_size);
  for (std::size_t i = 0; i < cfg.population_size; ++i) {
    const std::size_t depth = cfg.init_depth_min + i % span;
    const auto method = (i / span) % 2 == 0 ? BuildMethod::Full : BuildMethod::Grow;
    population.emplace_back(
        build_fragment(method, depth, terminals, rng, std::min(cfg.init_depth_min, depth)));
  }
  return population;
}

std::size_t tournament_rank(std::size_t contestants, double p, Rng& rng) {
  for (std::size_t r = 0; r + 1 < contestants; ++r)
    if (uniform01(rng) < p) return r;
  return contestants - 1;
}

std::size_t tournament_select(std::span<const double> fitnesses, const EvolutionConfig& cfg,
                              Rng& rng) {
  if (fitnesses.empty()) throw ValidationError("tournament over an empty population");
  std::vector<std::size_t> drawn(cfg.tournament_size);
  for (auto& d : drawn) d = uniform_index(fitnesses.size(), rng);
  std::stable_sort(drawn.begin(), drawn.end(),
                   [&](std::size_t a, std::size_t b) { return fitnesses[a] < fitnesses[b]; });
  return drawn[tournament_rank(drawn.size(), cfg.tournament_p, rng)];
}

ExpressionTree crossover_at(const ExpressionTree& parent1, std::size_t slot1,
                            const ExpressionTree& parent2, std::size_t slot2) {
  if (slot1 == 0) throw ValidationError("the root of the first parent is not a crossover point");
  const auto a = parent1.nodes();
  const auto b = parent2.nodes();
  const auto end1 = parent1.subtree_end(slot1);
  const auto end2 = parent2.subtree_end(slot2);
  std::vector<Node> child;
  child.reserve(a.size() - (end1 - slot1) + (end2 - slot2));
  child.insert(child.end(), a.begin(), a.begin() + static_cast<std::ptrdiff_t>(slot1));
  child.insert(child.end(), b.begin() + static_cast<std::ptrdiff_t>(slot2),
               b.begin() + static_cast<std::ptrdiff_t>(end2));
  child.insert(child.end(), a.begin() + static_cast<std::ptrdiff_t>(end1), a.end());
  return ExpressionTree(std::move(child));
}

CrossoverOutcome crossover(const ExpressionTree& parent1, const ExpressionTree& parent2,
                           const EvolutionConfig& cfg, Rng& rng) {
  const auto levels = parent1.node_levels();
  for (std::size_t attempt = 0; attempt < cfg.crossover_retries; ++attempt) {
    const std::size_t slot1 = 1 + uniform_index(parent1.size() - 1, rng);
    const std::size_t slot2 = uniform_index(parent2.size(), rng);
    if (levels[slot1] + parent2.subtree_depth(slot2) <= cfg.max_depth)
      return {crossover_at(parent1, slot1, parent2, slot2), false};
  }
  return {parent1, true};
}

ExpressionTree mutate_at(const ExpressionTree& parent, std::size_t slot,
                         std::span<const Node> replacement) {
  if (slot == 0) throw ValidationError("the root is not a mutation point");
  if (!is_well_formed(replacement)) throw ValidationError("malformed replacement subtree");
  const auto a = parent.nodes();
  const auto end = parent.subtree_end(slot);
  std::vector<Node> child;
  child.reserve(a.size() - (end - slot) + replacement.size());
  child.insert(child.end(), a.begin(), a.begin() + static_cast<std::ptrdiff_t>(slot));
  child.insert(child.end(), replacement.begin(), replacement.end());
  child.insert(child.end(), a.begin() + static_cast<std::ptrdiff_t>(end), a.end());
  return ExpressionTree(std::move(child));
}

ExpressionTree mutate(const ExpressionTree& parent, const EvolutionConfig& cfg,
                      std::span<const Node> terminals, Rng& rng) {
  const auto levels = parent.node_levels();
  const std::size_t slot = 1 + uniform_index(parent.size() - 1, rng);
  const std::size_t room = cfg.max_depth - std::min(cfg.max_depth, levels[slot]);
  const std::size_t depth = std::uniform_int_distribution<std::size_t>(0, room)(rng);
  return mutate_at(parent, slot, build_fragment(BuildMethod::Grow, depth, terminals, rng));
}

EvolutionResult evolve(const ScoreDataset& train, const EvolutionConfig& cfg,
                       const TreeObserver& observer) {
  cfg.validate();
  train.require_non_empty();
  if (train.modality_count() < 2)
    throw ValidationError("evolution needs at least two modalities");
  if (!has_spread(train)) throw ValidationError("training set is degenerate: all scores equal");

  const auto data = ColumnarDataset::from(train);
  const auto terminals = terminal_set(train.modality_count(), cfg.n_constants);
  const std::size_t pop_size = cfg.population_size;
  const std::size_t elites = std::min(cfg.elite_count(), pop_size);
  const double p_cross_given_bred =
      cfg.p_crossover + cfg.p_mutation > 0.0 ? cfg.p_crossover / (cfg.p_crossover + cfg.p_mutation)
                                             : 0.0;

  auto rng = stream_for(cfg.seed, 0);
  auto population = ramped_half_and_half(cfg, terminals, rng);
  if (observer)
    for (const auto& t : population) observer(t);
  auto fit = population_fitness(population, data, cfg.execution);

  EvolutionResult result{population.front(), fit.front(), {}};
  std::size_t elites_used = 0, crossovers = 0, mutations = 0, fallbacks = 0;

  for (std::size_t gen = 0;; ++gen) {
    GenerationStats stats;
    stats.generation = gen;
    const auto best_it = std::min_element(fit.begin(), fit.end());
    const auto best_idx = static_cast<std::size_t>(best_it - fit.begin());
    stats.best = *best_it;
    stats.worst = *std::max_element(fit.begin(), fit.end());
    stats.mean = std::accumulate(fit.begin(), fit.end(), 0.0) / static_cast<double>(pop_size);
    double ss = 0.0;
    for (double f : fit) ss += (f - stats.mean) * (f - stats.mean);
    stats.stddev = std::sqrt(ss / static_cast<double>(pop_size));
    stats.best_tree = population[best_idx];
    stats.elites = elites_used;
    stats.crossovers = crossovers;
    stats.mutations = mutations;
    stats.crossover_fallbacks = fallbacks;
    result.history.push_back(stats);
    if (gen == 0 || stats.best < result.best_fitness) {
      result.best = population[best_idx];
      result.best_fitness = stats.best;
    }
    if (stats.best < cfg.fitness_target || gen + 1 >= cfg.max_generations) break;

    rng = stream_for(cfg.seed, gen + 1);
    std::vector<std::size_t> order(pop_size);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });

    std::vector<ExpressionTree> next;
    std::vector<double> next_fit;
    next.reserve(pop_size);
    next_fit.reserve(pop_size);
    for (std::size_t e = 0; e < elites; ++e) {
      next.push_back(population[order[e]]);
      next_fit.push_back(fit[order[e]]);
    }
    elites_used = elites;
    crossovers = mutations = fallbacks = 0;
    std::vector<ExpressionTree> offspring;
    offspring.reserve(pop_size - elites);
    while (elites + offspring.size() < pop_size) {
      if (uniform01(rng) < p_cross_given_bred) {
        const auto& p1 = population[tournament_select(fit, cfg, rng)];
        const auto& p2 = population[tournament_select(fit, cfg, rng)];
        auto outcome = crossover(p1, p2, cfg, rng);
        fallbacks += outcome.fell_back;
        offspring.push_back(std::move(outcome.child));
        ++crossovers;
      } else {
        const auto& p = population[tournament_select(fit, cfg, rng)];
        offspring.push_back(mutate(p, cfg, terminals, rng));
        ++mutations;
      }
      if (observer) observer(offspring.back());
    }
    auto offspring_fit = population_fitness(offspring, data, cfg.execution);
    for (std::size_t k = 0; k < offspring.size(); ++k) {
      next.push_back(std::move(offspring[k]));
      next_fit.push_back(offspring_fit[k]);
    }
    population = std::move(next);
    fit = std::move(next_fit);
  }
  return result;
}

std::string history_to_csv(std::span<const GenerationStats> history) {
  std::string out = "generation,best,worst,mean,std\n";
  for (const auto& s : history) {
    out += std::to_string(s.generation) + ',' + number(s.best) + ',' + number(s.worst) + ',' +
           number(s.mean) + ',' + number(s.stddev) + '\n';
  }
  return out;
}

}  // namespace gpfusion
