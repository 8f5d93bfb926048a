#include "gpfusion/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "gpfusion/error.hpp"
#include "gpfusion/gp.hpp"

namespace gpfusion {

namespace {

template <typename Fuse>
FusedScores fuse_each(const ScoreDataset& ds, Fuse&& fuse) {
  FusedScores fs;
  fs.genuine.reserve(ds.genuine().size());
  fs.impostor.reserve(ds.impostor().size());
  for (const auto& t : ds.genuine()) fs.genuine.push_back(fuse(t.scores));
  for (const auto& t : ds.impostor()) fs.impostor.push_back(fuse(t.scores));
  return fs;
}

double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

// Index drawn from a cumulative distribution.
std::size_t sample(std::span<const double> cumulative, Rng& rng) {
  const double u = uniform(rng, 0.0, cumulative.back());
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative.begin()), cumulative.size() - 1);
}

}  // namespace

std::string_view rule_name(FusionRule rule) noexcept {
  switch (rule) {
    case FusionRule::Sum: return "sum";
    case FusionRule::Min: return "min";
    case FusionRule::Mul: return "mul";
  }
  return "?";
}

double fuse_rule(FusionRule rule, std::span<const double> scores) {
  if (scores.empty()) throw ValidationError("cannot fuse an empty tuple");
  switch (rule) {
    case FusionRule::Sum: return std::accumulate(scores.begin(), scores.end(), 0.0);
    case FusionRule::Min: return *std::min_element(scores.begin(), scores.end());
    case FusionRule::Mul:
      return std::accumulate(scores.begin(), scores.end(), 1.0, std::multiplies<>());
  }
  return 0.0;
}

double fuse_weighted(std::span<const double> weights, std::span<const double> scores) {
  if (weights.size() != scores.size())
    throw ValidationError("weight vector has " + std::to_string(weights.size()) +
                          " entries for " + std::to_string(scores.size()) + " scores");
  double out = 0.0;
  for (std::size_t m = 0; m < scores.size(); ++m) out += weights[m] * scores[m];
  return out;
}

FusedScores fuse_dataset(FusionRule rule, const ScoreDataset& ds) {
  return fuse_each(ds, [rule](const std::vector<double>& s) { return fuse_rule(rule, s); });
}

FusedScores fuse_dataset_weighted(std::span<const double> weights, const ScoreDataset& ds) {
  if (weights.size() != ds.modality_count())
    throw ValidationError("weight vector length does not match modality count");
  return fuse_each(ds, [&](const std::vector<double>& s) { return fuse_weighted(weights, s); });
}

FusedScores project_modality(const ScoreDataset& ds, std::size_t modality) {
  if (modality >= ds.modality_count()) throw ValidationError("modality out of range");
  return {ds.genuine_column(modality), ds.impostor_column(modality)};
}

GaConfig GaConfig::full(std::uint64_t seed) {
  GaConfig cfg;
  cfg.seed = seed;
  return cfg;
}

GaConfig GaConfig::desk(std::uint64_t seed) {
  GaConfig cfg;
  cfg.population_size = 200;
  cfg.generations = 60;
  cfg.seed = seed;
  return cfg;
}

void GaConfig::validate() const {
  if (population_size < 2 || generations == 0)
    throw ValidationError("GA needs a population of at least 2 and one generation");
  if (!(selection_q > 0.0 && selection_q < 1.0))
    throw ValidationError("geometric selection parameter must lie in (0, 1)");
  if (!(weight_lo < weight_hi)) throw ValidationError("weight interval is empty");
  if (weight_lo > 1.0 || weight_hi < 1.0)
    throw ValidationError("weight interval must contain 1 (equal-weight chromosome)");
  for (double p : {crossover_rate, mutation_rate})
    if (!(p >= 0.0 && p <= 1.0)) throw ValidationError("GA rates must lie in [0, 1]");
}

std::vector<double> geometric_selection_probabilities(std::size_t population, double q) {
  if (population == 0 || !(q > 0.0 && q < 1.0))
    throw ValidationError("geometric selection needs P > 0 and 0 < q < 1");
  const double scaled = q / (1.0 - std::pow(1.0 - q, static_cast<double>(population)));
  std::vector<double> probs(population);
  double factor = 1.0;
  for (auto& p : probs) {
    p = scaled * factor;
    factor *= 1.0 - q;
  }
  return probs;
}

GaResult ga_tune_weights(const ScoreDataset& train, const GaConfig& cfg) {
  cfg.validate();
  train.require_non_empty();
  const auto data = ColumnarDataset::from(train);
  const std::size_t n = train.modality_count();
  const std::size_t pop_size = cfg.population_size;

  auto evaluate = [&](const std::vector<std::vector<double>>& pop) {
    return cfg.execution == Execution::Parallel ? weighted_fitness_parallel(pop, data)
                                                : weighted_fitness_serial(pop, data);
  };

  auto rng = stream_for(cfg.seed, 0);
  std::vector<std::vector<double>> pop;
  pop.reserve(pop_size);
  pop.emplace_back(n, 1.0);
  while (pop.size() < pop_size) {
    std::vector<double> c(n);
    for (auto& w : c) w = uniform(rng, cfg.weight_lo, cfg.weight_hi);
    pop.push_back(std::move(c));
  }
  auto fit = evaluate(pop);

  const auto probs = geometric_selection_probabilities(pop_size, cfg.selection_q);
  std::vector<double> cumulative(probs.size());
  std::partial_sum(probs.begin(), probs.end(), cumulative.begin());

  GaResult result;
  auto record = [&](std::span<const std::size_t> order) {
    const std::size_t best = order.front();
    if (result.best_history.empty() || fit[best] < result.train_eer) {
      result.train_eer = fit[best];
      result.weights = pop[best];
    }
    result.best_history.push_back(result.train_eer);
  };

  std::vector<std::size_t> order(pop_size);
  auto rank = [&] {
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return fit[a] < fit[b]; });
  };
  rank();
  record(order);

  for (std::size_t gen = 1; gen < cfg.generations; ++gen) {
    rng = stream_for(cfg.seed, gen);
    std::vector<std::vector<double>> next;
    next.reserve(pop_size);
    if (cfg.elitism) next.push_back(pop[order.front()]);
    while (next.size() < pop_size) {
      const auto& p1 = pop[order[sample(cumulative, rng)]];
      const auto& p2 = pop[order[sample(cumulative, rng)]];
      std::vector<double> child = p1;
      if (uniform(rng, 0.0, 1.0) < cfg.crossover_rate) {
        const double alpha = uniform(rng, 0.0, 1.0);
        for (std::size_t m = 0; m < n; ++m) child[m] = alpha * p1[m] + (1.0 - alpha) * p2[m];
      }
      if (uniform(rng, 0.0, 1.0) < cfg.mutation_rate) {
        bool touched = false;
        for (std::size_t m = 0; m < n; ++m) {
          if (uniform(rng, 0.0, 1.0) < 1.0 / static_cast<double>(n)) {
            child[m] = uniform(rng, cfg.weight_lo, cfg.weight_hi);
            touched = true;
          }
        }
        if (!touched) {
          const auto m = std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
          child[m] = uniform(rng, cfg.weight_lo, cfg.weight_hi);
        }
      }
      for (auto& w : child) w = std::clamp(w, cfg.weight_lo, cfg.weight_hi);
      next.push_back(std::move(child));
    }
    pop = std::move(next);
    fit = evaluate(pop);
    rank();
    record(order);
  }
  return result;
}

MethodResult evaluate_fused(std::string name, const FusedScores& train,
                            const FusedScores& validation) {
  MethodResult r;
  r.name = std::move(name);
  const auto train_curve = sweep_roc(train);
  r.train_eer = train_curve.eer;
  r.train_threshold = train_curve.eer_threshold;
  r.validation_curve = sweep_roc(validation);
  r.validation_eer = r.validation_curve.eer;
  r.validation_auc = auc(r.validation_curve);
  r.validation_hter = hter(validation, r.train_threshold);
  r.degenerate = train_curve.degenerate || r.validation_curve.degenerate;
  return r;
}

BaselineReport evaluate_baselines(const SplitPair& split, const BaselineOptions& options) {
  const auto& train = split.train;
  const auto& val = split.validation;
  if (train.modality_count() != val.modality_count())
    throw ValidationError("train and validation modality counts differ");
  train.require_non_empty();
  val.require_non_empty();

  BaselineReport report;
  if (options.singles) {
    for (std::size_t m = 0; m < train.modality_count(); ++m)
      report.methods.push_back(evaluate_fused("s" + std::to_string(m + 1),
                                              project_modality(train, m), project_modality(val, m)));
  }
  for (auto rule : options.rules)
    report.methods.push_back(evaluate_fused(std::string(rule_name(rule)), fuse_dataset(rule, train),
                                            fuse_dataset(rule, val)));
  if (options.weighted) {
    auto tuned = ga_tune_weights(train, *options.weighted);
    report.methods.push_back(evaluate_fused("weight", fuse_dataset_weighted(tuned.weights, train),
                                            fuse_dataset_weighted(tuned.weights, val)));
    report.tuned = std::move(tuned);
  }
  return report;
}

}  // namespace gpfusion
