#include <doctest.h>

#include <cmath>
#include <numeric>

#include "gpfusion/baselines.hpp"
#include "gpfusion/error.hpp"
#include "gpfusion/normalization.hpp"

using namespace gpfusion;

namespace {

ScoreDataset normalized(const ScoreDataset& ds) {
  return normalize_dataset(ds, fit_normalization(ds));
}

}  // namespace

TEST_CASE("fixed rules") {
  const double s[] = {0.2, 0.3, 0.5};
  CHECK(fuse_rule(FusionRule::Sum, s) == 1.0);
  CHECK(fuse_rule(FusionRule::Min, s) == 0.2);
  const double h[] = {0.5, 0.5};
  CHECK(fuse_rule(FusionRule::Mul, h) == 0.25);
  CHECK_THROWS_AS(fuse_rule(FusionRule::Sum, std::span<const double>{}), ValidationError);
}

TEST_CASE("weighted sum") {
  const double s[] = {0.7, 0.1};
  const double proj[] = {1, 0};
  CHECK(fuse_weighted(proj, s) == 0.7);
  const double h[] = {0.5, 0.5};
  const double w[] = {2, -1};
  CHECK(fuse_weighted(w, h) == 0.5);
  const double three[] = {1, 1, 1};
  CHECK_THROWS_AS(fuse_weighted(three, s), ValidationError);

  // All-ones weights reproduce the sum rule bit for bit.
  auto ds = generate_synthetic(presets::graded_overlap(3, 200, 200));
  const std::vector<double> ones(4, 1.0);
  auto a = fuse_dataset_weighted(ones, ds);
  auto b = fuse_dataset(FusionRule::Sum, ds);
  CHECK(a.genuine == b.genuine);
  CHECK(a.impostor == b.impostor);
  auto c = fuse_weighted_columns(ones, ColumnarDataset::from(ds));
  CHECK(c.genuine == b.genuine);
}

TEST_CASE("normalized geometric selection probabilities") {
  auto p = geometric_selection_probabilities(3, 0.9);
  // q' = 0.9 / (1 - 0.1^3) = 0.9 / 0.999.
  CHECK(p[0] == doctest::Approx(0.9 / 0.999).epsilon(1e-12));
  CHECK(p[1] == doctest::Approx(0.09 / 0.999).epsilon(1e-12));
  CHECK(p[2] == doctest::Approx(0.009 / 0.999).epsilon(1e-12));
  CHECK(std::abs(p[0] - 0.9009) < 1e-4);
  CHECK(std::abs(p[1] - 0.0901) < 1e-4);
  CHECK(std::abs(p[2] - 0.0090) < 1e-4);
  for (std::size_t n : {1u, 2u, 7u, 200u, 5000u}) {
    for (double q : {0.05, 0.5, 0.9}) {
      auto v = geometric_selection_probabilities(n, q);
      CHECK(std::abs(std::accumulate(v.begin(), v.end(), 0.0) - 1.0) <= 1e-12);
    }
  }
  CHECK_THROWS_AS(geometric_selection_probabilities(3, 1.0), ValidationError);
}

TEST_CASE("GA presets") {
  auto full = GaConfig::full(1);
  CHECK(full.population_size == 5000);
  CHECK(full.generations == 500);
  CHECK(full.selection_q == 0.9);
  CHECK(full.weight_lo == -10);
  CHECK(full.weight_hi == 10);
  auto desk = GaConfig::desk(1);
  CHECK(desk.population_size == 200);
  CHECK(desk.generations == 60);
}

TEST_CASE("ga_tune_weights") {
  // Modality 0 nearly separable, modality 1 pure noise.
  SyntheticSpec spec;
  spec.modalities = {{4.0, 1.0, 0.0, 1.0}, {0.0, 1.0, 0.0, 1.0}};
  spec.genuine_count = 300;
  spec.impostor_count = 600;
  spec.seed = 2;
  auto train = normalized(generate_synthetic(spec));
  auto cfg = GaConfig::desk(5);
  cfg.generations = 25;
  auto r = ga_tune_weights(train, cfg);

  const double sum_eer = sweep_roc(fuse_dataset(FusionRule::Sum, train)).eer;
  const double proj_eer = sweep_roc(fuse_dataset_weighted(std::vector{1.0, 0.0}, train)).eer;
  CHECK(proj_eer < sum_eer);
  CHECK(r.train_eer <= sum_eer + 1e-9);
  CHECK(r.train_eer <= proj_eer + 0.01);
  CHECK(r.train_eer == sweep_roc(fuse_dataset_weighted(r.weights, train)).eer);
  for (double w : r.weights) CHECK((w >= -10 && w <= 10));
  REQUIRE(r.best_history.size() == 25);
  for (std::size_t g = 1; g < r.best_history.size(); ++g)
    CHECK(r.best_history[g] <= r.best_history[g - 1]);

  auto again = ga_tune_weights(train, cfg);
  CHECK(again.weights == r.weights);
  cfg.execution = Execution::Serial;
  CHECK(ga_tune_weights(train, cfg).weights == r.weights);
}

TEST_CASE("evaluate_baselines") {
  auto raw = generate_synthetic(presets::bssr1(4));
  auto split = split_dataset(raw);
  auto params = fit_normalization(split.train);
  SplitPair norm{normalize_dataset(split.train, params), normalize_dataset(split.validation, params)};
  BaselineOptions opts;
  opts.weighted = GaConfig::desk(1);
  opts.weighted->population_size = 20;
  opts.weighted->generations = 3;
  auto rep = evaluate_baselines(norm, opts);
  REQUIRE(rep.methods.size() == 8);
  const char* names[] = {"s1", "s2", "s3", "s4", "sum", "min", "mul", "weight"};
  for (std::size_t k = 0; k < 8; ++k) {
    const auto& m = rep.methods[k];
    CHECK(m.name == names[k]);
    for (double v : {m.train_eer, m.validation_eer, m.validation_hter, m.validation_auc})
      CHECK((v >= 0.0 && v <= 1.0));
    CHECK(m.validation_hter == hter(m.name == "weight"
                                        ? fuse_dataset_weighted(rep.tuned->weights, norm.validation)
                                        : m.name[0] == 's' && m.name.size() == 2
                                              ? project_modality(norm.validation, m.name[1] - '1')
                                              : fuse_dataset(m.name == "sum"   ? FusionRule::Sum
                                                             : m.name == "min" ? FusionRule::Min
                                                                               : FusionRule::Mul,
                                                             norm.validation),
                                    m.train_threshold));
  }
  REQUIRE(rep.tuned);
  CHECK(rep.tuned->weights.size() == 4);
}

TEST_CASE("sum and mul coincide on a single modality") {
  auto raw = generate_synthetic(presets::graded_overlap(9, 100, 100));
  const std::size_t one[] = {0};
  auto ds = normalized(select_modalities(raw, one));
  auto a = sweep_roc(fuse_dataset(FusionRule::Sum, ds));
  auto b = sweep_roc(fuse_dataset(FusionRule::Mul, ds));
  CHECK(a.eer == b.eer);
}
