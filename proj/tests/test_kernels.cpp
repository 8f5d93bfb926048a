#include <doctest.h>

#include <cmath>

#include "gpfusion/error.hpp"
#include "gpfusion/gp.hpp"
#include "gpfusion/kernels.hpp"
#include "gpfusion/normalization.hpp"

using namespace gpfusion;

namespace {

ScoreDataset sample_data(std::uint64_t seed, std::size_t ng = 700, std::size_t ni = 1300) {
  auto ds = generate_synthetic(presets::graded_overlap(seed, ng, ni));
  return normalize_dataset(ds, fit_normalization(ds));
}

std::vector<ExpressionTree> sample_population(std::size_t n, std::uint64_t seed) {
  EvolutionConfig cfg;
  cfg.population_size = n;
  auto rng = stream_for(seed, 0);
  return ramped_half_and_half(cfg, terminal_set(4, 50), rng);
}

}  // namespace

TEST_CASE("ScoreMatrix is column-major") {
  std::vector<ScoreTuple> t{{{1, 2, 3}, Label::Genuine}, {{4, 5, 6}, Label::Genuine}};
  ScoreMatrix m(t, 3);
  CHECK(m.rows() == 2);
  CHECK(m.cols() == 3);
  CHECK(m.column(1)[0] == 2);
  CHECK(m.column(1)[1] == 5);
  CHECK(m.column(2)[1] == 6);
}

TEST_CASE("eval_population: documented examples") {
  auto ds = sample_data(1, 40, 60);
  SUBCASE("identity-like tree") {
    auto fs = eval_population(parse_sexpr("(add (var 0) (mul (var 1) (const 0)))"), ds);
    CHECK(fs.genuine == ds.genuine_column(0));
    CHECK(fs.impostor == ds.impostor_column(0));
  }
  SUBCASE("constant tree") {
    auto t = parse_sexpr("(add (const 0.3) (const 0.2))");
    auto fs = eval_population(t, ds);
    for (double v : fs.genuine) CHECK(v == 0.5);
    CHECK(fitness(t, ds) == 0.5);
    CHECK(sweep_roc(fs).degenerate);
  }
  SUBCASE("modality mismatch") {
    CHECK_THROWS_AS(eval_population(parse_sexpr("(add (var 0) (var 7))"), ds), ValidationError);
  }
}

TEST_CASE("batched, parallel and per-tuple evaluation agree exactly") {
  auto ds = sample_data(2);
  const auto data = ColumnarDataset::from(ds);
  for (const auto& t : sample_population(140, 3)) {
    auto ref = eval_population_reference(t, ds);
    auto serial = eval_population(t, data, Execution::Serial);
    auto par = eval_population(t, data, Execution::Parallel);
    CHECK(serial.genuine == ref.genuine);
    CHECK(serial.impostor == ref.impostor);
    CHECK(par.genuine == ref.genuine);
    CHECK(par.impostor == ref.impostor);
    for (double v : serial.genuine) REQUIRE(std::isfinite(v));
    for (double v : serial.impostor) REQUIRE(std::isfinite(v));
  }
}

TEST_CASE("population fitness: parallel equals serial") {
  auto ds = sample_data(4);
  const auto data = ColumnarDataset::from(ds);
  auto pop = sample_population(210, 5);
  auto s = population_fitness_serial(pop, data);
  auto p = population_fitness_parallel(pop, data);
  CHECK(s == p);
  for (std::size_t k = 0; k < pop.size(); k += 17) CHECK(s[k] == fitness(pop[k], ds));
}

TEST_CASE("fitness of add(a, b) equals the two-modality sum rule") {
  auto ds = sample_data(6);
  const std::size_t ab[] = {0, 1};
  auto two = select_modalities(ds, ab);
  FusedScores sum;
  for (const auto& t : two.genuine()) sum.genuine.push_back(t.scores[0] + t.scores[1]);
  for (const auto& t : two.impostor()) sum.impostor.push_back(t.scores[0] + t.scores[1]);
  CHECK(fitness(parse_sexpr("(add (var 0) (var 1))"), ds) == sweep_roc(sum).eer);
}

TEST_CASE("weighted fitness: parallel equals serial") {
  auto ds = sample_data(7);
  const auto data = ColumnarDataset::from(ds);
  std::vector<std::vector<double>> chromosomes;
  for (int k = 0; k < 50; ++k) chromosomes.push_back({1.0 * k - 20, 0.5, -3.0 + k * 0.1, 2.0});
  CHECK(weighted_fitness_serial(chromosomes, data) == weighted_fitness_parallel(chromosomes, data));
  chromosomes.push_back({1.0});
  CHECK_THROWS_AS(weighted_fitness_parallel(chromosomes, data), ValidationError);
}
