#pragma once

// Independent reference computations used to derive expected values.
// Nothing here calls into the library's metric code.

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <vector>

#include "gpfusion/metrics.hpp"

namespace oracle {

// O(N^2) EER: every pooled score, every midpoint, both sentinels; FAR and
// FRR counted directly at each candidate.
inline double brute_force_eer(const gpfusion::FusedScores& fs) {
  std::vector<double> pool = fs.genuine;
  pool.insert(pool.end(), fs.impostor.begin(), fs.impostor.end());
  std::sort(pool.begin(), pool.end());
  std::vector<double> candidates{-std::numeric_limits<double>::infinity()};
  for (std::size_t i = 0; i < pool.size(); ++i) {
    if (i > 0) candidates.push_back(0.5 * (pool[i - 1] + pool[i]));
    candidates.push_back(pool[i]);
  }
  candidates.push_back(std::numeric_limits<double>::infinity());
  std::sort(candidates.begin(), candidates.end());

  double best_diff = 2.0, best = 0.5;
  for (double t : candidates) {
    double fa = 0, fr = 0;
    for (double s : fs.impostor) fa += s >= t;
    for (double s : fs.genuine) fr += s < t;
    fa /= static_cast<double>(fs.impostor.size());
    fr /= static_cast<double>(fs.genuine.size());
    if (std::abs(fa - fr) < best_diff) {
      best_diff = std::abs(fa - fr);
      best = 0.5 * (fa + fr);
    }
  }
  return best;
}

// Standard normal CDF.
inline double phi(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

inline gpfusion::FusedScores gaussian_scores(std::mt19937_64& rng, std::size_t ng, std::size_t ni,
                                             double separation, double spread = 1.0) {
  std::normal_distribution<double> g(separation, spread), i(0.0, 1.0);
  gpfusion::FusedScores fs;
  for (std::size_t k = 0; k < ng; ++k) fs.genuine.push_back(g(rng));
  for (std::size_t k = 0; k < ni; ++k) fs.impostor.push_back(i(rng));
  return fs;
}

}  // namespace oracle
