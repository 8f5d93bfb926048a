#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace gpfusion {

/// Fused scores of one fusion function over a dataset, split by class.
struct FusedScores {
  std::vector<double> genuine;
  std::vector<double> impostor;
};

struct RocPoint {
  double threshold = 0.0;
  double far = 0.0;
  double frr = 0.0;
};

/// FAR/FRR trace over a linear threshold grid plus the operating point
/// where the two rates are closest.
struct RocCurve {
  std::vector<RocPoint> points;
  double eer = 0.5;
  double eer_threshold = 0.0;
  std::size_t eer_index = 0;
  // All fused scores were identical; eer is pinned to 0.5.
  bool degenerate = false;
};

inline constexpr std::size_t kSweepPoints = 1000;

// Accept when score >= threshold: FAR counts impostors >= t, FRR counts
// genuine < t. Grid: lo + k * (hi - lo) / 999, k = 0..999, over the pooled
// min/max. Ties in |FAR - FRR| resolve to the lowest threshold.
RocCurve sweep_roc(const FusedScores& fs);

// Same curve computed by direct counting at every grid point. O(1000 * N);
// kept as the reference for sweep_roc.
RocCurve sweep_roc_reference(const FusedScores& fs);

// Exact EER over every distinct score, every midpoint between consecutive
// distinct scores and the two infinite sentinels.
double eer_oracle(const FusedScores& fs);

double far_at(const FusedScores& fs, double threshold);
double frr_at(const FusedScores& fs, double threshold);
double hter(const FusedScores& fs, double threshold);

// Area under FRR(FAR) by the trapezoid rule. Points are sorted by FAR and
// duplicate FAR values collapsed to their mean FRR.
double auc(const RocCurve& curve);
double auc(std::span<const RocPoint> points);

// 100 * (reference - candidate) / reference. Throws ValidationError when
// the reference is zero.
double gain(double reference, double candidate);

// "threshold,far,frr" with six decimals.
std::string roc_to_csv(const RocCurve& curve);

}  // namespace gpfusion
