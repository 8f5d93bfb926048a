#include "gpfusion/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "gpfusion/error.hpp"
#include "gpfusion/io.hpp"

namespace gpfusion {

namespace {

void check_scores(const FusedScores& fs) {
  if (fs.genuine.empty() || fs.impostor.empty())
    throw ValidationError("fused scores need at least one genuine and one impostor score");
}

std::pair<double, double> pooled_range(const FusedScores& fs) {
  auto [glo, ghi] = std::minmax_element(fs.genuine.begin(), fs.genuine.end());
  auto [ilo, ihi] = std::minmax_element(fs.impostor.begin(), fs.impostor.end());
  return {std::min(*glo, *ilo), std::max(*ghi, *ihi)};
}

std::vector<double> threshold_grid(double lo, double hi) {
  std::vector<double> grid(kSweepPoints);
  const double last = static_cast<double>(kSweepPoints - 1);
  double step = (hi - lo) / last;
  if (!std::isfinite(step)) step = hi / last - lo / last;
  for (std::size_t k = 0; k < kSweepPoints; ++k) grid[k] = lo + static_cast<double>(k) * step;
  grid.back() = hi;
  return grid;
}

// Fills eer fields from the already populated points.
void locate_eer(RocCurve& curve) {
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    const double diff = std::abs(curve.points[i].far - curve.points[i].frr);
    if (diff < best) {
      best = diff;
      curve.eer_index = i;
    }
  }
  const auto& p = curve.points[curve.eer_index];
  curve.eer = 0.5 * (p.far + p.frr);
  curve.eer_threshold = p.threshold;
}

RocCurve finish(std::vector<RocPoint> points, bool degenerate) {
  RocCurve curve;
  curve.points = std::move(points);
  curve.degenerate = degenerate;
  locate_eer(curve);
  if (degenerate) curve.eer = 0.5;
  return curve;
}

}  // namespace

RocCurve sweep_roc(const FusedScores& fs) {
  check_scores(fs);
  auto genuine = fs.genuine;
  auto impostor = fs.impostor;
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());
  const double lo = std::min(genuine.front(), impostor.front());
  const double hi = std::max(genuine.back(), impostor.back());
  const auto grid = threshold_grid(lo, hi);

  const double ng = static_cast<double>(genuine.size());
  const double ni = static_cast<double>(impostor.size());
  std::vector<RocPoint> points(kSweepPoints);
  std::size_t g = 0, i = 0;  // number of genuine / impostor scores below t
  for (std::size_t k = 0; k < kSweepPoints; ++k) {
    const double t = grid[k];
    while (g < genuine.size() && genuine[g] < t) ++g;
    while (i < impostor.size() && impostor[i] < t) ++i;
    points[k] = {t, static_cast<double>(impostor.size() - i) / ni, static_cast<double>(g) / ng};
  }
  return finish(std::move(points), hi == lo);
}

RocCurve sweep_roc_reference(const FusedScores& fs) {
  check_scores(fs);
  auto [lo, hi] = pooled_range(fs);
  const auto grid = threshold_grid(lo, hi);
  std::vector<RocPoint> points(kSweepPoints);
  for (std::size_t k = 0; k < kSweepPoints; ++k)
    points[k] = {grid[k], far_at(fs, grid[k]), frr_at(fs, grid[k])};
  return finish(std::move(points), hi == lo);
}

double far_at(const FusedScores& fs, double threshold) {
  std::size_t accepted = 0;
  for (double s : fs.impostor) accepted += s >= threshold;
  return static_cast<double>(accepted) / static_cast<double>(fs.impostor.size());
}

double frr_at(const FusedScores& fs, double threshold) {
  std::size_t rejected = 0;
  for (double s : fs.genuine) rejected += s < threshold;
  return static_cast<double>(rejected) / static_cast<double>(fs.genuine.size());
}

double hter(const FusedScores& fs, double threshold) {
  check_scores(fs);
  return 0.5 * (far_at(fs, threshold) + frr_at(fs, threshold));
}

double eer_oracle(const FusedScores& fs) {
  check_scores(fs);
  auto genuine = fs.genuine;
  auto impostor = fs.impostor;
  std::sort(genuine.begin(), genuine.end());
  std::sort(impostor.begin(), impostor.end());

  std::vector<double> distinct;
  distinct.reserve(genuine.size() + impostor.size());
  std::merge(genuine.begin(), genuine.end(), impostor.begin(), impostor.end(),
             std::back_inserter(distinct));
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());

  std::vector<double> candidates;
  candidates.reserve(2 * distinct.size() + 1);
  candidates.push_back(-std::numeric_limits<double>::infinity());
  for (std::size_t j = 0; j < distinct.size(); ++j) {
    if (j > 0) candidates.push_back(distinct[j - 1] / 2 + distinct[j] / 2);
    candidates.push_back(distinct[j]);
  }
  candidates.push_back(std::numeric_limits<double>::infinity());

  const double ng = static_cast<double>(genuine.size());
  const double ni = static_cast<double>(impostor.size());
  double best_diff = std::numeric_limits<double>::infinity();
  double best_eer = 0.5;
  for (double t : candidates) {
    auto below_g = std::lower_bound(genuine.begin(), genuine.end(), t) - genuine.begin();
    auto below_i = std::lower_bound(impostor.begin(), impostor.end(), t) - impostor.begin();
    const double frr = static_cast<double>(below_g) / ng;
    const double far = static_cast<double>(static_cast<std::ptrdiff_t>(impostor.size()) - below_i) / ni;
    const double diff = std::abs(far - frr);
    if (diff < best_diff) {
      best_diff = diff;
      best_eer = 0.5 * (far + frr);
    }
  }
  return best_eer;
}

double auc(const RocCurve& curve) { return auc(curve.points); }

double auc(std::span<const RocPoint> points) {
  if (points.size() < 2) throw ValidationError("AUC needs at least two ROC points");
  std::vector<std::pair<double, double>> sorted;
  sorted.reserve(points.size());
  for (const auto& p : points) sorted.emplace_back(p.far, p.frr);
  std::sort(sorted.begin(), sorted.end());

  std::vector<std::pair<double, double>> collapsed;
  for (std::size_t i = 0; i < sorted.size();) {
    std::size_t j = i;
    double sum = 0.0;
    while (j < sorted.size() && sorted[j].first == sorted[i].first) sum += sorted[j++].second;
    collapsed.emplace_back(sorted[i].first, sum / static_cast<double>(j - i));
    i = j;
  }

  double area = 0.0;
  for (std::size_t k = 1; k < collapsed.size(); ++k) {
    const auto& [x0, y0] = collapsed[k - 1];
    const auto& [x1, y1] = collapsed[k];
    area += 0.5 * (x1 - x0) * (y0 + y1);
  }
  return area;
}

double gain(double reference, double candidate) {
  if (reference == 0.0) throw ValidationError("gain is undefined for a zero reference value");
  return 100.0 * (reference - candidate) / reference;
}

std::string roc_to_csv(const RocCurve& curve) {
  std::string out = "threshold,far,frr\n";
  for (const auto& p : curve.points) {
    out += format_fixed(p.threshold, 6);
    out += ',';
    out += format_fixed(p.far, 6);
    out += ',';
    out += format_fixed(p.frr, 6);
    out += '\n';
  }
  return out;
}

}  // namespace gpfusion
