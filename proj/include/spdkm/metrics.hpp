#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <map>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spdkm/features.hpp"
#include "spdkm/kmeans.hpp"

namespace spdkm {

// Flat labeling of n items; ids are arbitrary non-negative integers.
using Partition = std::vector<int>;

// Hubert-Arabie adjusted Rand index from the pair-counting contingency
// table. Evaluated in 128-bit integer arithmetic so the degenerate
// MaxIndex == ExpectedIndex case (both partitions trivial) is exact; it
// returns 0 by convention there.
inline double adjusted_rand(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw LengthMismatch("partitions differ in length");
  const std::size_t n = a.size();
  if (n < 2) throw LengthMismatch("adjusted Rand index needs n >= 2");

  using u64 = std::uint64_t;
  const auto comb2 = [](u64 x) -> u64 { return x * (x - 1) / 2; };

  std::map<int, u64> ca;
  std::map<int, u64> cb;
  std::map<std::pair<int, int>, u64> cab;
  for (std::size_t i = 0; i < n; ++i) {
    ++ca[a[i]];
    ++cb[b[i]];
    ++cab[{a[i], b[i]}];
  }
  u64 index = 0;
  for (const auto& [key, cnt] : cab) index += comb2(cnt);
  u64 sum_a = 0;
  for (const auto& [key, cnt] : ca) sum_a += comb2(cnt);
  u64 sum_b = 0;
  for (const auto& [key, cnt] : cb) sum_b += comb2(cnt);
  const u64 pairs = comb2(static_cast<u64>(n));

  // ARI = (Index - sum_a*sum_b/pairs) / ((sum_a+sum_b)/2 - sum_a*sum_b/pairs),
  // cleared of denominators:
  using i128 = __int128;
  const i128 num = 2 * (i128(index) * i128(pairs) - i128(sum_a) * i128(sum_b));
  const i128 den = (i128(sum_a) + i128(sum_b)) * i128(pairs) - 2 * i128(sum_a) * i128(sum_b);
  if (den == 0) return 0.0;
  return static_cast<double>(num) / static_cast<double>(den);
}

struct AnovaResult {
  double r2 = 0.0;
  double r2_adjusted = 0.0;
};

// One-way ANOVA explained variance of y across the given groups:
// r2 = 1 - SS_within / SS_total, with the usual (n-1)/(n-g) adjustment.
// A globally constant y yields {0, 0}.
inline AnovaResult anova_r2(std::span<const double> y, std::span<const int> groups) {
  if (y.size() != groups.size()) throw LengthMismatch("response and groups differ in length");
  const std::size_t n = y.size();
  std::map<int, std::pair<std::size_t, double>> stat;  // group -> (count, sum)
  double grand = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    auto& [cnt, sum] = stat[groups[i]];
    ++cnt;
    sum += y[i];
    grand += y[i];
  }
  const std::size_t g = stat.size();
  if (g < 2 || n <= g) {
    throw DegenerateGroups("ANOVA needs >= 2 groups and more observations than groups");
  }
  grand /= static_cast<double>(n);
  double sst = 0.0;
  double ssw = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const auto& [cnt, sum] = stat.at(groups[i]);
    const double gm = sum / static_cast<double>(cnt);
    sst += (y[i] - grand) * (y[i] - grand);
    ssw += (y[i] - gm) * (y[i] - gm);
  }
  AnovaResult r;
  if (sst == 0.0) return r;
  r.r2 = 1.0 - ssw / sst;
  r.r2_adjusted = 1.0 - (1.0 - r.r2) * (static_cast<double>(n) - 1.0) /
                            (static_cast<double>(n) - static_cast<double>(g));
  return r;
}

// 1 / (sd(cc) * sd(vh) * mean(cc)), standard deviations in the unbiased
// 1/(T-1) form.
inline double sargde_v1(std::span<const double> cc, std::span<const double> vh) {
  const auto sd_mean = [](std::span<const double> x) -> std::pair<double, double> {
    if (x.size() < 2) throw DegenerateSeries("SARGDE series needs length >= 2");
    double mean = 0.0;
    for (double v : x) mean += v;
    mean /= static_cast<double>(x.size());
    double ss = 0.0;
    for (double v : x) ss += (v - mean) * (v - mean);
    return {std::sqrt(ss / (static_cast<double>(x.size()) - 1.0)), mean};
  };
  const auto cc_stats = sd_mean(cc);
  const double sd_vh = sd_mean(vh).first;
  const double sd_cc = cc_stats.first;
  const double mean_cc = cc_stats.second;
  if (sd_cc == 0.0 || sd_vh == 0.0 || mean_cc == 0.0) {
    throw DegenerateSeries("SARGDE factor is zero (constant series or zero-mean coherence)");
  }
  return 1.0 / (sd_cc * sd_vh * mean_cc);
}

struct OverlapRow {
  int cluster = 0;
  double overlap_fraction = 0.0;
  bool flagged = false;
};

// Per cluster: fraction of members whose truth label is positive (> 0);
// flagged when strictly above the threshold. Rows ascend in cluster id.
inline std::vector<OverlapRow> overlap_report(std::span<const int> model_labels,
                                              std::span<const int> truth,
                                              double threshold) {
  if (model_labels.size() != truth.size()) {
    throw LengthMismatch("labels and truth differ in length");
  }
  std::map<int, std::pair<std::int64_t, std::int64_t>> counts;  // cluster -> (members, positives)
  for (std::size_t i = 0; i < model_labels.size(); ++i) {
    auto& [members, positives] = counts[model_labels[i]];
    ++members;
    if (truth[i] > 0) ++positives;
  }
  std::vector<OverlapRow> rows;
  rows.reserve(counts.size());
  for (const auto& [cluster, mp] : counts) {
    OverlapRow row;
    row.cluster = cluster;
    row.overlap_fraction = static_cast<double>(mp.second) / static_cast<double>(mp.first);
    row.flagged = row.overlap_fraction > threshold;
    rows.push_back(row);
  }
  return rows;
}

// Ground-truth label raster; integer-valued, NaN marks nodata.
struct LabelRaster {
  int h = 0;
  int w = 0;
  std::vector<double> values;  // size h*w, row-major

  double at(int i, int j) const { return values[static_cast<std::size_t>(i) * w + j]; }
};

// Majority vote within each p x p block, ties toward the smaller label;
// all-nodata blocks stay nodata.
inline LabelRaster patch_majority(const LabelRaster& in, int p, BorderPolicy policy) {
  const auto [hp, wp] = patched_dims(in.h, in.w, p, policy);
  LabelRaster out;
  out.h = hp;
  out.w = wp;
  out.values.assign(static_cast<std::size_t>(hp) * wp,
                    std::numeric_limits<double>::quiet_NaN());
  for (int bi = 0; bi < hp; ++bi) {
    for (int bj = 0; bj < wp; ++bj) {
      std::map<long long, int> votes;
      const int i_end = std::min((bi + 1) * p, in.h);
      const int j_end = std::min((bj + 1) * p, in.w);
      for (int i = bi * p; i < i_end; ++i) {
        for (int j = bj * p; j < j_end; ++j) {
          const double v = in.at(i, j);
          if (std::isfinite(v)) ++votes[std::llround(v)];
        }
      }
      if (votes.empty()) continue;
      long long best_label = votes.begin()->first;
      int best_count = votes.begin()->second;
      for (const auto& [label, count] : votes) {
        if (count > best_count) {  // ascending map order keeps the smaller label on ties
          best_label = label;
          best_count = count;
        }
      }
      out.values[static_cast<std::size_t>(bi) * wp + bj] = static_cast<double>(best_label);
    }
  }
  return out;
}

struct SweepCell {
  std::string band;
  int lag = 0;
  int patch = 0;
  int k = 0;
  double ari = 0.0;
};

struct SweepResult {
  std::vector<SweepCell> grid;
  SweepCell best;
};

namespace detail {

// Cell-local seed: re-running a single cell in isolation reproduces it.
inline std::uint64_t sweep_cell_seed(std::uint64_t base, const std::string& band, int lag,
                                     int patch, int k) {
  std::uint64_t s = derive_seed(base, fnv1a64(band));
  s = derive_seed(s, static_cast<std::uint64_t>(lag));
  s = derive_seed(s, static_cast<std::uint64_t>(patch));
  return derive_seed(s, static_cast<std::uint64_t>(k));
}

}  // namespace detail

// Hyperparameter sweep: for each (band, lag, patch, k) cell, build features,
// fit k-means, and score the agreement with the majority-patched truth over
// the pixels present in the feature set. Best cell maximises ARI; ties break
// toward smaller (lag, patch, k), then band name.
inline SweepResult sweep(const std::map<std::string, RasterStack>& stacks,
                         const LabelRaster& truth, std::span<const int> lags,
                         std::span<const int> patches, std::span<const int> ks,
                         const KmeansConfig& cfg_template) {
  if (stacks.empty() || lags.empty() || patches.empty() || ks.empty()) {
    throw EmptyInput("sweep: every grid axis needs at least one value");
  }
  for (const auto& [band, stack] : stacks) {
    if (stack.h != truth.h || stack.w != truth.w) {
      throw DimensionMismatch("truth raster dims do not match band " + band);
    }
  }
  SweepResult result;
  for (const auto& [band, stack] : stacks) {
    for (int lag : lags) {
      for (int patch : patches) {
        const LabelRaster pt = patch_majority(truth, patch, BorderPolicy::drop_partial);
        FeatureConfig fc;
        fc.lag = lag;
        fc.patch = patch;
        const FeatureSet fs = build_features(stack, fc);
        std::vector<std::size_t> keep;
        std::vector<int> truth_labels;
        for (std::size_t idx = 0; idx < fs.pixel_index.size(); ++idx) {
          const auto [i, j] = fs.pixel_index[idx];
          const double tv = pt.at(i, j);
          if (std::isfinite(tv)) {
            keep.push_back(idx);
            truth_labels.push_back(static_cast<int>(std::llround(tv)));
          }
        }
        for (int k : ks) {
          KmeansConfig cfg = cfg_template;
          cfg.k = k;
          cfg.seed = detail::sweep_cell_seed(cfg_template.seed, band, lag, patch, k);
          const ClusterModel model = fit(fs.points, cfg);
          std::vector<int> cell_labels;
          cell_labels.reserve(keep.size());
          for (std::size_t idx : keep) cell_labels.push_back(model.labels[idx]);
          const double ari =
              cell_labels.size() >= 2 ? adjusted_rand(cell_labels, truth_labels) : 0.0;
          result.grid.push_back({band, lag, patch, k, ari});
        }
      }
    }
  }
  const auto better = [](const SweepCell& x, const SweepCell& y) {
    if (x.ari != y.ari) return x.ari > y.ari;
    if (x.lag != y.lag) return x.lag < y.lag;
    if (x.patch != y.patch) return x.patch < y.patch;
    if (x.k != y.k) return x.k < y.k;
    return x.band < y.band;
  };
  result.best = result.grid.front();
  for (const SweepCell& cell : result.grid) {
    if (better(cell, result.best)) result.best = cell;
  }
  return result;
}

}  // namespace spdkm
