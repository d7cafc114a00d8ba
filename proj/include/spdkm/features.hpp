#pragma once

#include <cmath>
#include <cstdint>
#include <limits>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "spdkm/spd.hpp"

namespace spdkm {

// One band's pixel time-series, laid out [time][row][col]. A pixel is nodata
// when its mask entry is set; values at masked pixels are never read.
struct RasterStack {
  std::string band_name;
  int t = 0;
  int h = 0;
  int w = 0;
  std::vector<double> values;      // size t*h*w
  std::vector<std::uint8_t> mask;  // size h*w; empty means nothing is masked

  double at(int tt, int i, int j) const {
    return values[(static_cast<std::size_t>(tt) * h + static_cast<std::size_t>(i)) * w + j];
  }
  bool masked(int i, int j) const {
    return !mask.empty() && mask[static_cast<std::size_t>(i) * w + j] != 0;
  }
};

// Builds a stack from raw values, deriving the nodata mask from NaNs: a pixel
// with any non-finite sample is masked out entirely.
inline RasterStack make_stack(std::string band_name, int t, int h, int w,
                              std::vector<double> values) {
  if (t < 2 || h < 1 || w < 1) {
    throw InvalidConfig("raster stack needs t >= 2 and positive h, w");
  }
  if (values.size() != static_cast<std::size_t>(t) * h * w) {
    throw DimensionMismatch("raster stack value count does not match t*h*w");
  }
  RasterStack s;
  s.band_name = std::move(band_name);
  s.t = t;
  s.h = h;
  s.w = w;
  s.values = std::move(values);
  s.mask.assign(static_cast<std::size_t>(h) * w, 0);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      for (int tt = 0; tt < t; ++tt) {
        if (!std::isfinite(s.at(tt, i, j))) {
          s.mask[static_cast<std::size_t>(i) * w + j] = 1;
          break;
        }
      }
    }
  }
  return s;
}

enum class BorderPolicy {
  drop_partial,     // partial border blocks are discarded (floor division)
  average_partial,  // partial border blocks averaged over their in-bounds cells
};

struct FeatureConfig {
  int lag = 0;
  int patch = 1;
  double jitter = 1e-10;  // diagonal bump relative to the series variance
  BorderPolicy border = BorderPolicy::drop_partial;
};

struct FeatureSet {
  int m = 0;  // autocovariance matrix dimension, lag + 1
  std::vector<EmbeddedPoint> points;
  std::vector<std::pair<int, int>> pixel_index;  // (row, col) in the patched grid, per point
  int grid_h = 0;
  int grid_w = 0;
};

inline std::pair<int, int> patched_dims(int h, int w, int p, BorderPolicy policy) {
  if (p < 1) throw InvalidConfig("patch size must be >= 1");
  const int hp = policy == BorderPolicy::drop_partial ? h / p : (h + p - 1) / p;
  const int wp = policy == BorderPolicy::drop_partial ? w / p : (w + p - 1) / p;
  if (hp == 0 || wp == 0) {
    throw DegenerateOutput("patch size " + std::to_string(p) +
                           " leaves an empty grid for a " + std::to_string(h) + "x" +
                           std::to_string(w) + " raster");
  }
  return {hp, wp};
}

// Non-overlapping p x p block means per time step, anchored at the top-left.
// Masked pixels are excluded from each block mean; a block with every pixel
// masked is masked in the output.
inline RasterStack patch_average(const RasterStack& in, int p, BorderPolicy policy) {
  const auto [hp, wp] = patched_dims(in.h, in.w, p, policy);
  RasterStack out;
  out.band_name = in.band_name;
  out.t = in.t;
  out.h = hp;
  out.w = wp;
  out.values.assign(static_cast<std::size_t>(in.t) * hp * wp,
                    std::numeric_limits<double>::quiet_NaN());
  out.mask.assign(static_cast<std::size_t>(hp) * wp, 0);
  std::vector<std::pair<int, int>> cells;
  for (int bi = 0; bi < hp; ++bi) {
    for (int bj = 0; bj < wp; ++bj) {
      cells.clear();
      const int i_end = std::min((bi + 1) * p, in.h);
      const int j_end = std::min((bj + 1) * p, in.w);
      for (int i = bi * p; i < i_end; ++i) {
        for (int j = bj * p; j < j_end; ++j) {
          if (!in.masked(i, j)) cells.emplace_back(i, j);
        }
      }
      if (cells.empty()) {
        out.mask[static_cast<std::size_t>(bi) * wp + bj] = 1;
        continue;
      }
      for (int tt = 0; tt < in.t; ++tt) {
        double acc = 0.0;
        for (const auto& [i, j] : cells) acc += in.at(tt, i, j);
        out.values[(static_cast<std::size_t>(tt) * hp + static_cast<std::size_t>(bi)) * wp + bj] =
            acc / static_cast<double>(cells.size());
      }
    }
  }
  return out;
}

// Biased (1/T) sample autocovariances for h = 0..max_lag. The 1/T
// normalisation makes the induced Toeplitz matrix positive semidefinite for
// any input series.
inline std::vector<double> autocovariances(std::span<const double> series, int max_lag) {
  const auto t = static_cast<int>(series.size());
  if (max_lag < 0) throw InvalidConfig("lag must be non-negative");
  if (t < max_lag + 2) {
    throw InvalidConfig("lag too large: series of length " + std::to_string(t) +
                        " supports lag <= " + std::to_string(t - 2));
  }
  double mean = 0.0;
  for (double x : series) {
    if (!std::isfinite(x)) throw InvalidArgument("series has non-finite samples");
    mean += x;
  }
  mean /= static_cast<double>(t);
  std::vector<double> dev(series.size());
  for (int i = 0; i < t; ++i) dev[static_cast<std::size_t>(i)] = series[static_cast<std::size_t>(i)] - mean;
  std::vector<double> g(static_cast<std::size_t>(max_lag) + 1, 0.0);
  for (int h = 0; h <= max_lag; ++h) {
    double acc = 0.0;
    for (int i = 0; i + h < t; ++i) acc += dev[static_cast<std::size_t>(i)] * dev[static_cast<std::size_t>(i + h)];
    g[static_cast<std::size_t>(h)] = acc / static_cast<double>(t);
  }
  return g;
}

// (lag+1) x (lag+1) Toeplitz matrix of sample autocovariances, nudged with a
// relative diagonal bump of jitter * gamma(0). The bump escalates tenfold
// (from a floor of dim * eps * gamma(0) when jitter is zero) until the
// pivoted Cholesky check passes, so the result is always SPD.
inline SpdMatrix autocov_matrix(std::span<const double> series, int lag, double jitter) {
  if (jitter < 0.0) throw InvalidConfig("jitter must be >= 0");
  const std::vector<double> g = autocovariances(series, lag);
  if (!(g[0] > 0.0)) throw ConstantSeries("series has zero sample variance");
  const int m = lag + 1;
  Matrix toe(m, m);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) toe(i, j) = g[static_cast<std::size_t>(std::abs(i - j))];
  }
  const double floor_step =
      static_cast<double>(m) * std::numeric_limits<double>::epsilon() * g[0];
  double added = jitter * g[0];
  for (int attempt = 0; attempt < 64; ++attempt) {
    Matrix cand = toe;
    cand.diagonal().array() += added;
    Matrix l;
    if (detail::cholesky_lower(cand, l)) return SpdMatrix(std::move(cand));
    added = std::max(added * 10.0, floor_step);
  }
  throw NotPositiveDefinite("autocovariance matrix could not be regularised");
}

// Patch-average, then one embedded autocovariance matrix per unmasked,
// non-constant patched pixel, scanned row-major.
inline FeatureSet build_features(const RasterStack& stack, const FeatureConfig& cfg) {
  const RasterStack ps = patch_average(stack, cfg.patch, cfg.border);
  if (ps.t < cfg.lag + 2) {
    throw InvalidConfig("lag too large: " + std::to_string(cfg.lag + 1) +
                        " autocovariance rows need at least " + std::to_string(cfg.lag + 2) +
                        " time steps, stack has " + std::to_string(ps.t));
  }
  FeatureSet fs;
  fs.m = cfg.lag + 1;
  fs.grid_h = ps.h;
  fs.grid_w = ps.w;
  std::vector<double> series(static_cast<std::size_t>(ps.t));
  for (int i = 0; i < ps.h; ++i) {
    for (int j = 0; j < ps.w; ++j) {
      if (ps.masked(i, j)) continue;
      for (int tt = 0; tt < ps.t; ++tt) series[static_cast<std::size_t>(tt)] = ps.at(tt, i, j);
      try {
        fs.points.push_back(embed(autocov_matrix(series, cfg.lag, cfg.jitter)));
        fs.pixel_index.emplace_back(i, j);
      } catch (const ConstantSeries&) {
        // constant pixel: recorded as absent
      }
    }
  }
  return fs;
}

}  // namespace spdkm
