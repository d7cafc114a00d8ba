#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "spdkm/spd.hpp"

namespace spdkm {

struct KmeansConfig {
  int k = 1;
  int max_iters = 300;
  double rel_tol = 1e-6;  // stop when the relative objective decrease falls below this
  int restarts = 8;
  std::uint64_t seed = 0;
};

struct ClusterModel {
  std::vector<EmbeddedPoint> centroids;
  std::vector<int> labels;   // nearest-centroid index per point, ties to the lowest index
  double objective = 0.0;    // (1/n) * sum of squared nearest-centroid distances
  int iters_run = 0;
  int restart_of_best = 0;
  std::vector<double> objective_trace;  // per-iteration objective of the winning restart
};

namespace detail {

inline void assign_nearest(const Matrix& data, const Matrix& centroids,
                           std::vector<int>& labels, double* objective) {
  const Eigen::Index n = data.cols();
  const Eigen::Index k = centroids.cols();
  labels.resize(static_cast<std::size_t>(n));
  double acc = 0.0;
  for (Eigen::Index i = 0; i < n; ++i) {
    int best = 0;
    double best_d = (data.col(i) - centroids.col(0)).squaredNorm();
    for (Eigen::Index j = 1; j < k; ++j) {
      const double d = (data.col(i) - centroids.col(j)).squaredNorm();
      if (d < best_d) {
        best_d = d;
        best = static_cast<int>(j);
      }
    }
    labels[static_cast<std::size_t>(i)] = best;
    acc += best_d;
  }
  if (objective) *objective = acc / static_cast<double>(n);
}

// Distance-weighted sequential seeding: each next seed is drawn with
// probability proportional to its squared distance from the nearest seed
// chosen so far (kmeans++-style). Falls back to a uniform draw when every
// remaining point coincides with a chosen seed.
inline Matrix seed_centroids(const Matrix& data, int k, GaussianSampler& g) {
  const Eigen::Index n = data.cols();
  Matrix c(data.rows(), k);
  c.col(0) = data.col(static_cast<Eigen::Index>(g.index(static_cast<std::size_t>(n))));
  std::vector<double> d2(static_cast<std::size_t>(n));
  for (Eigen::Index i = 0; i < n; ++i) {
    d2[static_cast<std::size_t>(i)] = (data.col(i) - c.col(0)).squaredNorm();
  }
  for (int j = 1; j < k; ++j) {
    double total = 0.0;
    for (double v : d2) total += v;
    Eigen::Index pick;
    if (total > 0.0) {
      const double r = g.uniform01() * total;
      double cum = 0.0;
      pick = n - 1;
      for (Eigen::Index i = 0; i < n; ++i) {
        cum += d2[static_cast<std::size_t>(i)];
        if (cum >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = static_cast<Eigen::Index>(g.index(static_cast<std::size_t>(n)));
    }
    c.col(j) = data.col(pick);
    for (Eigen::Index i = 0; i < n; ++i) {
      const double d = (data.col(i) - c.col(j)).squaredNorm();
      auto& slot = d2[static_cast<std::size_t>(i)];
      if (d < slot) slot = d;
    }
  }
  return c;
}

// Mean update with empty-cluster repair: a cluster that lost all members has
// its centroid moved to the point farthest from its nearest current centroid.
inline void update_centroids(const Matrix& data, const std::vector<int>& labels,
                             Matrix& centroids) {
  const Eigen::Index n = data.cols();
  const Eigen::Index k = centroids.cols();
  Matrix sums = Matrix::Zero(data.rows(), k);
  std::vector<Eigen::Index> counts(static_cast<std::size_t>(k), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto j = static_cast<Eigen::Index>(labels[static_cast<std::size_t>(i)]);
    sums.col(j) += data.col(i);
    ++counts[static_cast<std::size_t>(j)];
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0) {
      centroids.col(j) = sums.col(j) / static_cast<double>(counts[static_cast<std::size_t>(j)]);
    }
  }
  for (Eigen::Index j = 0; j < k; ++j) {
    if (counts[static_cast<std::size_t>(j)] > 0) continue;
    double far = -1.0;
    Eigen::Index pick = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
      double nd = (data.col(i) - centroids.col(0)).squaredNorm();
      for (Eigen::Index t = 1; t < k; ++t) {
        const double d = (data.col(i) - centroids.col(t)).squaredNorm();
        if (d < nd) nd = d;
      }
      if (nd > far) {
        far = nd;
        pick = i;
      }
    }
    centroids.col(j) = data.col(pick);
  }
}

struct LloydRun {
  Matrix centroids;
  std::vector<int> labels;
  double objective = 0.0;
  int iters = 0;
  std::vector<double> trace;
};

inline LloydRun lloyd(const Matrix& data, const KmeansConfig& cfg, std::uint64_t seed) {
  GaussianSampler g(seed);
  LloydRun run;
  run.centroids = seed_centroids(data, cfg.k, g);
  assign_nearest(data, run.centroids, run.labels, &run.objective);
  run.trace.push_back(run.objective);
  // Round-off head-room for the monotonicity check: recomputing a cluster
  // mean moves it by up to ~n*eps*|x|, which turns an exactly-zero objective
  // into (n*eps*|x|)^2.
  const double col_scale = std::sqrt(data.colwise().squaredNorm().maxCoeff()) + 1.0;
  const double mono_slack =
      std::pow(static_cast<double>(data.cols()) * std::numeric_limits<double>::epsilon() *
                   col_scale,
               2);
  std::vector<int> next_labels;
  for (int it = 0; it < cfg.max_iters; ++it) {
    Matrix next = run.centroids;
    update_centroids(data, run.labels, next);
    double next_obj = 0.0;
    assign_nearest(data, next, next_labels, &next_obj);
    ++run.iters;
    if (next_obj > run.objective * (1.0 + 1e-12) + mono_slack) {
      throw Error("k-means objective increased within a Lloyd run");
    }
    // a non-improving update means the run is at a fixed point (modulo
    // round-off); keep the current state
    if (next_obj >= run.objective) break;
    run.trace.push_back(next_obj);
    const bool labels_stable = next_labels == run.labels;
    const double prev = run.objective;
    run.centroids = std::move(next);
    run.labels.swap(next_labels);
    run.objective = next_obj;
    if (labels_stable || prev - next_obj < cfg.rel_tol * prev) break;
  }
  return run;
}

inline void check_config(const KmeansConfig& cfg) {
  if (cfg.k < 1 || cfg.restarts < 1 || cfg.max_iters < 1 || cfg.rel_tol < 0.0) {
    throw InvalidConfig("k-means config needs k, restarts, max_iters >= 1 and rel_tol >= 0");
  }
}

inline Matrix points_to_columns(const std::vector<EmbeddedPoint>& points) {
  const int dm = points.front().dim_m();
  Matrix data(points.front().coords().size(), static_cast<Eigen::Index>(points.size()));
  for (std::size_t i = 0; i < points.size(); ++i) {
    if (points[i].dim_m() != dm) {
      throw DimensionMismatch("points mix embedding dimensions " + std::to_string(dm) +
                              " and " + std::to_string(points[i].dim_m()));
    }
    data.col(static_cast<Eigen::Index>(i)) = points[i].coords();
  }
  return data;
}

}  // namespace detail

// Nearest-centroid labels; ties broken toward the lowest centroid index.
inline std::vector<int> assign(const std::vector<EmbeddedPoint>& points,
                               const std::vector<EmbeddedPoint>& centroids) {
  if (centroids.empty()) throw EmptyInput("assign: no centroids");
  if (points.empty()) return {};
  if (points.front().dim_m() != centroids.front().dim_m()) {
    throw DimensionMismatch("assign: points and centroids disagree in dimension");
  }
  const Matrix data = detail::points_to_columns(points);
  const Matrix cents = detail::points_to_columns(centroids);
  std::vector<int> labels;
  detail::assign_nearest(data, cents, labels, nullptr);
  return labels;
}

// Lloyd iterations with seeding, restarts and empty-cluster repair; returns
// the lowest-objective model over cfg.restarts independent seeded runs.
// Deterministic for a fixed point order and config.
inline ClusterModel fit(const std::vector<EmbeddedPoint>& points, const KmeansConfig& cfg) {
  if (points.empty()) throw EmptyInput("fit: no points");
  detail::check_config(cfg);
  if (static_cast<std::size_t>(cfg.k) > points.size()) {
    throw KExceedsN("fit: k=" + std::to_string(cfg.k) + " exceeds n=" +
                    std::to_string(points.size()));
  }
  const Matrix data = detail::points_to_columns(points);
  const int dm = points.front().dim_m();

  detail::LloydRun best;
  int best_restart = 0;
  for (int r = 0; r < cfg.restarts; ++r) {
    detail::LloydRun run =
        detail::lloyd(data, cfg, derive_seed(cfg.seed, static_cast<std::uint64_t>(r)));
    if (r == 0 || run.objective < best.objective) {
      best = std::move(run);
      best_restart = r;
    }
  }

  ClusterModel model;
  model.centroids.reserve(static_cast<std::size_t>(cfg.k));
  for (int j = 0; j < cfg.k; ++j) {
    model.centroids.emplace_back(dm, Vector(best.centroids.col(j)));
  }
  model.labels = std::move(best.labels);
  model.objective = best.objective;
  model.iters_run = best.iters;
  model.restart_of_best = best_restart;
  model.objective_trace = std::move(best.trace);
  return model;
}

// Embeds the matrices, runs fit, and returns the model together with the
// unembedded centroids. Each returned centroid is the log-Cholesky Frechet
// mean of its assigned matrices.
inline std::pair<ClusterModel, std::vector<SpdMatrix>> fit_spd(
    const std::vector<SpdMatrix>& matrices, const KmeansConfig& cfg) {
  if (matrices.empty()) throw EmptyInput("fit_spd: no matrices");
  const int m = matrices.front().dim();
  std::vector<EmbeddedPoint> points;
  points.reserve(matrices.size());
  for (const SpdMatrix& s : matrices) {
    if (s.dim() != m) throw DimensionMismatch("fit_spd: mixed matrix dimensions");
    points.push_back(embed(s));
  }
  ClusterModel model = fit(points, cfg);
  std::vector<SpdMatrix> centers;
  centers.reserve(model.centroids.size());
  for (const EmbeddedPoint& c : model.centroids) centers.push_back(unembed(c));
  return {std::move(model), std::move(centers)};
}

}  // namespace spdkm
