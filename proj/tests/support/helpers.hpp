#pragma once

// Shared test utilities: independent oracles, synthetic data generators, and
// process helpers for driving the CLI. Oracles here deliberately avoid the
// library code paths they are used to check.

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <string>
#include <utility>
#include <vector>

#include "spdkm/spdkm.hpp"

namespace testsup {

using spdkm::Matrix;
using spdkm::Vector;

inline std::atomic<int>& counter() {
  static std::atomic<int> c{0};
  return c;
}

// ---------------------------------------------------------------------------
// oracles

// Direct pair-counting adjusted Rand index over all C(n,2) pairs.
inline double ari_pair_counting(const std::vector<int>& a, const std::vector<int>& b) {
  const std::size_t n = a.size();
  long long n11 = 0, n00 = 0, n10 = 0, n01 = 0;
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      const bool sa = a[i] == a[j];
      const bool sb = b[i] == b[j];
      if (sa && sb) {
        ++n11;
      } else if (!sa && !sb) {
        ++n00;
      } else if (sa) {
        ++n10;
      } else {
        ++n01;
      }
    }
  }
  const double num =
      2.0 * (static_cast<double>(n11) * static_cast<double>(n00) -
             static_cast<double>(n10) * static_cast<double>(n01));
  const double den = (static_cast<double>(n11) + static_cast<double>(n10)) *
                         (static_cast<double>(n10) + static_cast<double>(n00)) +
                     (static_cast<double>(n11) + static_cast<double>(n01)) *
                         (static_cast<double>(n01) + static_cast<double>(n00));
  if (den == 0.0) return 0.0;
  return num / den;
}

// Global k-means optimum by enumerating every assignment of n points to k
// clusters (empty clusters allowed). Returns the 1/n-normalised objective.
inline double exhaustive_kmeans_objective(const Matrix& data, int k) {
  const Eigen::Index n = data.cols();
  const Eigen::Index d = data.rows();
  std::vector<int> asg(static_cast<std::size_t>(n), 0);
  Matrix sums(d, k);
  std::vector<int> counts(static_cast<std::size_t>(k), 0);
  double best = std::numeric_limits<double>::infinity();
  for (;;) {
    sums.setZero();
    std::fill(counts.begin(), counts.end(), 0);
    for (Eigen::Index i = 0; i < n; ++i) {
      sums.col(asg[static_cast<std::size_t>(i)]) += data.col(i);
      ++counts[static_cast<std::size_t>(asg[static_cast<std::size_t>(i)])];
    }
    double obj = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
      const int c = asg[static_cast<std::size_t>(i)];
      obj += (data.col(i) - sums.col(c) / counts[static_cast<std::size_t>(c)]).squaredNorm();
    }
    best = std::min(best, obj / static_cast<double>(n));
    Eigen::Index pos = 0;
    while (pos < n && ++asg[static_cast<std::size_t>(pos)] == k) {
      asg[static_cast<std::size_t>(pos)] = 0;
      ++pos;
    }
    if (pos == n) break;
  }
  return best;
}

// Derivative-free cyclic coordinate (ternary) search. The bracket radius must
// contain the minimiser along every coordinate.
inline Vector coordinate_search_min(const std::function<double(const Vector&)>& g, Vector v,
                                    double radius, double tol, int passes) {
  for (int pass = 0; pass < passes; ++pass) {
    for (Eigen::Index i = 0; i < v.size(); ++i) {
      double lo = v[i] - radius;
      double hi = v[i] + radius;
      while (hi - lo > tol) {
        const double m1 = lo + (hi - lo) / 3.0;
        const double m2 = hi - (hi - lo) / 3.0;
        Vector va = v;
        va[i] = m1;
        Vector vb = v;
        vb[i] = m2;
        if (g(va) < g(vb)) {
          hi = m2;
        } else {
          lo = m1;
        }
      }
      v[i] = 0.5 * (lo + hi);
    }
  }
  return v;
}

// Two-pass one-way ANOVA recomputation (independent of metrics.hpp).
struct AnovaOracle {
  double r2 = 0.0;
  double r2_adjusted = 0.0;
};

inline AnovaOracle anova_two_pass(const std::vector<double>& y, const std::vector<int>& groups) {
  std::vector<int> ids(groups);
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  double grand = 0.0;
  for (double v : y) grand += v;
  grand /= static_cast<double>(y.size());
  double sst = 0.0;
  double ssb = 0.0;
  for (double v : y) sst += (v - grand) * (v - grand);
  for (int id : ids) {
    double sum = 0.0;
    int cnt = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (groups[i] == id) {
        sum += y[i];
        ++cnt;
      }
    }
    const double gm = sum / cnt;
    ssb += cnt * (gm - grand) * (gm - grand);
  }
  AnovaOracle o;
  o.r2 = ssb / sst;
  const auto n = static_cast<double>(y.size());
  const auto g = static_cast<double>(ids.size());
  o.r2_adjusted = 1.0 - (1.0 - o.r2) * (n - 1.0) / (n - g);
  return o;
}

// ---------------------------------------------------------------------------
// synthetic data

// Three mixture centers, pairwise `separation` apart, in the m=3 embedding.
inline std::vector<Vector> mixture_centers_m3(double separation) {
  std::vector<Vector> mu(3, Vector::Zero(6));
  mu[1][0] = separation;
  mu[2][0] = separation / 2.0;
  mu[2][1] = separation * std::sqrt(3.0) / 2.0;
  return mu;
}

struct MixtureSample {
  std::vector<spdkm::SpdMatrix> matrices;
  std::vector<int> components;
};

inline MixtureSample sample_mixture(const std::vector<Vector>& centers, double spread, int n,
                                    std::uint64_t seed) {
  spdkm::GaussianSampler g(seed);
  MixtureSample out;
  out.matrices.reserve(static_cast<std::size_t>(n));
  out.components.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) {
    const std::size_t c = g.index(centers.size());
    Vector v = centers[c];
    for (Eigen::Index t = 0; t < v.size(); ++t) v[t] += spread * g.normal();
    out.matrices.push_back(spdkm::unembed(spdkm::EmbeddedPoint::from_coords(std::move(v))));
    out.components.push_back(static_cast<int>(c));
  }
  return out;
}

// Smallest mean distance between fitted centroids and true centers over all
// matchings (k = 3 here, so all 6 permutations).
inline double matched_center_error(const std::vector<spdkm::EmbeddedPoint>& centroids,
                                   const std::vector<Vector>& centers) {
  std::vector<int> perm = {0, 1, 2};
  double best = std::numeric_limits<double>::infinity();
  do {
    double acc = 0.0;
    for (std::size_t j = 0; j < centers.size(); ++j) {
      acc += (centroids[j].coords() - centers[static_cast<std::size_t>(perm[j])]).norm();
    }
    best = std::min(best, acc / static_cast<double>(centers.size()));
  } while (std::next_permutation(perm.begin(), perm.end()));
  return best;
}

// Raster stack of AR(1) pixel series in three vertical strips with distinct
// dynamics; strip id is the ground-truth label.
struct SynthRaster {
  spdkm::Tensor stack;  // 3-D: t x h x w
  spdkm::Tensor truth;  // 2-D: h x w strip labels
  std::vector<int> labels;  // row-major h*w
};

inline SynthRaster make_ar1_raster(int t, int h, int w, std::uint64_t seed) {
  const double sigma[3] = {0.1, 1.0, 3.0};
  const double phi[3] = {0.0, 0.5, -0.4};
  const double mu[3] = {5.0, 0.0, -2.0};
  SynthRaster out;
  out.stack.dims = {static_cast<std::uint64_t>(t), static_cast<std::uint64_t>(h),
                    static_cast<std::uint64_t>(w)};
  out.stack.data.assign(static_cast<std::size_t>(t) * h * w, 0.0);
  out.truth.dims = {static_cast<std::uint64_t>(h), static_cast<std::uint64_t>(w)};
  out.truth.data.assign(static_cast<std::size_t>(h) * w, 0.0);
  out.labels.assign(static_cast<std::size_t>(h) * w, 0);
  for (int i = 0; i < h; ++i) {
    for (int j = 0; j < w; ++j) {
      const int c = std::min(j * 3 / w, 2);
      out.labels[static_cast<std::size_t>(i) * w + j] = c;
      out.truth.data[static_cast<std::size_t>(i) * w + j] = c;
      spdkm::GaussianSampler g(
          spdkm::derive_seed(seed, static_cast<std::uint64_t>(i) * static_cast<std::uint64_t>(w) + j));
      double x = mu[c] + sigma[c] / std::sqrt(1.0 - phi[c] * phi[c]) * g.normal();
      for (int tt = 0; tt < t; ++tt) {
        out.stack.data[(static_cast<std::size_t>(tt) * h + static_cast<std::size_t>(i)) * w + j] = x;
        x = mu[c] + phi[c] * (x - mu[c]) + sigma[c] * g.normal();
      }
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// filesystem / process helpers

inline std::filesystem::path make_temp_dir(const std::string& tag) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("spdkm_" + tag + "_" + std::to_string(::getpid()) + "_" +
                    std::to_string(counter()++));
  std::filesystem::create_directories(dir);
  return dir;
}

inline std::string slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

#ifdef SPDKM_CLI_BIN
struct CliResult {
  int exit_code = -1;
  std::string output;  // stdout + stderr
};

inline CliResult run_cli(const std::string& args, const std::filesystem::path& workdir) {
  const std::filesystem::path out_file =
      workdir / ("cli_out_" + std::to_string(counter()++) + ".txt");
  const std::string cmd =
      std::string(SPDKM_CLI_BIN) + " " + args + " > " + out_file.string() + " 2>&1";
  const int rc = std::system(cmd.c_str());
  CliResult res;
  if (WIFEXITED(rc)) res.exit_code = WEXITSTATUS(rc);
  res.output = slurp(out_file);
  return res;
}
#endif

}  // namespace testsup
