#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "spdkm/kmeans.hpp"
#include "spdkm/spd.hpp"

namespace spdkm {

struct KCandidate {
  int k = 0;
  double objective = 0.0;
  double penalty = 0.0;
  double score = 0.0;  // objective + penalty
};

struct KSelectionReport {
  std::vector<KCandidate> candidates;  // ascending in k
  int chosen_k = 0;
  int m = 0;       // matrix dimension
  std::size_t n = 0;  // sample size
};

// Penalty term of the BIC-style score: m(m+1) * k * log(n) / n.
inline double bic_penalty(int m, int k, std::size_t n) {
  return static_cast<double>(m) * static_cast<double>(m + 1) * static_cast<double>(k) *
         std::log(static_cast<double>(n)) / static_cast<double>(n);
}

// Fits k-means for every candidate k and scores each fit with the penalised
// objective; the chosen k minimises the score, ties broken toward smaller k.
// Per-k seeds derive from (cfg_template.seed, k), so growing the candidate
// set never perturbs existing runs.
inline KSelectionReport select_k(const std::vector<SpdMatrix>& matrices,
                                 std::vector<int> k_set,
                                 const KmeansConfig& cfg_template) {
  if (matrices.empty()) throw EmptyInput("select_k: no matrices");
  if (k_set.empty()) throw EmptyInput("select_k: empty candidate set");
  std::sort(k_set.begin(), k_set.end());
  k_set.erase(std::unique(k_set.begin(), k_set.end()), k_set.end());
  if (k_set.front() < 1) throw InvalidConfig("select_k: candidate k must be positive");
  if (static_cast<std::size_t>(k_set.back()) > matrices.size()) {
    throw KExceedsN("select_k: k=" + std::to_string(k_set.back()) + " exceeds n=" +
                    std::to_string(matrices.size()));
  }

  // Embedding once is equivalent to fit_spd per k: fit_spd is embed + fit.
  const int m = matrices.front().dim();
  std::vector<EmbeddedPoint> points;
  points.reserve(matrices.size());
  for (const SpdMatrix& s : matrices) {
    if (s.dim() != m) throw DimensionMismatch("select_k: mixed matrix dimensions");
    points.push_back(embed(s));
  }

  KSelectionReport report;
  report.m = m;
  report.n = matrices.size();
  report.candidates.reserve(k_set.size());
  for (int k : k_set) {
    KmeansConfig cfg = cfg_template;
    cfg.k = k;
    cfg.seed = derive_seed(cfg_template.seed, static_cast<std::uint64_t>(k));
    const ClusterModel model = fit(points, cfg);
    KCandidate c;
    c.k = k;
    c.objective = model.objective;
    c.penalty = bic_penalty(m, k, report.n);
    c.score = c.objective + c.penalty;
    report.candidates.push_back(c);
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < report.candidates.size(); ++i) {
    if (report.candidates[i].score < report.candidates[best].score) best = i;
  }
  report.chosen_k = report.candidates[best].k;
  return report;
}

}  // namespace spdkm
