#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <vector>

#include "spdkm/model_select.hpp"
#include "support/helpers.hpp"

using Catch::Approx;

TEST_CASE("a single repeated point scores pure penalty and picks k=1", "[select]") {
  const auto s = spdkm::sample_spd(2, 4, 1.0);
  const std::vector<spdkm::SpdMatrix> mats(10, s);
  const auto report = spdkm::select_k(mats, {1}, spdkm::KmeansConfig{});
  CHECK(report.chosen_k == 1);
  CHECK(report.candidates.size() == 1);
  CHECK(report.candidates[0].objective == 0.0);
  CHECK(report.candidates[0].score ==
        Approx(2.0 * 3.0 * std::log(10.0) / 10.0).margin(1e-15));
}

TEST_CASE("equal objectives favour the smallest k", "[select]") {
  const auto s = spdkm::sample_spd(3, 5, 1.0);
  const std::vector<spdkm::SpdMatrix> mats(12, s);
  const auto report = spdkm::select_k(mats, {1, 2, 3, 4}, spdkm::KmeansConfig{});
  for (const auto& c : report.candidates) CHECK(c.objective == 0.0);
  CHECK(report.chosen_k == 1);
}

TEST_CASE("penalty is strictly increasing in k", "[select]") {
  for (int m : {1, 2, 5}) {
    for (std::size_t n : {2ul, 100ul, 1000000ul}) {
      for (int k = 1; k < 30; ++k) {
        CHECK(spdkm::bic_penalty(m, k + 1, n) > spdkm::bic_penalty(m, k, n));
      }
    }
  }
}

TEST_CASE("stored scores recompute bit-for-bit", "[select]") {
  const auto centers = testsup::mixture_centers_m3(2.0);
  const auto sample = testsup::sample_mixture(centers, 0.2, 200, 88);
  spdkm::KmeansConfig tmpl;
  tmpl.seed = 9;
  const auto report = spdkm::select_k(sample.matrices, {1, 2, 3, 4, 5}, tmpl);
  for (const auto& c : report.candidates) {
    CHECK(c.penalty == spdkm::bic_penalty(report.m, c.k, report.n));
    CHECK(c.score == c.objective + c.penalty);
  }
  CHECK(report.m == 3);
  CHECK(report.n == 200);
}

TEST_CASE("per-k seeding is stable under growing candidate sets", "[select]") {
  const auto centers = testsup::mixture_centers_m3(2.0);
  const auto sample = testsup::sample_mixture(centers, 0.25, 150, 17);
  spdkm::KmeansConfig tmpl;
  tmpl.seed = 3;
  const auto wide = spdkm::select_k(sample.matrices, {1, 2, 3, 4, 5, 6}, tmpl);
  const auto narrow = spdkm::select_k(sample.matrices, {3}, tmpl);
  REQUIRE(wide.candidates.size() == 6);
  CHECK(wide.candidates[2].objective == narrow.candidates[0].objective);
  CHECK(wide.candidates[2].score == narrow.candidates[0].score);
}

TEST_CASE("three well-separated components are selected", "[select]") {
  const auto centers = testsup::mixture_centers_m3(2.0);  // separation >= 10x spread
  int hits = 0;
  for (int trial = 0; trial < 5; ++trial) {
    const auto sample = testsup::sample_mixture(centers, 0.15, 600, 9000 + trial);
    spdkm::KmeansConfig tmpl;
    tmpl.seed = 100 + static_cast<std::uint64_t>(trial);
    tmpl.restarts = 6;
    const auto report = spdkm::select_k(sample.matrices, {1, 2, 3, 4, 5, 6, 7, 8}, tmpl);
    if (report.chosen_k == 3) ++hits;
  }
  CHECK(hits >= 4);
}

TEST_CASE("select_k validates its inputs", "[select]") {
  const auto s = spdkm::sample_spd(2, 6, 1.0);
  const std::vector<spdkm::SpdMatrix> mats(5, s);
  CHECK_THROWS_AS(spdkm::select_k({}, {1}, spdkm::KmeansConfig{}), spdkm::EmptyInput);
  CHECK_THROWS_AS(spdkm::select_k(mats, {}, spdkm::KmeansConfig{}), spdkm::EmptyInput);
  CHECK_THROWS_AS(spdkm::select_k(mats, {6}, spdkm::KmeansConfig{}), spdkm::KExceedsN);
  CHECK_THROWS_AS(spdkm::select_k(mats, {0, 2}, spdkm::KmeansConfig{}), spdkm::InvalidConfig);
}
