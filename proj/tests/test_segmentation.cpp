#include <doctest.h>

#include <cmath>
#include <limits>
#include <random>

#include "subclone/segmentation.hpp"

using namespace subclone;

namespace {

// Exhaustive minimum of the penalized loss over every segmentation that cuts at each
// chromosome start.
double brute_force(const SegSignal& s, double gamma, SegmentMap* argmin = nullptr) {
  const std::size_t n = s.values.rows();
  double best = std::numeric_limits<double>::infinity();
  for (std::uint64_t mask = 0; mask < (1ull << (n - 1)); ++mask) {
    std::vector<int> ids(n, 0);
    bool ok = true;
    for (std::size_t j = 1; j < n; ++j) {
      const bool cut = (mask >> (j - 1)) & 1u;
      if (!cut && std::find(s.chrom_starts.begin(), s.chrom_starts.end(), j) != s.chrom_starts.end()) ok = false;
      ids[j] = ids[j - 1] + (cut ? 1 : 0);
    }
    if (!ok) continue;
    SegmentMap m(ids);
    const double loss = segmentation_loss(s, m, gamma);
    if (loss < best) {
      best = loss;
      if (argmin) *argmin = m;
    }
  }
  return best;
}

SegSignal signal_of(std::vector<std::vector<double>> rows, std::vector<std::size_t> starts = {0}) {
  SegSignal s;
  s.values = Matrix<double>(rows.size(), rows.front().size());
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t t = 0; t < rows[j].size(); ++t) s.values(j, t) = rows[j][t];
  }
  s.chrom_starts = std::move(starts);
  return s;
}

}  // namespace

TEST_CASE("normalization is log2 of depth over the sample median") {
  ReadData d;
  d.total = Matrix<int>(3, 2);
  d.mutant = Matrix<int>(3, 2, 0);
  const int v[3][2] = {{10, 0}, {20, 40}, {40, 20}};
  for (int j = 0; j < 3; ++j) {
    for (int t = 0; t < 2; ++t) d.total(j, t) = v[j][t];
  }
  d.coverage = {20, 20};
  d.positions = {{"1", 1}, {"1", 2}, {"2", 1}};
  d.locus_ids = {"a", "b", "c"};
  const auto s = normalize_reads(d);
  CHECK(s.values(0, 0) == doctest::Approx(-1.0));
  CHECK(s.values(1, 0) == doctest::Approx(0.0));
  CHECK(s.values(2, 0) == doctest::Approx(1.0));
  CHECK(s.values(0, 1) == doctest::Approx(std::log2(0.5 / 20.0)));  // zero reads floored at 0.5
  CHECK(s.chrom_starts == std::vector<std::size_t>{0, 2});

  d.total = Matrix<int>(3, 2, 0);
  CHECK_THROWS_AS(normalize_reads(d), Error);
}

TEST_CASE("multipcf matches exhaustive search on random signals") {
  std::mt19937_64 rng(11);
  std::normal_distribution<double> noise(0.0, 0.5);
  for (int inst = 0; inst < 200; ++inst) {
    const std::size_t n = 1 + rng() % 10;
    const std::size_t T = 1 + rng() % 3;
    SegSignal s;
    s.values = Matrix<double>(n, T);
    for (auto& x : s.values.data()) x = noise(rng) + ((rng() % 3 == 0) ? 2.0 : 0.0);
    s.chrom_starts = {0};
    for (std::size_t j = 1; j < n; ++j) {
      if (rng() % 5 == 0) s.chrom_starts.push_back(j);
    }
    const double gamma = 0.05 + 0.1 * static_cast<double>(rng() % 20);
    SegmentMap best_map;
    const double best = brute_force(s, gamma, &best_map);
    const auto dp = multipcf(s, gamma);
    CHECK(segmentation_loss(s, dp, gamma) == doctest::Approx(best).epsilon(1e-12));
    CHECK(dp == best_map);
  }
}

TEST_CASE("step signal splits at the change and never across chromosomes") {
  const auto s = signal_of({{0}, {0}, {0}, {5}, {5}, {5}});
  const auto m = multipcf(s, 1.0);
  CHECK(m.ids() == std::vector<int>{0, 0, 0, 1, 1, 1});
  const auto flat = signal_of({{1, 2}, {1, 2}, {1, 2}, {1, 2}}, {0, 2});
  CHECK(multipcf(flat, 0.5).ids() == std::vector<int>{0, 0, 1, 1});
  CHECK_THROWS_AS(multipcf(flat, 0.0), Error);
}

TEST_CASE("exact ties prefer fewer segments") {
  // Splitting {0, 2} saves RSS 2, exactly the penalty.
  const auto s = signal_of({{0}, {2}});
  CHECK(multipcf(s, 2.0).num_segments() == 1);
  CHECK(multipcf(s, 1.999).num_segments() == 2);
}

TEST_CASE("BIC selection over penalties") {
  const auto s = signal_of({{0.1}, {-0.1}, {0.0}, {3.0}, {3.1}, {2.9}});
  const double grid[] = {1.0, 100.0};
  const auto sel = select_gamma(s, grid);
  REQUIRE(sel.candidates.size() == 2);
  const double nT = 6.0;
  for (const auto& c : sel.candidates) {
    const double bic = nT * std::log(c.rss / nT) + static_cast<double>(c.num_segments) * 2.0 * std::log(nT);
    CHECK(c.bic == doctest::Approx(bic));
  }
  CHECK(sel.segments.num_segments() == 2);
  CHECK(sel.gamma == 1.0);

  // A zero-residual fit has BIC -inf and wins outright.
  const auto exact = signal_of({{1.0}, {1.0}, {4.0}});
  const double g2[] = {0.1, 100.0};
  const auto zero = select_gamma(exact, g2);
  CHECK(zero.gamma == 0.1);
  CHECK(zero.segments.num_segments() == 2);
  CHECK(zero.candidates[0].bic == -std::numeric_limits<double>::infinity());
  const double none[] = {-1.0};
  CHECK_THROWS_AS(select_gamma(s, none), Error);
}

TEST_CASE("equal BIC goes to the larger penalty") {
  const auto s = signal_of({{0.1}, {-0.1}, {0.0}, {3.0}, {3.1}, {2.9}});
  const double grid[] = {1.0, 2.0};
  CHECK(select_gamma(s, grid).gamma == 2.0);
}

TEST_CASE("default penalty grid scales with samples") {
  CHECK(default_gamma_grid(4) == std::vector<double>{20, 40, 80, 160, 320});
}
