#include <doctest.h>

#include <cmath>
#include <vector>

#include "subclone/simulate.hpp"

using namespace subclone;

namespace {

Tree tree_of(std::vector<int> pv) { return Tree::from_parent_vector(pv); }

}  // namespace

TEST_CASE("smallest benchmark setting: K=3 at depth 40") {
  const auto sc = build_scenario(tree_of({0, 1, 1}), 40.0, 5);
  CHECK(sc.num_clones() == 3);
  CHECK(sc.num_loci() == 200);
  CHECK(sc.num_samples() == 4);
  CHECK(sc.segments.num_segments() == 10);
  for (double c : sc.coverage) CHECK(c == 40.0);
  std::size_t with_cnv = 0;
  for (const auto& c : sc.cnv) with_cnv += c.is_null() ? 0 : 1;
  CHECK(with_cnv == 3);  // round(0.25 * 10)
  for (std::size_t t = 0; t < sc.num_samples(); ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < 3; ++k) sum += sc.fractions(k, t);
    CHECK(sum == doctest::Approx(1.0));
  }
  for (std::size_t k = 1; k < 3; ++k) {
    double best = 0.0;
    for (std::size_t t = 0; t < sc.num_samples(); ++t) best = std::max(best, sc.fractions(k, t));
    CHECK(best > 0.05);
  }
  const auto g = sc.genotypes();
  CHECK(g.within_cap);
}

TEST_CASE("SNVs come in contiguous blocks over every tumor subclone") {
  ScenarioOptions o;
  o.num_loci = 60;
  const auto sc = build_scenario(tree_of({0, 1, 2, 2}), 60.0, 8, o);
  std::vector<int> count(4, 0);
  int switches = 0;
  for (std::size_t j = 0; j < sc.num_loci(); ++j) {
    CHECK(sc.snv[j].copies == 1);
    ++count[static_cast<std::size_t>(sc.snv[j].clone)];
    if (j > 0 && sc.snv[j].clone != sc.snv[j - 1].clone) ++switches;
  }
  CHECK(count[0] == 0);
  CHECK(count[1] == 20);
  CHECK(count[2] == 20);
  CHECK(count[3] == 20);
  CHECK(switches == 2);
}

TEST_CASE("without CNVs totals only gain from SNVs") {
  ScenarioOptions o;
  o.num_loci = 4;
  o.segment_length = 4;
  o.cnv_fraction = 0.0;
  const auto sc = build_scenario(tree_of({0, 1, 2}), 40.0, 2, o);
  CHECK(sc.segments.num_segments() == 1);
  const auto g = sc.genotypes();
  for (int v : g.total.data()) CHECK((v == 2 || v == 3));
}

TEST_CASE("same seed gives the same scenario") {
  const auto a = build_scenario(tree_of({0, 1, 2, 2}), 60.0, 17);
  const auto b = build_scenario(tree_of({0, 1, 2, 2}), 60.0, 17);
  const auto c = build_scenario(tree_of({0, 1, 2, 2}), 60.0, 18);
  CHECK(a.snv == b.snv);
  CHECK(a.cnv == b.cnv);
  CHECK(a.segments == b.segments);
  CHECK(a.fractions == b.fractions);
  CHECK_FALSE(a.fractions == c.fractions);
  Rng r1 = make_stream(17, 1), r2 = make_stream(17, 1);
  CHECK(generate_reads(a, r1) == generate_reads(b, r2));
}

TEST_CASE("fractions identify the tree") {
  // (0,1,2,2) with F = (0.1, 0.5, 0.2, 0.2): node 1 carries 0.9, nodes 2 and 3 carry 0.2.
  Matrix<double> f(4, 1);
  f.data() = {0.1, 0.5, 0.2, 0.2};
  // Putting 3 under 2 leaves node 2 a fraction of exactly 0, which still fits.
  CHECK_FALSE(tree_identifiable(tree_of({0, 1, 2, 2}), f, 0.0));
  Matrix<double> g(4, 2);
  g.data() = {0.1, 0.1, 0.1, 0.1, 0.7, 0.1, 0.1, 0.7};
  // 2 and 3 dominate different samples, so neither can sit under the other.
  CHECK(tree_identifiable(tree_of({0, 1, 2, 2}), g, 0.05));
  // 3 under 2 implies -0.6 for node 2 in the second sample.
  CHECK(tree_identifiable(tree_of({0, 1, 2, 2}), g, 0.55));
  CHECK_FALSE(tree_identifiable(tree_of({0, 1, 2, 2}), g, 0.65));
}

TEST_CASE("read depths and VAFs follow the model") {
  ScenarioOptions o;
  o.num_loci = 4;
  o.num_samples = 2;
  o.segment_length = 4;
  o.cnv_fraction = 0.0;
  auto sc = build_scenario(tree_of({0, 1, 1}), 50.0, 3, o);
  const auto g = sc.genotypes();
  Rng rng = make_stream(3, 1);
  const int reps = 10000;
  std::vector<double> sum_d(8, 0.0), sum_x(8, 0.0);
  for (int r = 0; r < reps; ++r) {
    const auto reads = generate_reads(sc, rng);
    for (std::size_t j = 0; j < 4; ++j)
      for (std::size_t t = 0; t < 2; ++t) {
        CHECK(reads.mutant(j, t) <= reads.total(j, t));
        sum_d[j * 2 + t] += reads.total(j, t);
        sum_x[j * 2 + t] += reads.mutant(j, t);
      }
  }
  for (std::size_t j = 0; j < 4; ++j)
    for (std::size_t t = 0; t < 2; ++t) {
      double lf = 0.0, zf = 0.0;
      for (std::size_t k = 0; k < 3; ++k) {
        lf += g.total(j, k) * sc.fractions(k, t);
        zf += g.mutant(j, k) * sc.fractions(k, t);
      }
      const double mean_d = 50.0 * lf / 2.0;
      const double se = std::sqrt(mean_d / reps);
      CHECK(std::abs(sum_d[j * 2 + t] / reps - mean_d) < 3.0 * se);
      const double mean_x = mean_d * zf / lf;  // Poisson thinning
      CHECK(std::abs(sum_x[j * 2 + t] / reps - mean_x) < 3.0 * std::sqrt(mean_x / reps));
    }
}

TEST_CASE("copy-neutral loci average the coverage and clean loci have no mutant reads") {
  ScenarioOptions o;
  o.num_loci = 1;
  o.num_samples = 1;
  o.segment_length = 1;
  o.cnv_fraction = 0.0;
  auto sc = build_scenario(tree_of({0, 1}), 80.0, 9, o);
  // No tumor cells: every cell is copy-neutral and p = 0.
  sc.fractions(0, 0) = 1.0;
  sc.fractions(1, 0) = 0.0;
  Rng rng = make_stream(9, 1);
  double sum = 0.0;
  const int reps = 10000;
  for (int r = 0; r < reps; ++r) {
    const auto reads = generate_reads(sc, rng);
    CHECK(reads.mutant(0, 0) == 0);
    sum += reads.total(0, 0);
  }
  CHECK(std::abs(sum / reps - 80.0) < 3.0 * std::sqrt(80.0 / reps));
}

TEST_CASE("observed VAF converges at high depth") {
  ScenarioOptions o;
  o.num_loci = 40;
  const auto sc = build_scenario(tree_of({0, 1, 2, 2}), 1e4, 21, o);
  Rng rng = make_stream(21, 1);
  const auto reads = generate_reads(sc, rng);
  const auto g = sc.genotypes();
  for (std::size_t j = 0; j < 40; ++j)
    for (std::size_t t = 0; t < 4; ++t) {
      double lf = 0.0, zf = 0.0;
      for (std::size_t k = 0; k < 4; ++k) {
        lf += g.total(j, k) * sc.fractions(k, t);
        zf += g.mutant(j, k) * sc.fractions(k, t);
      }
      const double vaf = double(reads.mutant(j, t)) / reads.total(j, t);
      CHECK(std::abs(vaf - zf / lf) < 0.03);
    }
}

TEST_CASE("invalid requests are rejected") {
  ScenarioOptions o;
  o.num_loci = 2;
  CHECK_THROWS_AS(build_scenario(tree_of({0, 1, 2, 2}), 60.0, 1, o), Error);
  CHECK_THROWS_AS(build_scenario(tree_of({0, 1, 1}), 0.0, 1), Error);
}
