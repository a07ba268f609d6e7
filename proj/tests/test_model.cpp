#include <doctest.h>

#include <algorithm>
#include <random>
#include <set>

#include "subclone/model.hpp"

using namespace subclone;

namespace {

Tree tree_of(std::vector<int> pv) { return Tree::from_parent_vector(pv); }

// Ancestor walk, independent of the descendant masks.
bool carries(const Tree& t, int node, int origin) {
  for (int v = node; v >= 0; v = t.parent(v)) {
    if (v == origin) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("parent vectors round-trip and reject non-canonical input") {
  const Tree t = tree_of({0, 1, 2, 2});
  CHECK(t.size() == 4);
  CHECK(t.to_string() == "(0,1,2,2)");
  CHECK(t.parent_vector() == std::vector<int>{0, 1, 2, 2});
  CHECK(t.parent(0) == -1);
  CHECK(t.parent(3) == 1);
  CHECK(t.children(1) == std::vector<int>{2, 3});
  CHECK(t.leaves() == std::vector<int>{2, 3});
  CHECK(t.descendants(1) == std::vector<int>{1, 2, 3});
  CHECK(t.is_descendant(3, 1));
  CHECK_FALSE(t.is_descendant(1, 3));

  CHECK_THROWS_AS(tree_of({1, 1}), Error);        // root must have parent 0
  CHECK_THROWS_AS(tree_of({0, 2}), Error);        // parent index not smaller
  CHECK_THROWS_AS(tree_of({0, 1, 3}), Error);
  CHECK_THROWS_AS(tree_of({}), Error);
}

TEST_CASE("rewiring a leaf keeps the tree canonical") {
  const Tree t = tree_of({0, 1, 2, 2});
  const Tree r = t.rewired(3, 0);
  CHECK(r.to_string() == "(0,1,2,1)");
  CHECK_THROWS_AS(t.rewired(2, 3), Error);
}

TEST_CASE("enumeration yields (K-1)! distinct canonical trees") {
  std::size_t factorial = 1;
  for (std::size_t K = 1; K <= 7; ++K) {
    if (K > 1) factorial *= K - 1;
    const auto trees = enumerate_trees(K);
    CHECK(trees.size() == factorial);
    std::set<std::vector<int>> seen;
    for (const auto& t : trees) seen.insert(t.parent_vector());
    CHECK(seen.size() == factorial);
    CHECK(std::is_sorted(trees.begin(), trees.end()));
  }
  CHECK_THROWS_AS(enumerate_trees(kMaxEnumeratedNodes + 1), Error);
}

TEST_CASE("shape equality ignores labels") {
  CHECK(same_shape(tree_of({0, 1, 1, 2}), tree_of({0, 1, 1, 3})));
  CHECK_FALSE(same_shape(tree_of({0, 1, 2, 2}), tree_of({0, 1, 1, 3})));
  CHECK_FALSE(same_shape(tree_of({0, 1, 2}), tree_of({0, 1, 1})));
  CHECK(same_shape(tree_of({0, 1, 2, 2, 3}), tree_of({0, 1, 2, 2, 4})));
}

TEST_CASE("genotype expansion matches an ancestor-walk oracle") {
  std::mt19937_64 rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t K = 2 + rng() % 5;
    std::vector<int> pv(K, 0);
    for (std::size_t k = 1; k < K; ++k) pv[k] = 1 + static_cast<int>(rng() % k);
    const Tree tree = tree_of(pv);
    const std::size_t J = 1 + rng() % 8;
    const auto segments = SegmentMap::single(J);
    std::vector<SnvOrigin> snv(J);
    for (auto& z : snv) z = {1 + static_cast<int>(rng() % (K - 1)), 1 + static_cast<int>(rng() % 2)};
    CnvOrigin cnv;
    if (rng() % 2) {
      const int changes[] = {-2, -1, 1, 2};
      cnv = {1 + static_cast<int>(rng() % (K - 1)), changes[rng() % 4]};
    }
    const std::vector<CnvOrigin> cnvs{cnv};
    const int cap = 4;
    const auto g = expand_genotypes(tree, snv, cnvs, segments, cap);
    bool within = true;
    for (std::size_t j = 0; j < J; ++j) {
      bool locus_ok = true;
      for (std::size_t k = 0; k < K; ++k) {
        const int z = carries(tree, static_cast<int>(k), snv[j].clone) ? snv[j].copies : 0;
        const int n = 2 + (!cnv.is_null() && carries(tree, static_cast<int>(k), cnv.clone) ? cnv.change : 0);
        CHECK(g.mutant(j, k) == z);
        CHECK(g.total(j, k) == n + z);
        locus_ok = locus_ok && n + z >= 0 && n + z <= cap;
      }
      CHECK(locus_within_cap(tree, snv[j], cnv, cap) == locus_ok);
      within = within && locus_ok;
    }
    CHECK(g.within_cap == within);
  }
}

TEST_CASE("cellularity sums fractions over descendants") {
  const Tree tree = tree_of({0, 1, 1, 2, 2});
  Matrix<double> theta(5, 2);
  for (std::size_t k = 0; k < 5; ++k) {
    theta(k, 0) = 1.0 + static_cast<double>(k);
    theta(k, 1) = 2.0;
  }
  const auto f = fractions(theta);
  CHECK(f(0, 0) == doctest::Approx(1.0 / 15.0));
  CHECK(f(3, 1) == doctest::Approx(0.2));
  const auto cell = clone_cellularity(tree, f);
  for (std::size_t k = 0; k < 5; ++k) {
    for (std::size_t t = 0; t < 2; ++t) {
      double s = 0.0;
      for (std::size_t m = 0; m < 5; ++m) {
        if (carries(tree, static_cast<int>(m), static_cast<int>(k))) s += f(m, t);
      }
      CHECK(cell(k, t) == doctest::Approx(s).epsilon(1e-14));
    }
  }
  CHECK(cell(0, 0) == doctest::Approx(1.0));
}

TEST_CASE("segment maps are contiguous and respect chromosomes") {
  const std::size_t lengths[] = {2, 3, 1};
  const auto m = SegmentMap::from_lengths(lengths);
  CHECK(m.num_loci() == 6);
  CHECK(m.num_segments() == 3);
  CHECK(m.begin(1) == 2);
  CHECK(m.end(1) == 5);
  CHECK(m.segment_of(5) == 2);
  CHECK_THROWS_AS(SegmentMap(std::vector<int>{0, 1, 0}), Error);
  CHECK_THROWS_AS(SegmentMap(std::vector<int>{1, 1}), Error);

  ReadData d;
  d.total = Matrix<int>(3, 1, 10);
  d.mutant = Matrix<int>(3, 1, 1);
  d.coverage = {10.0};
  d.positions = {{"1", 5}, {"1", 9}, {"2", 1}};
  d.locus_ids = {"a", "b", "c"};
  CHECK_NOTHROW(SegmentMap(std::vector<int>{0, 0, 1}).check_against(d));
  CHECK_THROWS_AS(SegmentMap::single(3).check_against(d), Error);
  CHECK_THROWS_AS(SegmentMap::single(2).check_against(d), Error);
}

TEST_CASE("chromosomes sort naturally") {
  CHECK(compare_chrom("chr2", "chr10") < 0);
  CHECK(compare_chrom("2", "chr2") == 0);
  CHECK(compare_chrom("chr10", "chrX") < 0);
  CHECK(position_less({"1", 10}, {"1", 11}));
  CHECK(position_less({"9", 100}, {"10", 1}));
}

TEST_CASE("read data validation") {
  ReadData d;
  d.total = Matrix<int>(2, 1, 10);
  d.mutant = Matrix<int>(2, 1, 3);
  d.coverage = {30.0};
  d.positions = {{"1", 1}, {"1", 2}};
  d.locus_ids = {"a", "b"};
  CHECK_NOTHROW(d.validate());
  auto bad = d;
  bad.mutant(1, 0) = 11;
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = d;
  bad.positions[1] = {"1", 1};
  CHECK_THROWS_AS(bad.validate(), Error);
  bad = d;
  bad.coverage = {0.0};
  CHECK_THROWS_AS(bad.validate(), Error);
  const std::size_t rows[] = {1};
  const auto sub = d.select_loci(rows);
  CHECK(sub.num_loci() == 1);
  CHECK(sub.locus_ids == std::vector<std::string>{"b"});
}

TEST_CASE("hyperparameter validation") {
  Hyperparams h;
  CHECK_NOTHROW(h.validate());
  h.max_total_copies = 1;
  CHECK_THROWS_AS(h.validate(), Error);
  h = {};
  h.zeta = 0.0;
  CHECK_THROWS_AS(h.validate(), Error);
  h = {};
  h.gamma = -1.0;
  CHECK_THROWS_AS(h.validate(), Error);
}
