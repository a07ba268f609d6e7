#include "subclone/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <random>

#include "subclone/likelihood.hpp"

namespace subclone {

Genotypes Scenario::genotypes(int max_total_copies) const {
  return expand_genotypes(tree, snv, cnv, segments, max_total_copies);
}

bool tree_identifiable(const Tree& tree, const Matrix<double>& f, double margin) {
  const std::size_t K = tree.size();
  const std::size_t T = f.cols();
  const Matrix<double> cell = clone_cellularity(tree, f);
  // Odometer over parent choices for nodes 1..K-1 (any other node), keeping acyclic ones.
  std::vector<int> parent(K, 0);
  parent[0] = -1;
  while (true) {
    bool acyclic = true;
    for (std::size_t k = 1; k < K && acyclic; ++k) {
      int v = static_cast<int>(k);
      for (std::size_t steps = 0; v != 0; ++steps) {
        if (steps > K) {
          acyclic = false;
          break;
        }
        v = parent[static_cast<std::size_t>(v)];
      }
    }
    bool same = true;
    for (std::size_t k = 1; k < K; ++k) same = same && parent[k] == tree.parent(static_cast<int>(k));
    if (acyclic && !same) {
      bool excluded = false;
      for (std::size_t t = 0; t < T && !excluded; ++t) {
        for (std::size_t k = 0; k < K && !excluded; ++k) {
          double implied = k == 0 ? 1.0 : cell(k, t);
          for (std::size_t c = 1; c < K; ++c) {
            if (parent[c] == static_cast<int>(k)) implied -= cell(c, t);
          }
          excluded = implied < -margin;
        }
      }
      if (!excluded) return false;
    }
    std::size_t k = 1;
    for (; k < K; ++k) {
      if (++parent[k] == static_cast<int>(k)) ++parent[k];
      if (parent[k] < static_cast<int>(K)) break;
      parent[k] = 0;
    }
    if (k == K) break;
  }
  return true;
}

Scenario build_scenario(const Tree& tree, double depth, std::uint64_t seed, const ScenarioOptions& o) {
  const std::size_t K = tree.size();
  const std::size_t J = o.num_loci;
  const std::size_t T = o.num_samples;
  if (K < 2) throw Error("a scenario needs at least one tumor subclone");
  if (J < K - 1) throw Error("too few loci for one SNV block per subclone");
  if (T < 1 || o.segment_length < 1) throw Error("invalid scenario dimensions");
  if (!(depth > 0.0)) throw Error("depth must be positive");
  Rng rng = make_stream(seed, 0);

  Scenario sc;
  sc.tree = tree;
  sc.seed = seed;
  sc.coverage.assign(T, depth);

  // Contiguous blocks, one per tumor subclone in turn.
  sc.snv.resize(J);
  for (std::size_t j = 0; j < J; ++j) sc.snv[j] = {static_cast<int>(1 + j * (K - 1) / J), 1};

  std::vector<std::size_t> lengths;
  for (std::size_t b = 0; b < J; b += o.segment_length) lengths.push_back(std::min(o.segment_length, J - b));
  sc.segments = SegmentMap::from_lengths(lengths);
  const std::size_t S = lengths.size();
  sc.cnv.assign(S, CnvOrigin{});
  const auto num_cnv = static_cast<std::size_t>(std::lround(o.cnv_fraction * static_cast<double>(S)));
  std::vector<std::size_t> order(S);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::sort(order.begin(), order.begin() + static_cast<long>(std::min(num_cnv, S)));
  for (std::size_t i = 0; i < std::min(num_cnv, S); ++i) {
    sc.cnv[order[i]] = {static_cast<int>(1 + i % (K - 1)), i % 2 == 0 ? 1 : -1};
  }

  std::gamma_distribution<double> g(o.dirichlet, 1.0);
  Matrix<double> f(K, T);
  for (int attempt = 0;; ++attempt) {
    if (attempt == o.max_attempts) throw Error("could not draw identifiable subclone fractions");
    for (std::size_t t = 0; t < T; ++t) {
      double sum = 0.0;
      for (std::size_t k = 0; k < K; ++k) sum += f(k, t) = g(rng);
      for (std::size_t k = 0; k < K; ++k) f(k, t) /= sum;
    }
    bool visible = true;
    for (std::size_t k = 1; k < K && visible; ++k) {
      bool seen = false;
      for (std::size_t t = 0; t < T; ++t) seen = seen || f(k, t) > o.min_fraction;
      visible = seen;
    }
    if (visible && tree_identifiable(tree, f, o.tree_margin)) break;
  }
  sc.fractions = std::move(f);
  return sc;
}

ReadData generate_reads(const Scenario& sc, Rng& rng) {
  const std::size_t J = sc.num_loci();
  const std::size_t T = sc.num_samples();
  const std::size_t K = sc.num_clones();
  const Genotypes g = sc.genotypes(std::numeric_limits<int>::max());
  ReadData out;
  out.total = Matrix<int>(J, T);
  out.mutant = Matrix<int>(J, T);
  out.coverage = sc.coverage;
  for (std::size_t j = 0; j < J; ++j) {
    out.positions.push_back({"1", static_cast<std::int64_t>(j + 1) * 1000});
    out.locus_ids.push_back("L" + std::to_string(j + 1));
  }
  for (std::size_t t = 0; t < T; ++t) out.sample_names.push_back("S" + std::to_string(t + 1));
  std::vector<double> col(K);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = 0; k < K; ++k) col[k] = sc.fractions(k, t);
    for (std::size_t j = 0; j < J; ++j) {
      double lf = 0.0;
      for (std::size_t k = 0; k < K; ++k) lf += g.total(j, k) * col[k];
      const auto v = vaf(g.mutant.row(j), g.total.row(j), col);
      const int d = lf > 0.0 ? std::poisson_distribution<int>(sc.coverage[t] * lf / 2.0)(rng) : 0;
      const int x = d > 0 && v.defined ? std::binomial_distribution<int>(d, std::clamp(v.p, 0.0, 1.0))(rng) : 0;
      out.total(j, t) = d;
      out.mutant(j, t) = x;
    }
  }
  return out;
}

}  // namespace subclone
