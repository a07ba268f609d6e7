#pragma once

#include <cstdint>
#include <vector>

#include "subclone/model.hpp"
#include "subclone/sampler.hpp"

namespace subclone {

struct ScenarioOptions {
  std::size_t num_loci = 200;
  std::size_t num_samples = 4;
  std::size_t segment_length = 20;
  double cnv_fraction = 0.25;
  double dirichlet = 1.5;
  double min_fraction = 0.05;  // every tumor subclone exceeds this in some sample
  // Every other labeled tree must imply a fraction below -margin somewhere, so that the
  // true tree is the only one consistent with the SNV cellularities.
  // 0.1 is about two standard errors of a fraction difference at depth 60, 15 loci per clone.
  double tree_margin = 0.1;
  int max_attempts = 1000000;
};

struct Scenario {
  Tree tree;
  std::vector<SnvOrigin> snv;
  std::vector<CnvOrigin> cnv;
  SegmentMap segments;
  Matrix<double> fractions;  // K x T
  std::vector<double> coverage;
  std::uint64_t seed = 0;

  std::size_t num_clones() const { return tree.size(); }
  std::size_t num_loci() const { return snv.size(); }
  std::size_t num_samples() const { return fractions.cols(); }
  Genotypes genotypes(int max_total_copies = 4) const;
};

Scenario build_scenario(const Tree& tree, double depth, std::uint64_t seed, const ScenarioOptions& options = {});

/// True iff no other labeled tree on the same nodes is consistent with these fractions.
bool tree_identifiable(const Tree& tree, const Matrix<double>& fractions, double margin);

/// d ~ Poisson(phi L'F / 2), x ~ Binomial(d, Z'F / L'F).
ReadData generate_reads(const Scenario& scenario, Rng& rng);

}  // namespace subclone
