#pragma once

#include <span>
#include <vector>

#include "subclone/model.hpp"

namespace subclone {

/// Relabels non-root nodes of a state. `perm[new] = old`, perm[0] must be 0.
/// Returns false (and leaves `out` untouched) if the relabeled tree is not canonical.
bool permute_state(const ChainState& state, std::span<const int> perm, ChainState& out);

enum class AlignTrigger {
  tree_change,  // only samples whose tree differs from the previous sample's
  every_sample,  // also catches relabeled states brought in by tempering swaps
};

/// Label-switching alignment: a triggered sample is relabeled by the permutation of
/// non-normal subclones minimizing mean |Z - Z_prev| against the previous aligned sample
/// (ties: lexicographically smallest), if that permutation keeps the tree canonical.
std::vector<ChainState> align_samples(std::span<const ChainState> samples, const SegmentMap& segments,
                                      int max_total_copies, AlignTrigger trigger = AlignTrigger::every_sample);

struct TreeCount {
  Tree tree;
  std::size_t count = 0;
};

struct PointEstimate {
  Tree tree;
  Matrix<int> mutant;     // median Z, J x K
  Matrix<int> total;      // median L, J x K
  Matrix<double> fractions;  // mean F, K x T
  std::vector<TreeCount> tree_counts;  // in order of first appearance
  bool multiple_trees = false;
  std::size_t num_used = 0;
};

/// Majority tree (ties: first seen), then elementwise medians of Z and L and mean F over
/// that tree's samples. Even-count medians round half down.
PointEstimate point_estimate(std::span<const ChainState> aligned, const SegmentMap& segments,
                             int max_total_copies);

/// C[j,t] = sum of F[k,t] over k with Z[j,k] > 0.
Matrix<double> cellularity(const Matrix<int>& mutant, const Matrix<double>& fractions);

/// Group label per locus; loci share a label iff their sets {k : Z[j,k] > 0} coincide.
std::vector<int> mutation_partition(const Matrix<int>& mutant);

/// (agreeing pairs) / C(J, 2).
double rand_index(std::span<const int> a, std::span<const int> b);

/// Mean absolute elementwise difference.
double cellularity_error(const Matrix<double>& truth, const Matrix<double>& estimate);

struct FitError {
  double value = 0.0;
  bool defined = false;
};

/// Mean |p_hat - x/d| over cells with d > 0.
FitError vaf_fit_error(const Matrix<int>& mutant, const Matrix<int>& total, const Matrix<double>& fractions,
                       const ReadData& data);

/// Rand index of every sample's mutation partition against a reference partition.
std::vector<double> posterior_rand_index(std::span<const ChainState> samples, std::span<const int> reference,
                                         const SegmentMap& segments, int max_total_copies);

}  // namespace subclone
