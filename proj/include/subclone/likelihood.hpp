#pragma once

#include <span>
#include <vector>

#include "subclone/model.hpp"

namespace subclone {

struct Vaf {
  double p = 0.0;
  bool defined = false;
};

/// Expected variant allele fraction (Z'F) / (L'F) for one locus in one sample.
Vaf vaf(std::span<const int> mutant, std::span<const int> total, std::span<const double> fractions);

/// log Binomial(x | d, m / (m + n)) + log Poisson(d | phi (m + n) / 2), written in the
/// cancelled form x log m + (d - x) log n + d log(phi / 2) - phi (m + n) / 2 - log x! - log (d - x)!.
/// `mutant_mean` = Z'F and `normal_mean` = (L - Z)'F. Returns -inf for impossible counts.
double read_loglik(int total_reads, int mutant_reads, double coverage, double mutant_mean, double normal_mean);

/// Read data, segmentation and hyperparameters for a fixed number of subclones, with the
/// count-only terms of the likelihood precomputed.
class Model {
 public:
  Model(ReadData data, SegmentMap segments, Hyperparams hyper, std::size_t num_clones);

  const ReadData& data() const { return data_; }
  const SegmentMap& segments() const { return segments_; }
  const Hyperparams& hyper() const { return hyper_; }
  std::size_t num_clones() const { return num_clones_; }
  std::size_t num_loci() const { return data_.num_loci(); }
  std::size_t num_samples() const { return data_.num_samples(); }

  /// Canonical trees of size K (empty when K exceeds the enumeration cap).
  const std::vector<Tree>& trees() const { return trees_; }

  double cell_loglik(std::size_t locus, std::size_t sample, double mutant_mean, double normal_mean) const;

  /// Log-likelihood of one locus across samples; `cell` from clone_cellularity.
  double locus_loglik(std::size_t locus, const SnvOrigin& snv, const CnvOrigin& cnv,
                      const Matrix<double>& cell) const;
  /// Log-likelihood of one locus in one sample.
  double locus_sample_loglik(std::size_t locus, std::size_t sample, const SnvOrigin& snv, const CnvOrigin& cnv,
                             const Matrix<double>& cell) const;

  /// Full log-likelihood given the cellularity matrix of the state's tree and fractions.
  double loglik(const ChainState& state, const Matrix<double>& cell) const;
  double loglik(const ChainState& state) const;

  /// Every locus of every segment respects the copy-number cap.
  bool within_cap(const ChainState& state) const;
  bool segment_within_cap(const Tree& tree, std::span<const SnvOrigin> snv, std::size_t segment,
                          const CnvOrigin& cnv) const;

  /// Throws if the state does not fit this model's dimensions or ranges.
  void check_state(const ChainState& state) const;

 private:
  ReadData data_;
  SegmentMap segments_;
  Hyperparams hyper_;
  std::size_t num_clones_;
  Matrix<double> constant_;  // -log x! - log (d-x)! + d log(phi/2)
  std::vector<Tree> trees_;
};

/// Observation log-likelihood (binomial mutant reads times Poisson depth).
double loglik_reads(const ChainState& state, const ReadData& data, const SegmentMap& segments);

double logprior_theta(const Matrix<double>& theta, double gamma);
double logprior_theta_entry(double theta, double gamma);

/// log P(origin = (k, c)) = log zeta^c - log((K-1) sum_c' zeta^c').
double logprior_snv_entry(const SnvOrigin& snv, std::size_t num_clones, int max_snv_copies, double zeta);
double logprior_snv(std::span<const SnvOrigin> snv, std::size_t num_clones, int max_snv_copies, double zeta);

/// Number of non-null CNV states per segment: (K-1) * M_C.
std::size_t num_cnv_alternatives(std::size_t num_clones, int max_total_copies);
double logprior_cnv_entry(const CnvOrigin& cnv, double pi, std::size_t num_clones, int max_total_copies);
double logprior_cnv(std::span<const CnvOrigin> cnv, double pi, std::size_t num_clones, int max_total_copies);

double logprior_pi(double pi, double a, double b);
/// Uniform over the (K-1)! canonical trees.
double logprior_tree(std::size_t num_clones);

/// Sum of all prior log-densities; -inf outside the copy-number cap.
double log_prior(const ChainState& state, const Model& model);

/// beta * log-likelihood + log prior. Only the likelihood is tempered.
double log_posterior_kernel(const ChainState& state, const Model& model, double beta);

/// All (k, c) SNV origin states in enumeration order.
std::vector<SnvOrigin> snv_states(std::size_t num_clones, int max_snv_copies);
/// The null state followed by all (k, c) CNV states, c in {-2..M_C-2} \ {0}.
std::vector<CnvOrigin> cnv_states(std::size_t num_clones, int max_total_copies);

}  // namespace subclone
