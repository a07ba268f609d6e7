#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "subclone/likelihood.hpp"
#include "subclone/model.hpp"

namespace subclone {

using Rng = std::mt19937_64;

/// Independent generator for (master seed, stream index).
Rng make_stream(std::uint64_t master_seed, std::uint64_t stream);

/// Per-entry precision s of the Gamma(s * theta, rate s) proposal, adapted in windows of
/// 50 proposals towards an acceptance rate in [0.4, 0.65].
struct ProposalTuner {
  static constexpr double kLowAcceptance = 0.4;
  static constexpr double kHighAcceptance = 0.65;
  static constexpr double kFactor = 1.5;
  static constexpr int kWindow = 50;

  Matrix<double> precision;
  Matrix<int> window_accepted;
  Matrix<int> window_proposed;
  std::int64_t accepted = 0;
  std::int64_t proposed = 0;
  bool adapting = true;

  ProposalTuner() = default;
  ProposalTuner(std::size_t num_clones, std::size_t num_samples, double initial_precision = 10.0);

  void record(std::size_t k, std::size_t t, bool was_accepted);
  double acceptance_rate() const;
};

struct MoveStats {
  std::int64_t rewire_proposed = 0;
  std::int64_t rewire_accepted = 0;
  std::int64_t slice_calls = 0;
  std::int64_t slice_changed = 0;
  std::int64_t slice_capped = 0;
  std::int64_t degenerate_snv = 0;
  std::int64_t degenerate_cnv = 0;
};

/// Gamma(shape, rate) log-density.
double log_gamma_density(double x, double shape, double rate);

/// Metropolis-Hastings update of every theta entry in row-major order.
void step_theta(ChainState& state, const Model& model, double beta, ProposalTuner& tuner, Rng& rng);

/// Unnormalized log conditional weights of every SNV origin state (snv_states order) for one
/// locus; -inf for states that break the copy-number cap.
std::vector<double> snv_conditional_logweights(const ChainState& state, const Model& model, double beta,
                                               std::size_t locus);
/// Same for one segment's CNV origin (cnv_states order).
std::vector<double> cnv_conditional_logweights(const ChainState& state, const Model& model, double beta,
                                               std::size_t segment);

/// Categorical draw from unnormalized log weights; returns -1 when every weight is -inf.
int sample_log_weights(std::span<const double> log_weights, Rng& rng);

void gibbs_snv(ChainState& state, const Model& model, double beta, Rng& rng, MoveStats* stats = nullptr);
void gibbs_cnv(ChainState& state, const Model& model, double beta, Rng& rng, MoveStats* stats = nullptr);

/// Beta(n + a, S - n + b) draw, n = number of CNV-free segments.
double sample_pi(std::span<const CnvOrigin> cnv, double a_pi, double b_pi, Rng& rng);
void gibbs_pi(ChainState& state, const Model& model, Rng& rng);

/// Theta after attaching leaf `leaf` (parent `old_parent`) to `new_parent`: the old parent
/// absorbs the leaf's mass and the leaf takes min(theta_leaf, theta_new_parent) from the new
/// parent, per sample.
Matrix<double> rewire_theta(const Matrix<double>& theta, int leaf, int old_parent, int new_parent);

/// Leaf-rewire Metropolis-Hastings move on the tree. Returns true if accepted.
bool tree_rewire_mh(ChainState& state, const Model& model, double beta, Rng& rng, MoveStats* stats = nullptr);

/// Log of the tree's full conditional kernel (up to a tree-independent constant).
double tree_log_kernel(const ChainState& state, const Model& model, double beta, const Tree& tree);

/// Log-scale slice sampling over all canonical trees with at most 1000 proposals.
/// Returns true if the tree changed.
bool tree_slice(ChainState& state, const Model& model, double beta, Rng& rng, MoveStats* stats = nullptr);
inline constexpr int kSliceProposalCap = 1000;

struct SweepMoves {
  bool theta = true;
  bool snv = true;
  bool cnv = true;
  bool pi = true;
  bool tree = true;
};

/// One iteration: theta, SNV origins, CNV origins, pi, then one tree move.
void sweep(ChainState& state, const Model& model, double beta, double slice_probability, ProposalTuner& tuner,
           Rng& rng, MoveStats& stats, const SweepMoves& moves = {});

/// Draw from the priors, redrawing CNV origins per segment until they respect the copy cap.
ChainState initial_state(const Model& model, Rng& rng);

/// Exact draw from the joint prior restricted to the copy cap (whole-state rejection).
/// Returns false if `max_attempts` draws all failed.
bool sample_prior_state(const Model& model, Rng& rng, ChainState& out, int max_attempts = 100000);

struct PriorTrace {
  std::vector<double> neg_loglik;
  bool used_mcmc = false;
};

/// Negative log-likelihood of `count` prior draws. Falls back to a beta = 0 chain when the
/// copy cap makes rejection sampling impractical.
PriorTrace sample_prior_trace(const Model& model, std::size_t count, std::uint64_t seed);

struct SamplerConfig {
  std::size_t num_chains = 8;
  double min_beta = 0.3;      // geometric ladder end point
  std::vector<double> betas;  // explicit ladder; overrides num_chains / min_beta when set
  std::size_t tune = 2000;
  std::size_t burnin = 4000;
  std::size_t keep = 4000;
  std::size_t swap_interval = 10;
  double slice_probability = 0.15;
  std::uint64_t seed = 1;
  std::size_t threads = 1;

  /// beta_j = min_beta^((j-1)/(c-1)), or `betas` if given.
  std::vector<double> ladder() const;
  void validate() const;
};

struct TraceStore {
  std::vector<double> betas;
  std::vector<ChainState> samples;              // cold chain, kept iterations
  std::vector<std::vector<double>> neg_loglik;  // per temperature, kept iterations
  std::vector<MoveStats> moves;                 // per temperature
  std::vector<double> theta_acceptance;         // per temperature
  std::vector<std::int64_t> swap_attempts;      // per adjacent pair
  std::vector<std::int64_t> swap_accepts;

  friend bool operator==(const TraceStore& a, const TraceStore& b) {
    return a.betas == b.betas && a.samples == b.samples && a.neg_loglik == b.neg_loglik &&
           a.swap_attempts == b.swap_attempts && a.swap_accepts == b.swap_accepts &&
           a.theta_acceptance == b.theta_acceptance;
  }
};

/// log acceptance ratio for exchanging states between temperatures beta_i and beta_j.
double swap_log_acceptance(double beta_i, double beta_j, double neg_loglik_i, double neg_loglik_j);

/// Parallel-tempered run of tune + burn-in + keep sweeps per chain. Deterministic for a
/// given seed regardless of the thread count.
TraceStore run_tempered(const Model& model, const SamplerConfig& config);

struct Geweke {
  double z = 0.0;
  bool defined = false;
};

/// Geweke z-score between the first `frac_a` and last `frac_b` of a trace. The variance of
/// each window mean is the batch-means estimate of the spectral density at zero, using
/// floor(sqrt(n)) batches.
Geweke geweke_z(std::span<const double> trace, double frac_a = 0.1, double frac_b = 0.5);

}  // namespace subclone
