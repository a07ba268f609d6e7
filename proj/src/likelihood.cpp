#include "subclone/likelihood.hpp"

#include <cmath>
#include <limits>

namespace subclone {

namespace {
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double count_constant(int d, int x, double phi) {
  return -std::lgamma(x + 1.0) - std::lgamma(d - x + 1.0) + d * std::log(phi / 2.0);
}

double cancelled_loglik(int d, int x, double phi, double m, double n, double constant) {
  double ll = constant - phi * (m + n) / 2.0;
  if (x > 0) {
    if (!(m > 0.0)) return kNegInf;
    ll += x * std::log(m);
  }
  if (d > x) {
    if (!(n > 0.0)) return kNegInf;
    ll += (d - x) * std::log(n);
  }
  return ll;
}

double snv_normaliser(int max_snv_copies, double zeta) {
  double s = 0.0;
  for (int c = 1; c <= max_snv_copies; ++c) s += std::pow(zeta, c);
  return s;
}

}  // namespace

Vaf vaf(std::span<const int> mutant, std::span<const int> total, std::span<const double> fractions) {
  double zf = 0.0, lf = 0.0;
  for (std::size_t k = 0; k < fractions.size(); ++k) {
    zf += mutant[k] * fractions[k];
    lf += total[k] * fractions[k];
  }
  if (!(lf > 0.0)) return {0.0, false};
  return {zf / lf, true};
}

double read_loglik(int total_reads, int mutant_reads, double coverage, double mutant_mean, double normal_mean) {
  return cancelled_loglik(total_reads, mutant_reads, coverage, mutant_mean, normal_mean,
                          count_constant(total_reads, mutant_reads, coverage));
}

// ---------------------------------------------------------------------------

Model::Model(ReadData data, SegmentMap segments, Hyperparams hyper, std::size_t num_clones)
    : data_(std::move(data)), segments_(std::move(segments)), hyper_(hyper), num_clones_(num_clones) {
  data_.validate();
  hyper_.validate();
  segments_.check_against(data_);
  if (num_clones_ < 2) throw Error("at least two subclones (normal plus one tumor) are required");
  if (num_clones_ > Tree::kMaxNodes) throw Error("too many subclones");
  constant_ = Matrix<double>(num_loci(), num_samples());
  for (std::size_t j = 0; j < num_loci(); ++j) {
    for (std::size_t t = 0; t < num_samples(); ++t) {
      constant_(j, t) = count_constant(data_.total(j, t), data_.mutant(j, t), data_.coverage[t]);
    }
  }
  if (num_clones_ <= kMaxEnumeratedNodes) trees_ = enumerate_trees(num_clones_);
}

double Model::cell_loglik(std::size_t j, std::size_t t, double m, double n) const {
  return cancelled_loglik(data_.total(j, t), data_.mutant(j, t), data_.coverage[t], m, n, constant_(j, t));
}

double Model::locus_sample_loglik(std::size_t j, std::size_t t, const SnvOrigin& snv, const CnvOrigin& cnv,
                                  const Matrix<double>& cell) const {
  const double m = snv.copies * cell(static_cast<std::size_t>(snv.clone), t);
  const double n = 2.0 + (cnv.is_null() ? 0.0 : cnv.change * cell(static_cast<std::size_t>(cnv.clone), t));
  return cell_loglik(j, t, m, n);
}

double Model::locus_loglik(std::size_t j, const SnvOrigin& snv, const CnvOrigin& cnv,
                           const Matrix<double>& cell) const {
  double ll = 0.0;
  for (std::size_t t = 0; t < num_samples(); ++t) ll += locus_sample_loglik(j, t, snv, cnv, cell);
  return ll;
}

double Model::loglik(const ChainState& s, const Matrix<double>& cell) const {
  double ll = 0.0;
  for (std::size_t j = 0; j < num_loci(); ++j) {
    ll += locus_loglik(j, s.snv[j], s.cnv[static_cast<std::size_t>(segments_.segment_of(j))], cell);
  }
  return ll;
}

double Model::loglik(const ChainState& s) const {
  return loglik(s, clone_cellularity(s.tree, fractions(s.theta)));
}

bool Model::segment_within_cap(const Tree& tree, std::span<const SnvOrigin> snv, std::size_t segment,
                               const CnvOrigin& cnv) const {
  for (std::size_t j = segments_.begin(segment); j < segments_.end(segment); ++j) {
    if (!locus_within_cap(tree, snv[j], cnv, hyper_.max_total_copies)) return false;
  }
  return true;
}

bool Model::within_cap(const ChainState& s) const {
  for (std::size_t seg = 0; seg < segments_.num_segments(); ++seg) {
    if (!segment_within_cap(s.tree, s.snv, seg, s.cnv[seg])) return false;
  }
  return true;
}

void Model::check_state(const ChainState& s) const {
  const int K = static_cast<int>(num_clones_);
  if (s.theta.rows() != num_clones_ || s.theta.cols() != num_samples()) throw Error("theta has the wrong shape");
  if (s.tree.size() != num_clones_) throw Error("tree size does not match the number of subclones");
  if (s.snv.size() != num_loci()) throw Error("one SNV origin per locus is required");
  if (s.cnv.size() != segments_.num_segments()) throw Error("one CNV origin per segment is required");
  for (const auto& z : s.snv) {
    if (z.clone < 1 || z.clone >= K || z.copies < 1 || z.copies > hyper_.max_snv_copies) {
      throw Error("SNV origin out of range");
    }
  }
  for (const auto& c : s.cnv) {
    if (c.is_null()) continue;
    if (c.clone < 1 || c.clone >= K || c.change < -2 || c.change > hyper_.max_total_copies - 2) {
      throw Error("CNV origin out of range");
    }
  }
}

double loglik_reads(const ChainState& s, const ReadData& data, const SegmentMap& segments) {
  const auto cell = clone_cellularity(s.tree, fractions(s.theta));
  double ll = 0.0;
  for (std::size_t j = 0; j < data.num_loci(); ++j) {
    const auto& z = s.snv[j];
    const auto& c = s.cnv[static_cast<std::size_t>(segments.segment_of(j))];
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
      const double m = z.copies * cell(static_cast<std::size_t>(z.clone), t);
      const double n = 2.0 + (c.is_null() ? 0.0 : c.change * cell(static_cast<std::size_t>(c.clone), t));
      ll += read_loglik(data.total(j, t), data.mutant(j, t), data.coverage[t], m, n);
    }
  }
  return ll;
}

// ---------------------------------------------------------------------------
// Priors

double logprior_theta_entry(double theta, double gamma) {
  if (!(theta > 0.0) || !std::isfinite(theta)) return kNegInf;
  return (gamma - 1.0) * std::log(theta) - theta - std::lgamma(gamma);
}

double logprior_theta(const Matrix<double>& theta, double gamma) {
  double lp = 0.0;
  for (double v : theta.data()) lp += logprior_theta_entry(v, gamma);
  return lp;
}

double logprior_snv_entry(const SnvOrigin& snv, std::size_t num_clones, int max_snv_copies, double zeta) {
  if (snv.clone < 1 || static_cast<std::size_t>(snv.clone) >= num_clones || snv.copies < 1 ||
      snv.copies > max_snv_copies) {
    return kNegInf;
  }
  return snv.copies * std::log(zeta) -
         std::log(static_cast<double>(num_clones - 1) * snv_normaliser(max_snv_copies, zeta));
}

double logprior_snv(std::span<const SnvOrigin> snv, std::size_t num_clones, int max_snv_copies, double zeta) {
  double lp = 0.0;
  for (const auto& z : snv) lp += logprior_snv_entry(z, num_clones, max_snv_copies, zeta);
  return lp;
}

std::size_t num_cnv_alternatives(std::size_t num_clones, int max_total_copies) {
  return (num_clones - 1) * static_cast<std::size_t>(max_total_copies);
}

double logprior_cnv_entry(const CnvOrigin& cnv, double pi, std::size_t num_clones, int max_total_copies) {
  if (cnv.is_null()) return std::log(pi);
  if (cnv.clone < 1 || static_cast<std::size_t>(cnv.clone) >= num_clones || cnv.change < -2 ||
      cnv.change > max_total_copies - 2) {
    return kNegInf;
  }
  return std::log1p(-pi) - std::log(static_cast<double>(num_cnv_alternatives(num_clones, max_total_copies)));
}

double logprior_cnv(std::span<const CnvOrigin> cnv, double pi, std::size_t num_clones, int max_total_copies) {
  double lp = 0.0;
  for (const auto& c : cnv) lp += logprior_cnv_entry(c, pi, num_clones, max_total_copies);
  return lp;
}

double logprior_pi(double pi, double a, double b) {
  if (!(pi > 0.0 && pi < 1.0)) return kNegInf;
  return (a - 1.0) * std::log(pi) + (b - 1.0) * std::log1p(-pi) + std::lgamma(a + b) - std::lgamma(a) -
         std::lgamma(b);
}

double logprior_tree(std::size_t num_clones) { return -std::lgamma(static_cast<double>(num_clones)); }

double log_prior(const ChainState& s, const Model& model) {
  if (!model.within_cap(s)) return kNegInf;
  const auto& h = model.hyper();
  const std::size_t K = model.num_clones();
  return logprior_theta(s.theta, h.gamma) + logprior_snv(s.snv, K, h.max_snv_copies, h.zeta) +
         logprior_cnv(s.cnv, s.pi, K, h.max_total_copies) + logprior_pi(s.pi, h.a_pi, h.b_pi) + logprior_tree(K);
}

double log_posterior_kernel(const ChainState& s, const Model& model, double beta) {
  const double lp = log_prior(s, model);
  if (lp == kNegInf || beta == 0.0) return lp;
  const double ll = model.loglik(s);
  if (ll == kNegInf) return kNegInf;
  return beta * ll + lp;
}

std::vector<SnvOrigin> snv_states(std::size_t num_clones, int max_snv_copies) {
  std::vector<SnvOrigin> out;
  for (std::size_t k = 1; k < num_clones; ++k) {
    for (int c = 1; c <= max_snv_copies; ++c) out.push_back({static_cast<int>(k), c});
  }
  return out;
}

std::vector<CnvOrigin> cnv_states(std::size_t num_clones, int max_total_copies) {
  std::vector<CnvOrigin> out{CnvOrigin{}};
  for (std::size_t k = 1; k < num_clones; ++k) {
    for (int c = -2; c <= max_total_copies - 2; ++c) {
      if (c != 0) out.push_back({static_cast<int>(k), c});
    }
  }
  return out;
}

}  // namespace subclone
