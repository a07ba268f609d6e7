#include "subclone/sampler.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <thread>

namespace subclone {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

std::size_t uniform_index(Rng& rng, std::size_t n) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double draw_gamma(Rng& rng, double shape, double rate) {
  return std::gamma_distribution<double>(shape, 1.0 / rate)(rng);
}

double draw_beta(Rng& rng, double a, double b) {
  const double x = draw_gamma(rng, a, 1.0);
  const double y = draw_gamma(rng, b, 1.0);
  double p = x / (x + y);
  // Keep pi strictly inside (0,1) so its log-density stays finite.
  if (!(p > 0.0)) p = std::numeric_limits<double>::min();
  if (!(p < 1.0)) p = std::nextafter(1.0, 0.0);
  return p;
}

// beta * diff with the convention 0 * (-inf) = 0 (an untempered prior-only target).
double tempered(double beta, double diff) { return beta == 0.0 ? 0.0 : beta * diff; }

bool accept_log(double log_ratio, Rng& rng) {
  if (std::isnan(log_ratio)) return false;
  if (log_ratio >= 0.0) return true;
  return std::log(uniform01(rng)) < log_ratio;
}

void column_cellularity(const Tree& tree, const Matrix<double>& theta, std::size_t t, std::vector<double>& out) {
  const std::size_t K = theta.rows();
  double sum = 0.0;
  for (std::size_t k = 0; k < K; ++k) sum += theta(k, t);
  out.assign(K, 0.0);
  for (std::size_t k = K; k-- > 0;) {
    out[k] += theta(k, t) / sum;
    if (k > 0) out[static_cast<std::size_t>(tree.parent(static_cast<int>(k)))] += out[k];
  }
}

double column_loglik(const ChainState& s, const Model& m, std::size_t t, const std::vector<double>& col) {
  double ll = 0.0;
  const auto& seg = m.segments();
  for (std::size_t j = 0; j < m.num_loci(); ++j) {
    const auto& z = s.snv[j];
    const auto& c = s.cnv[static_cast<std::size_t>(seg.segment_of(j))];
    const double mu = z.copies * col[static_cast<std::size_t>(z.clone)];
    const double nu = 2.0 + (c.is_null() ? 0.0 : c.change * col[static_cast<std::size_t>(c.clone)]);
    ll += m.cell_loglik(j, t, mu, nu);
  }
  return ll;
}

std::vector<double> snv_weights(const ChainState& s, const Model& m, double beta, std::size_t j,
                                const Matrix<double>& cell, const std::vector<SnvOrigin>& states) {
  const auto& h = m.hyper();
  const auto& cnv = s.cnv[static_cast<std::size_t>(m.segments().segment_of(j))];
  std::vector<double> w(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!locus_within_cap(s.tree, states[i], cnv, h.max_total_copies)) {
      w[i] = kNegInf;
      continue;
    }
    const double lp = logprior_snv_entry(states[i], m.num_clones(), h.max_snv_copies, h.zeta);
    const double ll = beta == 0.0 ? 0.0 : m.locus_loglik(j, states[i], cnv, cell);
    w[i] = lp + tempered(beta, ll);
  }
  return w;
}

std::vector<double> cnv_weights(const ChainState& s, const Model& m, double beta, std::size_t seg,
                                const Matrix<double>& cell, const std::vector<CnvOrigin>& states) {
  const auto& h = m.hyper();
  const auto& segments = m.segments();
  std::vector<double> w(states.size());
  for (std::size_t i = 0; i < states.size(); ++i) {
    if (!m.segment_within_cap(s.tree, s.snv, seg, states[i])) {
      w[i] = kNegInf;
      continue;
    }
    double ll = 0.0;
    if (beta != 0.0) {
      for (std::size_t j = segments.begin(seg); j < segments.end(seg); ++j) {
        ll += m.locus_loglik(j, s.snv[j], states[i], cell);
      }
    }
    w[i] = logprior_cnv_entry(states[i], s.pi, m.num_clones(), h.max_total_copies) + tempered(beta, ll);
  }
  return w;
}

Tree random_canonical_tree(std::size_t num_clones, Rng& rng) {
  std::vector<int> pv(num_clones);
  pv[0] = 0;
  for (std::size_t k = 1; k < num_clones; ++k) pv[k] = 1 + static_cast<int>(uniform_index(rng, k));
  return Tree::from_parent_vector(pv);
}

SnvOrigin draw_snv_prior(const Model& m, Rng& rng) {
  const auto& h = m.hyper();
  SnvOrigin z;
  z.clone = 1 + static_cast<int>(uniform_index(rng, m.num_clones() - 1));
  std::vector<double> w;
  for (int c = 1; c <= h.max_snv_copies; ++c) w.push_back(c * std::log(h.zeta));
  z.copies = 1 + sample_log_weights(w, rng);
  return z;
}

CnvOrigin draw_cnv_prior(const Model& m, double pi, Rng& rng) {
  if (uniform01(rng) < pi) return {};
  const auto states = cnv_states(m.num_clones(), m.hyper().max_total_copies);
  return states[1 + uniform_index(rng, states.size() - 1)];
}

Matrix<double> draw_theta_prior(const Model& m, Rng& rng) {
  Matrix<double> theta(m.num_clones(), m.num_samples());
  for (auto& v : theta.data()) {
    do {
      v = draw_gamma(rng, m.hyper().gamma, 1.0);
    } while (!(v > 0.0));
  }
  return theta;
}

}  // namespace

Rng make_stream(std::uint64_t master_seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32), 0x5eedu};
  return Rng(seq);
}

// ---------------------------------------------------------------------------

ProposalTuner::ProposalTuner(std::size_t num_clones, std::size_t num_samples, double initial_precision)
    : precision(num_clones, num_samples, initial_precision),
      window_accepted(num_clones, num_samples, 0),
      window_proposed(num_clones, num_samples, 0) {}

void ProposalTuner::record(std::size_t k, std::size_t t, bool was_accepted) {
  ++proposed;
  ++window_proposed(k, t);
  if (was_accepted) {
    ++accepted;
    ++window_accepted(k, t);
  }
  if (window_proposed(k, t) < kWindow) return;
  if (adapting) {
    const double rate = static_cast<double>(window_accepted(k, t)) / kWindow;
    if (rate < kLowAcceptance) precision(k, t) *= kFactor;
    if (rate > kHighAcceptance) precision(k, t) /= kFactor;
  }
  window_accepted(k, t) = 0;
  window_proposed(k, t) = 0;
}

double ProposalTuner::acceptance_rate() const {
  return proposed ? static_cast<double>(accepted) / static_cast<double>(proposed) : 0.0;
}

double log_gamma_density(double x, double shape, double rate) {
  if (!(x > 0.0)) return kNegInf;
  return shape * std::log(rate) - std::lgamma(shape) + (shape - 1.0) * std::log(x) - rate * x;
}

void step_theta(ChainState& s, const Model& m, double beta, ProposalTuner& tuner, Rng& rng) {
  const std::size_t K = m.num_clones();
  const std::size_t T = m.num_samples();
  const double gamma = m.hyper().gamma;
  std::vector<double> col_ll(T);
  std::vector<std::vector<double>> cols(T);
  for (std::size_t t = 0; t < T; ++t) {
    column_cellularity(s.tree, s.theta, t, cols[t]);
    col_ll[t] = beta == 0.0 ? 0.0 : column_loglik(s, m, t, cols[t]);
  }
  std::vector<double> proposal_col;
  for (std::size_t k = 0; k < K; ++k) {
    for (std::size_t t = 0; t < T; ++t) {
      const double current = s.theta(k, t);
      const double prec = tuner.precision(k, t);
      const double cand = draw_gamma(rng, prec * current, prec);
      bool accepted = false;
      if (std::isfinite(cand) && cand > 0.0) {
        s.theta(k, t) = cand;
        column_cellularity(s.tree, s.theta, t, proposal_col);
        const double new_ll = beta == 0.0 ? 0.0 : column_loglik(s, m, t, proposal_col);
        const double log_ratio = tempered(beta, new_ll - col_ll[t]) + logprior_theta_entry(cand, gamma) -
                                 logprior_theta_entry(current, gamma) +
                                 log_gamma_density(current, prec * cand, prec) -
                                 log_gamma_density(cand, prec * current, prec);
        accepted = accept_log(log_ratio, rng);
        if (accepted) {
          col_ll[t] = new_ll;
          cols[t].swap(proposal_col);
        } else {
          s.theta(k, t) = current;
        }
      }
      tuner.record(k, t, accepted);
    }
  }
  s.neg_loglik = -m.loglik(s);
}

int sample_log_weights(std::span<const double> w, Rng& rng) {
  double top = kNegInf;
  for (double v : w) top = std::max(top, v);
  if (top == kNegInf) return -1;
  std::vector<double> cum(w.size());
  double total = 0.0;
  for (std::size_t i = 0; i < w.size(); ++i) {
    total += std::exp(w[i] - top);
    cum[i] = total;
  }
  const double u = uniform01(rng) * total;
  for (std::size_t i = 0; i < w.size(); ++i) {
    if (u < cum[i] && w[i] != kNegInf) return static_cast<int>(i);
  }
  for (std::size_t i = w.size(); i-- > 0;) {
    if (w[i] != kNegInf) return static_cast<int>(i);
  }
  return -1;
}

std::vector<double> snv_conditional_logweights(const ChainState& s, const Model& m, double beta, std::size_t j) {
  const auto cell = clone_cellularity(s.tree, fractions(s.theta));
  return snv_weights(s, m, beta, j, cell, snv_states(m.num_clones(), m.hyper().max_snv_copies));
}

std::vector<double> cnv_conditional_logweights(const ChainState& s, const Model& m, double beta,
                                               std::size_t seg) {
  const auto cell = clone_cellularity(s.tree, fractions(s.theta));
  return cnv_weights(s, m, beta, seg, cell, cnv_states(m.num_clones(), m.hyper().max_total_copies));
}

void gibbs_snv(ChainState& s, const Model& m, double beta, Rng& rng, MoveStats* stats) {
  const auto cell = clone_cellularity(s.tree, fractions(s.theta));
  const auto states = snv_states(m.num_clones(), m.hyper().max_snv_copies);
  for (std::size_t j = 0; j < m.num_loci(); ++j) {
    const auto w = snv_weights(s, m, beta, j, cell, states);
    const int pick = sample_log_weights(w, rng);
    if (pick < 0) {
      if (stats) ++stats->degenerate_snv;
      continue;
    }
    s.snv[j] = states[static_cast<std::size_t>(pick)];
  }
  s.neg_loglik = -m.loglik(s, cell);
}

void gibbs_cnv(ChainState& s, const Model& m, double beta, Rng& rng, MoveStats* stats) {
  const auto cell = clone_cellularity(s.tree, fractions(s.theta));
  const auto states = cnv_states(m.num_clones(), m.hyper().max_total_copies);
  for (std::size_t seg = 0; seg < m.segments().num_segments(); ++seg) {
    const auto w = cnv_weights(s, m, beta, seg, cell, states);
    const int pick = sample_log_weights(w, rng);
    if (pick < 0) {
      if (stats) ++stats->degenerate_cnv;
      continue;
    }
    s.cnv[seg] = states[static_cast<std::size_t>(pick)];
  }
  s.neg_loglik = -m.loglik(s, cell);
}

double sample_pi(std::span<const CnvOrigin> cnv, double a_pi, double b_pi, Rng& rng) {
  const auto n = static_cast<double>(std::count_if(cnv.begin(), cnv.end(), [](const auto& c) { return c.is_null(); }));
  const auto S = static_cast<double>(cnv.size());
  return draw_beta(rng, n + a_pi, S - n + b_pi);
}

void gibbs_pi(ChainState& s, const Model& m, Rng& rng) { s.pi = sample_pi(s.cnv, m.hyper().a_pi, m.hyper().b_pi, rng); }

Matrix<double> rewire_theta(const Matrix<double>& theta, int leaf, int old_parent, int new_parent) {
  Matrix<double> out = theta;
  const auto k = static_cast<std::size_t>(leaf);
  const auto p = static_cast<std::size_t>(old_parent);
  const auto q = static_cast<std::size_t>(new_parent);
  for (std::size_t t = 0; t < theta.cols(); ++t) {
    const double moved = std::min(theta(k, t), theta(q, t));
    out(p, t) = theta(p, t) + theta(k, t);
    out(q, t) = theta(q, t) - moved;
    out(k, t) = moved;
  }
  return out;
}

bool tree_rewire_mh(ChainState& s, const Model& m, double beta, Rng& rng, MoveStats* stats) {
  if (stats) ++stats->rewire_proposed;
  const auto leaves = s.tree.leaves();
  const int leaf = leaves[uniform_index(rng, leaves.size())];
  if (leaf == 0) return false;
  const int old_parent = s.tree.parent(leaf);
  std::vector<int> targets;
  for (int q = 0; q < leaf; ++q) {
    if (q != old_parent) targets.push_back(q);
  }
  if (targets.empty()) return false;
  const int new_parent = targets[uniform_index(rng, targets.size())];

  ChainState proposal = s;
  proposal.tree = s.tree.rewired(leaf, new_parent);
  proposal.theta = rewire_theta(s.theta, leaf, old_parent, new_parent);
  if (!m.within_cap(proposal)) return false;
  const double gamma = m.hyper().gamma;
  const double prior_delta = logprior_theta(proposal.theta, gamma) - logprior_theta(s.theta, gamma);
  if (prior_delta == kNegInf) return false;
  const double new_ll = m.loglik(proposal);
  const double log_ratio = tempered(beta, new_ll + s.neg_loglik) + prior_delta;
  if (!accept_log(log_ratio, rng)) return false;
  proposal.neg_loglik = -new_ll;
  s = std::move(proposal);
  if (stats) ++stats->rewire_accepted;
  return true;
}

double tree_log_kernel(const ChainState& s, const Model& m, double beta, const Tree& tree) {
  ChainState probe = s;
  probe.tree = tree;
  if (!m.within_cap(probe)) return kNegInf;
  const double lp = logprior_tree(m.num_clones());
  if (beta == 0.0) return lp;
  return beta * m.loglik(probe) + lp;
}

bool tree_slice(ChainState& s, const Model& m, double beta, Rng& rng, MoveStats* stats) {
  const auto& trees = m.trees();
  if (trees.empty()) return tree_rewire_mh(s, m, beta, rng, stats);
  if (stats) ++stats->slice_calls;
  const double current = tree_log_kernel(s, m, beta, s.tree);
  // eta = Exp(1) - log g(current); accept T* when log g(T*) >= -eta.
  const double eta = std::exponential_distribution<double>(1.0)(rng) - current;
  ChainState probe = s;
  for (int i = 0; i < kSliceProposalCap; ++i) {
    const Tree& cand = trees[uniform_index(rng, trees.size())];
    if (cand == s.tree) return false;
    probe.tree = cand;
    if (!m.within_cap(probe)) continue;
    const double ll = beta == 0.0 ? 0.0 : m.loglik(probe);
    const double g = (beta == 0.0 ? 0.0 : beta * ll) + logprior_tree(m.num_clones());
    if (g >= -eta) {
      s.tree = cand;
      s.neg_loglik = beta == 0.0 ? -m.loglik(s) : -ll;
      if (stats) ++stats->slice_changed;
      return true;
    }
  }
  if (stats) ++stats->slice_capped;
  return false;
}

void sweep(ChainState& s, const Model& m, double beta, double slice_probability, ProposalTuner& tuner, Rng& rng,
           MoveStats& stats, const SweepMoves& moves) {
  if (moves.theta) step_theta(s, m, beta, tuner, rng);
  if (moves.snv) gibbs_snv(s, m, beta, rng, &stats);
  if (moves.cnv) gibbs_cnv(s, m, beta, rng, &stats);
  if (moves.pi) gibbs_pi(s, m, rng);
  if (moves.tree) {
    if (uniform01(rng) < slice_probability) {
      tree_slice(s, m, beta, rng, &stats);
    } else {
      tree_rewire_mh(s, m, beta, rng, &stats);
    }
  }
}

ChainState initial_state(const Model& m, Rng& rng) {
  const auto& h = m.hyper();
  ChainState s;
  s.theta = draw_theta_prior(m, rng);
  s.tree = random_canonical_tree(m.num_clones(), rng);
  s.pi = draw_beta(rng, h.a_pi, h.b_pi);
  for (std::size_t j = 0; j < m.num_loci(); ++j) s.snv.push_back(draw_snv_prior(m, rng));
  for (std::size_t seg = 0; seg < m.segments().num_segments(); ++seg) {
    CnvOrigin c{};
    for (int attempt = 0; attempt < 10000; ++attempt) {
      const auto cand = draw_cnv_prior(m, s.pi, rng);
      if (m.segment_within_cap(s.tree, s.snv, seg, cand)) {
        c = cand;
        break;
      }
    }
    s.cnv.push_back(c);
  }
  s.neg_loglik = -m.loglik(s);
  return s;
}

bool sample_prior_state(const Model& m, Rng& rng, ChainState& out, int max_attempts) {
  const auto& h = m.hyper();
  for (int attempt = 0; attempt < max_attempts; ++attempt) {
    ChainState s;
    s.tree = random_canonical_tree(m.num_clones(), rng);
    s.pi = draw_beta(rng, h.a_pi, h.b_pi);
    for (std::size_t j = 0; j < m.num_loci(); ++j) s.snv.push_back(draw_snv_prior(m, rng));
    for (std::size_t seg = 0; seg < m.segments().num_segments(); ++seg) s.cnv.push_back(draw_cnv_prior(m, s.pi, rng));
    if (!m.within_cap(s)) continue;
    s.theta = draw_theta_prior(m, rng);
    s.neg_loglik = -m.loglik(s);
    out = std::move(s);
    return true;
  }
  return false;
}

PriorTrace sample_prior_trace(const Model& m, std::size_t count, std::uint64_t seed) {
  PriorTrace out;
  Rng rng = make_stream(seed, 0x9e3779b97f4a7c15ull);
  ChainState s;
  for (std::size_t i = 0; i < count; ++i) {
    if (!sample_prior_state(m, rng, s)) {
      out.used_mcmc = true;
      break;
    }
    out.neg_loglik.push_back(s.neg_loglik);
  }
  if (!out.used_mcmc) return out;

  out.neg_loglik.clear();
  s = initial_state(m, rng);
  ProposalTuner tuner(m.num_clones(), m.num_samples());
  MoveStats stats;
  for (int i = 0; i < 500; ++i) sweep(s, m, 0.0, 0.15, tuner, rng, stats);
  tuner.adapting = false;
  for (std::size_t i = 0; i < count; ++i) {
    sweep(s, m, 0.0, 0.15, tuner, rng, stats);
    out.neg_loglik.push_back(s.neg_loglik);
  }
  return out;
}

// ---------------------------------------------------------------------------

std::vector<double> SamplerConfig::ladder() const {
  if (!betas.empty()) return betas;
  if (num_chains == 1) return {1.0};
  std::vector<double> out(num_chains);
  for (std::size_t j = 0; j < num_chains; ++j) {
    out[j] = std::pow(min_beta, static_cast<double>(j) / static_cast<double>(num_chains - 1));
  }
  out[0] = 1.0;
  return out;
}

void SamplerConfig::validate() const {
  if (betas.empty()) {
    if (num_chains < 1) throw Error("at least one chain is required");
    if (num_chains > 1 && !(min_beta > 0.0 && min_beta < 1.0)) throw Error("min_beta must lie in (0,1)");
  }
  const auto l = ladder();
  if (l.front() != 1.0) throw Error("the first inverse temperature must be 1");
  for (std::size_t i = 1; i < l.size(); ++i) {
    if (!(l[i] < l[i - 1]) || !(l[i] > 0.0)) throw Error("inverse temperatures must be strictly decreasing and positive");
  }
  if (keep < 1) throw Error("at least one kept iteration is required");
  if (swap_interval < 1) throw Error("swap interval must be at least 1");
  if (!(slice_probability >= 0.0 && slice_probability <= 1.0)) throw Error("slice probability must lie in [0,1]");
}

double swap_log_acceptance(double beta_i, double beta_j, double neg_loglik_i, double neg_loglik_j) {
  if (beta_i == beta_j || neg_loglik_i == neg_loglik_j) return 0.0;
  return (beta_i - beta_j) * (neg_loglik_i - neg_loglik_j);
}

TraceStore run_tempered(const Model& m, const SamplerConfig& config) {
  config.validate();
  struct Slot {
    ChainState state;
    ProposalTuner tuner;
    Rng rng;
    MoveStats stats;
    double beta = 1.0;
  };
  const auto betas = config.ladder();
  const std::size_t C = betas.size();
  std::vector<Slot> slots(C);
  for (std::size_t c = 0; c < C; ++c) {
    slots[c].rng = make_stream(config.seed, c);
    slots[c].state = initial_state(m, slots[c].rng);
    slots[c].tuner = ProposalTuner(m.num_clones(), m.num_samples());
    slots[c].beta = betas[c];
  }
  Rng swap_rng = make_stream(config.seed, 0xffffffffull);

  TraceStore out;
  out.betas = betas;
  out.samples.resize(config.keep);
  out.neg_loglik.assign(C, std::vector<double>(config.keep));
  out.swap_attempts.assign(C > 1 ? C - 1 : 0, 0);
  out.swap_accepts.assign(C > 1 ? C - 1 : 0, 0);

  const std::size_t total = config.tune + config.burnin + config.keep;
  const std::size_t first_kept = config.tune + config.burnin;

  auto advance = [&](std::size_t c, std::size_t from, std::size_t to) {
    Slot& slot = slots[c];
    for (std::size_t it = from; it < to; ++it) {
      slot.tuner.adapting = it < config.tune;
      sweep(slot.state, m, slot.beta, config.slice_probability, slot.tuner, slot.rng, slot.stats);
      if (it >= first_kept) {
        const std::size_t idx = it - first_kept;
        out.neg_loglik[c][idx] = slot.state.neg_loglik;
        if (c == 0) out.samples[idx] = slot.state;
      }
    }
  };

  const std::size_t workers = std::max<std::size_t>(1, std::min(config.threads, C));
  for (std::size_t from = 0; from < total; from += config.swap_interval) {
    const std::size_t to = std::min(total, from + config.swap_interval);
    if (workers == 1) {
      for (std::size_t c = 0; c < C; ++c) advance(c, from, to);
    } else {
      std::vector<std::jthread> pool;
      for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&, w] {
          for (std::size_t c = w; c < C; c += workers) advance(c, from, to);
        });
      }
    }
    if (C > 1 && to - from == config.swap_interval) {
      const std::size_t i = uniform_index(swap_rng, C - 1);
      ++out.swap_attempts[i];
      const double log_a =
          swap_log_acceptance(slots[i].beta, slots[i + 1].beta, slots[i].state.neg_loglik, slots[i + 1].state.neg_loglik);
      if (accept_log(log_a, swap_rng)) {
        std::swap(slots[i].state, slots[i + 1].state);
        ++out.swap_accepts[i];
      }
    }
  }
  for (const auto& slot : slots) {
    out.moves.push_back(slot.stats);
    out.theta_acceptance.push_back(slot.tuner.acceptance_rate());
  }
  return out;
}

// ---------------------------------------------------------------------------

namespace {

struct WindowMean {
  double mean = 0.0;
  double var_of_mean = 0.0;
};

WindowMean batch_means(std::span<const double> x) {
  const std::size_t n = x.size();
  const std::size_t batches = std::max<std::size_t>(2, static_cast<std::size_t>(std::sqrt(static_cast<double>(n))));
  const std::size_t size = n / batches;
  WindowMean out;
  for (double v : x) out.mean += v;
  out.mean /= static_cast<double>(n);
  std::vector<double> means(batches, 0.0);
  for (std::size_t b = 0; b < batches; ++b) {
    for (std::size_t i = b * size; i < (b + 1) * size; ++i) means[b] += x[i];
    means[b] /= static_cast<double>(size);
  }
  double grand = 0.0;
  for (double v : means) grand += v;
  grand /= static_cast<double>(batches);
  double ss = 0.0;
  for (double v : means) ss += (v - grand) * (v - grand);
  // Var(batch mean) * size estimates the spectral density at zero; divide by n for the mean.
  const double batch_var = ss / static_cast<double>(batches - 1);
  out.var_of_mean = batch_var * static_cast<double>(size) / static_cast<double>(n);
  return out;
}

}  // namespace

Geweke geweke_z(std::span<const double> trace, double frac_a, double frac_b) {
  const std::size_t n = trace.size();
  if (n < 100) throw Error("Geweke diagnostic needs at least 100 samples");
  if (!(frac_a > 0.0) || !(frac_b > 0.0) || frac_a + frac_b > 1.0) throw Error("invalid Geweke window fractions");
  const auto na = static_cast<std::size_t>(frac_a * static_cast<double>(n));
  const auto nb = static_cast<std::size_t>(frac_b * static_cast<double>(n));
  const auto a = batch_means(trace.first(na));
  const auto b = batch_means(trace.last(nb));
  const double denom = a.var_of_mean + b.var_of_mean;
  if (!(denom > 0.0)) return {0.0, false};
  return {(a.mean - b.mean) / std::sqrt(denom), true};
}

}  // namespace subclone
