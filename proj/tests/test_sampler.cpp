#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "subclone/sampler.hpp"
#include "subclone/simulate.hpp"

using namespace subclone;

namespace {

struct Fixture {
  Scenario scenario;
  ReadData reads;
};

Fixture fixture(std::vector<int> pv, std::size_t J, std::size_t T, double depth, std::uint64_t seed) {
  ScenarioOptions o;
  o.num_loci = J;
  o.num_samples = T;
  o.segment_length = std::max<std::size_t>(1, J / 2);
  o.cnv_fraction = 0.5;
  Fixture f;
  f.scenario = build_scenario(Tree::from_parent_vector(pv), depth, seed, o);
  Rng rng = make_stream(seed, 1);
  f.reads = generate_reads(f.scenario, rng);
  return f;
}

}  // namespace

TEST_CASE("streams are reproducible and distinct") {
  Rng a = make_stream(1, 0), b = make_stream(1, 0), c = make_stream(1, 1), d = make_stream(2, 0);
  const auto x = a();
  CHECK(x == b());
  CHECK(x != c());
  CHECK(x != d());
}

TEST_CASE("proposal tuner adapts per window") {
  ProposalTuner t(2, 1, 10.0);
  for (int i = 0; i < 50; ++i) t.record(0, 0, false);
  CHECK(t.precision(0, 0) == doctest::Approx(15.0));
  for (int i = 0; i < 50; ++i) t.record(1, 0, true);
  CHECK(t.precision(1, 0) == doctest::Approx(10.0 / 1.5));
  for (int i = 0; i < 50; ++i) t.record(0, 0, i % 2 == 0);  // 0.5 is inside the band
  CHECK(t.precision(0, 0) == doctest::Approx(15.0));
  t.adapting = false;
  for (int i = 0; i < 50; ++i) t.record(0, 0, false);
  CHECK(t.precision(0, 0) == doctest::Approx(15.0));
  CHECK(t.acceptance_rate() == doctest::Approx(75.0 / 200.0));
}

TEST_CASE("categorical draws from log weights") {
  Rng rng = make_stream(3, 0);
  const double ninf = -std::numeric_limits<double>::infinity();
  const std::vector<double> none{ninf, ninf};
  CHECK(sample_log_weights(none, rng) == -1);
  const std::vector<double> w{std::log(1.0), ninf, std::log(3.0)};
  int counts[3] = {0, 0, 0};
  for (int i = 0; i < 40000; ++i) ++counts[sample_log_weights(w, rng)];
  CHECK(counts[1] == 0);
  CHECK(counts[0] / 40000.0 == doctest::Approx(0.25).epsilon(0.05));
}

TEST_CASE("rewire remap moves mass as specified") {
  Matrix<double> theta(4, 2);
  const double v[4][2] = {{1, 1}, {2, 3}, {0.5, 4}, {1.5, 0.25}};
  for (int k = 0; k < 4; ++k) {
    for (int t = 0; t < 2; ++t) theta(k, t) = v[k][t];
  }
  // leaf 3 (parent 1) moves under node 2
  const auto r = rewire_theta(theta, 3, 1, 2);
  CHECK(r(1, 0) == 3.5);
  CHECK(r(3, 0) == 0.5);
  CHECK(r(2, 0) == 0.0);
  CHECK(r(1, 1) == 3.25);
  CHECK(r(3, 1) == 0.25);
  CHECK(r(2, 1) == 3.75);
  for (int t = 0; t < 2; ++t) {
    double a = 0, b = 0;
    for (int k = 0; k < 4; ++k) {
      a += theta(k, t);
      b += r(k, t);
    }
    CHECK(a == doctest::Approx(b));
  }
}

TEST_CASE("theta updates at beta 0 target the Gamma prior") {
  // With the likelihood switched off, each theta entry is a Gamma(1.5, 1) variable.
  const auto f = fixture({0, 1, 1}, 6, 2, 30.0, 4);
  const Model model(f.reads, f.scenario.segments, Hyperparams{}, 3);
  Rng rng = make_stream(9, 0);
  ChainState s = initial_state(model, rng);
  ProposalTuner tuner(3, 2);
  for (int i = 0; i < 2000; ++i) step_theta(s, model, 0.0, tuner, rng);
  tuner.adapting = false;
  double sum = 0.0, sq = 0.0;
  const int n = 60000;
  for (int i = 0; i < n; ++i) {
    step_theta(s, model, 0.0, tuner, rng);
    sum += s.theta(1, 0);
    sq += s.theta(1, 0) * s.theta(1, 0);
  }
  const double mean = sum / n;
  CHECK(mean == doctest::Approx(1.5).epsilon(0.05));
  CHECK(sq / n - mean * mean == doctest::Approx(1.5).epsilon(0.1));
}

TEST_CASE("sweeps keep the cached likelihood and the copy cap") {
  const auto f = fixture({0, 1, 2, 2}, 10, 3, 40.0, 8);
  const Model model(f.reads, f.scenario.segments, Hyperparams{}, 4);
  Rng rng = make_stream(10, 0);
  ChainState s = initial_state(model, rng);
  ProposalTuner tuner(4, 3);
  MoveStats stats;
  for (int i = 0; i < 300; ++i) {
    sweep(s, model, i % 2 ? 1.0 : 0.3, 0.5, tuner, rng, stats);
    CHECK(s.neg_loglik == doctest::Approx(-model.loglik(s)).epsilon(1e-12));
    CHECK(model.within_cap(s));
    CHECK_NOTHROW(model.check_state(s));
  }
  CHECK(stats.rewire_proposed + stats.slice_calls == 300);
}

TEST_CASE("prior draws respect the cap and are reproducible") {
  const auto f = fixture({0, 1, 1}, 8, 2, 30.0, 12);
  const Model model(f.reads, f.scenario.segments, Hyperparams{}, 3);
  Rng rng = make_stream(1, 0);
  ChainState s;
  for (int i = 0; i < 200; ++i) {
    REQUIRE(sample_prior_state(model, rng, s));
    CHECK(model.within_cap(s));
    CHECK(s.neg_loglik == doctest::Approx(-model.loglik(s)));
  }
  const auto a = sample_prior_trace(model, 50, 7);
  const auto b = sample_prior_trace(model, 50, 7);
  CHECK(a.neg_loglik == b.neg_loglik);
  CHECK(a.neg_loglik.size() == 50);
  CHECK_FALSE(a.used_mcmc);
}

TEST_CASE("pi draws follow the conjugate Beta") {
  Rng rng = make_stream(2, 0);
  std::vector<CnvOrigin> cnv(10, CnvOrigin{1, -1});
  for (int i = 0; i < 4; ++i) cnv[static_cast<std::size_t>(i)] = {};
  double sum = 0.0;
  const int n = 40000;
  for (int i = 0; i < n; ++i) sum += sample_pi(cnv, 1.0, 1.0, rng);
  CHECK(sum / n == doctest::Approx(5.0 / 12.0).epsilon(0.01));
}

TEST_CASE("temperature ladder and swap rule") {
  SamplerConfig c;
  const auto l = c.ladder();
  REQUIRE(l.size() == 8);
  CHECK(l.front() == 1.0);
  CHECK(l.back() == doctest::Approx(0.3));
  CHECK(l[1] == doctest::Approx(std::pow(0.3, 1.0 / 7.0)));
  CHECK_NOTHROW(c.validate());
  c.betas = {1.0, 0.5, 0.5};
  CHECK_THROWS_AS(c.validate(), Error);
  c.betas = {0.9, 0.5};
  CHECK_THROWS_AS(c.validate(), Error);
  c.betas = {};
  c.min_beta = 1.5;
  CHECK_THROWS_AS(c.validate(), Error);

  // log alpha = (b_i - b_j)(L_i - L_j) with L the negative log-likelihood.
  CHECK(swap_log_acceptance(1.0, 0.5, 100.0, 90.0) == doctest::Approx(5.0));
  CHECK(swap_log_acceptance(1.0, 0.5, 90.0, 100.0) == doctest::Approx(-5.0));
}

TEST_CASE("tempered runs are deterministic across thread counts") {
  const auto f = fixture({0, 1, 2}, 12, 2, 40.0, 21);
  const Model model(f.reads, f.scenario.segments, Hyperparams{}, 3);
  SamplerConfig c;
  c.num_chains = 4;
  c.tune = 50;
  c.burnin = 50;
  c.keep = 100;
  c.seed = 77;
  const auto a = run_tempered(model, c);
  c.threads = 3;
  const auto b = run_tempered(model, c);
  CHECK(a == b);
  CHECK(a.samples.size() == 100);
  CHECK(a.neg_loglik.size() == 4);
  std::int64_t attempts = std::accumulate(a.swap_attempts.begin(), a.swap_attempts.end(), std::int64_t{0});
  CHECK(attempts == 20);
  for (std::size_t i = 0; i < a.samples.size(); ++i) CHECK(a.samples[i].neg_loglik == a.neg_loglik[0][i]);
  c.seed = 78;
  CHECK_FALSE(run_tempered(model, c) == a);
}

TEST_CASE("Geweke statistic") {
  Rng rng = make_stream(5, 0);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<double> x(5000);
  for (auto& v : x) v = g(rng);
  const auto z = geweke_z(x);
  CHECK(z.defined);
  CHECK(std::abs(z.z) < 4.0);
  for (std::size_t i = 0; i < 500; ++i) x[i] += 3.0;
  CHECK(std::abs(geweke_z(x).z) > 10.0);
  const std::vector<double> flat(1000, 2.0);
  CHECK_FALSE(geweke_z(flat).defined);
  CHECK_THROWS_AS(geweke_z(std::vector<double>(10, 1.0)), Error);
}

namespace {

// A state whose copy numbers fit under the cap on every tree.
ChainState cap_free_state(const Model& model, Rng& rng) {
  ChainState s = initial_state(model, rng);
  for (auto& o : s.snv) o.copies = 1;
  for (auto& c : s.cnv) c = CnvOrigin{};
  s.neg_loglik = -model.loglik(s);
  return s;
}

}  // namespace

TEST_CASE("slice sampling on a flat kernel is uniform over trees") {
  const auto f = fixture({0, 1, 2, 2}, 6, 2, 30.0, 31);
  const Model model(f.reads, f.scenario.segments, Hyperparams{}, 4);
  Rng rng = make_stream(31, 0);
  ChainState s = cap_free_state(model, rng);
  const auto& trees = model.trees();
  REQUIRE(trees.size() == 6);
  std::vector<int> counts(trees.size(), 0);
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    tree_slice(s, model, 0.0, rng);
    const auto it = std::find(trees.begin(), trees.end(), s.tree);
    REQUIRE(it != trees.end());
    ++counts[static_cast<std::size_t>(it - trees.begin())];
  }
  double chi2 = 0.0;
  const double e = double(n) / double(trees.size());
  for (int c : counts) chi2 += (c - e) * (c - e) / e;
  CHECK(chi2 < 15.086);  // chi-square(5) upper 1% point
}

TEST_CASE("slice sampling visits two trees at their exact odds") {
  const auto f = fixture({0, 1, 1}, 6, 2, 30.0, 32);
  const Model model(f.reads, f.scenario.segments, Hyperparams{}, 3);
  Rng rng = make_stream(32, 0);
  ChainState s = cap_free_state(model, rng);
  const auto& trees = model.trees();
  REQUIRE(trees.size() == 2);
  const double delta = tree_log_kernel(s, model, 1.0, trees[0]) - tree_log_kernel(s, model, 1.0, trees[1]);
  REQUIRE(std::abs(delta) > 1e-6);
  // Only the likelihood differs between the trees, so beta sets the odds; aim for 9:1.
  const double beta = std::min(1.0, std::log(9.0) / std::abs(delta));
  const double log_odds = tree_log_kernel(s, model, beta, trees[0]) - tree_log_kernel(s, model, beta, trees[1]);
  const double odds = std::exp(log_odds);
  ProposalTuner tuner(3, 2);
  MoveStats stats;
  SweepMoves only_tree;
  only_tree.theta = only_tree.snv = only_tree.cnv = only_tree.pi = false;
  int first = 0;
  const int n = 50000;
  for (int i = 0; i < n; ++i) {
    sweep(s, model, beta, 1.0, tuner, rng, stats, only_tree);
    if (s.tree == trees[0]) ++first;
  }
  const double ratio = double(first) / double(n - first);
  CHECK(std::abs(ratio / odds - 1.0) < 0.1);
}

TEST_CASE("copy-neutral segment under a strong pi prior stays CNV-free") {
  ScenarioOptions o;
  o.num_loci = 2;
  o.num_samples = 2;
  o.segment_length = 2;
  o.cnv_fraction = 0.0;
  const auto sc = build_scenario(Tree::from_parent_vector(std::vector<int>{0, 1, 1}), 60.0, 33, o);
  Rng data_rng = make_stream(33, 1);
  const Model model(generate_reads(sc, data_rng), sc.segments, Hyperparams{}, 3);
  Rng rng = make_stream(33, 0);
  ChainState s = cap_free_state(model, rng);
  s.pi = 0.9999;
  const auto w = cnv_conditional_logweights(s, model, 1.0, 0);
  double top = -std::numeric_limits<double>::infinity();
  for (double v : w) top = std::max(top, v);
  double total = 0.0;
  for (double v : w) total += std::exp(v - top);
  CHECK(std::exp(w[0] - top) / total > 0.99);
  int null_draws = 0;
  for (int i = 0; i < 20000; ++i) {
    gibbs_cnv(s, model, 1.0, rng);
    null_draws += s.cnv[0].is_null() ? 1 : 0;
  }
  CHECK(null_draws > 0.99 * 20000);
}
