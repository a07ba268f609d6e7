#include "subclone/postprocess.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "subclone/likelihood.hpp"

namespace subclone {

namespace {

Matrix<int> mutant_matrix(const ChainState& s, const SegmentMap& segments, int cap) {
  return expand_genotypes(s.tree, s.snv, s.cnv, segments, cap).mutant;
}

// D[a][b] = sum_j |z(j, a) - prev(j, b)|; a permutation costs sum_k D[perm[k]][k].
Matrix<long long> column_distances(const Matrix<int>& z, const Matrix<int>& prev) {
  const std::size_t K = z.cols();
  Matrix<long long> d(K, K, 0);
  for (std::size_t j = 0; j < z.rows(); ++j) {
    for (std::size_t a = 0; a < K; ++a) {
      for (std::size_t b = 0; b < K; ++b) d(a, b) += std::abs(z(j, a) - prev(j, b));
    }
  }
  return d;
}

long long permuted_distance(const Matrix<long long>& d, std::span<const int> perm) {
  long long s = 0;
  for (std::size_t k = 0; k < perm.size(); ++k) s += d(static_cast<std::size_t>(perm[k]), k);
  return s;
}

int median_round_down(std::vector<int>& v) {
  const std::size_t n = v.size();
  std::nth_element(v.begin(), v.begin() + static_cast<long>(n / 2), v.end());
  const int hi = v[n / 2];
  if (n % 2) return hi;
  const int lo = *std::max_element(v.begin(), v.begin() + static_cast<long>(n / 2));
  // floor((lo + hi) / 2) is the nearest integer with halves going down.
  return static_cast<int>(std::floor((lo + hi) / 2.0));
}

}  // namespace

bool permute_state(const ChainState& s, std::span<const int> perm, ChainState& out) {
  const std::size_t K = s.tree.size();
  if (perm.size() != K || perm[0] != 0) throw Error("permutation must fix the normal subclone");
  std::vector<int> inv(K, -1);
  for (std::size_t i = 0; i < K; ++i) inv[static_cast<std::size_t>(perm[i])] = static_cast<int>(i);
  std::vector<int> pv(K, 0);
  for (std::size_t i = 1; i < K; ++i) {
    const int p = inv[static_cast<std::size_t>(s.tree.parent(perm[i]))];
    if (p >= static_cast<int>(i)) return false;
    pv[i] = p + 1;
  }
  ChainState r = s;
  r.tree = Tree::from_parent_vector(pv);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t t = 0; t < s.theta.cols(); ++t) r.theta(i, t) = s.theta(static_cast<std::size_t>(perm[i]), t);
  }
  for (auto& z : r.snv) z.clone = inv[static_cast<std::size_t>(z.clone)];
  for (auto& c : r.cnv) {
    if (!c.is_null()) c.clone = inv[static_cast<std::size_t>(c.clone)];
  }
  out = std::move(r);
  return true;
}

std::vector<ChainState> align_samples(std::span<const ChainState> samples, const SegmentMap& segments,
                                      int cap, AlignTrigger trigger) {
  std::vector<ChainState> out(samples.begin(), samples.end());
  if (out.empty()) return out;
  const std::size_t K = out.front().tree.size();
  for (const auto& s : out) {
    if (s.tree.size() != K) throw Error("all samples must share the number of subclones");
  }
  Matrix<int> prev = mutant_matrix(out.front(), segments, cap);
  for (std::size_t i = 1; i < out.size(); ++i) {
    const Matrix<int> z = mutant_matrix(out[i], segments, cap);
    if (trigger == AlignTrigger::tree_change && out[i].tree == out[i - 1].tree) {
      prev = z;
      continue;
    }
    std::vector<int> perm(K);
    std::iota(perm.begin(), perm.end(), 0);
    std::vector<int> best = perm;
    const auto dist = column_distances(z, prev);
    long long best_d = permuted_distance(dist, perm);
    while (std::next_permutation(perm.begin() + 1, perm.end())) {
      const long long d = permuted_distance(dist, perm);
      if (d < best_d) {
        best_d = d;
        best = perm;
      }
    }
    ChainState aligned;
    if (permute_state(out[i], best, aligned)) out[i] = std::move(aligned);
    prev = mutant_matrix(out[i], segments, cap);
  }
  return out;
}

PointEstimate point_estimate(std::span<const ChainState> aligned, const SegmentMap& segments, int cap) {
  if (aligned.empty()) throw Error("point estimate needs at least one sample");
  PointEstimate pe;
  for (const auto& s : aligned) {
    auto it = std::find_if(pe.tree_counts.begin(), pe.tree_counts.end(),
                           [&](const TreeCount& c) { return c.tree == s.tree; });
    if (it == pe.tree_counts.end()) {
      pe.tree_counts.push_back({s.tree, 1});
    } else {
      ++it->count;
    }
  }
  const TreeCount* top = &pe.tree_counts.front();
  for (const auto& c : pe.tree_counts) {
    if (c.count > top->count) top = &c;
  }
  pe.tree = top->tree;
  pe.multiple_trees = pe.tree_counts.size() > 1;

  std::vector<Genotypes> g;
  std::vector<Matrix<double>> f;
  for (const auto& s : aligned) {
    if (!(s.tree == pe.tree)) continue;
    g.push_back(expand_genotypes(s.tree, s.snv, s.cnv, segments, cap));
    f.push_back(fractions(s.theta));
  }
  pe.num_used = g.size();
  const std::size_t J = g.front().mutant.rows();
  const std::size_t K = g.front().mutant.cols();
  pe.mutant = Matrix<int>(J, K);
  pe.total = Matrix<int>(J, K);
  std::vector<int> zs(g.size()), ls(g.size());
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t k = 0; k < K; ++k) {
      for (std::size_t i = 0; i < g.size(); ++i) {
        zs[i] = g[i].mutant(j, k);
        ls[i] = g[i].total(j, k);
      }
      pe.mutant(j, k) = median_round_down(zs);
      pe.total(j, k) = median_round_down(ls);
    }
  }
  pe.fractions = Matrix<double>(f.front().rows(), f.front().cols(), 0.0);
  for (const auto& m : f) {
    for (std::size_t i = 0; i < m.data().size(); ++i) pe.fractions.data()[i] += m.data()[i];
  }
  for (auto& v : pe.fractions.data()) v /= static_cast<double>(f.size());
  return pe;
}

Matrix<double> cellularity(const Matrix<int>& z, const Matrix<double>& f) {
  if (z.cols() != f.rows()) throw Error("genotype and fraction matrices disagree on the number of subclones");
  Matrix<double> c(z.rows(), f.cols(), 0.0);
  for (std::size_t j = 0; j < z.rows(); ++j) {
    for (std::size_t k = 0; k < z.cols(); ++k) {
      if (z(j, k) <= 0) continue;
      for (std::size_t t = 0; t < f.cols(); ++t) c(j, t) += f(k, t);
    }
  }
  return c;
}

std::vector<int> mutation_partition(const Matrix<int>& z) {
  std::map<std::vector<bool>, int> groups;
  std::vector<int> out(z.rows());
  for (std::size_t j = 0; j < z.rows(); ++j) {
    std::vector<bool> key(z.cols());
    for (std::size_t k = 0; k < z.cols(); ++k) key[k] = z(j, k) > 0;
    auto [it, inserted] = groups.try_emplace(std::move(key), static_cast<int>(groups.size()));
    out[j] = it->second;
  }
  return out;
}

double rand_index(std::span<const int> a, std::span<const int> b) {
  if (a.size() != b.size()) throw Error("partitions cover different numbers of items");
  if (a.size() < 2) throw Error("Rand index needs at least two items");
  long long agree = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = i + 1; j < a.size(); ++j) {
      if ((a[i] == a[j]) == (b[i] == b[j])) ++agree;
    }
  }
  const auto n = static_cast<long long>(a.size());
  return static_cast<double>(agree) / static_cast<double>(n * (n - 1) / 2);
}

double cellularity_error(const Matrix<double>& truth, const Matrix<double>& estimate) {
  if (truth.rows() != estimate.rows() || truth.cols() != estimate.cols()) {
    throw Error("cellularity matrices differ in shape");
  }
  if (truth.empty()) throw Error("cellularity matrices are empty");
  double s = 0.0;
  for (std::size_t i = 0; i < truth.data().size(); ++i) s += std::abs(truth.data()[i] - estimate.data()[i]);
  return s / static_cast<double>(truth.data().size());
}

FitError vaf_fit_error(const Matrix<int>& z, const Matrix<int>& l, const Matrix<double>& f, const ReadData& data) {
  if (z.rows() != data.num_loci() || f.cols() != data.num_samples()) throw Error("estimate does not match the data");
  FitError out;
  std::size_t n = 0;
  std::vector<double> col(f.rows());
  for (std::size_t t = 0; t < f.cols(); ++t) {
    for (std::size_t k = 0; k < f.rows(); ++k) col[k] = f(k, t);
    for (std::size_t j = 0; j < z.rows(); ++j) {
      const int d = data.total(j, t);
      if (d == 0) continue;
      const double p = vaf(z.row(j), l.row(j), col).p;
      out.value += std::abs(p - static_cast<double>(data.mutant(j, t)) / d);
      ++n;
    }
  }
  if (n == 0) return {};
  out.value /= static_cast<double>(n);
  out.defined = true;
  return out;
}

std::vector<double> posterior_rand_index(std::span<const ChainState> samples, std::span<const int> reference,
                                         const SegmentMap& segments, int cap) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) {
    out.push_back(rand_index(mutation_partition(mutant_matrix(s, segments, cap)), reference));
  }
  return out;
}

}  // namespace subclone
