#include "subclone/model.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <functional>
#include <numeric>
#include <sstream>

namespace subclone {

namespace {

std::string_view strip_chr(std::string_view s) {
  if (s.size() > 3 && (s.substr(0, 3) == "chr" || s.substr(0, 3) == "Chr")) s.remove_prefix(3);
  return s;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isdigit(c); });
}

}  // namespace

int compare_chrom(const std::string& a, const std::string& b) {
  auto sa = strip_chr(a);
  auto sb = strip_chr(b);
  const bool na = all_digits(sa);
  const bool nb = all_digits(sb);
  if (na && nb) {
    // Compare as integers without overflow: strip leading zeros, then by length.
    auto trim = [](std::string_view s) {
      while (s.size() > 1 && s.front() == '0') s.remove_prefix(1);
      return s;
    };
    sa = trim(sa);
    sb = trim(sb);
    if (sa.size() != sb.size()) return sa.size() < sb.size() ? -1 : 1;
    return sa.compare(sb) < 0 ? -1 : (sa == sb ? 0 : 1);
  }
  if (na != nb) return na ? -1 : 1;
  const int c = sa.compare(sb);
  return c < 0 ? -1 : (c > 0 ? 1 : 0);
}

bool position_less(const GenomicPosition& a, const GenomicPosition& b) {
  const int c = compare_chrom(a.chrom, b.chrom);
  if (c != 0) return c < 0;
  return a.pos < b.pos;
}

void ReadData::validate() const {
  const std::size_t J = total.rows();
  const std::size_t T = total.cols();
  if (J == 0 || T == 0) throw Error("read data must contain at least one locus and one sample");
  if (mutant.rows() != J || mutant.cols() != T) throw Error("mutant and total read matrices differ in shape");
  if (coverage.size() != T) throw Error("coverage vector length does not match the number of samples");
  if (positions.size() != J) throw Error("positions length does not match the number of loci");
  if (locus_ids.size() != J) throw Error("locus id count does not match the number of loci");
  if (!sample_names.empty() && sample_names.size() != T) throw Error("sample name count mismatch");
  for (double phi : coverage) {
    if (!(phi > 0.0)) throw Error("designed coverage must be positive");
  }
  for (std::size_t j = 0; j < J; ++j) {
    for (std::size_t t = 0; t < T; ++t) {
      if (total(j, t) < 0 || mutant(j, t) < 0 || mutant(j, t) > total(j, t)) {
        throw Error("invalid read counts at locus " + locus_ids[j] + ": need 0 <= x <= d");
      }
    }
    if (j > 0 && !position_less(positions[j - 1], positions[j])) {
      throw Error("loci are not strictly sorted by (chromosome, position) at " + locus_ids[j]);
    }
  }
}

ReadData ReadData::select_loci(std::span<const std::size_t> rows) const {
  ReadData out;
  const std::size_t T = num_samples();
  out.total = Matrix<int>(rows.size(), T);
  out.mutant = Matrix<int>(rows.size(), T);
  out.coverage = coverage;
  out.sample_names = sample_names;
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      out.total(i, t) = total(rows[i], t);
      out.mutant(i, t) = mutant(rows[i], t);
    }
    out.positions.push_back(positions[rows[i]]);
    out.locus_ids.push_back(locus_ids[rows[i]]);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Tree

Tree::Tree(std::vector<int> zero_based_parents) : parent_(std::move(zero_based_parents)) {
  build_masks();
}

void Tree::build_masks() {
  desc_.assign(parent_.size(), 0);
  // Children always carry larger indices, so a reverse sweep accumulates subtrees.
  for (std::size_t k = parent_.size(); k-- > 0;) {
    desc_[k] |= std::uint64_t{1} << k;
    if (parent_[k] >= 0) desc_[static_cast<std::size_t>(parent_[k])] |= desc_[k];
  }
}

Tree Tree::from_parent_vector(std::span<const int> parents) {
  if (parents.empty()) throw Error("tree must have at least one node");
  if (parents.size() > kMaxNodes) throw Error("tree has too many nodes");
  if (parents[0] != 0) throw Error("root entry of the parent vector must be 0");
  std::vector<int> zb(parents.size());
  zb[0] = -1;
  for (std::size_t k = 1; k < parents.size(); ++k) {
    // 1-based: node k+1 must have parent in {1..k}
    if (parents[k] < 1 || parents[k] > static_cast<int>(k)) {
      throw Error("parent of node " + std::to_string(k + 1) + " must lie in {1.." + std::to_string(k) +
                  "}, got " + std::to_string(parents[k]));
    }
    zb[k] = parents[k] - 1;
  }
  return Tree(std::move(zb));
}

Tree validate_tree(std::span<const int> parents) { return Tree::from_parent_vector(parents); }

std::vector<int> Tree::descendants(int node) const {
  std::vector<int> out;
  const auto mask = descendant_mask(node);
  for (std::size_t k = 0; k < size(); ++k) {
    if ((mask >> k) & 1u) out.push_back(static_cast<int>(k));
  }
  return out;
}

std::vector<int> Tree::children(int node) const {
  std::vector<int> out;
  for (std::size_t k = 1; k < size(); ++k) {
    if (parent_[k] == node) out.push_back(static_cast<int>(k));
  }
  return out;
}

bool Tree::is_leaf(int node) const { return std::popcount(descendant_mask(node)) == 1; }

std::vector<int> Tree::leaves() const {
  std::vector<int> out;
  for (std::size_t k = 0; k < size(); ++k) {
    if (is_leaf(static_cast<int>(k))) out.push_back(static_cast<int>(k));
  }
  return out;
}

std::vector<int> Tree::parent_vector() const {
  std::vector<int> out(parent_.size());
  for (std::size_t k = 0; k < parent_.size(); ++k) out[k] = parent_[k] + 1;
  return out;
}

std::string Tree::to_string() const {
  std::ostringstream os;
  os << '(';
  const auto pv = parent_vector();
  for (std::size_t k = 0; k < pv.size(); ++k) os << (k ? "," : "") << pv[k];
  os << ')';
  return os.str();
}

Tree Tree::rewired(int node, int new_parent) const {
  if (node <= 0 || static_cast<std::size_t>(node) >= size() || new_parent < 0 || new_parent >= node) {
    throw Error("rewire would break the canonical ordering");
  }
  auto p = parent_;
  p[static_cast<std::size_t>(node)] = new_parent;
  return Tree(std::move(p));
}

std::vector<Tree> enumerate_trees(std::size_t num_nodes) {
  if (num_nodes == 0) throw Error("tree must have at least one node");
  if (num_nodes > kMaxEnumeratedNodes) {
    throw Error("refusing to enumerate trees with more than " + std::to_string(kMaxEnumeratedNodes) + " nodes");
  }
  std::vector<Tree> out;
  std::vector<int> pv(num_nodes, 1);
  pv[0] = 0;
  while (true) {
    out.push_back(Tree::from_parent_vector(pv));
    // Odometer increment over positions 1..K-1 with digit k in {1..k}, last position fastest.
    std::size_t k = num_nodes;
    while (k-- > 1) {
      if (pv[k] < static_cast<int>(k)) {
        ++pv[k];
        break;
      }
      pv[k] = 1;
    }
    if (k == 0) break;
  }
  return out;
}

std::string shape_signature(const Tree& tree) {
  std::function<std::string(int)> sig = [&](int node) {
    std::vector<std::string> parts;
    for (int c : tree.children(node)) parts.push_back(sig(c));
    std::sort(parts.begin(), parts.end());
    std::string s = "(";
    for (const auto& p : parts) s += p;
    return s + ")";
  };
  return sig(0);
}

bool same_shape(const Tree& a, const Tree& b) {
  return a.size() == b.size() && shape_signature(a) == shape_signature(b);
}

// ---------------------------------------------------------------------------
// SegmentMap

SegmentMap::SegmentMap(std::vector<int> ids) : ids_(std::move(ids)) {
  int expected = 0;
  for (std::size_t j = 0; j < ids_.size(); ++j) {
    if (j == 0) {
      if (ids_[0] != 0) throw Error("segment ids must start at 0");
      starts_.push_back(0);
      continue;
    }
    if (ids_[j] == expected) continue;
    if (ids_[j] != expected + 1) throw Error("segment ids must be contiguous and non-decreasing");
    ++expected;
    starts_.push_back(j);
  }
}

SegmentMap SegmentMap::single(std::size_t num_loci) { return SegmentMap(std::vector<int>(num_loci, 0)); }

SegmentMap SegmentMap::from_lengths(std::span<const std::size_t> lengths) {
  std::vector<int> ids;
  for (std::size_t s = 0; s < lengths.size(); ++s) {
    if (lengths[s] == 0) throw Error("segments must be non-empty");
    ids.insert(ids.end(), lengths[s], static_cast<int>(s));
  }
  return SegmentMap(std::move(ids));
}

void SegmentMap::check_against(const ReadData& data) const {
  if (num_loci() != data.num_loci()) throw Error("segment map covers a different number of loci than the reads");
  for (std::size_t s = 0; s < num_segments(); ++s) {
    for (std::size_t j = begin(s) + 1; j < end(s); ++j) {
      if (data.positions[j].chrom != data.positions[begin(s)].chrom) {
        throw Error("segment " + std::to_string(s) + " spans more than one chromosome");
      }
    }
  }
}

void Hyperparams::validate() const {
  if (!(gamma > 0.0)) throw Error("gamma must be positive");
  if (!(a_pi > 0.0) || !(b_pi > 0.0)) throw Error("Beta prior parameters must be positive");
  if (!(zeta > 0.0 && zeta < 1.0)) throw Error("zeta must lie in (0,1)");
  if (max_snv_copies < 1) throw Error("max_snv_copies must be at least 1");
  if (max_total_copies < 2) throw Error("max_total_copies must be at least 2");
}

// ---------------------------------------------------------------------------
// Genotypes

bool locus_within_cap(const Tree& tree, const SnvOrigin& snv, const CnvOrigin& cnv, int cap) {
  const std::uint64_t in_snv = tree.descendant_mask(snv.clone);
  const std::uint64_t in_cnv = cnv.is_null() ? 0 : tree.descendant_mask(cnv.clone);
  const std::uint64_t all = tree.descendant_mask(0);
  auto ok = [cap](int l) { return l >= 0 && l <= cap; };
  if ((all & ~in_snv & ~in_cnv) && !ok(2)) return false;
  if ((in_snv & ~in_cnv) && !ok(2 + snv.copies)) return false;
  if ((in_cnv & ~in_snv) && !ok(2 + cnv.change)) return false;
  if ((in_cnv & in_snv) && !ok(2 + cnv.change + snv.copies)) return false;
  return true;
}

Genotypes expand_genotypes(const Tree& tree, std::span<const SnvOrigin> snv, std::span<const CnvOrigin> cnv,
                           const SegmentMap& segments, int max_total_copies) {
  const std::size_t J = snv.size();
  const std::size_t K = tree.size();
  if (segments.num_loci() != J) throw Error("segment map and SNV origins disagree on locus count");
  if (cnv.size() != segments.num_segments()) throw Error("one CNV origin per segment is required");
  Genotypes g{Matrix<int>(J, K, 0), Matrix<int>(J, K, 2), true};
  for (std::size_t j = 0; j < J; ++j) {
    const auto& c = cnv[static_cast<std::size_t>(segments.segment_of(j))];
    for (std::size_t k = 0; k < K; ++k) {
      const int node = static_cast<int>(k);
      const int z = tree.is_descendant(node, snv[j].clone) ? snv[j].copies : 0;
      const int n = 2 + ((!c.is_null() && tree.is_descendant(node, c.clone)) ? c.change : 0);
      g.mutant(j, k) = z;
      g.total(j, k) = n + z;
      if (n + z < 0 || n + z > max_total_copies) g.within_cap = false;
    }
  }
  return g;
}

Matrix<double> fractions(const Matrix<double>& theta) {
  Matrix<double> f(theta.rows(), theta.cols());
  for (std::size_t t = 0; t < theta.cols(); ++t) {
    double sum = 0.0;
    for (std::size_t k = 0; k < theta.rows(); ++k) sum += theta(k, t);
    for (std::size_t k = 0; k < theta.rows(); ++k) f(k, t) = theta(k, t) / sum;
  }
  return f;
}

Matrix<double> clone_cellularity(const Tree& tree, const Matrix<double>& fractions) {
  const std::size_t K = tree.size();
  Matrix<double> cell(K, fractions.cols(), 0.0);
  for (std::size_t k = K; k-- > 0;) {
    for (std::size_t t = 0; t < fractions.cols(); ++t) {
      cell(k, t) += fractions(k, t);
      if (k > 0) cell(static_cast<std::size_t>(tree.parent(static_cast<int>(k))), t) += cell(k, t);
    }
  }
  return cell;
}

}  // namespace subclone
