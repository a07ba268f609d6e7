#pragma once

#include <cstdint>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "subclone/matrix.hpp"

namespace subclone {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct GenomicPosition {
  std::string chrom;
  std::int64_t pos = 0;

  friend bool operator==(const GenomicPosition&, const GenomicPosition&) = default;
};

/// Natural chromosome order: "chr2" < "chr10" < "chrX". A leading "chr" is ignored.
int compare_chrom(const std::string& a, const std::string& b);
bool position_less(const GenomicPosition& a, const GenomicPosition& b);

/// Per-locus, per-sample read counts. Rows are loci, columns are samples.
struct ReadData {
  Matrix<int> total;
  Matrix<int> mutant;
  std::vector<double> coverage;  // designed depth per sample
  std::vector<GenomicPosition> positions;
  std::vector<std::string> locus_ids;
  std::vector<std::string> sample_names;

  std::size_t num_loci() const { return total.rows(); }
  std::size_t num_samples() const { return total.cols(); }

  /// Throws Error on any shape, range or ordering violation.
  void validate() const;

  /// Subset of loci in the given (increasing) row order.
  ReadData select_loci(std::span<const std::size_t> rows) const;

  friend bool operator==(const ReadData&, const ReadData&) = default;
};

/// Rooted subclone phylogeny in canonical form. Nodes are 0-based; node 0 is the normal
/// subclone and every other node's parent has a smaller index.
class Tree {
 public:
  static constexpr std::size_t kMaxNodes = 63;

  Tree() : Tree(std::vector<int>{-1}) {}

  /// Builds from the 1-based canonical notation, e.g. {0, 1, 2, 2}. Throws Error if invalid.
  static Tree from_parent_vector(std::span<const int> parents);

  std::size_t size() const { return parent_.size(); }
  /// 0-based parent, -1 for the root.
  int parent(int node) const { return parent_[static_cast<std::size_t>(node)]; }
  std::uint64_t descendant_mask(int node) const { return desc_[static_cast<std::size_t>(node)]; }
  bool is_descendant(int node, int ancestor) const {
    return (descendant_mask(ancestor) >> node) & 1u;
  }
  std::vector<int> descendants(int node) const;
  std::vector<int> children(int node) const;
  bool is_leaf(int node) const;
  std::vector<int> leaves() const;

  /// 1-based canonical notation (inverse of from_parent_vector).
  std::vector<int> parent_vector() const;
  std::string to_string() const;

  /// Copy with `node` attached to `new_parent`; the result must stay canonical.
  Tree rewired(int node, int new_parent) const;

  friend bool operator==(const Tree& a, const Tree& b) { return a.parent_ == b.parent_; }
  friend bool operator<(const Tree& a, const Tree& b) { return a.parent_ < b.parent_; }

 private:
  explicit Tree(std::vector<int> zero_based_parents);
  void build_masks();

  std::vector<int> parent_;
  std::vector<std::uint64_t> desc_;
};

/// Validates a 1-based canonical parent vector.
Tree validate_tree(std::span<const int> parents);

/// All canonical trees with `num_nodes` nodes, in lexicographic order of parent vectors.
std::vector<Tree> enumerate_trees(std::size_t num_nodes);
inline constexpr std::size_t kMaxEnumeratedNodes = 10;

/// Rooted, unlabeled shape equality (AHU canonical strings).
bool same_shape(const Tree& a, const Tree& b);
std::string shape_signature(const Tree& tree);

struct SnvOrigin {
  int clone = 1;   // 0-based node where the mutation arose, >= 1
  int copies = 1;  // mutant copies gained, 1..max_snv_copies
  friend bool operator==(const SnvOrigin&, const SnvOrigin&) = default;
};

/// `change == 0` encodes "no CNV", the (0,0) state.
struct CnvOrigin {
  int clone = 0;
  int change = 0;
  bool is_null() const { return change == 0; }
  friend bool operator==(const CnvOrigin&, const CnvOrigin&) = default;
};

/// Locus-to-segment assignment; segments are contiguous and numbered from 0 in order.
class SegmentMap {
 public:
  SegmentMap() = default;
  explicit SegmentMap(std::vector<int> ids);
  static SegmentMap single(std::size_t num_loci);
  static SegmentMap from_lengths(std::span<const std::size_t> lengths);

  std::size_t num_loci() const { return ids_.size(); }
  std::size_t num_segments() const { return starts_.size(); }
  int segment_of(std::size_t locus) const { return ids_[locus]; }
  std::size_t begin(std::size_t segment) const { return starts_[segment]; }
  std::size_t end(std::size_t segment) const {
    return segment + 1 < starts_.size() ? starts_[segment + 1] : ids_.size();
  }
  std::size_t length(std::size_t segment) const { return end(segment) - begin(segment); }
  const std::vector<int>& ids() const { return ids_; }

  /// Throws if a segment spans two chromosomes or the locus count differs.
  void check_against(const ReadData& data) const;

  friend bool operator==(const SegmentMap& a, const SegmentMap& b) { return a.ids_ == b.ids_; }

 private:
  std::vector<int> ids_;
  std::vector<std::size_t> starts_;
};

struct Hyperparams {
  double gamma = 1.5;        // Gamma(gamma, 1) prior on theta
  double a_pi = 10000.0;     // Beta prior on pi
  double b_pi = 1.0;
  double zeta = 0.01;        // SNV copy decay
  int max_snv_copies = 2;    // M_S
  int max_total_copies = 4;  // M_C

  void validate() const;
};

/// One full parameter tuple of the model plus its cached negative log-likelihood.
struct ChainState {
  Matrix<double> theta;  // K x T, strictly positive
  std::vector<SnvOrigin> snv;
  std::vector<CnvOrigin> cnv;  // one per segment
  Tree tree;
  double pi = 0.5;
  double neg_loglik = 0.0;

  std::size_t num_clones() const { return theta.rows(); }

  friend bool operator==(const ChainState&, const ChainState&) = default;
};

struct Genotypes {
  Matrix<int> mutant;  // Z, J x K
  Matrix<int> total;   // L, J x K
  bool within_cap = true;
};

Genotypes expand_genotypes(const Tree& tree, std::span<const SnvOrigin> snv,
                           std::span<const CnvOrigin> cnv, const SegmentMap& segments,
                           int max_total_copies);

/// True iff every subclone's total copy number at a locus with these origins lies in [0, cap].
bool locus_within_cap(const Tree& tree, const SnvOrigin& snv, const CnvOrigin& cnv, int cap);

/// Column-normalized theta.
Matrix<double> fractions(const Matrix<double>& theta);

/// cell(k, t): summed fraction of node k and all its descendants.
Matrix<double> clone_cellularity(const Tree& tree, const Matrix<double>& fractions);

}  // namespace subclone
