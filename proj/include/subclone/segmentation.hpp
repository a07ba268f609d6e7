#pragma once

#include <span>
#include <vector>

#include "subclone/matrix.hpp"
#include "subclone/model.hpp"

namespace subclone {

/// Copy-number signal, one row per locus in genome order. `chrom_starts` holds the row
/// index where each chromosome begins (always starts with 0).
struct SegSignal {
  Matrix<double> values;
  std::vector<std::size_t> chrom_starts;

  void validate() const;
};

/// log2 of total reads over the per-sample median. Zero-read loci are floored at half a read.
SegSignal normalize_reads(const ReadData& reads);

/// Joint residual sum of squares of `signal` around per-segment, per-sample means.
double segmentation_rss(const SegSignal& signal, const SegmentMap& segments);

/// Residual sum of squares plus `gamma` per segment.
double segmentation_loss(const SegSignal& signal, const SegmentMap& segments, double gamma);

/// Exact minimizer of the penalized joint least-squares loss. Segments never cross a
/// chromosome start. Ties go to fewer segments, then to the earlier last breakpoint.
SegmentMap multipcf(const SegSignal& signal, double gamma);

struct GammaCandidate {
  double gamma = 0.0;
  double rss = 0.0;
  std::size_t num_segments = 0;
  double bic = 0.0;
};

struct GammaSelection {
  double gamma = 0.0;
  SegmentMap segments;
  std::vector<GammaCandidate> candidates;
};

/// BIC = nT log(RSS / nT) + |S| (T + 1) log(nT); ties go to the larger gamma.
GammaSelection select_gamma(const SegSignal& signal, std::span<const double> candidates);

/// {5, 10, 20, 40, 80} scaled by the number of samples.
std::vector<double> default_gamma_grid(std::size_t num_samples);

}  // namespace subclone
