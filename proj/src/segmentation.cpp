#include "subclone/segmentation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace subclone {

void SegSignal::validate() const {
  if (values.rows() == 0 || values.cols() == 0) throw Error("segmentation signal is empty");
  if (chrom_starts.empty() || chrom_starts.front() != 0) throw Error("chromosome starts must begin at row 0");
  for (std::size_t i = 1; i < chrom_starts.size(); ++i) {
    if (chrom_starts[i] <= chrom_starts[i - 1] || chrom_starts[i] >= values.rows()) {
      throw Error("chromosome starts must be strictly increasing row indices");
    }
  }
}

SegSignal normalize_reads(const ReadData& reads) {
  const std::size_t J = reads.num_loci();
  const std::size_t T = reads.num_samples();
  SegSignal out;
  out.values = Matrix<double>(J, T);
  for (std::size_t t = 0; t < T; ++t) {
    std::vector<double> col(J);
    for (std::size_t j = 0; j < J; ++j) col[j] = reads.total(j, t);
    std::sort(col.begin(), col.end());
    const double median = J % 2 ? col[J / 2] : 0.5 * (col[J / 2 - 1] + col[J / 2]);
    if (!(median > 0.0)) {
      throw Error("sample " + std::to_string(t + 1) + " has zero median total reads; cannot normalize");
    }
    for (std::size_t j = 0; j < J; ++j) {
      const double d = std::max(0.5, static_cast<double>(reads.total(j, t)));
      out.values(j, t) = std::log2(d / median);
    }
  }
  out.chrom_starts.push_back(0);
  for (std::size_t j = 1; j < J; ++j) {
    if (reads.positions[j].chrom != reads.positions[j - 1].chrom) out.chrom_starts.push_back(j);
  }
  return out;
}

double segmentation_rss(const SegSignal& signal, const SegmentMap& segments) {
  const std::size_t T = signal.values.cols();
  if (segments.num_loci() != signal.values.rows()) throw Error("segment map does not match the signal length");
  double rss = 0.0;
  for (std::size_t s = 0; s < segments.num_segments(); ++s) {
    const std::size_t b = segments.begin(s);
    const std::size_t e = segments.end(s);
    for (std::size_t t = 0; t < T; ++t) {
      double mean = 0.0;
      for (std::size_t k = b; k < e; ++k) mean += signal.values(k, t);
      mean /= static_cast<double>(e - b);
      for (std::size_t k = b; k < e; ++k) {
        const double r = signal.values(k, t) - mean;
        rss += r * r;
      }
    }
  }
  return rss;
}

double segmentation_loss(const SegSignal& signal, const SegmentMap& segments, double gamma) {
  return segmentation_rss(signal, segments) + gamma * static_cast<double>(segments.num_segments());
}

namespace {

struct DpCell {
  double loss = std::numeric_limits<double>::infinity();
  std::size_t segments = 0;
  std::size_t last_start = 0;
};

bool close(double a, double b) {
  return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)});
}

// Breakpoints (segment start rows, relative to `first`) of the optimal segmentation of rows
// [first, last).
std::vector<std::size_t> segment_chromosome(const Matrix<double>& y, std::size_t first, std::size_t last,
                                            double gamma) {
  const std::size_t n = last - first;
  const std::size_t T = y.cols();
  // Centering per sample keeps the prefix-sum cost numerically tight.
  std::vector<double> centre(T, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    for (std::size_t k = first; k < last; ++k) centre[t] += y(k, t);
    centre[t] /= static_cast<double>(n);
  }
  Matrix<double> s1(n + 1, T, 0.0), s2(n + 1, T, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t t = 0; t < T; ++t) {
      const double v = y(first + k, t) - centre[t];
      s1(k + 1, t) = s1(k, t) + v;
      s2(k + 1, t) = s2(k, t) + v * v;
    }
  }
  auto cost = [&](std::size_t i, std::size_t j) {
    double c = 0.0;
    const double len = static_cast<double>(j - i);
    for (std::size_t t = 0; t < T; ++t) {
      const double a = s1(j, t) - s1(i, t);
      c += (s2(j, t) - s2(i, t)) - a * a / len;
    }
    return std::max(0.0, c);
  };

  std::vector<DpCell> best(n + 1);
  best[0] = {0.0, 0, 0};
  for (std::size_t j = 1; j <= n; ++j) {
    DpCell cur;
    for (std::size_t i = 0; i < j; ++i) {
      const double loss = best[i].loss + cost(i, j) + gamma;
      const std::size_t segs = best[i].segments + 1;
      bool take = false;
      if (!std::isfinite(cur.loss)) {
        take = true;
      } else if (close(loss, cur.loss)) {
        // i increases, so an equal segment count never displaces the earlier breakpoint.
        take = segs < cur.segments;
      } else {
        take = loss < cur.loss;
      }
      if (take) cur = {loss, segs, i};
    }
    best[j] = cur;
  }
  std::vector<std::size_t> starts;
  for (std::size_t j = n; j > 0; j = best[j].last_start) starts.push_back(best[j].last_start);
  std::reverse(starts.begin(), starts.end());
  return starts;
}

}  // namespace

SegmentMap multipcf(const SegSignal& signal, double gamma) {
  signal.validate();
  if (!(gamma > 0.0)) throw Error("segmentation penalty must be positive");
  const std::size_t J = signal.values.rows();
  std::vector<int> ids(J);
  int next = 0;
  for (std::size_t c = 0; c < signal.chrom_starts.size(); ++c) {
    const std::size_t first = signal.chrom_starts[c];
    const std::size_t last = c + 1 < signal.chrom_starts.size() ? signal.chrom_starts[c + 1] : J;
    const auto starts = segment_chromosome(signal.values, first, last, gamma);
    for (std::size_t s = 0; s < starts.size(); ++s) {
      const std::size_t b = first + starts[s];
      const std::size_t e = s + 1 < starts.size() ? first + starts[s + 1] : last;
      for (std::size_t k = b; k < e; ++k) ids[k] = next;
      ++next;
    }
  }
  return SegmentMap(std::move(ids));
}

GammaSelection select_gamma(const SegSignal& signal, std::span<const double> candidates) {
  if (candidates.empty()) throw Error("at least one segmentation penalty candidate is required");
  for (double g : candidates) {
    if (!(g > 0.0)) throw Error("segmentation penalty candidates must be positive");
  }
  const double nT = static_cast<double>(signal.values.rows() * signal.values.cols());
  GammaSelection out;
  std::vector<SegmentMap> maps;
  for (double g : candidates) {
    auto seg = multipcf(signal, g);
    GammaCandidate c;
    c.gamma = g;
    c.rss = segmentation_rss(signal, seg);
    c.num_segments = seg.num_segments();
    c.bic = c.rss > 0.0 ? nT * std::log(c.rss / nT) +
                              static_cast<double>(c.num_segments) * static_cast<double>(signal.values.cols() + 1) *
                                  std::log(nT)
                        : -std::numeric_limits<double>::infinity();
    out.candidates.push_back(c);
    maps.push_back(std::move(seg));
  }

  const bool all_perfect =
      std::all_of(out.candidates.begin(), out.candidates.end(), [](const auto& c) { return c.rss == 0.0; });
  if (all_perfect && out.candidates.size() > 1) {
    const auto n0 = out.candidates.front().num_segments;
    const bool distinct = std::any_of(out.candidates.begin(), out.candidates.end(),
                                      [n0](const auto& c) { return c.num_segments != n0; });
    if (distinct) throw Error("degenerate fit: every penalty yields zero residual with different segment counts");
  }

  std::size_t pick = 0;
  for (std::size_t i = 1; i < out.candidates.size(); ++i) {
    const auto& a = out.candidates[i];
    const auto& b = out.candidates[pick];
    bool better = false;
    if (!std::isfinite(a.bic) || !std::isfinite(b.bic)) {
      if (a.bic != b.bic) {
        better = a.bic < b.bic;
      } else if (a.num_segments != b.num_segments) {
        better = a.num_segments < b.num_segments;
      } else {
        better = a.gamma > b.gamma;
      }
    } else if (close(a.bic, b.bic)) {
      better = a.gamma > b.gamma;
    } else {
      better = a.bic < b.bic;
    }
    if (better) pick = i;
  }
  out.gamma = out.candidates[pick].gamma;
  out.segments = maps[pick];
  return out;
}

std::vector<double> default_gamma_grid(std::size_t num_samples) {
  std::vector<double> grid;
  for (double g : {5.0, 10.0, 20.0, 40.0, 80.0}) grid.push_back(g * static_cast<double>(num_samples));
  return grid;
}

}  // namespace subclone
