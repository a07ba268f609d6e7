#include "subclone/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "subclone/model.hpp"

namespace subclone {

namespace {

// log mean exp(-delta * L) over x; -inf if every weight vanishes.
double log_mean_weight(std::span<const double> x, double delta) {
  double top = -std::numeric_limits<double>::infinity();
  for (double v : x) top = std::max(top, -delta * v);
  if (!std::isfinite(top)) return top;
  double sum = 0.0;
  for (double v : x) sum += std::exp(-delta * v - top);
  return top + std::log(sum / static_cast<double>(x.size()));
}

double batch_standard_error(std::span<const double> x, double delta) {
  const std::size_t batches = std::min(kFreeEnergyBatches, x.size());
  if (batches < 2) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t size = x.size() / batches;
  std::vector<double> terms;
  for (std::size_t b = 0; b < batches; ++b) {
    const double t = -log_mean_weight(x.subspan(b * size, size), delta);
    if (!std::isfinite(t)) return std::numeric_limits<double>::infinity();
    terms.push_back(t);
  }
  double mean = 0.0;
  for (double t : terms) mean += t;
  mean /= static_cast<double>(batches);
  double ss = 0.0;
  for (double t : terms) ss += (t - mean) * (t - mean);
  return std::sqrt(ss / static_cast<double>(batches - 1) / static_cast<double>(batches));
}

}  // namespace

FreeEnergy free_energy(std::span<const std::vector<double>> neg_loglik, std::span<const double> betas) {
  if (betas.size() < 2 || neg_loglik.size() != betas.size()) {
    throw Error("free energy needs one trace per inverse temperature, ending at beta = 0");
  }
  if (betas.front() != 1.0 || betas.back() != 0.0) throw Error("inverse temperatures must run from 1 to 0");
  for (std::size_t j = 1; j < betas.size(); ++j) {
    if (!(betas[j] < betas[j - 1])) throw Error("inverse temperatures must be strictly decreasing");
  }
  FreeEnergy out;
  for (std::size_t j = 0; j + 1 < betas.size(); ++j) {
    const auto& trace = neg_loglik[j + 1];
    if (trace.empty()) throw Error("empty trace at rung " + std::to_string(j + 2));
    const double delta = betas[j] - betas[j + 1];
    const double lm = log_mean_weight(trace, delta);
    if (!std::isfinite(lm)) {
      throw Error("numerically degenerate rung " + std::to_string(j + 2) + ": every weight is zero");
    }
    out.terms.push_back(-lm);
    out.standard_errors.push_back(batch_standard_error(trace, delta));
    out.value += -lm;
  }
  return out;
}

std::size_t select_model(std::span<const FreeEnergyReport> reports) {
  if (reports.empty()) throw Error("no candidate models");
  const FreeEnergyReport* best = &reports.front();
  for (const auto& r : reports) {
    const double a = r.estimate.value;
    const double b = best->estimate.value;
    if (a < b || (a == b && r.num_clones < best->num_clones)) best = &r;
  }
  return best->num_clones;
}

}  // namespace subclone
