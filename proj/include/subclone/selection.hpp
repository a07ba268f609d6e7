#pragma once

#include <span>
#include <vector>

namespace subclone {

struct FreeEnergy {
  double value = 0.0;
  std::vector<double> terms;           // -log E^{beta_{j+1}}[exp(-(beta_j - beta_{j+1}) L)]
  std::vector<double> standard_errors;  // per term, batch means
};

/// Stepping-stone estimate of the Bayes free energy. `betas` is 1 = b_1 > ... > b_c > b_{c+1} = 0
/// and `neg_loglik[j]` holds the trace of -log-likelihood values sampled at betas[j].
/// The first trace is unused by the estimator.
FreeEnergy free_energy(std::span<const std::vector<double>> neg_loglik, std::span<const double> betas);
inline constexpr std::size_t kFreeEnergyBatches = 20;

struct FreeEnergyReport {
  std::size_t num_clones = 0;
  FreeEnergy estimate;
};

/// K with the smallest free energy; ties go to the smaller K.
std::size_t select_model(std::span<const FreeEnergyReport> reports);

}  // namespace subclone
