#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subclone/io.hpp"
#include "subclone/likelihood.hpp"
#include "subclone/postprocess.hpp"
#include "subclone/sampler.hpp"
#include "subclone/segmentation.hpp"
#include "subclone/selection.hpp"

namespace subclone {

/// Segmentation of the read depths; BIC over the default grid when `penalty` is 0.
GammaSelection segment_reads(const ReadData& data, double penalty);

struct FitResult {
  TraceStore trace;
  std::vector<ChainState> aligned;
  PointEstimate estimate;
  Geweke geweke;
};

FitResult fit_model(const Model& model, const SamplerConfig& config);

/// Geometric ladder from 1 down to `min_beta` over `chains` rungs.
std::vector<double> selection_ladder(std::size_t chains, double min_beta);

struct SelectionFit {
  FreeEnergyReport report;
  std::vector<double> betas;  // including the trailing 0
  FitResult fit;
  bool prior_used_mcmc = false;
};

/// Tempered run on `ladder` plus `prior_draws` prior samples for the beta = 0 rung.
SelectionFit fit_with_free_energy(const Model& model, SamplerConfig config, const std::vector<double>& ladder,
                                  std::size_t prior_draws);

struct KRange {
  std::size_t lo = 0;
  std::size_t hi = 0;
};
/// "4" or "3..7".
KRange parse_k_range(const std::string& text);

struct CliOptions {
  std::string command;
  std::vector<std::string> configs;
  std::optional<std::uint64_t> seed;
  std::string k;
  std::string out;
  std::optional<std::size_t> threads;
  std::string reads;
  std::string segments;
  std::string truth;
  std::string estimate;
};

/// Runs one subcommand; writes a JSON error to `err` and returns nonzero on failure.
int run_pipeline(const CliOptions& options, std::ostream& out, std::ostream& err);

}  // namespace subclone
