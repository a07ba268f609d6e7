#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "subclone/model.hpp"
#include "subclone/postprocess.hpp"
#include "subclone/sampler.hpp"
#include "subclone/selection.hpp"
#include "subclone/simulate.hpp"

namespace subclone {

struct QcOptions {
  int min_reads = 15;          // drop loci with d <= min_reads in any sample
  double min_mean_vaf = 0.1;   // drop loci with mean VAF <= this
  std::size_t clusters = 60;
  double drop_fraction = 0.5;  // per k-means cluster
  int max_iterations = 100;
};

struct RunConfig {
  Hyperparams hyper;
  SamplerConfig sampler;
  std::size_t k_min = 3;
  std::size_t k_max = 7;
  std::vector<double> phi;
  std::string reads;
  std::string segments;
  std::string truth;
  std::string out = "out";
  QcOptions qc;
  double segment_penalty = 0.0;  // 0: pick by BIC over the default grid
  // Model selection ladder and the number of exact prior draws for the beta = 0 rung.
  std::size_t select_chains = 16;
  double select_min_beta = 1e-3;
  std::size_t prior_draws = 4000;
  // Simulation.
  std::vector<int> sim_tree{0, 1, 2, 2};
  double sim_depth = 60.0;
  std::size_t sim_loci = 200;
  std::size_t sim_samples = 4;
  std::size_t sim_segment_length = 20;
  double sim_cnv_fraction = 0.25;

  /// Throws Error on unknown keys or malformed values.
  void set(const std::string& key, const std::string& value);
  void validate() const;
};

/// Every accepted configuration key.
const std::vector<std::string>& config_keys();

/// Flat `key = value` lines; `#` starts a comment; arrays are written `[a, b, c]`.
void load_config(std::istream& in, RunConfig& config);
void load_config_file(const std::string& path, RunConfig& config);
/// SUBCLONE_<KEY> environment variables (key upper-cased) override the file.
void apply_env_overrides(RunConfig& config);

std::vector<std::string> parse_list(const std::string& value);

/// Header: locus_id, chrom, pos, then d_<s>, x_<s> per sample. Rows are sorted by
/// (chrom, pos) with a warning if needed; duplicate positions are rejected.
ReadData parse_reads_tsv(std::istream& in, const std::vector<double>& coverage,
                         std::vector<std::string>* warnings = nullptr);
ReadData read_reads_file(const std::string& path, const std::vector<double>& coverage,
                         std::vector<std::string>* warnings = nullptr);
void write_reads_tsv(std::ostream& out, const ReadData& data);

struct QcReport {
  std::vector<std::string> dropped_depth;
  std::vector<std::string> dropped_vaf;
  std::vector<std::string> dropped_cluster;
  std::size_t retained = 0;
};

struct QcResult {
  ReadData data;
  QcReport report;
};

QcResult quality_control(const ReadData& data, const QcOptions& options, std::uint64_t seed);

/// Lloyd's algorithm with a seeded k-means++ start. Returns a cluster label per row.
std::vector<int> kmeans(const Matrix<double>& points, std::size_t k, int max_iterations, Rng& rng);

/// Shortest round-trip decimal form.
std::string format_double(double value);

void write_segments_tsv(std::ostream& out, const ReadData& data, const SegmentMap& segments);
SegmentMap read_segments_tsv(std::istream& in, const ReadData& data);

std::string tree_dot(const Tree& tree);

template <typename T>
void write_matrix_tsv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::string>& row_names, const Matrix<T>& m);

/// JSON documents (compact, key-sorted).
std::string scenario_json(const Scenario& scenario);
Scenario scenario_from_json(const std::string& text);
std::string point_estimate_json(const PointEstimate& estimate);
PointEstimate point_estimate_from_json(const std::string& text);
std::string state_json(const ChainState& state);
std::string error_json(const std::string& message);

std::string read_text_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace subclone
