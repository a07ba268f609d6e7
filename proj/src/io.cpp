#include "subclone/io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <json.hpp>

namespace subclone {

using nlohmann::json;

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

template <typename T>
T parse_number(const std::string& text, const std::string& what) {
  const std::string s = trim(text);
  T value{};
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(first, last, value);
  if (s.empty() || ec != std::errc{} || ptr != last) throw Error("invalid " + what + ": '" + text + "'");
  return value;
}

double parse_double(const std::string& s, const std::string& what) { return parse_number<double>(s, what); }
std::size_t parse_size(const std::string& s, const std::string& what) { return parse_number<std::size_t>(s, what); }
int parse_int(const std::string& s, const std::string& what) { return parse_number<int>(s, what); }

std::vector<double> parse_doubles(const std::string& v, const std::string& key) {
  std::vector<double> out;
  for (const auto& item : parse_list(v)) out.push_back(parse_double(item, key));
  return out;
}

using Setter = std::function<void(RunConfig&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = {
      {"gamma", [](RunConfig& c, const std::string& v) { c.hyper.gamma = parse_double(v, "gamma"); }},
      {"a_pi", [](RunConfig& c, const std::string& v) { c.hyper.a_pi = parse_double(v, "a_pi"); }},
      {"b_pi", [](RunConfig& c, const std::string& v) { c.hyper.b_pi = parse_double(v, "b_pi"); }},
      {"zeta", [](RunConfig& c, const std::string& v) { c.hyper.zeta = parse_double(v, "zeta"); }},
      {"max_snv_copies",
       [](RunConfig& c, const std::string& v) { c.hyper.max_snv_copies = parse_int(v, "max_snv_copies"); }},
      {"max_total_copies",
       [](RunConfig& c, const std::string& v) { c.hyper.max_total_copies = parse_int(v, "max_total_copies"); }},
      {"num_chains", [](RunConfig& c, const std::string& v) { c.sampler.num_chains = parse_size(v, "num_chains"); }},
      {"min_beta", [](RunConfig& c, const std::string& v) { c.sampler.min_beta = parse_double(v, "min_beta"); }},
      {"betas", [](RunConfig& c, const std::string& v) { c.sampler.betas = parse_doubles(v, "betas"); }},
      {"tune", [](RunConfig& c, const std::string& v) { c.sampler.tune = parse_size(v, "tune"); }},
      {"burnin", [](RunConfig& c, const std::string& v) { c.sampler.burnin = parse_size(v, "burnin"); }},
      {"keep", [](RunConfig& c, const std::string& v) { c.sampler.keep = parse_size(v, "keep"); }},
      {"swap_interval",
       [](RunConfig& c, const std::string& v) { c.sampler.swap_interval = parse_size(v, "swap_interval"); }},
      {"slice_probability",
       [](RunConfig& c, const std::string& v) { c.sampler.slice_probability = parse_double(v, "slice_probability"); }},
      {"seed", [](RunConfig& c, const std::string& v) { c.sampler.seed = parse_number<std::uint64_t>(v, "seed"); }},
      {"threads", [](RunConfig& c, const std::string& v) { c.sampler.threads = parse_size(v, "threads"); }},
      {"k_min", [](RunConfig& c, const std::string& v) { c.k_min = parse_size(v, "k_min"); }},
      {"k_max", [](RunConfig& c, const std::string& v) { c.k_max = parse_size(v, "k_max"); }},
      {"phi", [](RunConfig& c, const std::string& v) { c.phi = parse_doubles(v, "phi"); }},
      {"reads", [](RunConfig& c, const std::string& v) { c.reads = v; }},
      {"segments", [](RunConfig& c, const std::string& v) { c.segments = v; }},
      {"truth", [](RunConfig& c, const std::string& v) { c.truth = v; }},
      {"out", [](RunConfig& c, const std::string& v) { c.out = v; }},
      {"qc_min_reads", [](RunConfig& c, const std::string& v) { c.qc.min_reads = parse_int(v, "qc_min_reads"); }},
      {"qc_min_mean_vaf",
       [](RunConfig& c, const std::string& v) { c.qc.min_mean_vaf = parse_double(v, "qc_min_mean_vaf"); }},
      {"qc_clusters", [](RunConfig& c, const std::string& v) { c.qc.clusters = parse_size(v, "qc_clusters"); }},
      {"qc_drop_fraction",
       [](RunConfig& c, const std::string& v) { c.qc.drop_fraction = parse_double(v, "qc_drop_fraction"); }},
      {"segment_penalty",
       [](RunConfig& c, const std::string& v) { c.segment_penalty = parse_double(v, "segment_penalty"); }},
      {"select_chains", [](RunConfig& c, const std::string& v) { c.select_chains = parse_size(v, "select_chains"); }},
      {"select_min_beta",
       [](RunConfig& c, const std::string& v) { c.select_min_beta = parse_double(v, "select_min_beta"); }},
      {"prior_draws", [](RunConfig& c, const std::string& v) { c.prior_draws = parse_size(v, "prior_draws"); }},
      {"sim_tree",
       [](RunConfig& c, const std::string& v) {
         c.sim_tree.clear();
         for (const auto& item : parse_list(v)) c.sim_tree.push_back(parse_int(item, "sim_tree"));
       }},
      {"sim_depth", [](RunConfig& c, const std::string& v) { c.sim_depth = parse_double(v, "sim_depth"); }},
      {"sim_loci", [](RunConfig& c, const std::string& v) { c.sim_loci = parse_size(v, "sim_loci"); }},
      {"sim_samples", [](RunConfig& c, const std::string& v) { c.sim_samples = parse_size(v, "sim_samples"); }},
      {"sim_segment_length",
       [](RunConfig& c, const std::string& v) { c.sim_segment_length = parse_size(v, "sim_segment_length"); }},
      {"sim_cnv_fraction",
       [](RunConfig& c, const std::string& v) { c.sim_cnv_fraction = parse_double(v, "sim_cnv_fraction"); }},
  };
  return table;
}

std::vector<std::string> split_tabs(const std::string& line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto tab = line.find('\t', start);
    out.push_back(line.substr(start, tab == std::string::npos ? std::string::npos : tab - start));
    if (tab == std::string::npos) break;
    start = tab + 1;
  }
  return out;
}

bool get_line(std::istream& in, std::string& line) {
  if (!std::getline(in, line)) return false;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return true;
}

template <typename T>
json matrix_json(const Matrix<T>& m) {
  json rows = json::array();
  for (std::size_t r = 0; r < m.rows(); ++r) {
    json row = json::array();
    for (std::size_t c = 0; c < m.cols(); ++c) row.push_back(m(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

template <typename T>
Matrix<T> matrix_from_json(const json& j) {
  const std::size_t rows = j.size();
  const std::size_t cols = rows ? j.at(0).size() : 0;
  Matrix<T> m(rows, cols);
  for (std::size_t r = 0; r < rows; ++r) {
    if (j.at(r).size() != cols) throw Error("ragged matrix in JSON input");
    for (std::size_t c = 0; c < cols; ++c) m(r, c) = j.at(r).at(c).get<T>();
  }
  return m;
}

json snv_json(std::span<const SnvOrigin> snv) {
  json out = json::array();
  for (const auto& z : snv) out.push_back({z.clone + 1, z.copies});
  return out;
}

json cnv_json(std::span<const CnvOrigin> cnv) {
  json out = json::array();
  for (const auto& c : cnv) out.push_back({c.is_null() ? 0 : c.clone + 1, c.change});
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Configuration

const std::vector<std::string>& config_keys() {
  static const std::vector<std::string> keys = [] {
    std::vector<std::string> k;
    for (const auto& [name, _] : setters()) k.push_back(name);
    return k;
  }();
  return keys;
}

std::vector<std::string> parse_list(const std::string& value) {
  std::string v = trim(value);
  if (v.size() >= 2 && v.front() == '[' && v.back() == ']') v = v.substr(1, v.size() - 2);
  std::vector<std::string> out;
  if (trim(v).empty()) return out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(trim(item));
  return out;
}

void RunConfig::set(const std::string& key, const std::string& value) {
  const auto it = setters().find(key);
  if (it == setters().end()) throw Error("unknown configuration key '" + key + "'");
  it->second(*this, value);
}

void RunConfig::validate() const {
  hyper.validate();
  sampler.validate();
  if (k_min < 2 || k_max < k_min) throw Error("K range must be non-empty with K >= 2");
  if (qc.drop_fraction < 0.0 || qc.drop_fraction > 1.0) throw Error("qc_drop_fraction must lie in [0,1]");
  if (qc.clusters < 1) throw Error("qc_clusters must be at least 1");
  if (segment_penalty < 0.0) throw Error("segment_penalty must be non-negative");
  if (select_chains < 2 || !(select_min_beta > 0.0 && select_min_beta < 1.0)) {
    throw Error("selection ladder needs at least two chains and select_min_beta in (0,1)");
  }
  if (prior_draws < 1) throw Error("prior_draws must be positive");
}

void load_config(std::istream& in, RunConfig& config) {
  std::string line;
  int number = 0;
  while (get_line(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw Error("config line " + std::to_string(number) + ": expected key = value");
    try {
      config.set(trim(line.substr(0, eq)), trim(line.substr(eq + 1)));
    } catch (const Error& e) {
      throw Error("config line " + std::to_string(number) + ": " + e.what());
    }
  }
}

void load_config_file(const std::string& path, RunConfig& config) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open config file " + path);
  load_config(in, config);
}

void apply_env_overrides(RunConfig& config) {
  for (const auto& key : config_keys()) {
    std::string name = "SUBCLONE_" + key;
    std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });
    if (const char* v = std::getenv(name.c_str())) {
      try {
        config.set(key, v);
      } catch (const Error& e) {
        throw Error(name + ": " + e.what());
      }
    }
  }
}

// ---------------------------------------------------------------------------
// Read tables

ReadData parse_reads_tsv(std::istream& in, const std::vector<double>& coverage, std::vector<std::string>* warnings) {
  std::string line;
  if (!get_line(in, line)) throw Error("reads table is empty");
  const auto header = split_tabs(line);
  if (header.size() < 5 || (header.size() - 3) % 2 != 0 || header[0] != "locus_id" || header[1] != "chrom" ||
      header[2] != "pos") {
    throw Error("line 1: header must be locus_id, chrom, pos, then d_<sample>, x_<sample> pairs");
  }
  const std::size_t T = (header.size() - 3) / 2;
  std::vector<std::string> names;
  for (std::size_t t = 0; t < T; ++t) {
    const auto& d = header[3 + 2 * t];
    const auto& x = header[4 + 2 * t];
    if (d.rfind("d_", 0) != 0 || x.rfind("x_", 0) != 0 || d.substr(2) != x.substr(2) || d.size() < 3) {
      throw Error("line 1: columns " + std::to_string(4 + 2 * t) + "-" + std::to_string(5 + 2 * t) +
                  " must be d_<sample> and x_<sample>");
    }
    names.push_back(d.substr(2));
  }
  if (coverage.size() != T) {
    throw Error("phi must list one designed coverage per sample (" + std::to_string(T) + " samples)");
  }

  struct Row {
    GenomicPosition pos;
    std::string id;
    std::vector<int> d, x;
    int line = 0;
  };
  std::vector<Row> rows;
  int number = 1;
  while (get_line(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    const std::string where = "line " + std::to_string(number) + ": ";
    if (f.size() != header.size()) {
      throw Error(where + "expected " + std::to_string(header.size()) + " columns, found " + std::to_string(f.size()));
    }
    Row r;
    r.line = number;
    r.id = f[0];
    r.pos.chrom = f[1];
    if (r.id.empty() || r.pos.chrom.empty()) throw Error(where + "empty locus id or chromosome");
    try {
      r.pos.pos = parse_number<std::int64_t>(f[2], "position");
      for (std::size_t t = 0; t < T; ++t) {
        r.d.push_back(parse_int(f[3 + 2 * t], "total read count"));
        r.x.push_back(parse_int(f[4 + 2 * t], "mutant read count"));
      }
    } catch (const Error& e) {
      throw Error(where + e.what());
    }
    for (std::size_t t = 0; t < T; ++t) {
      if (r.d[t] < 0 || r.x[t] < 0 || r.x[t] > r.d[t]) {
        throw Error(where + "read counts must satisfy 0 <= x <= d (sample " + names[t] + ")");
      }
    }
    rows.push_back(std::move(r));
  }
  if (rows.empty()) throw Error("reads table has no data rows");

  const bool sorted = std::is_sorted(rows.begin(), rows.end(),
                                     [](const Row& a, const Row& b) { return position_less(a.pos, b.pos); });
  if (!sorted) {
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return position_less(a.pos, b.pos); });
    if (warnings) warnings->push_back("reads table was not sorted by (chrom, pos); rows were sorted");
  }
  for (std::size_t i = 1; i < rows.size(); ++i) {
    if (!position_less(rows[i - 1].pos, rows[i].pos)) {
      throw Error("line " + std::to_string(rows[i].line) + ": duplicate position " + rows[i].pos.chrom + ":" +
                  std::to_string(rows[i].pos.pos));
    }
  }

  ReadData data;
  data.total = Matrix<int>(rows.size(), T);
  data.mutant = Matrix<int>(rows.size(), T);
  data.coverage = coverage;
  data.sample_names = names;
  for (std::size_t j = 0; j < rows.size(); ++j) {
    for (std::size_t t = 0; t < T; ++t) {
      data.total(j, t) = rows[j].d[t];
      data.mutant(j, t) = rows[j].x[t];
    }
    data.positions.push_back(rows[j].pos);
    data.locus_ids.push_back(rows[j].id);
  }
  data.validate();
  return data;
}

ReadData read_reads_file(const std::string& path, const std::vector<double>& coverage,
                         std::vector<std::string>* warnings) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open reads table " + path);
  return parse_reads_tsv(in, coverage, warnings);
}

void write_reads_tsv(std::ostream& out, const ReadData& data) {
  out << "locus_id\tchrom\tpos";
  for (std::size_t t = 0; t < data.num_samples(); ++t) {
    const std::string name = data.sample_names.empty() ? "S" + std::to_string(t + 1) : data.sample_names[t];
    out << "\td_" << name << "\tx_" << name;
  }
  out << '\n';
  for (std::size_t j = 0; j < data.num_loci(); ++j) {
    out << data.locus_ids[j] << '\t' << data.positions[j].chrom << '\t' << data.positions[j].pos;
    for (std::size_t t = 0; t < data.num_samples(); ++t) out << '\t' << data.total(j, t) << '\t' << data.mutant(j, t);
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Quality control

std::vector<int> kmeans(const Matrix<double>& x, std::size_t k, int max_iterations, Rng& rng) {
  const std::size_t n = x.rows();
  const std::size_t dim = x.cols();
  if (k < 1 || k > n) throw Error("k-means needs 1 <= k <= number of points");
  auto dist2 = [&](std::size_t i, const std::vector<double>& c) {
    double s = 0.0;
    for (std::size_t d = 0; d < dim; ++d) s += (x(i, d) - c[d]) * (x(i, d) - c[d]);
    return s;
  };
  std::vector<std::vector<double>> centers;
  auto point = [&](std::size_t i) { return std::vector<double>(x.row(i).begin(), x.row(i).end()); };
  centers.push_back(point(std::uniform_int_distribution<std::size_t>(0, n - 1)(rng)));
  std::vector<double> nearest(n, std::numeric_limits<double>::infinity());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      nearest[i] = std::min(nearest[i], dist2(i, centers.back()));
      total += nearest[i];
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      double u = std::uniform_real_distribution<double>(0.0, total)(rng);
      for (pick = 0; pick + 1 < n; ++pick) {
        if (u < nearest[pick] && nearest[pick] > 0.0) break;
        u -= nearest[pick];
      }
      while (nearest[pick] == 0.0) pick = (pick + 1) % n;
    } else {
      // Every point coincides with a centre already; any point will do.
      pick = centers.size() % n;
    }
    centers.push_back(point(pick));
  }

  std::vector<int> label(n, -1);
  for (int iter = 0; iter < max_iterations; ++iter) {
    bool changed = false;
    for (std::size_t i = 0; i < n; ++i) {
      std::size_t best = 0;
      double best_d = dist2(i, centers[0]);
      for (std::size_t c = 1; c < k; ++c) {
        const double d = dist2(i, centers[c]);
        if (d < best_d) {
          best_d = d;
          best = c;
        }
      }
      if (label[i] != static_cast<int>(best)) {
        label[i] = static_cast<int>(best);
        changed = true;
      }
    }
    if (!changed) break;
    std::vector<std::vector<double>> sum(k, std::vector<double>(dim, 0.0));
    std::vector<std::size_t> count(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      ++count[static_cast<std::size_t>(label[i])];
      for (std::size_t d = 0; d < dim; ++d) sum[static_cast<std::size_t>(label[i])][d] += x(i, d);
    }
    for (std::size_t c = 0; c < k; ++c) {
      if (count[c] == 0) continue;  // empty cluster keeps its centre
      for (std::size_t d = 0; d < dim; ++d) centers[c][d] = sum[c][d] / static_cast<double>(count[c]);
    }
  }
  return label;
}

QcResult quality_control(const ReadData& data, const QcOptions& o, std::uint64_t seed) {
  data.validate();
  QcResult out;
  const std::size_t T = data.num_samples();
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < data.num_loci(); ++j) {
    bool shallow = false;
    for (std::size_t t = 0; t < T; ++t) shallow = shallow || data.total(j, t) <= o.min_reads;
    if (shallow) {
      out.report.dropped_depth.push_back(data.locus_ids[j]);
      continue;
    }
    double mean = 0.0;
    for (std::size_t t = 0; t < T; ++t) mean += static_cast<double>(data.mutant(j, t)) / data.total(j, t);
    mean /= static_cast<double>(T);
    if (mean <= o.min_mean_vaf) {
      out.report.dropped_vaf.push_back(data.locus_ids[j]);
      continue;
    }
    kept.push_back(j);
  }
  if (kept.empty()) {
    throw Error("quality control removed every locus; lower qc_min_reads or qc_min_mean_vaf");
  }

  Matrix<double> v(kept.size(), T);
  for (std::size_t i = 0; i < kept.size(); ++i) {
    for (std::size_t t = 0; t < T; ++t) {
      v(i, t) = static_cast<double>(data.mutant(kept[i], t)) / data.total(kept[i], t);
    }
  }
  Rng rng = make_stream(seed, 0x0c0c0c0cull);
  const std::size_t k = std::min(o.clusters, kept.size());
  const auto label = kmeans(v, k, o.max_iterations, rng);
  std::vector<bool> drop(kept.size(), false);
  for (std::size_t c = 0; c < k; ++c) {
    std::vector<std::size_t> members;
    for (std::size_t i = 0; i < kept.size(); ++i) {
      if (label[i] == static_cast<int>(c)) members.push_back(i);
    }
    const auto n_drop = static_cast<std::size_t>(std::floor(o.drop_fraction * static_cast<double>(members.size())));
    std::shuffle(members.begin(), members.end(), rng);
    for (std::size_t i = 0; i < n_drop; ++i) drop[members[i]] = true;
  }
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < kept.size(); ++i) {
    if (drop[i]) {
      out.report.dropped_cluster.push_back(data.locus_ids[kept[i]]);
    } else {
      rows.push_back(kept[i]);
    }
  }
  if (rows.empty()) throw Error("quality control removed every locus; lower qc_drop_fraction");
  out.data = data.select_loci(rows);
  out.report.retained = rows.size();
  return out;
}

// ---------------------------------------------------------------------------
// Output formats

std::string format_double(double value) {
  char buf[64];
  const auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, value);
  if (ec != std::errc{}) throw Error("cannot format number");
  return std::string(buf, ptr);
}

void write_segments_tsv(std::ostream& out, const ReadData& data, const SegmentMap& segments) {
  segments.check_against(data);
  out << "locus_id\tchrom\tpos\tsegment\n";
  for (std::size_t j = 0; j < data.num_loci(); ++j) {
    out << data.locus_ids[j] << '\t' << data.positions[j].chrom << '\t' << data.positions[j].pos << '\t'
        << segments.segment_of(j) + 1 << '\n';
  }
}

SegmentMap read_segments_tsv(std::istream& in, const ReadData& data) {
  std::string line;
  if (!get_line(in, line) || line != "locus_id\tchrom\tpos\tsegment") {
    throw Error("line 1: segment table header must be locus_id, chrom, pos, segment");
  }
  std::map<std::string, int> by_id;
  int number = 1;
  while (get_line(in, line)) {
    ++number;
    if (line.empty()) continue;
    const auto f = split_tabs(line);
    if (f.size() != 4) throw Error("line " + std::to_string(number) + ": expected 4 columns");
    try {
      by_id[f[0]] = parse_int(f[3], "segment") - 1;
    } catch (const Error& e) {
      throw Error("line " + std::to_string(number) + ": " + e.what());
    }
  }
  std::vector<int> ids;
  for (const auto& id : data.locus_ids) {
    const auto it = by_id.find(id);
    if (it == by_id.end()) throw Error("segment table has no entry for locus " + id);
    ids.push_back(it->second);
  }
  // Renumber so that segments are consecutive from 0 in locus order.
  std::vector<int> renumbered(ids.size());
  int next = -1;
  for (std::size_t j = 0; j < ids.size(); ++j) {
    if (j == 0 || ids[j] != ids[j - 1]) ++next;
    renumbered[j] = next;
  }
  SegmentMap map(std::move(renumbered));
  map.check_against(data);
  return map;
}

std::string tree_dot(const Tree& tree) {
  std::ostringstream out;
  out << "digraph subclones {\n";
  for (std::size_t k = 0; k < tree.size(); ++k) {
    out << "  n" << k + 1 << " [label=\"" << (k == 0 ? "1 (normal)" : std::to_string(k + 1)) << "\"];\n";
  }
  for (std::size_t k = 1; k < tree.size(); ++k) {
    out << "  n" << tree.parent(static_cast<int>(k)) + 1 << " -> n" << k + 1 << ";\n";
  }
  out << "}\n";
  return out.str();
}

template <typename T>
void write_matrix_tsv(std::ostream& out, const std::vector<std::string>& header,
                      const std::vector<std::string>& row_names, const Matrix<T>& m) {
  if (header.size() != m.cols() + 1 || row_names.size() != m.rows()) throw Error("table labels do not match");
  for (std::size_t c = 0; c < header.size(); ++c) out << (c ? "\t" : "") << header[c];
  out << '\n';
  for (std::size_t r = 0; r < m.rows(); ++r) {
    out << row_names[r];
    for (std::size_t c = 0; c < m.cols(); ++c) {
      if constexpr (std::is_floating_point_v<T>) {
        out << '\t' << format_double(m(r, c));
      } else {
        out << '\t' << m(r, c);
      }
    }
    out << '\n';
  }
}

template void write_matrix_tsv<int>(std::ostream&, const std::vector<std::string>&, const std::vector<std::string>&,
                                    const Matrix<int>&);
template void write_matrix_tsv<double>(std::ostream&, const std::vector<std::string>&,
                                       const std::vector<std::string>&, const Matrix<double>&);

std::string scenario_json(const Scenario& sc) {
  json j;
  j["tree"] = sc.tree.parent_vector();
  j["snv"] = snv_json(sc.snv);
  j["cnv"] = cnv_json(sc.cnv);
  std::vector<int> seg(sc.segments.ids());
  for (auto& s : seg) ++s;
  j["segments"] = seg;
  j["fractions"] = matrix_json(sc.fractions);
  j["coverage"] = sc.coverage;
  j["seed"] = sc.seed;
  const auto g = sc.genotypes(std::numeric_limits<int>::max());
  j["Z"] = matrix_json(g.mutant);
  j["L"] = matrix_json(g.total);
  return j.dump(1) + "\n";
}

Scenario scenario_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    Scenario sc;
    sc.tree = Tree::from_parent_vector(j.at("tree").get<std::vector<int>>());
    for (const auto& z : j.at("snv")) sc.snv.push_back({z.at(0).get<int>() - 1, z.at(1).get<int>()});
    for (const auto& c : j.at("cnv")) {
      const int change = c.at(1).get<int>();
      sc.cnv.push_back(change == 0 ? CnvOrigin{} : CnvOrigin{c.at(0).get<int>() - 1, change});
    }
    auto seg = j.at("segments").get<std::vector<int>>();
    for (auto& s : seg) --s;
    sc.segments = SegmentMap(std::move(seg));
    sc.fractions = matrix_from_json<double>(j.at("fractions"));
    sc.coverage = j.at("coverage").get<std::vector<double>>();
    sc.seed = j.at("seed").get<std::uint64_t>();
    if (sc.segments.num_loci() != sc.snv.size() || sc.segments.num_segments() != sc.cnv.size() ||
        sc.fractions.rows() != sc.tree.size()) {
      throw Error("inconsistent dimensions");
    }
    return sc;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed truth file: ") + e.what());
  } catch (const Error& e) {
    throw Error(std::string("malformed truth file: ") + e.what());
  }
}

std::string point_estimate_json(const PointEstimate& pe) {
  json j;
  j["tree"] = pe.tree.parent_vector();
  j["Z"] = matrix_json(pe.mutant);
  j["L"] = matrix_json(pe.total);
  j["fractions"] = matrix_json(pe.fractions);
  j["multiple_trees"] = pe.multiple_trees;
  j["samples_used"] = pe.num_used;
  json counts = json::array();
  for (const auto& c : pe.tree_counts) counts.push_back({{"tree", c.tree.parent_vector()}, {"count", c.count}});
  j["tree_counts"] = counts;
  return j.dump(1) + "\n";
}

PointEstimate point_estimate_from_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    PointEstimate pe;
    pe.tree = Tree::from_parent_vector(j.at("tree").get<std::vector<int>>());
    pe.mutant = matrix_from_json<int>(j.at("Z"));
    pe.total = matrix_from_json<int>(j.at("L"));
    pe.fractions = matrix_from_json<double>(j.at("fractions"));
    pe.multiple_trees = j.at("multiple_trees").get<bool>();
    pe.num_used = j.at("samples_used").get<std::size_t>();
    for (const auto& c : j.at("tree_counts")) {
      pe.tree_counts.push_back(
          {Tree::from_parent_vector(c.at("tree").get<std::vector<int>>()), c.at("count").get<std::size_t>()});
    }
    return pe;
  } catch (const json::exception& e) {
    throw Error(std::string("malformed point estimate file: ") + e.what());
  }
}

std::string state_json(const ChainState& s) {
  json j;
  j["tree"] = s.tree.parent_vector();
  j["theta"] = matrix_json(s.theta);
  j["snv"] = snv_json(s.snv);
  j["cnv"] = cnv_json(s.cnv);
  j["pi"] = s.pi;
  j["neg_loglik"] = s.neg_loglik;
  return j.dump();
}

std::string error_json(const std::string& message) {
  json j;
  j["status"] = "error";
  j["message"] = message;
  return j.dump() + "\n";
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path);
  out << text;
  if (!out) throw Error("failed writing " + path);
}

}  // namespace subclone
