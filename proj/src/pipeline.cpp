#include "subclone/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include <json.hpp>

namespace subclone {

namespace fs = std::filesystem;
using nlohmann::json;

GammaSelection segment_reads(const ReadData& data, double penalty) {
  const auto signal = normalize_reads(data);
  if (penalty > 0.0) {
    const double p[] = {penalty};
    return select_gamma(signal, p);
  }
  return select_gamma(signal, default_gamma_grid(data.num_samples()));
}

FitResult fit_model(const Model& model, const SamplerConfig& config) {
  FitResult r;
  r.trace = run_tempered(model, config);
  const int cap = model.hyper().max_total_copies;
  r.aligned = align_samples(r.trace.samples, model.segments(), cap);
  r.estimate = point_estimate(r.aligned, model.segments(), cap);
  if (r.trace.neg_loglik.front().size() >= 100) r.geweke = geweke_z(r.trace.neg_loglik.front());
  return r;
}

std::vector<double> selection_ladder(std::size_t chains, double min_beta) {
  SamplerConfig c;
  c.num_chains = chains;
  c.min_beta = min_beta;
  return c.ladder();
}

SelectionFit fit_with_free_energy(const Model& model, SamplerConfig config, const std::vector<double>& ladder,
                                  std::size_t prior_draws) {
  config.betas = ladder;
  SelectionFit out;
  out.fit = fit_model(model, config);
  const auto prior = sample_prior_trace(model, prior_draws, config.seed);
  out.prior_used_mcmc = prior.used_mcmc;
  std::vector<std::vector<double>> traces = out.fit.trace.neg_loglik;
  traces.push_back(prior.neg_loglik);
  out.betas = ladder;
  out.betas.push_back(0.0);
  out.report.num_clones = model.num_clones();
  out.report.estimate = free_energy(traces, out.betas);
  return out;
}

KRange parse_k_range(const std::string& text) {
  auto number = [&](const std::string& s) {
    std::size_t used = 0;
    std::size_t v = 0;
    try {
      v = std::stoul(s, &used);
    } catch (const std::exception&) {
      used = 0;
    }
    if (s.empty() || used != s.size() || !std::isdigit(static_cast<unsigned char>(s[0]))) {
      throw Error("invalid --K value '" + text + "'; use k or a..b");
    }
    return v;
  };
  KRange r;
  const auto dots = text.find("..");
  if (dots == std::string::npos) {
    r.lo = r.hi = number(text);
  } else {
    r.lo = number(text.substr(0, dots));
    r.hi = number(text.substr(dots + 2));
  }
  if (r.lo < 2 || r.hi < r.lo) throw Error("K range must be non-empty with K >= 2");
  return r;
}

namespace {

struct Context {
  RunConfig config;
  fs::path out;
  std::ostream& log;
};

fs::path output_dir(const Context& c) {
  fs::create_directories(c.out);
  return c.out;
}

ReadData load_reads(const Context& c) {
  if (c.config.reads.empty()) throw Error("no reads table given (--reads or config key 'reads')");
  std::vector<std::string> warnings;
  auto data = read_reads_file(c.config.reads, c.config.phi, &warnings);
  for (const auto& w : warnings) c.log << "warning: " << w << '\n';
  return data;
}

SegmentMap load_segments(const Context& c, const ReadData& data) {
  if (c.config.segments.empty()) {
    auto sel = segment_reads(data, c.config.segment_penalty);
    c.log << "segmentation: " << sel.segments.num_segments() << " segments (penalty "
          << format_double(sel.gamma) << ")\n";
    return sel.segments;
  }
  std::ifstream in(c.config.segments);
  if (!in) throw Error("cannot open segment table " + c.config.segments);
  return read_segments_tsv(in, data);
}

std::vector<std::string> sample_names(const ReadData& data) {
  std::vector<std::string> names;
  for (std::size_t t = 0; t < data.num_samples(); ++t) {
    names.push_back(data.sample_names.empty() ? "S" + std::to_string(t + 1) : data.sample_names[t]);
  }
  return names;
}

std::vector<std::string> clone_names(std::size_t K) {
  std::vector<std::string> names;
  for (std::size_t k = 0; k < K; ++k) names.push_back("subclone_" + std::to_string(k + 1));
  return names;
}

void write_fit(const Context& c, const fs::path& dir, const Model& model, const FitResult& r) {
  fs::create_directories(dir);
  {
    std::ostringstream t;
    t << "iteration";
    for (double b : r.trace.betas) t << "\tbeta_" << format_double(b);
    t << '\n';
    for (std::size_t i = 0; i < r.trace.samples.size(); ++i) {
      t << i + 1;
      for (const auto& chain : r.trace.neg_loglik) t << '\t' << format_double(chain[i]);
      t << '\n';
    }
    write_text_file((dir / "trace.tsv").string(), t.str());
  }
  {
    std::ostringstream s;
    for (const auto& st : r.trace.samples) s << state_json(st) << '\n';
    write_text_file((dir / "samples.jsonl").string(), s.str());
  }
  write_text_file((dir / "point_estimate.json").string(), point_estimate_json(r.estimate));

  json d;
  d["num_clones"] = model.num_clones();
  d["betas"] = r.trace.betas;
  d["theta_acceptance"] = r.trace.theta_acceptance;
  d["swap_attempts"] = r.trace.swap_attempts;
  d["swap_accepts"] = r.trace.swap_accepts;
  d["geweke_z"] = r.geweke.defined ? json(r.geweke.z) : json(nullptr);
  json moves = json::array();
  for (const auto& m : r.trace.moves) {
    moves.push_back({{"rewire_proposed", m.rewire_proposed},
                     {"rewire_accepted", m.rewire_accepted},
                     {"slice_calls", m.slice_calls},
                     {"slice_changed", m.slice_changed},
                     {"slice_capped", m.slice_capped},
                     {"degenerate_snv", m.degenerate_snv},
                     {"degenerate_cnv", m.degenerate_cnv}});
  }
  d["moves"] = moves;
  if (!c.config.truth.empty()) {
    const auto truth = scenario_from_json(read_text_file(c.config.truth));
    if (truth.num_loci() == model.num_loci()) {
      const auto ref = mutation_partition(truth.genotypes(model.hyper().max_total_copies).mutant);
      const auto ri = posterior_rand_index(r.aligned, ref, model.segments(), model.hyper().max_total_copies);
      std::ostringstream t;
      t << "iteration\trand_index\n";
      for (std::size_t i = 0; i < ri.size(); ++i) t << i + 1 << '\t' << format_double(ri[i]) << '\n';
      write_text_file((dir / "posterior_rand_index.tsv").string(), t.str());
    }
  }
  write_text_file((dir / "diagnostics.json").string(), d.dump(1) + "\n");
}

Model make_model(const Context& c, std::size_t K) {
  auto data = load_reads(c);
  auto segments = load_segments(c, data);
  return Model(std::move(data), std::move(segments), c.config.hyper, K);
}

int cmd_simulate(const Context& c) {
  const auto& cfg = c.config;
  const Tree tree = Tree::from_parent_vector(cfg.sim_tree);
  ScenarioOptions o;
  o.num_loci = cfg.sim_loci;
  o.num_samples = cfg.sim_samples;
  o.segment_length = cfg.sim_segment_length;
  o.cnv_fraction = cfg.sim_cnv_fraction;
  o.dirichlet = cfg.hyper.gamma;
  const auto sc = build_scenario(tree, cfg.sim_depth, cfg.sampler.seed, o);
  Rng rng = make_stream(cfg.sampler.seed, 1);
  const auto reads = generate_reads(sc, rng);
  const auto dir = output_dir(c);
  std::ostringstream r;
  write_reads_tsv(r, reads);
  write_text_file((dir / "reads.tsv").string(), r.str());
  std::string phi = "phi = [";
  for (std::size_t t = 0; t < sc.coverage.size(); ++t) phi += (t ? ", " : "") + format_double(sc.coverage[t]);
  write_text_file((dir / "reads.cfg").string(), phi + "]\n");
  write_text_file((dir / "truth.json").string(), scenario_json(sc));
  std::ostringstream s;
  write_segments_tsv(s, reads, sc.segments);
  write_text_file((dir / "truth_segments.tsv").string(), s.str());
  c.log << "simulated " << reads.num_loci() << " loci x " << reads.num_samples() << " samples, tree "
        << tree.to_string() << '\n';
  return 0;
}

int cmd_qc(const Context& c) {
  const auto data = load_reads(c);
  const auto res = quality_control(data, c.config.qc, c.config.sampler.seed);
  const auto dir = output_dir(c);
  std::ostringstream r;
  write_reads_tsv(r, res.data);
  write_text_file((dir / "qc_reads.tsv").string(), r.str());
  json j;
  j["input_loci"] = data.num_loci();
  j["retained"] = res.report.retained;
  j["dropped_low_depth"] = res.report.dropped_depth;
  j["dropped_low_vaf"] = res.report.dropped_vaf;
  j["dropped_cluster_thinning"] = res.report.dropped_cluster;
  write_text_file((dir / "qc_report.json").string(), j.dump(1) + "\n");
  c.log << "qc: retained " << res.report.retained << " of " << data.num_loci() << " loci\n";
  return 0;
}

int cmd_segment(const Context& c) {
  const auto data = load_reads(c);
  const auto sel = segment_reads(data, c.config.segment_penalty);
  const auto dir = output_dir(c);
  std::ostringstream s;
  write_segments_tsv(s, data, sel.segments);
  write_text_file((dir / "segments.tsv").string(), s.str());
  json j;
  j["chosen_penalty"] = sel.gamma;
  j["num_segments"] = sel.segments.num_segments();
  json cand = json::array();
  for (const auto& g : sel.candidates) {
    cand.push_back({{"penalty", g.gamma}, {"rss", g.rss}, {"num_segments", g.num_segments},
                    {"bic", std::isfinite(g.bic) ? json(g.bic) : json(nullptr)}});
  }
  j["candidates"] = cand;
  write_text_file((dir / "segmentation.json").string(), j.dump(1) + "\n");
  c.log << "segment: " << sel.segments.num_segments() << " segments\n";
  return 0;
}

int cmd_fit(const Context& c, const std::string& k_text) {
  if (k_text.empty()) throw Error("fit needs --K");
  const auto range = parse_k_range(k_text);
  if (range.lo != range.hi) throw Error("fit takes a single K; use select for a range");
  const Model model = make_model(c, range.lo);
  const auto r = fit_model(model, c.config.sampler);
  write_fit(c, output_dir(c) / ("K" + std::to_string(range.lo)), model, r);
  c.log << "fit K=" << range.lo << ": majority tree " << r.estimate.tree.to_string() << " ("
        << r.estimate.num_used << " of " << r.aligned.size() << " samples)\n";
  return 0;
}

int cmd_select(const Context& c, const std::string& k_text) {
  const auto range = k_text.empty() ? KRange{c.config.k_min, c.config.k_max} : parse_k_range(k_text);
  const auto ladder = selection_ladder(c.config.select_chains, c.config.select_min_beta);
  auto data = load_reads(c);
  auto segments = load_segments(c, data);
  std::vector<FreeEnergyReport> reports;
  std::vector<SelectionFit> fits;
  for (std::size_t K = range.lo; K <= range.hi; ++K) {
    const Model model(data, segments, c.config.hyper, K);
    fits.push_back(fit_with_free_energy(model, c.config.sampler, ladder, c.config.prior_draws));
    reports.push_back(fits.back().report);
    c.log << "K=" << K << ": free energy " << format_double(fits.back().report.estimate.value) << '\n';
  }
  const std::size_t chosen = select_model(reports);
  const auto dir = output_dir(c);
  json j;
  j["selected_K"] = chosen;
  j["betas"] = fits.front().betas;
  json rows = json::array();
  std::ostringstream t;
  t << "K\tfree_energy\tstandard_error\n";
  for (const auto& f : fits) {
    double se2 = 0.0;
    for (double s : f.report.estimate.standard_errors) se2 += s * s;
    rows.push_back({{"K", f.report.num_clones},
                    {"free_energy", f.report.estimate.value},
                    {"terms", f.report.estimate.terms},
                    {"term_standard_errors", f.report.estimate.standard_errors},
                    {"prior_rung_from_mcmc", f.prior_used_mcmc}});
    t << f.report.num_clones << '\t' << format_double(f.report.estimate.value) << '\t'
      << format_double(std::sqrt(se2)) << '\n';
  }
  j["candidates"] = rows;
  write_text_file((dir / "free_energy.json").string(), j.dump(1) + "\n");
  write_text_file((dir / "free_energy.tsv").string(), t.str());
  for (const auto& f : fits) {
    if (f.report.num_clones != chosen) continue;
    const Model model(data, segments, c.config.hyper, chosen);
    write_fit(c, dir / ("K" + std::to_string(chosen)), model, f.fit);
  }
  c.log << "selected K=" << chosen << '\n';
  return 0;
}

int cmd_report(const Context& c, const std::string& estimate_path) {
  if (estimate_path.empty()) throw Error("report needs --estimate <point_estimate.json>");
  const auto pe = point_estimate_from_json(read_text_file(estimate_path));
  const auto data = load_reads(c);
  if (pe.mutant.rows() != data.num_loci() || pe.fractions.cols() != data.num_samples()) {
    throw Error("point estimate does not match the reads table");
  }
  const auto dir = output_dir(c);
  json m;
  const auto fit = vaf_fit_error(pe.mutant, pe.total, pe.fractions, data);
  m["vaf_fit_error"] = fit.defined ? json(fit.value) : json(nullptr);
  m["tree"] = pe.tree.to_string();
  m["multiple_trees"] = pe.multiple_trees;
  if (!c.config.truth.empty()) {
    const auto truth = scenario_from_json(read_text_file(c.config.truth));
    if (truth.num_loci() != data.num_loci()) throw Error("truth does not match the reads table");
    const auto g = truth.genotypes(std::numeric_limits<int>::max());
    const auto c_true = cellularity(g.mutant, truth.fractions);
    const auto c_hat = cellularity(pe.mutant, pe.fractions);
    m["rand_index"] = rand_index(mutation_partition(g.mutant), mutation_partition(pe.mutant));
    m["cellularity_error"] = cellularity_error(c_true, c_hat);
    m["true_tree"] = truth.tree.to_string();
    m["tree_shape_matches"] = same_shape(truth.tree, pe.tree);
  }
  write_text_file((dir / "metrics.json").string(), m.dump(1) + "\n");
  write_text_file((dir / "tree.dot").string(), tree_dot(pe.tree));

  const auto names = sample_names(data);
  std::ostringstream v;
  v << "locus_id";
  for (const auto& n : names) v << "\tobserved_" << n << "\tfitted_" << n;
  v << '\n';
  std::vector<double> col(pe.fractions.rows());
  for (std::size_t j = 0; j < data.num_loci(); ++j) {
    v << data.locus_ids[j];
    for (std::size_t t = 0; t < data.num_samples(); ++t) {
      for (std::size_t k = 0; k < col.size(); ++k) col[k] = pe.fractions(k, t);
      const int d = data.total(j, t);
      v << '\t' << (d > 0 ? format_double(static_cast<double>(data.mutant(j, t)) / d) : "NA") << '\t'
        << format_double(vaf(pe.mutant.row(j), pe.total.row(j), col).p);
    }
    v << '\n';
  }
  write_text_file((dir / "vaf.tsv").string(), v.str());

  std::ostringstream f;
  std::vector<std::string> header{"subclone"};
  for (const auto& n : names) header.push_back(n);
  write_matrix_tsv(f, header, clone_names(pe.fractions.rows()), pe.fractions);
  write_text_file((dir / "fractions.tsv").string(), f.str());
  c.log << "report written to " << dir.string() << '\n';
  return 0;
}

}  // namespace

int run_pipeline(const CliOptions& o, std::ostream& out, std::ostream& err) {
  try {
    Context c{RunConfig{}, {}, out};
    for (const auto& path : o.configs) load_config_file(path, c.config);
    apply_env_overrides(c.config);
    if (o.seed) c.config.sampler.seed = *o.seed;
    if (o.threads) c.config.sampler.threads = *o.threads;
    if (!o.out.empty()) c.config.out = o.out;
    if (!o.reads.empty()) c.config.reads = o.reads;
    if (!o.segments.empty()) c.config.segments = o.segments;
    if (!o.truth.empty()) c.config.truth = o.truth;
    c.config.validate();
    c.out = c.config.out;

    if (o.command == "simulate") return cmd_simulate(c);
    if (o.command == "qc") return cmd_qc(c);
    if (o.command == "segment") return cmd_segment(c);
    if (o.command == "fit") return cmd_fit(c, o.k);
    if (o.command == "select") return cmd_select(c, o.k);
    if (o.command == "report") return cmd_report(c, o.estimate);
    throw Error("unknown command '" + o.command + "'");
  } catch (const std::exception& e) {
    err << error_json(e.what());
    return 1;
  }
}

}  // namespace subclone
