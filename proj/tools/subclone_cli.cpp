#include <iostream>

#include <CLI11.hpp>

#include "subclone/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Tumor subclone inference from multi-sample SNV read counts"};
  app.require_subcommand(1, 1);
  subclone::CliOptions o;
  std::uint64_t seed = 0;
  std::size_t threads = 0;

  auto common = [&](CLI::App* sub, bool with_k) {
    sub->add_option("--config", o.configs, "key = value configuration file (repeatable)");
    sub->add_option("--seed", seed, "master random seed");
    sub->add_option("--out", o.out, "output directory");
    sub->add_option("--threads", threads, "worker threads for tempered chains");
    sub->add_option("--reads", o.reads, "reads table (TSV)");
    sub->add_option("--segments", o.segments, "segment table (TSV)");
    sub->add_option("--truth", o.truth, "simulation truth (JSON)");
    if (with_k) sub->add_option("--K", o.k, "number of subclones, k or a..b");
  };
  common(app.add_subcommand("simulate", "simulate a scenario and its reads"), false);
  common(app.add_subcommand("qc", "filter loci"), false);
  common(app.add_subcommand("segment", "segment read depths"), false);
  common(app.add_subcommand("fit", "run the tempered sampler for one K"), true);
  common(app.add_subcommand("select", "free energy across a K range"), true);
  auto* report = app.add_subcommand("report", "metrics and tables for a point estimate");
  common(report, false);
  report->add_option("--estimate", o.estimate, "point_estimate.json from fit or select")->required();

  CLI11_PARSE(app, argc, argv);
  const auto* sub = app.get_subcommands().front();
  o.command = sub->get_name();
  if (sub->count("--seed")) o.seed = seed;
  if (sub->count("--threads")) o.threads = threads;
  return subclone::run_pipeline(o, std::cout, std::cerr);
}
