// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pkache/pkache.hpp"

namespace {

struct CliOptions {
  std::string engine = "restricted";
  std::string policy = "lru";
  std::size_t k = 8;
  std::size_t d = 16;
  bool multi = false;
  std::string window_policy = "fifo";
  std::size_t kw = 4;
  std::size_t dw = 16;
  std::string filter = "tinylfu";
  std::string admission = "refresh";
  std::uint64_t aging_window = 0;
  std::uint64_t aging_stride = 16;
  bool full = false;
  std::string integer_factor = "100";
  std::uint64_t max_scn = 2048;
  std::string trace;
  std::string format = "plain";
  std::string csv_column = "key";
  pkache::ZipfSpec zipf;
  std::string out;
  std::string report = "csv";
  std::vector<std::size_t> sweep_ks;
  std::size_t sweep_capacity = 512;
  std::vector<std::size_t> sweep_sizes;
  std::vector<std::string> sweep_factors;
};

void add_experiment_flags(CLI::App* cmd, CliOptions& o) {
  cmd->add_option("--engine", o.engine, "restricted | reference")->check(CLI::IsMember({"restricted", "reference"}));
  cmd->add_option("--policy", o.policy, "fifo | lru | lfu | hyperbolic (main region when --multi)");
  cmd->add_option("--km,-k", o.k, "ways per set")->check(CLI::PositiveNumber);
  cmd->add_option("--dm,-d", o.d, "number of sets")->check(CLI::PositiveNumber);
  cmd->add_flag("--multi", o.multi, "window + main regions");
  cmd->add_option("--window-policy", o.window_policy, "window region policy");
  cmd->add_option("--kw", o.kw, "window ways per set")->check(CLI::PositiveNumber);
  cmd->add_option("--dw", o.dw, "window sets")->check(CLI::PositiveNumber);
  cmd->add_option("--filter", o.filter, "tinylfu | none")->check(CLI::IsMember({"tinylfu", "none"}));
  cmd->add_option("--admission-scn", o.admission, "refresh | carry")->check(CLI::IsMember({"refresh", "carry"}));
  cmd->add_option("--aging-window", o.aging_window, "filter aging window W (0: 16 x capacity)");
  cmd->add_option("--aging-stride", o.aging_stride, "accesses between aging steps")->check(CLI::PositiveNumber);
  cmd->add_flag("--full", o.full, "fully associative (reference engine)");
  cmd->add_option("--integer-factor", o.integer_factor, "log table scale, integer or decimal");
  cmd->add_option("--max-scn", o.max_scn, "log table size")->check(CLI::PositiveNumber);
  cmd->add_option("--trace", o.trace, "trace file; a Zipf trace is generated when absent");
  cmd->add_option("--format", o.format, "plain | csv | arc");
  cmd->add_option("--csv-column", o.csv_column, "CSV key column name or 0-based index");
  cmd->add_option("--zipf-n", o.zipf.n, "Zipf universe size");
  cmd->add_option("--zipf-s", o.zipf.s, "Zipf skew");
  cmd->add_option("--zipf-len", o.zipf.length, "Zipf trace length");
  cmd->add_option("--seed", o.zipf.seed, "Zipf seed");
  cmd->add_option("--out,-o", o.out, "output path (stdout when absent)");
  cmd->add_option("--report", o.report, "csv | json")->check(CLI::IsMember({"csv", "json"}));
}

pkache::ExperimentConfig build_config(const CliOptions& o) {
  pkache::ExperimentConfig c;
  c.engine = pkache::parse_engine(o.engine);
  c.multi_region = o.multi;
  c.single = {pkache::parse_policy(o.policy), o.k, o.d};
  c.multi.window = {pkache::parse_policy(o.window_policy), o.kw, o.dw};
  c.multi.main = {pkache::parse_policy(o.policy), o.k, o.d};
  c.multi.filter = o.filter == "tinylfu" ? pkache::AdmissionFilter::tinylfu : pkache::AdmissionFilter::none;
  c.multi.admission = o.admission == "carry" ? pkache::AdmissionScn::carry : pkache::AdmissionScn::refresh;
  c.multi.aging_window = o.aging_window;
  c.multi.aging_stride = o.aging_stride;
  c.full_associative = o.full;
  c.hyperbolic.integer_factor = pkache::IntegerFactor::parse(o.integer_factor);
  c.hyperbolic.max_scn = o.max_scn;
  if (!o.trace.empty()) {
    c.trace.path = o.trace;
    c.trace.options.format = pkache::parse_trace_format(o.format);
    c.trace.options.csv_column = o.csv_column;
  }
  c.trace.zipf = o.zipf;
  c.sweep.ks = o.sweep_ks;
  c.sweep.capacity = o.sweep_capacity;
  c.sweep.sizes = o.sweep_sizes;
  for (const auto& f : o.sweep_factors) c.sweep.integer_factors.push_back(pkache::IntegerFactor::parse(f));
  return c;
}

std::optional<std::string> out_path(const CliOptions& o) {
  return o.out.empty() ? std::nullopt : std::optional<std::string>(o.out);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pkache-sim: set-associative data-plane cache simulator"};
  app.require_subcommand(1);
  CliOptions o;

  auto* run = app.add_subcommand("run", "replay one trace through one configuration");
  add_experiment_flags(run, o);

  auto* sweep = app.add_subcommand("sweep", "run a grid of configurations over one trace");
  add_experiment_flags(sweep, o);
  sweep->add_option("--ks", o.sweep_ks, "ways per set at --capacity");
  sweep->add_option("--capacity", o.sweep_capacity, "capacity used by --ks");
  sweep->add_option("--sizes", o.sweep_sizes, "cache sizes at the configured k");
  sweep->add_option("--integer-factors", o.sweep_factors, "log table scales");

  auto* gen = app.add_subcommand("gen-zipf", "write a Zipf trace in PLAIN format");
  gen->add_option("--zipf-n,-n", o.zipf.n, "universe size");
  gen->add_option("--zipf-s,-s", o.zipf.s, "skew");
  gen->add_option("--zipf-len,-l", o.zipf.length, "length");
  gen->add_option("--seed", o.zipf.seed, "seed");
  gen->add_option("--out,-o", o.out, "output path (stdout when absent)");

  std::size_t alphabet = 3;
  std::size_t max_len = 8;
  auto* check = app.add_subcommand("check", "compare restricted and reference engines on all short sequences");
  check->add_option("--policy", o.policy, "policy");
  check->add_option("--km,-k", o.k, "ways per set")->check(CLI::PositiveNumber);
  check->add_option("--dm,-d", o.d, "number of sets")->check(CLI::PositiveNumber);
  check->add_option("--alphabet", alphabet, "distinct keys")->check(CLI::PositiveNumber);
  check->add_option("--max-len", max_len, "longest sequence")->check(CLI::PositiveNumber);
  check->add_option("--integer-factor", o.integer_factor, "log table scale");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*run) {
      const auto config = build_config(o);
      const auto report = pkache::run_experiment(config);
      pkache::write_report(pkache::emit_report({report}, pkache::parse_report_format(o.report)), out_path(o));
    } else if (*sweep) {
      const auto config = build_config(o);
      const auto reports = pkache::run_sweep(config);
      pkache::write_report(pkache::emit_report(reports, pkache::parse_report_format(o.report)), out_path(o));
    } else if (*gen) {
      std::string text;
      for (const auto& ev : pkache::generate_zipf(o.zipf)) text += std::to_string(ev.key) + "\n";
      pkache::write_report(text, out_path(o));
    } else if (*check) {
      pkache::HyperbolicParams params;
      params.integer_factor = pkache::IntegerFactor::parse(o.integer_factor);
      const auto report = pkache::exhaustive_check(pkache::parse_policy(o.policy), o.k, o.d, alphabet, max_len, params);
      std::cout << report.summary() << "\n";
      if (report.first_untagged) std::cout << *report.first_untagged;
      return report.ok() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
