// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <algorithm>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <future>
#include <memory>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <nlohmann/json.hpp>

#include "pkache/engine.hpp"
#include "pkache/traces.hpp"

namespace pkache {

enum class EngineKind { restricted, reference };

inline std::string_view to_string(EngineKind e) { return e == EngineKind::restricted ? "restricted" : "reference"; }

inline EngineKind parse_engine(std::string_view s) {
  if (s == "restricted") return EngineKind::restricted;
  if (s == "reference") return EngineKind::reference;
  throw std::invalid_argument("unknown engine: " + std::string(s));
}

struct TraceSource {
  std::optional<std::string> path;  // otherwise a generated Zipf trace
  TraceOptions options;
  ZipfSpec zipf;

  std::string identity() const {
    if (path) return *path;
    std::ostringstream os;
    os << "zipf(N=" << zipf.n << ";s=" << zipf.s << ";len=" << zipf.length << ")";
    return os.str();
  }

  Trace load() const { return path ? parse_trace(*path, options) : generate_zipf(zipf); }
};

struct SweepAxes {
  std::vector<std::size_t> ks;     // ways at fixed `capacity`
  std::size_t capacity = 512;
  std::vector<std::size_t> sizes;  // total capacities at the configured k
  std::vector<IntegerFactor> integer_factors;

  bool empty() const { return ks.empty() && sizes.empty() && integer_factors.empty(); }
};

struct ExperimentConfig {
  EngineKind engine = EngineKind::restricted;
  bool multi_region = false;
  RegionSpec single{PolicyKind::lru, 8, 16};
  MultiRegionConfig multi;  // key_universe 0 means "derive from the trace"
  bool full_associative = false;  // reference engine only
  HyperbolicParams hyperbolic;
  oracle::ReferenceOptions reference;
  TraceSource trace;
  SweepAxes sweep;

  void validate() const {
    if (full_associative && engine != EngineKind::reference) {
      throw std::invalid_argument("full associativity is only available on the reference engine");
    }
    if (!multi_region && (single.k == 0 || single.d == 0)) throw std::invalid_argument("k and d must be >= 1");
  }

  std::string policy_label() const {
    if (!multi_region) return std::string(to_string(single.policy));
    std::string s = std::string(to_string(multi.window.policy)) + "x" + std::string(to_string(multi.main.policy));
    if (multi.filter == AdmissionFilter::tinylfu) s += "xTinyLFU";
    return s;
  }
};

struct ExperimentReport {
  std::string engine;
  std::string policy;
  std::size_t k_w = 0;
  std::size_t d_w = 0;
  std::size_t k_m = 0;
  std::size_t d_m = 0;
  std::string integer_factor;
  std::string trace;
  std::uint64_t seed = 0;
  std::uint64_t events = 0;
  std::uint64_t hits = 0;
  std::uint64_t misses = 0;
  std::uint64_t max_tcam = 0;
  std::uint64_t max_reads = 0;
  std::uint64_t max_writes = 0;
  std::uint64_t max_extra = 0;
  std::string generator;

  double hit_ratio() const { return events ? static_cast<double>(hits) / static_cast<double>(events) : 0.0; }
  friend bool operator==(const ExperimentReport&, const ExperimentReport&) = default;
};

/// Replays a trace through a prepared engine; returns hit/miss flags.
inline std::vector<bool> replay(CacheEngine& engine, const Trace& trace) {
  std::vector<bool> hits;
  hits.reserve(trace.size());
  for (const auto& ev : trace) hits.push_back(engine.fetch(ev.key).hit());
  return hits;
}

inline std::unique_ptr<CacheEngine> make_engine(const ExperimentConfig& config, const Trace& trace) {
  config.validate();
  if (config.multi_region) {
    MultiRegionConfig mc = config.multi;
    if (mc.key_universe == 0) mc.key_universe = static_cast<std::size_t>(max_key(trace)) + 1;
    return config.engine == EngineKind::restricted ? make_restricted_multi(mc, config.hyperbolic)
                                                   : make_reference_multi(mc, config.reference);
  }
  if (config.engine == EngineKind::reference) {
    auto options = config.reference;
    options.resolution = config.hyperbolic.integer_factor;
    if (config.full_associative) return make_reference(config.single.policy, config.single.k * config.single.d, 1, options);
    return make_reference(config.single.policy, config.single.k, config.single.d, options);
  }
  LayoutConfig layout;
  layout.k = config.single.k;
  layout.d = config.single.d;
  return make_restricted(config.single.policy, layout, config.hyperbolic);
}

/// Per-packet ceilings for a single region: a hit is exactly one ternary
/// match, one set read and one set write; a miss adds at most 2k read/write
/// pairs on auxiliary registers.
inline void check_single_region_ops(const OpCounter& ops, bool hit, std::size_t k) {
  const bool ok = hit ? (ops.tcam_matches == 1 && ops.register_reads == 1 && ops.register_writes == 1)
                      : (ops.tcam_matches == 1 && ops.register_reads <= 1 + 2 * k && ops.register_writes <= 1 + 2 * k);
  if (!ok) throw std::logic_error("per-packet operation ceiling violated");
}

inline ExperimentReport run_experiment(const ExperimentConfig& config, const Trace& trace) {
  auto engine = make_engine(config, trace);
  ExperimentReport r;
  r.engine = std::string(to_string(config.engine));
  r.policy = config.policy_label();
  if (config.multi_region) {
    r.k_w = config.multi.window.k;
    r.d_w = config.multi.window.d;
    r.k_m = config.multi.main.k;
    r.d_m = config.multi.main.d;
  } else if (config.full_associative) {
    r.k_m = config.single.k * config.single.d;
    r.d_m = 1;
  } else {
    r.k_m = config.single.k;
    r.d_m = config.single.d;
  }
  r.integer_factor = config.hyperbolic.integer_factor.to_string();
  r.trace = config.trace.identity();
  r.seed = config.trace.path ? 0 : config.trace.zipf.seed;
  r.generator = config.trace.path ? "file" : std::string(kGeneratorId);
  OpCounter max;
  const bool check_ops = config.engine == EngineKind::restricted && !config.multi_region;
  for (const auto& ev : trace) {
    const bool hit = engine->fetch(ev.key).hit();
    hit ? ++r.hits : ++r.misses;
    const OpCounter ops = engine->last_ops();
    if (check_ops) check_single_region_ops(ops, hit, config.single.k);
    max.keep_max(ops);
  }
  r.events = trace.size();
  r.max_tcam = max.tcam_matches;
  r.max_reads = max.register_reads;
  r.max_writes = max.register_writes;
  r.max_extra = max.extra_accesses;
  return r;
}

inline ExperimentReport run_experiment(const ExperimentConfig& config) {
  return run_experiment(config, config.trace.load());
}

/// Grid expansion over the sweep axes; an empty axis contributes the base
/// value. Rejects k values that do not divide the capacity.
inline std::vector<ExperimentConfig> expand_sweep(const ExperimentConfig& base) {
  std::vector<ExperimentConfig> grid{base};
  auto region = [](ExperimentConfig& c) -> RegionSpec& { return c.multi_region ? c.multi.main : c.single; };
  auto expand = [&](auto&& values, auto&& apply) {
    if (values.empty()) return;
    std::vector<ExperimentConfig> next;
    for (const auto& c : grid) {
      for (const auto& v : values) {
        ExperimentConfig copy = c;
        apply(copy, v);
        next.push_back(std::move(copy));
      }
    }
    grid = std::move(next);
  };
  const SweepAxes& axes = base.sweep;
  for (auto k : axes.ks) {
    if (k == 0 || axes.capacity % k != 0) {
      throw std::invalid_argument("sweep: k=" + std::to_string(k) + " does not divide capacity " +
                                  std::to_string(axes.capacity));
    }
  }
  for (auto size : axes.sizes) {
    if (size % (base.multi_region ? base.multi.main.k : base.single.k) != 0) {
      throw std::invalid_argument("sweep: cache size " + std::to_string(size) + " is not a multiple of k");
    }
  }
  expand(axes.ks, [&](ExperimentConfig& c, std::size_t k) {
    region(c).k = k;
    region(c).d = axes.capacity / k;
  });
  expand(axes.sizes, [&](ExperimentConfig& c, std::size_t size) { region(c).d = size / region(c).k; });
  expand(axes.integer_factors, [](ExperimentConfig& c, const IntegerFactor& f) { c.hyperbolic.integer_factor = f; });
  for (auto& c : grid) c.sweep = SweepAxes{};
  return grid;
}

/// Runs every grid point; points execute concurrently but the result order
/// follows the grid.
inline std::vector<ExperimentReport> run_sweep(const ExperimentConfig& base, const Trace& trace) {
  const auto grid = expand_sweep(base);
  std::vector<ExperimentReport> out(grid.size());
  const std::size_t workers = std::max<std::size_t>(1, std::min<std::size_t>(grid.size(), std::thread::hardware_concurrency()));
  for (std::size_t start = 0; start < grid.size(); start += workers) {
    std::vector<std::future<ExperimentReport>> batch;
    for (std::size_t i = start; i < std::min(grid.size(), start + workers); ++i) {
      batch.push_back(std::async(std::launch::async, [&, i] { return run_experiment(grid[i], trace); }));
    }
    for (std::size_t i = 0; i < batch.size(); ++i) out[start + i] = batch[i].get();
  }
  return out;
}

inline std::vector<ExperimentReport> run_sweep(const ExperimentConfig& base) {
  return run_sweep(base, base.trace.load());
}

enum class ReportFormat { csv, json };

inline ReportFormat parse_report_format(std::string_view s) {
  if (s == "csv") return ReportFormat::csv;
  if (s == "json") return ReportFormat::json;
  throw std::invalid_argument("unknown report format: " + std::string(s));
}

inline constexpr const char* kCsvHeader =
    "engine,policy,k_w,d_w,k_m,d_m,integer_factor,trace,seed,events,hits,hit_ratio,max_tcam,max_reads,max_writes";

inline std::string format_ratio(double ratio) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", ratio);
  return buf;
}

inline void to_json(nlohmann::ordered_json& j, const ExperimentReport& r) {
  j = nlohmann::ordered_json{{"engine", r.engine},
                             {"policy", r.policy},
                             {"k_w", r.k_w},
                             {"d_w", r.d_w},
                             {"k_m", r.k_m},
                             {"d_m", r.d_m},
                             {"integer_factor", r.integer_factor},
                             {"trace", r.trace},
                             {"seed", r.seed},
                             {"events", r.events},
                             {"hits", r.hits},
                             {"misses", r.misses},
                             {"hit_ratio", std::stod(format_ratio(r.hit_ratio()))},
                             {"max_tcam", r.max_tcam},
                             {"max_reads", r.max_reads},
                             {"max_writes", r.max_writes},
                             {"max_extra", r.max_extra},
                             {"generator", r.generator}};
}

inline ExperimentReport report_from_json(const nlohmann::json& j) {
  ExperimentReport r;
  j.at("engine").get_to(r.engine);
  j.at("policy").get_to(r.policy);
  j.at("k_w").get_to(r.k_w);
  j.at("d_w").get_to(r.d_w);
  j.at("k_m").get_to(r.k_m);
  j.at("d_m").get_to(r.d_m);
  j.at("integer_factor").get_to(r.integer_factor);
  j.at("trace").get_to(r.trace);
  j.at("seed").get_to(r.seed);
  j.at("events").get_to(r.events);
  j.at("hits").get_to(r.hits);
  j.at("misses").get_to(r.misses);
  j.at("max_tcam").get_to(r.max_tcam);
  j.at("max_reads").get_to(r.max_reads);
  j.at("max_writes").get_to(r.max_writes);
  j.at("max_extra").get_to(r.max_extra);
  j.at("generator").get_to(r.generator);
  return r;
}

inline std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out.push_back('"');
    out.push_back(c);
  }
  return out + "\"";
}

inline std::string emit_report(const std::vector<ExperimentReport>& reports, ReportFormat format) {
  std::ostringstream os;
  if (format == ReportFormat::csv) {
    os << kCsvHeader << "\n";
    for (const auto& r : reports) {
      os << r.engine << ',' << csv_field(r.policy) << ',' << r.k_w << ',' << r.d_w << ',' << r.k_m << ',' << r.d_m
         << ',' << r.integer_factor << ',' << csv_field(r.trace) << ',' << r.seed << ',' << r.events << ','
         << r.hits << ',' << format_ratio(r.hit_ratio()) << ',' << r.max_tcam << ',' << r.max_reads << ','
         << r.max_writes << "\n";
    }
  } else {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& r : reports) arr.push_back(r);
    os << arr.dump(2) << "\n";
  }
  return os.str();
}

inline void write_report(const std::string& text, const std::optional<std::string>& path) {
  if (!path) {
    std::fwrite(text.data(), 1, text.size(), stdout);
    return;
  }
  std::ofstream out(*path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report to " + *path);
  out << text;
  if (!out) throw std::runtime_error("failed writing report to " + *path);
}

}  // namespace pkache
