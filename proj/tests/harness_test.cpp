// Copyright 2026 The pkache-sim Authors
// SPDX-License-Identifier: Apache-2.0

#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include <gtest/gtest.h>

#include "pkache/harness.hpp"

using namespace pkache;

namespace {

Trace trace_of(std::initializer_list<std::uint64_t> keys) {
  Trace t;
  for (auto k : keys) t.push_back({k});
  return t;
}

ExperimentConfig small_zipf() {
  ExperimentConfig c;
  c.trace.zipf = {1000, 0.99, 20'000, 42};
  return c;
}

std::size_t count_lines(const std::string& s) { return static_cast<std::size_t>(std::count(s.begin(), s.end(), '\n')); }

}  // namespace

TEST(RunExperiment, HitRatioArithmetic) {
  ExperimentConfig c;
  c.single = {PolicyKind::lru, 1, 1};
  const auto r = run_experiment(c, trace_of({1, 1, 1, 1, 2, 3, 4, 5, 6, 7}));
  EXPECT_EQ(r.events, 10u);
  EXPECT_EQ(r.hits, 3u);
  EXPECT_EQ(r.misses, 7u);
  EXPECT_DOUBLE_EQ(r.hit_ratio(), 0.3);
}

TEST(RunExperiment, RestrictedLruEqualsReference) {
  auto c = small_zipf();
  const auto a = run_experiment(c);
  c.engine = EngineKind::reference;
  const auto b = run_experiment(c);
  EXPECT_EQ(a.hits, b.hits);
  EXPECT_EQ(a.misses, b.misses);
}

TEST(RunExperiment, SingleRegionOpsSurfaceAsMaxima) {
  const auto r = run_experiment(small_zipf());
  EXPECT_EQ(r.max_tcam, 1u);
  EXPECT_EQ(r.max_reads, 1u + 2u * 8u);
  EXPECT_EQ(r.max_writes, 1u + 2u * 8u);
}

TEST(RunExperiment, OpCeilingCheck) {
  OpCounter hit{1, 1, 1, 0};
  EXPECT_NO_THROW(check_single_region_ops(hit, true, 4));
  OpCounter heavy_hit{1, 2, 1, 0};
  EXPECT_THROW(check_single_region_ops(heavy_hit, true, 4), std::logic_error);
  OpCounter miss{1, 9, 9, 0};
  EXPECT_NO_THROW(check_single_region_ops(miss, false, 4));
  OpCounter heavy_miss{1, 10, 9, 0};
  EXPECT_THROW(check_single_region_ops(heavy_miss, false, 4), std::logic_error);
}

TEST(RunExperiment, MultiRegionDerivesUniverseFromTrace) {
  auto c = small_zipf();
  c.multi_region = true;
  const auto r = run_experiment(c);
  EXPECT_EQ(r.policy, "FIFOxLRUxTinyLFU");
  EXPECT_EQ(r.k_w, 4u);
  EXPECT_EQ(r.max_tcam, 2u);
  EXPECT_EQ(r.hits + r.misses, r.events);
}

TEST(RunExperiment, FullRequiresReference) {
  auto c = small_zipf();
  c.full_associative = true;
  EXPECT_THROW(run_experiment(c), std::invalid_argument);
  c.engine = EngineKind::reference;
  const auto r = run_experiment(c);
  EXPECT_EQ(r.k_m, 128u);
  EXPECT_EQ(r.d_m, 1u);
}

TEST(RunExperiment, TraceErrorsPropagate) {
  ExperimentConfig c;
  c.trace.path = "/nonexistent/trace.txt";
  EXPECT_THROW(run_experiment(c), TraceError);
}

TEST(Sweep, KsAtFixedCapacity) {
  auto c = small_zipf();
  c.sweep.ks = {8, 16, 32, 64};
  c.sweep.capacity = 512;
  const auto reports = run_sweep(c);
  ASSERT_EQ(reports.size(), 4u);
  const std::vector<std::size_t> ds{64, 32, 16, 8};
  for (std::size_t i = 0; i < 4; ++i) {
    EXPECT_EQ(reports[i].k_m, c.sweep.ks[i]);
    EXPECT_EQ(reports[i].d_m, ds[i]);
  }
}

TEST(Sweep, RejectsNonDividingK) {
  auto c = small_zipf();
  c.sweep.ks = {8, 24};
  c.sweep.capacity = 512;
  EXPECT_THROW(run_sweep(c), std::invalid_argument);
}

TEST(Sweep, SizesWithFullReferenceAreMonotone) {
  auto c = small_zipf();
  c.engine = EngineKind::reference;
  c.full_associative = true;
  c.single.k = 1;
  c.single.d = 1;
  c.sweep.sizes = {128, 256, 512, 1024, 2048};
  const auto reports = run_sweep(c);
  ASSERT_EQ(reports.size(), 5u);
  for (std::size_t i = 1; i < reports.size(); ++i) {
    EXPECT_EQ(reports[i].k_m, c.sweep.sizes[i]);
    EXPECT_GE(reports[i].hits, reports[i - 1].hits);
  }
}

TEST(Sweep, IntegerFactors) {
  auto c = small_zipf();
  c.single.policy = PolicyKind::hyperbolic;
  for (const char* f : {"0.1", "1", "10", "100", "1000"}) c.sweep.integer_factors.push_back(IntegerFactor::parse(f));
  const auto reports = run_sweep(c);
  ASSERT_EQ(reports.size(), 5u);
  EXPECT_EQ(reports[0].integer_factor, "0.1");
  EXPECT_EQ(reports[4].integer_factor, "1000");
  for (const auto& r : reports) EXPECT_EQ(r.policy, "Hyperbolic");
}

TEST(Sweep, GridOrderIsStable) {
  auto c = small_zipf();
  c.sweep.ks = {4, 8};
  c.sweep.capacity = 64;
  c.sweep.integer_factors = {IntegerFactor(10), IntegerFactor(100)};
  const auto grid = expand_sweep(c);
  ASSERT_EQ(grid.size(), 4u);
  EXPECT_EQ(grid[0].single.k, 4u);
  EXPECT_EQ(grid[1].hyperbolic.integer_factor, IntegerFactor(100));
  EXPECT_EQ(grid[2].single.k, 8u);
}

TEST(Report, CsvHeaderAndRow) {
  const auto text = emit_report({run_experiment(small_zipf())}, ReportFormat::csv);
  EXPECT_EQ(count_lines(text), 2u);
  EXPECT_EQ(text.substr(0, text.find('\n')), kCsvHeader);
  const auto row = text.substr(text.find('\n') + 1);
  EXPECT_EQ(std::count(row.begin(), row.end(), ','), 14);
}

TEST(Report, HitRatioHasFourDecimals) {
  ExperimentReport r;
  r.events = 3;
  r.hits = 1;
  const auto text = emit_report({r}, ReportFormat::csv);
  EXPECT_NE(text.find(",0.3333,"), std::string::npos);
}

TEST(Report, JsonRoundTrip) {
  auto c = small_zipf();
  c.multi_region = true;
  const auto r = run_experiment(c);
  const auto text = emit_report({r}, ReportFormat::json);
  const auto parsed = nlohmann::json::parse(text);
  ASSERT_EQ(parsed.size(), 1u);
  EXPECT_EQ(report_from_json(parsed[0]), r);
  EXPECT_EQ(parsed[0]["generator"], std::string(kGeneratorId));
}

TEST(Report, DeterministicBytes) {
  auto c = small_zipf();
  c.sweep.ks = {4, 8, 16};
  c.sweep.capacity = 128;
  for (auto format : {ReportFormat::csv, ReportFormat::json}) {
    EXPECT_EQ(emit_report(run_sweep(c), format), emit_report(run_sweep(c), format));
  }
}

TEST(Report, CsvQuotesFieldsWithCommas) {
  ExperimentReport r;
  r.trace = "a,b.txt";
  const auto text = emit_report({r}, ReportFormat::csv);
  EXPECT_NE(text.find("\"a,b.txt\""), std::string::npos);
}

TEST(Report, UnwritableDestination) {
  EXPECT_THROW(write_report("x", std::string("/nonexistent/dir/out.csv")), std::runtime_error);
  const auto path = (std::filesystem::temp_directory_path() / "pkache_report_test.csv").string();
  write_report("hello\n", path);
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "hello");
  std::filesystem::remove(path);
}
