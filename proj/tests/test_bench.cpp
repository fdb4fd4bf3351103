// Copyright 2026 The parheap Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <parheap/bench.hpp>

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <sstream>

using namespace parheap;

namespace {

class FakeCounters final : public CounterSource {
public:
  bool available() const override { return true; }
  void start() override { ++starts; }
  CacheMissCounts stop() override {
    ++stops;
    return {std::uint64_t{100} * stops, std::uint64_t{7} * stops};
  }
  int starts = 0;
  int stops = 0;
};

ExperimentConfig small_config() {
  ExperimentConfig cfg;
  cfg.sizes = {10};
  cfg.methods = {Method::baseline()};
  cfg.reps = 2;
  return cfg;
}

} // namespace

TEST(Workload, EmptyAndDeterministic) {
  EXPECT_TRUE(generate_workload(0, 1).empty());
  EXPECT_THROW(generate_workload(-1, 1), std::invalid_argument);
  EXPECT_EQ(generate_workload(1000, 42), generate_workload(1000, 42));
  EXPECT_NE(generate_workload(1000, 42), generate_workload(1000, 43));
  EXPECT_NE(derive_seed(1, 10, 0), derive_seed(1, 10, 1));
  EXPECT_NE(derive_seed(1, 10, 0), derive_seed(1, 30, 0));
}

TEST(Workload, UniformOverInt32) {
  // One-sample Kolmogorov-Smirnov against U[INT32_MIN, INT32_MAX].
  constexpr std::int64_t n = 1'000'000;
  auto keys = generate_workload(n, 2024);
  std::sort(keys.begin(), keys.end());
  double d = 0.0;
  for (std::int64_t i = 0; i < n; ++i) {
    const double cdf = (static_cast<double>(keys[i]) - INT32_MIN + 0.5) / 4294967296.0;
    d = std::max({d, std::abs(cdf - static_cast<double>(i) / n),
                  std::abs(cdf - static_cast<double>(i + 1) / n)});
  }
  // critical value at alpha = 0.001
  EXPECT_LT(d, 1.95 / std::sqrt(static_cast<double>(n)));
}

TEST(Methods, ParseList) {
  const auto m = parse_method_list("parheap:2,9,1,baseline,std");
  ASSERT_EQ(m.size(), 3u);
  EXPECT_EQ(m[0], Method::par_heap({2, 9, 1}));
  EXPECT_EQ(m[1], Method::baseline());
  EXPECT_EQ(m[2], Method::std_heap());
  EXPECT_EQ(m[0].id(), "parheap_2_9_1");
  EXPECT_EQ(parse_method_list("parheap"), (std::vector<Method>{Method::par_heap({2, 9, 1})}));
  EXPECT_THROW(parse_method_list("parheap:2,9"), std::invalid_argument);
  EXPECT_THROW(parse_method_list("parheap:0,9,1"), InvalidParams);
  EXPECT_THROW(parse_method_list("quick"), std::invalid_argument);
}

TEST(Sizes, DefaultsAndClipping) {
  EXPECT_EQ(default_sizes(1000), (std::vector<index_t>{10, 30, 100, 300, 1000}));
  EXPECT_EQ(default_sizes().back(), 100'000'000);
  EXPECT_EQ(clip_sizes_to_memory({10, 1000, 1'000'000}, 8000), (std::vector<index_t>{10, 1000}));
}

TEST(Config, Validation) {
  ExperimentConfig cfg = small_config();
  NullCounters none;
  FixedStepClock clock(std::chrono::microseconds(1));
  cfg.sizes = {};
  EXPECT_THROW(run_experiment(cfg, clock, none), std::invalid_argument);
  cfg.sizes = {100, 10};
  EXPECT_THROW(run_experiment(cfg, clock, none), std::invalid_argument);
  cfg.sizes = {0};
  EXPECT_THROW(run_experiment(cfg, clock, none), std::invalid_argument);
  cfg = small_config();
  cfg.reps = 0;
  EXPECT_THROW(run_experiment(cfg, clock, none), std::invalid_argument);
}

TEST(Experiment, OneRecordPerCell) {
  NullCounters none;
  FixedStepClock clock(std::chrono::microseconds(3));
  const auto r = run_experiment(small_config(), clock, none);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].method, "baseline_binary");
  EXPECT_EQ(r.records[0].n, 10);
  EXPECT_EQ(r.records[0].rep, 0);
  EXPECT_EQ(r.records[1].rep, 1);
  for (const auto &rec : r.records) {
    EXPECT_DOUBLE_EQ(rec.elapsed_us, 3.0);
    EXPECT_FALSE(rec.l2_misses);
    EXPECT_FALSE(rec.l3_misses);
  }
}

TEST(Experiment, FullGridCount) {
  ExperimentConfig cfg;
  cfg.sizes = {10, 100, 1000};
  cfg.methods = {Method::par_heap({2, 9, 1}), Method::baseline()};
  cfg.reps = 3;
  NullCounters none;
  FixedStepClock clock(std::chrono::microseconds(1));
  const auto r = run_experiment(cfg, clock, none);
  EXPECT_EQ(r.records.size(), 18u);
  EXPECT_EQ(r.summaries.size(), 6u);
}

TEST(Experiment, MethodsShareInputs) {
  ExperimentConfig cfg;
  cfg.sizes = {50, 500};
  cfg.methods = {Method::par_heap({2, 3, 2}), Method::baseline(), Method::std_heap()};
  cfg.reps = 2;
  NullCounters none;
  FixedStepClock clock(std::chrono::microseconds(1));
  const auto r = run_experiment(cfg, clock, none);
  ASSERT_EQ(r.records.size(), 12u);
  for (std::size_t i = 0; i < r.records.size(); i += 3) {
    EXPECT_EQ(r.records[i].seed, r.records[i + 1].seed);
    EXPECT_EQ(r.records[i].seed, r.records[i + 2].seed);
    EXPECT_EQ(r.records[i].seed, derive_seed(cfg.seed, r.records[i].n, r.records[i].rep));
  }
}

TEST(Experiment, SummaryMeanIsArithmeticMean) {
  ExperimentConfig cfg = small_config();
  cfg.reps = 4;
  NullCounters none;
  // intervals 10, 20, 30, 40 us
  ScriptedClock clock({std::chrono::microseconds(10), std::chrono::microseconds(20),
                       std::chrono::microseconds(30), std::chrono::microseconds(40)});
  const auto r = run_experiment(cfg, clock, none);
  ASSERT_EQ(r.summaries.size(), 1u);
  EXPECT_DOUBLE_EQ(r.summaries[0].mean_us, 25.0);
  EXPECT_DOUBLE_EQ(r.summaries[0].min_us, 10.0);
  EXPECT_NEAR(r.summaries[0].stddev_us, std::sqrt(500.0 / 3.0), 1e-9);
  EXPECT_FALSE(r.summaries[0].mean_l3_misses);
}

TEST(Experiment, CountersUnavailableLeavesFieldsEmpty) {
  ExperimentConfig cfg = small_config();
  cfg.counters_enabled = true;
  NullCounters none;
  FixedStepClock clock(std::chrono::microseconds(1));
  const auto r = run_experiment(cfg, clock, none);
  EXPECT_FALSE(r.counters_active);
  EXPECT_FALSE(r.counter_diagnostic.empty());
  for (const auto &rec : r.records) EXPECT_FALSE(rec.l3_misses);
}

TEST(Experiment, CountersRecordedWhenAvailable) {
  ExperimentConfig cfg = small_config();
  cfg.counters_enabled = true;
  FakeCounters fake;
  FixedStepClock clock(std::chrono::microseconds(1));
  const auto r = run_experiment(cfg, clock, fake);
  EXPECT_TRUE(r.counters_active);
  EXPECT_EQ(fake.starts, 2);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].l2_misses, 100u);
  EXPECT_EQ(r.records[1].l3_misses, 14u);
  EXPECT_DOUBLE_EQ(*r.summaries[0].mean_l3_misses, 10.5);

  cfg.counters_enabled = false;
  FakeCounters unused;
  run_experiment(cfg, clock, unused);
  EXPECT_EQ(unused.starts, 0);
}

TEST(Csv, HeaderAndEmptyCounterFields) {
  BenchRecord a{"baseline_binary", 10, 0, 99, 1.5, std::nullopt, std::nullopt};
  BenchRecord b{"parheap_2_9_1", 10, 0, 99, 0.1, 5, 6};
  std::ostringstream os;
  write_csv(os, {a, b});
  EXPECT_EQ(os.str(), std::string(kCsvHeader) +
                          "\nbaseline_binary,10,0,99,1.5,,\nparheap_2_9_1,10,0,99,0.1,5,6\n");
}

TEST(Metadata, DescribesConfigAndTimer) {
  ExperimentConfig cfg = small_config();
  ExperimentResult res;
  const auto j = environment_metadata(cfg, res);
  EXPECT_TRUE(j.contains("cpu_model"));
  EXPECT_TRUE(j.contains("build_profile"));
  EXPECT_EQ(j["config"]["reps"], 2);
}
