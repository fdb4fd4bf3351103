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

/** \file

  Heapsort benchmark harness.

  For every (size, repetition) cell one random workload is generated and each
  method sorts its own copy of it. Only make_heap + sort_heap is inside the
  timed (and, when enabled, counted) region. Every output is checked before
  its record is kept.

  CSV schema, one row per trial:

    method,n,rep,seed,elapsed_us,l2_misses,l3_misses

  Counter columns are left empty when counts are unavailable.
 */

#pragma once

#include <parheap/autotune.hpp>
#include <parheap/baseline_heap.hpp>
#include <parheap/clock.hpp>
#include <parheap/layout.hpp>
#include <parheap/par_heap.hpp>
#include <parheap/perf_counters.hpp>
#include <parheap/workload.hpp>

#include <json.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <string>
#include <string_view>
#include <thread>
#include <utility>
#include <vector>

#ifndef PARHEAP_BUILD_PROFILE
#define PARHEAP_BUILD_PROFILE "unknown"
#endif

namespace parheap {

enum class MethodKind { par_heap, baseline_binary, std_heap };

struct Method {
  MethodKind kind = MethodKind::par_heap;
  HeapParams params{};

  static Method par_heap(const HeapParams &p) { return {MethodKind::par_heap, p}; }
  static Method baseline() { return {MethodKind::baseline_binary, {}}; }
  static Method std_heap() { return {MethodKind::std_heap, {}}; }

  [[nodiscard]] std::string id() const {
    switch (kind) {
    case MethodKind::par_heap:
      return "parheap_" + std::to_string(params.depth) + "_" + std::to_string(params.intra) +
             "_" + std::to_string(params.inter);
    case MethodKind::baseline_binary:
      return "baseline_binary";
    case MethodKind::std_heap:
      return "std_heap";
    }
    return "unknown";
  }

  friend bool operator==(const Method &a, const Method &b) {
    return a.kind == b.kind && (a.kind != MethodKind::par_heap || a.params == b.params);
  }
};

/// Parses a comma separated method list. `parheap:d,a,b` consumes the two
/// following tokens; `baseline`/`baseline_binary` and `std`/`std_heap` name
/// the two reference heaps.
inline std::vector<Method> parse_method_list(std::string_view text) {
  std::vector<std::string> tokens;
  std::string cur;
  for (char ch : text) {
    if (ch == ',') {
      tokens.push_back(cur);
      cur.clear();
    } else if (ch != ' ') {
      cur += ch;
    }
  }
  tokens.push_back(cur);

  const auto to_int = [](const std::string &s) -> index_t {
    index_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size())
      throw std::invalid_argument("bad integer in method list: '" + s + "'");
    return v;
  };

  std::vector<Method> out;
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string &t = tokens[i];
    if (t == "baseline" || t == "baseline_binary") {
      out.push_back(Method::baseline());
    } else if (t == "std" || t == "std_heap") {
      out.push_back(Method::std_heap());
    } else if (t.rfind("parheap:", 0) == 0) {
      if (i + 2 >= tokens.size())
        throw std::invalid_argument("parheap method needs three parameters: parheap:d,a,b");
      const HeapParams p{to_int(t.substr(8)), to_int(tokens[i + 1]), to_int(tokens[i + 2])};
      derive_geometry(p);
      out.push_back(Method::par_heap(p));
      i += 2;
    } else if (t == "parheap") {
      out.push_back(Method::par_heap({2, 9, 1}));
    } else {
      throw std::invalid_argument("unknown method '" + t + "'");
    }
  }
  if (out.empty()) throw std::invalid_argument("empty method list");
  return out;
}

/// 10, 30, 100, 300, ... up to `max_n` inclusive.
inline std::vector<index_t> default_sizes(index_t max_n = 100'000'000) {
  std::vector<index_t> out;
  for (index_t p = 10; p <= max_n; p *= 10) {
    out.push_back(p);
    if (3 * p <= max_n) out.push_back(3 * p);
  }
  return out;
}

/// Drops sizes whose workload plus working copy would exceed `budget_bytes`.
inline std::vector<index_t> clip_sizes_to_memory(const std::vector<index_t> &sizes,
                                                 std::uint64_t budget_bytes) {
  std::vector<index_t> out;
  for (index_t n : sizes)
    if (static_cast<std::uint64_t>(n) * 2 * sizeof(key32_t) <= budget_bytes) out.push_back(n);
  return out;
}

inline std::uint64_t available_memory_bytes() {
#if defined(_SC_AVPHYS_PAGES) && defined(_SC_PAGESIZE)
  const long pages = sysconf(_SC_AVPHYS_PAGES);
  const long page = sysconf(_SC_PAGESIZE);
  if (pages > 0 && page > 0)
    return static_cast<std::uint64_t>(pages) * static_cast<std::uint64_t>(page);
#endif
  return std::uint64_t{1} << 32;
}

struct ExperimentConfig {
  std::vector<index_t> sizes = default_sizes();
  std::vector<Method> methods = {Method::par_heap({2, 9, 1}), Method::baseline()};
  int reps = 10;
  std::uint64_t seed = 1;
  bool counters_enabled = false;
};

inline void validate_config(const ExperimentConfig &cfg) {
  if (cfg.sizes.empty()) throw std::invalid_argument("no sizes given");
  for (std::size_t i = 0; i < cfg.sizes.size(); ++i) {
    if (cfg.sizes[i] <= 0) throw std::invalid_argument("sizes must be positive");
    if (i > 0 && cfg.sizes[i] <= cfg.sizes[i - 1])
      throw std::invalid_argument("sizes must be strictly ascending");
  }
  if (cfg.methods.empty()) throw std::invalid_argument("no methods given");
  if (cfg.reps < 1) throw std::invalid_argument("reps must be >= 1");
}

struct BenchRecord {
  std::string method;
  index_t n = 0;
  int rep = 0;
  std::uint64_t seed = 0;
  double elapsed_us = 0.0;
  std::optional<std::uint64_t> l2_misses;
  std::optional<std::uint64_t> l3_misses;

  friend bool operator==(const BenchRecord &, const BenchRecord &) = default;
};

struct BenchSummary {
  std::string method;
  index_t n = 0;
  int reps = 0;
  double mean_us = 0.0;
  double min_us = 0.0;
  double stddev_us = 0.0;
  std::optional<double> mean_l2_misses;
  std::optional<double> mean_l3_misses;
};

struct ExperimentResult {
  std::vector<BenchRecord> records;
  std::vector<BenchSummary> summaries;
  bool counters_active = false;
  std::string counter_diagnostic;
};

/// The timed region for one method: build followed by in-place sort.
inline void run_method(const Method &m, std::span<key32_t> keys) {
  switch (m.kind) {
  case MethodKind::par_heap:
    heap_sort(keys, derive_geometry(m.params));
    break;
  case MethodKind::baseline_binary:
    baseline_make_heap(keys, 2);
    baseline_sort_heap(keys, 2);
    break;
  case MethodKind::std_heap:
    std::make_heap(keys.begin(), keys.end());
    std::sort_heap(keys.begin(), keys.end());
    break;
  }
}

/// Per-(method, n) statistics, in order of first appearance. Counter means
/// only cover records that carry the counter; none at all yields nullopt.
inline std::vector<BenchSummary> summarize(const std::vector<BenchRecord> &records) {
  std::vector<std::pair<std::string, index_t>> order;
  std::map<std::pair<std::string, index_t>, std::vector<const BenchRecord *>> groups;
  for (const auto &r : records) {
    auto key = std::make_pair(r.method, r.n);
    auto &g = groups[key];
    if (g.empty()) order.push_back(key);
    g.push_back(&r);
  }

  const auto counter_mean = [](const std::vector<const BenchRecord *> &g,
                               auto field) -> std::optional<double> {
    double sum = 0.0;
    std::size_t count = 0;
    for (const auto *r : g)
      if (const auto &v = r->*field) {
        sum += static_cast<double>(*v);
        ++count;
      }
    if (count == 0) return std::nullopt;
    return sum / static_cast<double>(count);
  };

  std::vector<BenchSummary> out;
  for (const auto &key : order) {
    const auto &g = groups[key];
    BenchSummary s;
    s.method = key.first;
    s.n = key.second;
    s.reps = static_cast<int>(g.size());
    double sum = 0.0;
    s.min_us = g.front()->elapsed_us;
    for (const auto *r : g) {
      sum += r->elapsed_us;
      s.min_us = std::min(s.min_us, r->elapsed_us);
    }
    s.mean_us = sum / static_cast<double>(g.size());
    double var = 0.0;
    for (const auto *r : g) var += (r->elapsed_us - s.mean_us) * (r->elapsed_us - s.mean_us);
    s.stddev_us = g.size() > 1 ? std::sqrt(var / static_cast<double>(g.size() - 1)) : 0.0;
    s.mean_l2_misses = counter_mean(g, &BenchRecord::l2_misses);
    s.mean_l3_misses = counter_mean(g, &BenchRecord::l3_misses);
    out.push_back(std::move(s));
  }
  return out;
}

/// Runs the full (size x rep x method) sweep on the calling thread.
/// Throws VerificationFailure naming method, n and rep on a wrong result.
inline ExperimentResult run_experiment(const ExperimentConfig &cfg, Clock &clock,
                                       CounterSource &counters) {
  validate_config(cfg);
  ExperimentResult result;
  const bool count = cfg.counters_enabled && counters.available();
  result.counters_active = count;
  if (cfg.counters_enabled && !count)
    result.counter_diagnostic = "hardware counters unavailable; counter columns left empty";

  std::vector<key32_t> work;
  for (index_t n : cfg.sizes) {
    for (int rep = 0; rep < cfg.reps; ++rep) {
      const std::uint64_t seed = derive_seed(cfg.seed, n, rep);
      const std::vector<key32_t> input = generate_workload(n, seed);
      std::int64_t input_sum = 0;
      for (key32_t k : input) input_sum += k;

      for (const Method &m : cfg.methods) {
        work = input;
        CacheMissCounts counts;
        if (count) counters.start();
        const nanos t0 = clock.now();
        run_method(m, std::span<key32_t>(work));
        const nanos t1 = clock.now();
        if (count) counts = counters.stop();

        std::int64_t sum = 0;
        for (key32_t k : work) sum += k;
        if (!std::is_sorted(work.begin(), work.end()) || sum != input_sum)
          throw VerificationFailure("wrong heapsort output: method " + m.id() + ", n " +
                                    std::to_string(n) + ", rep " + std::to_string(rep));

        BenchRecord rec;
        rec.method = m.id();
        rec.n = n;
        rec.rep = rep;
        rec.seed = seed;
        rec.elapsed_us = std::chrono::duration<double, std::micro>(t1 - t0).count();
        rec.l2_misses = counts.l2_misses;
        rec.l3_misses = counts.l3_misses;
        result.records.push_back(std::move(rec));
      }
    }
  }
  result.summaries = summarize(result.records);
  return result;
}

inline constexpr std::string_view kCsvHeader = "method,n,rep,seed,elapsed_us,l2_misses,l3_misses";

/// Shortest decimal text that parses back to the same double.
inline std::string format_double(double v) {
  char buf[64];
  auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, end);
}

inline void write_csv(std::ostream &os, const std::vector<BenchRecord> &records) {
  os << kCsvHeader << '\n';
  for (const auto &r : records) {
    os << r.method << ',' << r.n << ',' << r.rep << ',' << r.seed << ','
       << format_double(r.elapsed_us) << ',';
    if (r.l2_misses) os << *r.l2_misses;
    os << ',';
    if (r.l3_misses) os << *r.l3_misses;
    os << '\n';
  }
}

namespace detail {

inline std::string read_first_line(const std::string &path) {
  std::ifstream in(path);
  std::string line;
  std::getline(in, line);
  return line;
}

inline std::string cpu_model_name() {
  std::ifstream in("/proc/cpuinfo");
  for (std::string line; std::getline(in, line);) {
    if (line.rfind("model name", 0) == 0) {
      auto colon = line.find(':');
      if (colon != std::string::npos) {
        auto v = line.substr(colon + 1);
        v.erase(0, v.find_first_not_of(' '));
        return v;
      }
    }
  }
  return "unknown";
}

} // namespace detail

/// Host, build and measurement description written next to every CSV.
inline nlohmann::json environment_metadata(const ExperimentConfig &cfg,
                                           const ExperimentResult &result) {
  nlohmann::json caches = nlohmann::json::array();
  for (int i = 0; i < 8; ++i) {
    const std::string base = "/sys/devices/system/cpu/cpu0/cache/index" + std::to_string(i) + "/";
    const std::string level = detail::read_first_line(base + "level");
    if (level.empty()) continue;
    caches.push_back({{"level", level},
                      {"type", detail::read_first_line(base + "type")},
                      {"size", detail::read_first_line(base + "size")}});
  }
  nlohmann::json methods = nlohmann::json::array();
  for (const auto &m : cfg.methods) methods.push_back(m.id());

  nlohmann::json j;
  j["cpu_model"] = detail::cpu_model_name();
  j["hardware_threads"] = std::thread::hardware_concurrency();
  j["caches"] = caches;
  j["build_profile"] = PARHEAP_BUILD_PROFILE;
#if defined(__OPTIMIZE__)
  j["optimized"] = true;
#else
  j["optimized"] = false;
#endif
#if defined(__VERSION__)
  j["compiler"] = __VERSION__;
#endif
  j["timer"] = "CLOCK_PROCESS_CPUTIME_ID around make_heap + sort_heap";
  j["counters"] = {
      {"enabled", cfg.counters_enabled},
      {"active", result.counters_active},
      {"region", "combined make_heap + sort_heap"},
      {"l2_misses_event", "PERF_COUNT_HW_CACHE_REFERENCES"},
      {"l3_misses_event", "PERF_COUNT_HW_CACHE_MISSES"},
      {"diagnostic", result.counter_diagnostic},
  };
  j["config"] = {{"sizes", cfg.sizes}, {"methods", methods}, {"reps", cfg.reps},
                 {"seed", cfg.seed}};
  j["workload"] = "uniform int32 from mt19937_64 upper 32 bits; seed per (n, rep) via splitmix64";
  return j;
}

} // namespace parheap
