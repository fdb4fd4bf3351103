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

// parheap: tune / bench / sort / verify front end.
//
// Exit codes: 0 success, 1 verification or I/O failure, 2 usage error.

#include <parheap/parheap.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace parheap;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Accepts plain integers and integral scientific notation ("8e7").
index_t parse_count(const std::string &s) {
  try {
    std::size_t pos = 0;
    if (s.find_first_of("eE.") != std::string::npos) {
      const double v = std::stod(s, &pos);
      if (pos != s.size() || v != std::floor(v) || v > 9.0e18)
        throw UsageError("not an integer: '" + s + "'");
      return static_cast<index_t>(v);
    }
    const long long v = std::stoll(s, &pos);
    if (pos != s.size()) throw UsageError("not an integer: '" + s + "'");
    return v;
  } catch (const std::logic_error &) {
    throw UsageError("not an integer: '" + s + "'");
  }
}

/// "lo..hi" or a single value.
IntRange parse_range(const std::string &s) {
  const auto dots = s.find("..");
  if (dots == std::string::npos) {
    const index_t v = parse_count(s);
    return {v, v};
  }
  return {parse_count(s.substr(0, dots)), parse_count(s.substr(dots + 2))};
}

/// "10,1000,1e5" as given, or "lo..hi" expanded to lo, 10*lo, ... <= hi.
std::vector<index_t> parse_sizes(const std::string &s) {
  std::vector<index_t> out;
  if (s.find("..") != std::string::npos) {
    const IntRange r = parse_range(s);
    if (r.lo < 1 || r.empty()) throw UsageError("bad size range '" + s + "'");
    for (index_t v = r.lo; v <= r.hi; v *= 10) {
      out.push_back(v);
      if (v > r.hi / 10) break;
    }
    return out;
  }
  std::size_t start = 0;
  while (start <= s.size()) {
    auto comma = s.find(',', start);
    if (comma == std::string::npos) comma = s.size();
    out.push_back(parse_count(s.substr(start, comma - start)));
    start = comma + 1;
  }
  return out;
}

void write_text_file(const std::string &path, const std::string &content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << content;
}

// ---------------------------------------------------------------- tune

struct TuneOptions {
  std::string depth = "1..10";
  std::string intra = "2..10";
  std::string inter = "1..2";
  std::string n = "80000000";
  std::string trial_n;
  int reps = 1;
  std::uint64_t seed = 1;
  std::string fake_clock;
  std::string json_path = "tune_report.json";
  bool no_warmup = false;
};

int cmd_tune(const TuneOptions &o) {
  SearchSpace space;
  space.depth = parse_range(o.depth);
  space.intra = parse_range(o.intra);
  space.inter = parse_range(o.inter);
  space.n = parse_count(o.n);
  space.reps_per_candidate = o.reps;
  space.seed = o.seed;
  space.warmup = !o.no_warmup;
  if (!o.trial_n.empty()) space.trial_n = parse_count(o.trial_n);
  // a replayed clock makes real work pointless beyond exercising the path
  if (!o.fake_clock.empty() && !space.trial_n) space.trial_n = 1000;

  Candidates cands;
  try {
    cands = enumerate_candidates(space);
  } catch (const InvalidParams &e) {
    throw UsageError(e.what());
  }

  std::unique_ptr<Clock> clock;
  if (!o.fake_clock.empty()) {
    std::ifstream in(o.fake_clock);
    if (!in) throw UsageError("cannot read fake clock file " + o.fake_clock);
    const auto j = nlohmann::json::parse(in);
    clock = std::make_unique<ScriptedClock>(replay_script(j, cands.timed, o.reps));
  } else {
    clock = std::make_unique<ProcessCpuClock>();
  }

  std::cerr << "timing " << cands.timed.size() << " layouts (" << cands.pruned.size()
            << " pruned as duplicates) on " << space.workload_size() << " keys\n";
  const TuneReport report = search(space, *clock);
  std::cout << render_table(report);
  std::printf("best: depth=%lld intra=%lld inter=%lld (%.6f s)\n",
              static_cast<long long>(report.best.depth),
              static_cast<long long>(report.best.intra),
              static_cast<long long>(report.best.inter), report.best_seconds());
  if (!o.json_path.empty()) {
    write_text_file(o.json_path, to_json(report).dump(2) + "\n");
    std::cout << "report written to " << o.json_path << "\n";
  }
  return kExitOk;
}

// ---------------------------------------------------------------- bench

struct BenchOptions {
  std::string sizes = "10..100000000";
  int reps = 10;
  std::uint64_t seed = 1;
  std::string methods = "parheap:2,9,1,baseline";
  std::string counters = "off";
  std::string out = "bench.csv";
  std::string meta;
  std::string plots;
};

int cmd_bench(const BenchOptions &o) {
  ExperimentConfig cfg;
  try {
    cfg.sizes = parse_sizes(o.sizes);
    cfg.methods = parse_method_list(o.methods);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }
  cfg.reps = o.reps;
  cfg.seed = o.seed;
  if (o.counters != "on" && o.counters != "off") throw UsageError("--counters takes on|off");
  cfg.counters_enabled = o.counters == "on";

  const auto kept = clip_sizes_to_memory(cfg.sizes, available_memory_bytes() / 2);
  if (kept.size() != cfg.sizes.size())
    std::cerr << "warning: dropped " << cfg.sizes.size() - kept.size()
              << " size(s) that do not fit in available memory\n";
  cfg.sizes = kept;
  try {
    validate_config(cfg);
  } catch (const std::invalid_argument &e) {
    throw UsageError(e.what());
  }

  std::unique_ptr<CounterSource> counters;
  if (cfg.counters_enabled) {
    auto probe = std::make_unique<PerfCounterProbe>();
    if (!probe->available()) std::cerr << "warning: " << probe->diagnostic() << "\n";
    counters = std::move(probe);
  } else {
    counters = std::make_unique<NullCounters>();
  }

  ProcessCpuClock clock;
  ExperimentResult result;
  try {
    result = run_experiment(cfg, clock, *counters);
  } catch (const VerificationFailure &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  if (!result.counter_diagnostic.empty()) std::cerr << "warning: " << result.counter_diagnostic << "\n";

  {
    std::ofstream csv(o.out);
    if (!csv) throw std::runtime_error("cannot write " + o.out);
    write_csv(csv, result.records);
  }
  const std::string meta = o.meta.empty() ? o.out + ".meta.json" : o.meta;
  write_text_file(meta, environment_metadata(cfg, result).dump(2) + "\n");

  std::cout << render_summary(result.summaries);
  std::cout << result.records.size() << " records written to " << o.out << " (metadata: " << meta
            << ")\n";

  if (!o.plots.empty()) {
    std::filesystem::create_directories(o.plots);
    for (Metric m : {Metric::elapsed_us, Metric::l2_misses, Metric::l3_misses}) {
      auto series = aggregate(result.records, m);
      const bool has_points =
          std::any_of(series.begin(), series.end(), [](const Series &s) { return !s.points.empty(); });
      const std::string path = o.plots + "/" + std::string(metric_name(m)) + ".svg";
      if (!has_points) {
        std::cout << "no " << metric_name(m) << " data; skipped " << path << "\n";
        continue;
      }
      emit_plot(series, m, path);
      std::cout << "plot written to " << path << "\n";
    }
  }
  return kExitOk;
}

// ---------------------------------------------------------------- sort

struct LayoutOptions {
  std::optional<index_t> depth;
  std::optional<index_t> intra;
  std::optional<index_t> inter;
};

HeapParams resolve_params(const LayoutOptions &o) {
  if (!o.depth && !o.intra && !o.inter)
    std::cerr << "note: using layout (2, 9, 1); run `parheap tune` to find the best layout "
                 "for this machine\n";
  HeapParams p{o.depth.value_or(2), o.intra.value_or(9), o.inter.value_or(1)};
  try {
    derive_geometry(p);
  } catch (const InvalidParams &e) {
    throw UsageError(e.what());
  }
  return p;
}

struct SortOptions {
  LayoutOptions layout;
  std::string input;
  std::string output;
  std::string format = "text";
};

struct InputError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<key32_t> read_text_keys(std::istream &in) {
  std::vector<key32_t> keys;
  std::string line;
  for (std::size_t line_no = 1; std::getline(in, line); ++line_no) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto first = line.find_first_not_of(" \t");
    if (first == std::string::npos) continue;
    const auto last = line.find_last_not_of(" \t");
    const std::string tok = line.substr(first, last - first + 1);
    key32_t v = 0;
    auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (ec != std::errc{} || p != tok.data() + tok.size())
      throw InputError("line " + std::to_string(line_no) + ": not a 32-bit integer: '" + tok + "'");
    keys.push_back(v);
  }
  return keys;
}

std::vector<key32_t> read_binary_keys(std::istream &in) {
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)),
                                         std::istreambuf_iterator<char>());
  if (bytes.size() % 4 != 0)
    throw InputError("offset " + std::to_string(bytes.size() - bytes.size() % 4) +
                     ": trailing " + std::to_string(bytes.size() % 4) +
                     " byte(s) do not form a 32-bit integer");
  std::vector<key32_t> keys(bytes.size() / 4);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const std::uint32_t u = std::uint32_t{bytes[4 * i]} | std::uint32_t{bytes[4 * i + 1]} << 8 |
                            std::uint32_t{bytes[4 * i + 2]} << 16 |
                            std::uint32_t{bytes[4 * i + 3]} << 24;
    keys[i] = std::bit_cast<key32_t>(u);
  }
  return keys;
}

void write_keys(std::ostream &out, const std::vector<key32_t> &keys, bool binary) {
  if (!binary) {
    std::string buf;
    for (key32_t k : keys) {
      buf += std::to_string(k);
      buf += '\n';
    }
    out << buf;
    return;
  }
  std::vector<char> bytes(keys.size() * 4);
  for (std::size_t i = 0; i < keys.size(); ++i) {
    const auto u = std::bit_cast<std::uint32_t>(keys[i]);
    for (int b = 0; b < 4; ++b) bytes[4 * i + b] = static_cast<char>((u >> (8 * b)) & 0xff);
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

int cmd_sort(const SortOptions &o) {
  if (o.format != "text" && o.format != "binary") throw UsageError("--format takes text|binary");
  const bool binary = o.format == "binary";
  const HeapParams params = resolve_params(o.layout);

  std::ifstream in(o.input, std::ios::binary);
  if (!in) {
    std::cerr << "error: cannot read " << o.input << "\n";
    return kExitFailure;
  }
  std::vector<key32_t> keys;
  try {
    keys = binary ? read_binary_keys(in) : read_text_keys(in);
  } catch (const InputError &e) {
    std::cerr << "error: " << o.input << ": " << e.what() << "\n";
    return kExitFailure;
  }

  ParHeap<key32_t> heap(params, std::move(keys));
  heap.build();
  heap.heap_sort();
  keys = heap.release();

  std::ofstream out(o.output, std::ios::binary);
  if (!out) {
    std::cerr << "error: cannot write " << o.output << "\n";
    return kExitFailure;
  }
  write_keys(out, keys, binary);
  if (!out) {
    std::cerr << "error: write to " << o.output << " failed\n";
    return kExitFailure;
  }
  return kExitOk;
}

// ---------------------------------------------------------------- verify

struct VerifyOptions {
  LayoutOptions layout;
  std::string n = "100000";
  std::uint64_t seed = 1;
  bool inject_fault = false;
};

int cmd_verify(const VerifyOptions &o) {
  const HeapParams params = resolve_params(o.layout);
  const index_t n = parse_count(o.n);
  if (n < 0) throw UsageError("--n must be non-negative");

  const VerifyOutcome r = verify_layout(params, n, o.seed, o.inject_fault);
  std::cout << "layout " << to_string(params) << ", n = " << n << "\n";
  std::cout << "  layout partition: " << (r.layout_errors.empty() ? "ok" : "FAILED") << "\n";
  for (const auto &e : r.layout_errors) std::cout << "    " << e << "\n";
  std::cout << "  heap invariant:   "
            << (r.heap_violations.empty() ? "ok" : "FAILED") << "\n";
  const std::size_t shown = std::min<std::size_t>(r.heap_violations.size(), 10);
  for (std::size_t i = 0; i < shown; ++i)
    std::cout << "    violation: parent " << r.heap_violations[i].parent << " < child "
              << r.heap_violations[i].child << "\n";
  if (r.heap_violations.size() > shown)
    std::cout << "    ... " << r.heap_violations.size() - shown << " more\n";
  if (!o.inject_fault)
    std::cout << "  sort oracle:      " << (r.sort_matches ? "ok" : "FAILED") << "\n";
  std::cout << (r.passed() ? "PASS" : "FAIL") << "\n";
  return r.passed() ? kExitOk : kExitFailure;
}

void add_layout_flags(CLI::App *cmd, LayoutOptions &o) {
  cmd->add_option("--depth", o.depth, "block depth (>= 1)");
  cmd->add_option("--intra", o.intra, "children per node inside a block (>= 2)");
  cmd->add_option("--inter", o.inter, "child blocks per block leaf (>= 1)");
}

} // namespace

int main(int argc, char **argv) {
  CLI::App app{"Blocked-layout priority queue: tuning, benchmarking, sorting, self-checks"};
  app.require_subcommand(1);

  TuneOptions tune;
  auto *tune_cmd = app.add_subcommand("tune", "search layouts for the fastest heapsort");
  tune_cmd->add_option("--depth", tune.depth, "block depth range lo..hi")->capture_default_str();
  tune_cmd->add_option("--intra", tune.intra, "intra child count range lo..hi")->capture_default_str();
  tune_cmd->add_option("--inter", tune.inter, "inter child count range lo..hi")->capture_default_str();
  tune_cmd->add_option("--n", tune.n, "problem size the layout is tuned for")->capture_default_str();
  tune_cmd->add_option("--trial-n", tune.trial_n, "keys sorted per trial (default: --n)");
  tune_cmd->add_option("--reps", tune.reps, "timed repetitions per layout")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  tune_cmd->add_option("--seed", tune.seed, "workload seed")->capture_default_str();
  tune_cmd->add_option("--fake-clock", tune.fake_clock,
                       "replay recorded times from a JSON list of {d,a,b,seconds}");
  tune_cmd->add_option("--json", tune.json_path, "report output path")->capture_default_str();
  tune_cmd->add_flag("--no-warmup", tune.no_warmup, "skip the untimed warm-up trial");

  BenchOptions bench;
  auto *bench_cmd = app.add_subcommand("bench", "time heapsort across sizes and methods");
  bench_cmd->add_option("--sizes", bench.sizes, "comma list, or lo..hi in decades")
      ->capture_default_str();
  bench_cmd->add_option("--reps", bench.reps, "repetitions per size")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "base seed")->capture_default_str();
  bench_cmd->add_option("--methods", bench.methods, "parheap:d,a,b | baseline | std, comma separated")
      ->capture_default_str();
  bench_cmd->add_option("--counters", bench.counters, "on|off: count L2/L3 misses")
      ->capture_default_str();
  bench_cmd->add_option("--out", bench.out, "CSV output path")->capture_default_str();
  bench_cmd->add_option("--meta", bench.meta, "metadata JSON path (default: <out>.meta.json)");
  bench_cmd->add_option("--plots", bench.plots, "directory for SVG plots");

  SortOptions sort;
  auto *sort_cmd = app.add_subcommand("sort", "sort a file of 32-bit integers");
  add_layout_flags(sort_cmd, sort.layout);
  sort_cmd->add_option("--input,-i", sort.input, "input file")->required();
  sort_cmd->add_option("--output,-o", sort.output, "output file")->required();
  sort_cmd->add_option("--format", sort.format, "text|binary (little-endian int32)")
      ->capture_default_str();

  VerifyOptions verify;
  auto *verify_cmd = app.add_subcommand("verify", "check layout maps, heap order and sorting");
  add_layout_flags(verify_cmd, verify.layout);
  verify_cmd->add_option("--n", verify.n, "number of keys")->capture_default_str();
  verify_cmd->add_option("--seed", verify.seed, "workload seed")->capture_default_str();
  verify_cmd->add_flag("--inject-fault", verify.inject_fault,
                       "corrupt the built heap to exercise violation reporting");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp &e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp &e) {
    return app.exit(e);
  } catch (const CLI::ParseError &e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*tune_cmd) return cmd_tune(tune);
    if (*bench_cmd) return cmd_bench(bench);
    if (*sort_cmd) return cmd_sort(sort);
    if (*verify_cmd) return cmd_verify(verify);
  } catch (const UsageError &e) {
    std::cerr << "usage error: " << e.what() << "\n\n" << app.get_subcommands().front()->help();
    return kExitUsage;
  } catch (const std::exception &e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}
