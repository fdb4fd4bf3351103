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

  Exhaustive layout search.

  Every (depth, intra, inter) triple in the search box is timed on a seeded
  heapsort workload and the fastest one is reported. For a given (intra,
  inter) pair, once a depth is reached whose single super-node holds the
  whole workload, every deeper layout is the same plain intra-ary heap; only
  the first such depth is timed and the rest are listed as pruned.

  Trials run strictly one after another on the calling thread.
 */

#pragma once

#include <parheap/clock.hpp>
#include <parheap/layout.hpp>
#include <parheap/par_heap.hpp>
#include <parheap/workload.hpp>

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace parheap {

/// A timed run produced a wrong result. Always an implementation bug.
class VerificationFailure : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

/// A trial failed during search; carries the offending layout.
class TrialError : public std::runtime_error {
public:
  TrialError(const HeapParams &p, const std::string &what)
      : std::runtime_error("trial " + to_string(p) + " failed: " + what), params(p) {}
  HeapParams params;
};

struct IntRange {
  index_t lo = 0;
  index_t hi = 0;

  [[nodiscard]] bool empty() const { return lo > hi; }
  friend bool operator==(const IntRange &, const IntRange &) = default;
};

struct SearchSpace {
  IntRange depth{1, 10};
  IntRange intra{2, 10};
  IntRange inter{1, 2};
  index_t n = 80'000'000;          ///< problem size the layout is tuned for
  std::optional<index_t> trial_n;  ///< elements actually sorted per trial; defaults to n
  std::uint64_t seed = 1;
  int reps_per_candidate = 1;
  bool warmup = true;

  [[nodiscard]] index_t workload_size() const { return trial_n.value_or(n); }
};

struct Candidates {
  std::vector<HeapParams> timed;
  std::vector<HeapParams> pruned;
};

struct CandidateTiming {
  double seconds = 0.0;         ///< mean over samples
  std::vector<double> samples;  ///< one per repetition
};

struct TuneReport {
  index_t n = 0;
  std::map<HeapParams, CandidateTiming> entries;
  std::vector<HeapParams> pruned;
  HeapParams best{};

  [[nodiscard]] double best_seconds() const { return entries.at(best).seconds; }
};

inline void validate_space(const SearchSpace &space) {
  if (space.depth.empty() || space.intra.empty() || space.inter.empty())
    throw InvalidParams("search space has an empty parameter range");
  if (space.depth.lo < 1) throw InvalidParams("depth range must start at >= 1");
  if (space.intra.lo < 2) throw InvalidParams("intra range must start at >= 2");
  if (space.inter.lo < 1) throw InvalidParams("inter range must start at >= 1");
  if (space.n < 0 || space.workload_size() < 0)
    throw InvalidParams("workload size must be non-negative");
  if (space.reps_per_candidate < 1) throw InvalidParams("reps per candidate must be >= 1");
}

/// Cartesian product of the ranges minus structurally duplicate layouts.
/// Layouts whose geometry overflows are skipped.
inline Candidates enumerate_candidates(const SearchSpace &space) {
  validate_space(space);
  Candidates out;
  for (index_t b = space.inter.lo; b <= space.inter.hi; ++b) {
    for (index_t a = space.intra.lo; a <= space.intra.hi; ++a) {
      bool covered = false;
      for (index_t d = space.depth.lo; d <= space.depth.hi; ++d) {
        const HeapParams p{d, a, b};
        if (covered) {
          out.pruned.push_back(p);
          continue;
        }
        try {
          covered = covers_whole_heap(derive_geometry(p), space.n);
        } catch (const InvalidParams &) {
          continue;
        }
        out.timed.push_back(p);
      }
    }
  }
  if (out.timed.empty()) throw InvalidParams("search space contains no valid layout");
  return out;
}

/// Times make_heap + sort_heap on a fresh seeded workload. Workload
/// generation is outside the timed region. Throws VerificationFailure if the
/// output is not ascending.
inline double run_trial(const HeapParams &params, index_t n, std::uint64_t seed, Clock &clock) {
  const LayoutGeometry geom = derive_geometry(params);
  std::vector<key32_t> keys = generate_workload(n, seed);
  const std::span<key32_t> view(keys);

  const nanos start = clock.now();
  heap_sort(view, geom);
  const nanos stop = clock.now();

  if (!std::is_sorted(keys.begin(), keys.end()))
    throw VerificationFailure("heapsort output not ascending for layout " + to_string(params));
  return std::chrono::duration<double>(stop - start).count();
}

/// Runs every candidate in sequence and picks the smallest mean time. Ties
/// go to the lexicographically smallest (depth, intra, inter).
inline TuneReport search(const SearchSpace &space, Clock &clock) {
  const Candidates cands = enumerate_candidates(space);
  const index_t trial_n = space.workload_size();

  if (space.warmup) {
    std::vector<key32_t> keys = generate_workload(trial_n, splitmix64(space.seed));
    heap_sort(std::span<key32_t>(keys), derive_geometry(cands.timed.front()));
  }

  TuneReport report;
  report.n = space.n;
  report.pruned = cands.pruned;
  for (const HeapParams &p : cands.timed) {
    CandidateTiming timing;
    for (int rep = 0; rep < space.reps_per_candidate; ++rep) {
      try {
        timing.samples.push_back(
            run_trial(p, trial_n, derive_seed(space.seed, trial_n, rep), clock));
      } catch (const TrialError &) {
        throw;
      } catch (const std::exception &e) {
        throw TrialError(p, e.what());
      }
    }
    double sum = 0.0;
    for (double s : timing.samples) sum += s;
    timing.seconds = sum / static_cast<double>(timing.samples.size());
    report.entries.emplace(p, std::move(timing));
  }

  double best = std::numeric_limits<double>::infinity();
  for (const auto &[p, t] : report.entries) {
    if (t.seconds < best) {
      best = t.seconds;
      report.best = p;
    }
  }
  return report;
}

// JSON: {"n", "best": {d,a,b}, "entries": [{d,a,b,seconds,samples}], "pruned": [{d,a,b}]}

inline nlohmann::json params_to_json(const HeapParams &p) {
  return {{"d", p.depth}, {"a", p.intra}, {"b", p.inter}};
}

inline HeapParams params_from_json(const nlohmann::json &j) {
  return {j.at("d").get<index_t>(), j.at("a").get<index_t>(), j.at("b").get<index_t>()};
}

inline nlohmann::json to_json(const TuneReport &r) {
  nlohmann::json entries = nlohmann::json::array();
  for (const auto &[p, t] : r.entries) {
    auto e = params_to_json(p);
    e["seconds"] = t.seconds;
    e["samples"] = t.samples;
    entries.push_back(std::move(e));
  }
  nlohmann::json pruned = nlohmann::json::array();
  for (const auto &p : r.pruned) pruned.push_back(params_to_json(p));
  return {{"n", r.n}, {"best", params_to_json(r.best)}, {"entries", entries}, {"pruned", pruned}};
}

inline TuneReport tune_report_from_json(const nlohmann::json &j) {
  TuneReport r;
  r.n = j.value("n", index_t{0});
  for (const auto &e : j.at("entries")) {
    CandidateTiming t;
    t.seconds = e.at("seconds").get<double>();
    if (e.contains("samples")) t.samples = e.at("samples").get<std::vector<double>>();
    else t.samples = {t.seconds};
    r.entries[params_from_json(e)] = std::move(t);
  }
  if (j.contains("pruned"))
    for (const auto &p : j.at("pruned")) r.pruned.push_back(params_from_json(p));
  if (j.contains("best")) r.best = params_from_json(j.at("best"));
  return r;
}

/// Reads a list of {d, a, b, seconds} timings (a bare array or an object with
/// an "entries" array) and orders them as `candidates`, for replay through a
/// ScriptedClock. Throws if a candidate has no recorded time.
inline std::vector<nanos> replay_script(const nlohmann::json &j,
                                        const std::vector<HeapParams> &candidates,
                                        int reps_per_candidate = 1) {
  const nlohmann::json &list = j.is_array() ? j : j.at("entries");
  std::map<HeapParams, double> recorded;
  for (const auto &e : list) recorded[params_from_json(e)] = e.at("seconds").get<double>();
  std::vector<nanos> script;
  for (const auto &p : candidates) {
    auto it = recorded.find(p);
    if (it == recorded.end())
      throw std::invalid_argument("no recorded time for layout " + to_string(p));
    const auto ns = nanos(std::llround(it->second * 1e9));
    for (int r = 0; r < reps_per_candidate; ++r) script.push_back(ns);
  }
  return script;
}

namespace detail {

template <class T>
std::vector<T> sorted_unique(std::vector<T> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

inline std::string format_cell(double seconds) {
  // 1e7 microseconds = 10 seconds
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", seconds / 10.0);
  return buf;
}

} // namespace detail

/// Text grid: one band per inter child count, rows are intra child counts,
/// columns are block depths. Cells are mean times in units of 1e7 us, the
/// best cell carries a trailing '*', and untimed cells print "-".
inline std::string render_table(const TuneReport &report) {
  if (report.entries.empty()) throw std::invalid_argument("cannot render an empty tune report");
  std::vector<index_t> ds, as, bs;
  const auto collect = [&](const HeapParams &p) {
    ds.push_back(p.depth);
    as.push_back(p.intra);
    bs.push_back(p.inter);
  };
  for (const auto &[p, t] : report.entries) collect(p);
  for (const auto &p : report.pruned) collect(p);
  ds = detail::sorted_unique(ds);
  as = detail::sorted_unique(as);
  bs = detail::sorted_unique(bs);

  std::ostringstream os;
  os << "heapsort time per layout, n = " << report.n << " (scale = 1e7 us)\n";
  char buf[64];
  for (index_t b : bs) {
    os << "\ninter_child_count = " << b << "\n";
    std::snprintf(buf, sizeof buf, "%13s", "intra\\depth");
    os << buf;
    for (index_t d : ds) {
      std::snprintf(buf, sizeof buf, " %7lld", static_cast<long long>(d));
      os << buf;
    }
    os << "\n";
    for (index_t a : as) {
      std::snprintf(buf, sizeof buf, "%13lld", static_cast<long long>(a));
      os << buf;
      for (index_t d : ds) {
        const HeapParams p{d, a, b};
        std::string cell = "-";
        if (auto it = report.entries.find(p); it != report.entries.end()) {
          cell = detail::format_cell(it->second.seconds);
          if (p == report.best) cell += "*";
        }
        std::snprintf(buf, sizeof buf, " %7s", cell.c_str());
        os << buf;
      }
      os << "\n";
    }
  }
  os << "\nbest layout (depth, intra, inter) = " << to_string(report.best) << "\n";
  return os.str();
}

/// Inverse of render_table: recovers the timed cells as seconds (rounded to
/// the table's two decimals) plus the marked best layout.
struct ParsedTable {
  std::map<HeapParams, double> seconds;
  std::optional<HeapParams> best;
};

inline ParsedTable parse_table(const std::string &text) {
  ParsedTable out;
  std::istringstream in(text);
  std::string line;
  std::optional<index_t> band;
  std::vector<index_t> depths;
  while (std::getline(in, line)) {
    if (line.rfind("inter_child_count = ", 0) == 0) {
      band = std::stoll(line.substr(20));
      continue;
    }
    std::istringstream ls(line);
    std::string first;
    if (!(ls >> first)) continue;
    if (first == "intra\\depth") {
      depths.clear();
      for (std::string tok; ls >> tok;) depths.push_back(std::stoll(tok));
      continue;
    }
    if (!band || first.find_first_not_of("0123456789") != std::string::npos) continue;
    const index_t a = std::stoll(first);
    std::size_t col = 0;
    for (std::string tok; ls >> tok; ++col) {
      if (col >= depths.size()) throw std::invalid_argument("table row wider than header");
      if (tok == "-") continue;
      const HeapParams p{depths[col], a, *band};
      if (tok.back() == '*') {
        tok.pop_back();
        out.best = p;
      }
      out.seconds[p] = std::stod(tok) * 10.0;
    }
  }
  return out;
}

} // namespace parheap
