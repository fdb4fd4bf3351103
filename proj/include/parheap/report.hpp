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

// Loading benchmark CSVs back, averaging them into per-method series, and
// drawing those series as standalone SVG line charts.

#pragma once

#include <parheap/bench.hpp>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace parheap {

class SchemaError : public std::runtime_error {
public:
  SchemaError(std::size_t line, const std::string &what)
      : std::runtime_error("line " + std::to_string(line) + ": " + what), line(line) {}
  std::size_t line;
};

enum class Metric { elapsed_us, l2_misses, l3_misses };

inline std::string_view metric_name(Metric m) {
  switch (m) {
  case Metric::elapsed_us:
    return "elapsed_us";
  case Metric::l2_misses:
    return "l2_misses";
  case Metric::l3_misses:
    return "l3_misses";
  }
  return "";
}

inline Metric parse_metric(std::string_view s) {
  for (Metric m : {Metric::elapsed_us, Metric::l2_misses, Metric::l3_misses})
    if (metric_name(m) == s) return m;
  throw std::invalid_argument("unknown metric '" + std::string(s) + "'");
}

struct SeriesPoint {
  index_t n = 0;
  double value = 0.0;
  friend bool operator==(const SeriesPoint &, const SeriesPoint &) = default;
};

struct Series {
  std::string method;
  Metric metric = Metric::elapsed_us;
  std::vector<SeriesPoint> points;  ///< ascending n
};

namespace detail {

inline std::vector<std::string_view> split_csv_line(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto comma = line.find(',', start);
    out.push_back(line.substr(start, comma == std::string_view::npos ? comma : comma - start));
    if (comma == std::string_view::npos) break;
    start = comma + 1;
  }
  return out;
}

template <class T>
T parse_field(std::string_view s, std::size_t line, const char *name) {
  T v{};
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc{} || p != s.data() + s.size())
    throw SchemaError(line, std::string("bad ") + name + " field '" + std::string(s) + "'");
  return v;
}

} // namespace detail

/// Parses a benchmark CSV. The header must match the bench schema exactly.
inline std::vector<BenchRecord> load_records(std::istream &in) {
  std::vector<BenchRecord> out;
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line)) throw SchemaError(1, "missing header");
  ++line_no;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) throw SchemaError(1, "unexpected header '" + line + "'");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = detail::split_csv_line(line);
    if (f.size() != 7)
      throw SchemaError(line_no, "expected 7 fields, got " + std::to_string(f.size()));
    if (f[0].empty()) throw SchemaError(line_no, "empty method field");
    BenchRecord r;
    r.method = std::string(f[0]);
    r.n = detail::parse_field<index_t>(f[1], line_no, "n");
    r.rep = detail::parse_field<int>(f[2], line_no, "rep");
    r.seed = detail::parse_field<std::uint64_t>(f[3], line_no, "seed");
    r.elapsed_us = detail::parse_field<double>(f[4], line_no, "elapsed_us");
    if (!f[5].empty()) r.l2_misses = detail::parse_field<std::uint64_t>(f[5], line_no, "l2_misses");
    if (!f[6].empty()) r.l3_misses = detail::parse_field<std::uint64_t>(f[6], line_no, "l3_misses");
    out.push_back(std::move(r));
  }
  return out;
}

inline std::vector<BenchRecord> load_records(const std::string &path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  return load_records(in);
}

/// One series per method (first-appearance order), one point per n holding
/// the mean of the metric over that (method, n). Records missing the metric
/// contribute nothing, so a method with no counter data yields no points.
inline std::vector<Series> aggregate(const std::vector<BenchRecord> &records, Metric metric) {
  std::vector<std::string> order;
  std::map<std::string, std::map<index_t, std::pair<double, std::size_t>>> acc;
  for (const auto &r : records) {
    if (!acc.count(r.method)) {
      order.push_back(r.method);
      acc[r.method];
    }
    std::optional<double> v;
    switch (metric) {
    case Metric::elapsed_us:
      v = r.elapsed_us;
      break;
    case Metric::l2_misses:
      if (r.l2_misses) v = static_cast<double>(*r.l2_misses);
      break;
    case Metric::l3_misses:
      if (r.l3_misses) v = static_cast<double>(*r.l3_misses);
      break;
    }
    if (!v) continue;
    auto &cell = acc[r.method][r.n];
    cell.first += *v;
    ++cell.second;
  }
  std::vector<Series> out;
  for (const auto &m : order) {
    Series s{m, metric, {}};
    for (const auto &[n, cell] : acc[m])
      s.points.push_back({n, cell.first / static_cast<double>(cell.second)});
    out.push_back(std::move(s));
  }
  return out;
}

namespace detail {

inline std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
    case '&': out += "&amp;"; break;
    case '<': out += "&lt;"; break;
    case '>': out += "&gt;"; break;
    case '"': out += "&quot;"; break;
    case '\'': out += "&apos;"; break;
    default: out += c;
    }
  }
  return out;
}

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string axis_label(Metric m) {
  switch (m) {
  case Metric::elapsed_us:
    return "mean CPU time (us)";
  case Metric::l2_misses:
    return "mean L2 cache misses";
  case Metric::l3_misses:
    return "mean L3 cache misses";
  }
  return "";
}

inline std::string compact_number(double v) {
  char buf[32];
  if (v != 0.0 && (std::fabs(v) >= 1e5 || std::fabs(v) < 1e-2))
    std::snprintf(buf, sizeof buf, "%.2g", v);
  else
    std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

} // namespace detail

/// Standalone SVG line chart: log10 n on x, linear metric on y (from zero),
/// one polyline plus point markers per series and a legend. Output depends
/// only on the inputs.
inline std::string render_svg(const std::vector<Series> &series, Metric metric) {
  index_t n_min = 0, n_max = 0;
  double y_max = 0.0;
  bool any = false;
  for (const auto &s : series) {
    for (const auto &p : s.points) {
      if (p.n <= 0) throw std::invalid_argument("plot points need n > 0 for a log axis");
      if (!any) n_min = n_max = p.n;
      n_min = std::min(n_min, p.n);
      n_max = std::max(n_max, p.n);
      y_max = std::max(y_max, p.value);
      any = true;
    }
  }
  if (!any) throw std::invalid_argument("nothing to plot: every series is empty");

  constexpr double W = 800, H = 500, L = 90, R = 200, T = 50, B = 70;
  const double pw = W - L - R, ph = H - T - B;
  double lx0 = std::floor(std::log10(static_cast<double>(n_min)));
  double lx1 = std::ceil(std::log10(static_cast<double>(n_max)));
  if (lx1 <= lx0) lx1 = lx0 + 1;
  if (y_max <= 0) y_max = 1;
  const auto px = [&](index_t n) {
    return L + (std::log10(static_cast<double>(n)) - lx0) / (lx1 - lx0) * pw;
  };
  const auto py = [&](double v) { return T + ph - v / (y_max * 1.05) * ph; };

  static constexpr const char *kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                            "#9467bd", "#8c564b", "#e377c2", "#17becf"};

  std::ostringstream os;
  os << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
     << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << W << "\" height=\"" << H
     << "\" viewBox=\"0 0 " << W << ' ' << H << "\">\n"
     << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n"
     << "<text x=\"" << L + pw / 2 << "\" y=\"28\" text-anchor=\"middle\" font-family=\"sans-serif\""
     << " font-size=\"16\">heapsort " << detail::xml_escape(metric_name(metric))
     << " vs number of elements</text>\n";

  // axes
  os << "<g stroke=\"black\" stroke-width=\"1\">\n"
     << "<line x1=\"" << L << "\" y1=\"" << T + ph << "\" x2=\"" << L + pw << "\" y2=\"" << T + ph
     << "\"/>\n"
     << "<line x1=\"" << L << "\" y1=\"" << T << "\" x2=\"" << L << "\" y2=\"" << T + ph
     << "\"/>\n</g>\n";
  os << "<g font-family=\"sans-serif\" font-size=\"11\">\n";
  for (int e = static_cast<int>(lx0); e <= static_cast<int>(lx1); ++e) {
    const double x = L + (e - lx0) / (lx1 - lx0) * pw;
    os << "<line x1=\"" << detail::fmt2(x) << "\" y1=\"" << T + ph << "\" x2=\"" << detail::fmt2(x)
       << "\" y2=\"" << T + ph + 5 << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << detail::fmt2(x) << "\" y=\"" << T + ph + 20
       << "\" text-anchor=\"middle\">1e" << e << "</text>\n";
  }
  for (int k = 0; k <= 5; ++k) {
    const double v = y_max * 1.05 * k / 5.0;
    const double y = py(v);
    os << "<line x1=\"" << L - 5 << "\" y1=\"" << detail::fmt2(y) << "\" x2=\"" << L
       << "\" y2=\"" << detail::fmt2(y) << "\" stroke=\"black\"/>\n"
       << "<text x=\"" << L - 8 << "\" y=\"" << detail::fmt2(y + 4)
       << "\" text-anchor=\"end\">" << detail::compact_number(v) << "</text>\n";
  }
  os << "<text x=\"" << L + pw / 2 << "\" y=\"" << H - 20
     << "\" text-anchor=\"middle\" font-size=\"13\">number of elements (log scale)</text>\n"
     << "<text x=\"20\" y=\"" << T + ph / 2 << "\" text-anchor=\"middle\" font-size=\"13\""
     << " transform=\"rotate(-90 20 " << T + ph / 2 << ")\">" << detail::axis_label(metric)
     << "</text>\n</g>\n";

  std::size_t idx = 0;
  for (const auto &s : series) {
    const char *color = kColors[idx % std::size(kColors)];
    const double ly = T + 20.0 * static_cast<double>(idx);
    os << "<g class=\"series\" data-method=\"" << detail::xml_escape(s.method) << "\">\n";
    if (s.points.size() >= 2) {
      os << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i)
        os << (i ? " " : "") << detail::fmt2(px(s.points[i].n)) << ','
           << detail::fmt2(py(s.points[i].value));
      os << "\"/>\n";
    }
    for (const auto &p : s.points)
      os << "<circle cx=\"" << detail::fmt2(px(p.n)) << "\" cy=\"" << detail::fmt2(py(p.value))
         << "\" r=\"3\" fill=\"" << color << "\"/>\n";
    os << "<line x1=\"" << L + pw + 15 << "\" y1=\"" << ly << "\" x2=\"" << L + pw + 40
       << "\" y2=\"" << ly << "\" stroke=\"" << color << "\" stroke-width=\"2\"/>\n"
       << "<text x=\"" << L + pw + 45 << "\" y=\"" << ly + 4
       << "\" font-family=\"sans-serif\" font-size=\"12\">" << detail::xml_escape(s.method)
       << "</text>\n</g>\n";
    ++idx;
  }
  os << "</svg>\n";
  return os.str();
}

/// Writes render_svg() output to `path`. Empty input is rejected.
inline void emit_plot(const std::vector<Series> &series, Metric metric, const std::string &path) {
  const std::string svg = render_svg(series, metric);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << svg;
}

/// Fixed-width text table of per-(method, n) summaries for terminals.
inline std::string render_summary(const std::vector<BenchSummary> &rows) {
  std::ostringstream os;
  char buf[256];
  std::snprintf(buf, sizeof buf, "%-20s %12s %5s %14s %14s %12s %14s %14s\n", "method", "n",
                "reps", "mean_us", "min_us", "stddev_us", "mean_l2", "mean_l3");
  os << buf;
  const auto opt = [](const std::optional<double> &v) {
    return v ? detail::compact_number(*v) : std::string("-");
  };
  for (const auto &r : rows) {
    std::snprintf(buf, sizeof buf, "%-20s %12lld %5d %14.2f %14.2f %12.2f %14s %14s\n",
                  r.method.c_str(), static_cast<long long>(r.n), r.reps, r.mean_us, r.min_us,
                  r.stddev_us, opt(r.mean_l2_misses).c_str(), opt(r.mean_l3_misses).c_str());
    os << buf;
  }
  return os.str();
}

} // namespace parheap
