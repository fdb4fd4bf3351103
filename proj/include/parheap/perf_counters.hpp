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

  L2/L3 cache-miss counting around a code region via Linux perf_event_open.

  Generic perf events are used so no per-microarchitecture tables are needed:

    l3 misses  PERF_COUNT_HW_CACHE_MISSES      (last-level cache misses)
    l2 misses  PERF_COUNT_HW_CACHE_REFERENCES  (last-level cache references,
                                                i.e. requests that missed L2)

  On Intel cores these map to LONGEST_LAT_CACHE.MISS / .REFERENCE. When the
  kernel, hypervisor or perf_event_paranoid refuses an event, that count is
  reported as absent rather than zero.
 */

#pragma once

#include <algorithm>
#include <cerrno>
#include <cstdint>
#include <cstring>
#include <memory>
#include <numeric>
#include <optional>
#include <random>
#include <string>
#include <utility>
#include <vector>

#if defined(__linux__)
#include <linux/perf_event.h>
#include <sys/ioctl.h>
#include <sys/syscall.h>
#include <unistd.h>
#endif

namespace parheap {

struct CacheMissCounts {
  std::optional<std::uint64_t> l2_misses;
  std::optional<std::uint64_t> l3_misses;

  [[nodiscard]] bool any() const { return l2_misses.has_value() || l3_misses.has_value(); }
};

/// Something that can count cache misses over a start/stop region.
class CounterSource {
public:
  virtual ~CounterSource() = default;
  [[nodiscard]] virtual bool available() const = 0;
  virtual void start() = 0;
  virtual CacheMissCounts stop() = 0;
};

class NullCounters final : public CounterSource {
public:
  [[nodiscard]] bool available() const override { return false; }
  void start() override {}
  CacheMissCounts stop() override { return {}; }
};

#if defined(__linux__)

namespace detail {

class PerfEventFd {
public:
  PerfEventFd() = default;
  PerfEventFd(std::uint32_t type, std::uint64_t config) {
    perf_event_attr pe;
    std::memset(&pe, 0, sizeof pe);
    pe.size = sizeof pe;
    pe.type = type;
    pe.config = config;
    pe.disabled = 1;
    pe.exclude_kernel = 1;
    pe.exclude_hv = 1;
    fd_ = static_cast<int>(syscall(__NR_perf_event_open, &pe, 0, -1, -1, 0));
    if (fd_ < 0) error_ = errno;
  }
  PerfEventFd(const PerfEventFd &) = delete;
  PerfEventFd &operator=(const PerfEventFd &) = delete;
  PerfEventFd(PerfEventFd &&o) noexcept : fd_(std::exchange(o.fd_, -1)), error_(o.error_) {}
  PerfEventFd &operator=(PerfEventFd &&o) noexcept {
    if (this != &o) {
      reset_fd();
      fd_ = std::exchange(o.fd_, -1);
      error_ = o.error_;
    }
    return *this;
  }
  ~PerfEventFd() { reset_fd(); }

  [[nodiscard]] bool valid() const { return fd_ >= 0; }
  [[nodiscard]] int error() const { return error_; }

  void start() {
    ioctl(fd_, PERF_EVENT_IOC_RESET, 0);
    ioctl(fd_, PERF_EVENT_IOC_ENABLE, 0);
  }
  void disable() { ioctl(fd_, PERF_EVENT_IOC_DISABLE, 0); }
  [[nodiscard]] std::optional<std::uint64_t> read_count() const {
    std::uint64_t count = 0;
    if (::read(fd_, &count, sizeof count) != static_cast<ssize_t>(sizeof count))
      return std::nullopt;
    return count;
  }

private:
  void reset_fd() {
    if (fd_ >= 0) close(fd_);
    fd_ = -1;
  }

  int fd_ = -1;
  int error_ = 0;
};

} // namespace detail

class PerfCounterProbe final : public CounterSource {
public:
  PerfCounterProbe()
      : l2_(PERF_TYPE_HARDWARE, PERF_COUNT_HW_CACHE_REFERENCES),
        l3_(PERF_TYPE_HARDWARE, PERF_COUNT_HW_CACHE_MISSES) {
    if (!l2_.valid() || !l3_.valid()) {
      const int err = !l3_.valid() ? l3_.error() : l2_.error();
      diagnostic_ = std::string("perf_event_open failed: ") + std::strerror(err);
      if (err == EACCES || err == EPERM)
        diagnostic_ += " (check /proc/sys/kernel/perf_event_paranoid)";
      else if (err == ENOENT || err == EOPNOTSUPP)
        diagnostic_ += " (hardware cache events not exposed on this host)";
    }
  }

  [[nodiscard]] bool available() const override { return l2_.valid() || l3_.valid(); }
  [[nodiscard]] const std::string &diagnostic() const { return diagnostic_; }

  void start() override {
    if (l2_.valid()) l2_.start();
    if (l3_.valid()) l3_.start();
  }

  CacheMissCounts stop() override {
    if (l2_.valid()) l2_.disable();
    if (l3_.valid()) l3_.disable();
    CacheMissCounts c;
    if (l2_.valid()) c.l2_misses = l2_.read_count();
    if (l3_.valid()) c.l3_misses = l3_.read_count();
    return c;
  }

private:
  detail::PerfEventFd l2_;
  detail::PerfEventFd l3_;
  std::string diagnostic_;
};

#else

class PerfCounterProbe final : public CounterSource {
public:
  [[nodiscard]] bool available() const override { return false; }
  [[nodiscard]] const std::string &diagnostic() const { return diagnostic_; }
  void start() override {}
  CacheMissCounts stop() override { return {}; }

private:
  std::string diagnostic_ = "performance counters are only supported on Linux";
};

#endif

/// Last-level cache size in bytes, or `fallback` when the OS does not say.
inline std::size_t last_level_cache_bytes(std::size_t fallback = 32u << 20) {
#if defined(_SC_LEVEL3_CACHE_SIZE)
  const long v = sysconf(_SC_LEVEL3_CACHE_SIZE);
  if (v > 0) return static_cast<std::size_t>(v);
#endif
  return fallback;
}

struct CalibrationResult {
  std::uint64_t sequential_l3 = 0;
  std::uint64_t scattered_l3 = 0;
  [[nodiscard]] bool passed() const { return scattered_l3 > sequential_l3; }
};

/// Touches one word per cache line over a buffer four times the last-level
/// cache, first in address order, then in a random order. A working L3
/// counter must report more misses for the scattered pass. Returns nullopt
/// when L3 misses cannot be counted.
inline std::optional<CalibrationResult> calibrate_probe(CounterSource &probe,
                                                        std::uint64_t seed = 7) {
  if (!probe.available()) return std::nullopt;
  constexpr std::size_t kLine = 64;
  const std::size_t lines = 4 * last_level_cache_bytes() / kLine;
  std::vector<std::uint64_t> buf(lines * (kLine / sizeof(std::uint64_t)), 1);
  std::vector<std::uint32_t> order(lines);
  std::iota(order.begin(), order.end(), 0u);
  std::shuffle(order.begin(), order.end(), std::mt19937_64(seed));

  volatile std::uint64_t sink = 0;
  const auto pass = [&](bool scattered) {
    std::uint64_t acc = 0;
    probe.start();
    for (std::size_t i = 0; i < lines; ++i) {
      const std::size_t line = scattered ? order[i] : i;
      acc += buf[line * (kLine / sizeof(std::uint64_t))];
    }
    CacheMissCounts c = probe.stop();
    sink = sink + acc;
    return c.l3_misses;
  };
  const auto seq = pass(false);
  const auto scat = pass(true);
  if (!seq || !scat) return std::nullopt;
  return CalibrationResult{*seq, *scat};
}

} // namespace parheap
