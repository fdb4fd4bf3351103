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

// Injectable time sources for the tuner and the benchmark harness.

#pragma once

#include <chrono>
#include <cstddef>
#include <ctime>
#include <stdexcept>
#include <utility>
#include <vector>

namespace parheap {

using nanos = std::chrono::nanoseconds;

class Clock {
public:
  virtual ~Clock() = default;
  virtual nanos now() = 0;
};

/// CPU time consumed by this process. Monotonic while the process runs a
/// single thread, which is the measurement contract.
class ProcessCpuClock final : public Clock {
public:
  nanos now() override {
    timespec ts{};
    clock_gettime(CLOCK_PROCESS_CPUTIME_ID, &ts);
    return std::chrono::seconds(ts.tv_sec) + nanos(ts.tv_nsec);
  }
};

class SteadyClock final : public Clock {
public:
  nanos now() override {
    return std::chrono::duration_cast<nanos>(
        std::chrono::steady_clock::now().time_since_epoch());
  }
};

/// Advances by a constant step on every call.
class FixedStepClock final : public Clock {
public:
  explicit FixedStepClock(nanos step) : step_(step) {}
  nanos now() override {
    nanos t = t_;
    t_ += step_;
    return t;
  }

private:
  nanos step_;
  nanos t_{0};
};

/// Replays a list of interval lengths. Calls are consumed in (start, stop)
/// pairs: the k-th stop reads exactly durations[k] after the k-th start.
class ScriptedClock final : public Clock {
public:
  explicit ScriptedClock(std::vector<nanos> durations) : durations_(std::move(durations)) {}

  nanos now() override {
    if (calls_ % 2 == 0) {
      ++calls_;
      return t_;
    }
    const std::size_t k = calls_ / 2;
    if (k >= durations_.size()) throw std::out_of_range("scripted clock exhausted");
    ++calls_;
    t_ += durations_[k];
    return t_;
  }

  [[nodiscard]] std::size_t intervals_consumed() const { return calls_ / 2; }

private:
  std::vector<nanos> durations_;
  std::size_t calls_ = 0;
  nanos t_{0};
};

} // namespace parheap
