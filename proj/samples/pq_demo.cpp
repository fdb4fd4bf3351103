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

// Small tour of the library: a min-priority queue of events and an in-place
// heapsort of a plain buffer.

#include <parheap/par_heap.hpp>

#include <cstdio>
#include <functional>
#include <string>
#include <vector>

struct Event {
  double time;
  std::string name;
};

struct Later {
  bool operator()(const Event &a, const Event &b) const { return a.time > b.time; }
};

int main() {
  // std::greater-style comparator turns the max-heap into a min-heap
  parheap::ParHeap<Event, Later> queue(parheap::HeapParams{2, 4, 1});
  queue.push({3.5, "flush"});
  queue.push({0.25, "accept"});
  queue.push({1.0, "read"});
  queue.push({2.0, "write"});
  while (!queue.empty()) {
    const Event e = queue.pop();
    std::printf("t=%.2f %s\n", e.time, e.name.c_str());
  }

  std::vector<int> keys = {42, 7, 19, 3, 88, 61, 7, 0, -5};
  const auto geom = parheap::derive_geometry({2, 9, 1});
  parheap::heap_sort(std::span<int>(keys), geom);
  for (int k : keys) std::printf("%d ", k);
  std::printf("\n");
}
