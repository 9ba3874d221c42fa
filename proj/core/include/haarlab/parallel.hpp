// Copyright 2026 The Haarlab Authors
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

#pragma once

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <thread>
#include <vector>

#include "haarlab/types.hpp"

namespace haarlab {

// Running scalar mean with standard error, mergeable across lanes.
struct Accumulator {
  Real sum = 0.0;
  Real sum_sq = 0.0;
  std::size_t count = 0;

  void add(Real x) {
    sum += x;
    sum_sq += x * x;
    ++count;
  }
  void merge(const Accumulator& o) {
    sum += o.sum;
    sum_sq += o.sum_sq;
    count += o.count;
  }
  Real mean() const { return count ? sum / static_cast<Real>(count) : 0.0; }
  Real variance() const {
    if (count < 2) return 0.0;
    const Real n = static_cast<Real>(count);
    const Real v = (sum_sq - sum * sum / n) / (n - 1.0);
    return v > 0 ? v : 0.0;
  }
  Real stderr_mean() const {
    return count ? std::sqrt(variance() / static_cast<Real>(count)) : 0.0;
  }
};

// Deterministic blocked reduction over [0, n).
//
// Work is split into fixed-size blocks dealt round-robin onto `lanes`
// independent states; lane states are merged in lane order at the end. Which
// thread evaluates which lane never affects any floating-point operation
// order, so the result is bit-identical for every thread count (including 1).
// Per-index work must depend only on the index (e.g. by deriving a fresh
// RngStream from the sample index).
template <class State, class Body, class Merge>
State run_blocked(std::size_t n, const State& init, Body&& body, Merge&& merge,
                  int threads = 1, std::size_t block = 4096, int lanes = 16) {
  if (lanes < 1) lanes = 1;
  if (block < 1) block = 1;
  std::vector<State> lane_state(static_cast<std::size_t>(lanes), init);

  auto run_lane = [&](int lane) {
    State& st = lane_state[static_cast<std::size_t>(lane)];
    const std::size_t num_blocks = (n + block - 1) / block;
    for (std::size_t b = static_cast<std::size_t>(lane); b < num_blocks;
         b += static_cast<std::size_t>(lanes)) {
      const std::size_t lo = b * block;
      const std::size_t hi = std::min(n, lo + block);
      for (std::size_t i = lo; i < hi; ++i) body(st, i);
    }
  };

  if (threads <= 1) {
    for (int lane = 0; lane < lanes; ++lane) run_lane(lane);
  } else {
    std::atomic<int> next{0};
    auto worker = [&] {
      for (int lane = next.fetch_add(1); lane < lanes; lane = next.fetch_add(1)) {
        run_lane(lane);
      }
    };
    const int nw = std::min(threads, lanes);
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(nw));
    for (int w = 0; w < nw; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }

  State out = init;
  for (int lane = 0; lane < lanes; ++lane) {
    merge(out, lane_state[static_cast<std::size_t>(lane)]);
  }
  return out;
}

// Mean/stderr of fn(i) over i in [0, n), deterministically reduced.
template <class Fn>
Accumulator blocked_mean(std::size_t n, Fn&& fn, int threads = 1,
                         std::size_t block = 4096, int lanes = 16) {
  return run_blocked(
      n, Accumulator{},
      [&](Accumulator& acc, std::size_t i) { acc.add(fn(i)); },
      [](Accumulator& a, const Accumulator& b) { a.merge(b); }, threads, block, lanes);
}

}  // namespace haarlab
