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

#include <cstdint>
#include <random>

#include "haarlab/types.hpp"

namespace haarlab {

// Deterministic random stream. The engine (mt19937_64) and every mapping to
// uniform/gaussian variates are fully specified here, so identical seeds
// produce bit-identical sequences on any platform. std::uniform_real_distribution
// and friends are deliberately avoided: their output is implementation-defined.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed);

  // Child stream keyed by (master_seed, stream_index). Streams derived with
  // distinct indices are statistically independent for practical purposes.
  // Used to give each Monte Carlo sample / key index its own stream, which
  // makes results independent of block sizes and thread counts.
  static RngStream derive(std::uint64_t master_seed, std::uint64_t stream_index);

  // Next raw 64-bit engine output.
  std::uint64_t raw();

  // Uniform double in [0, 1) with 53 random bits.
  Real uniform();

  // Standard normal via Box-Muller (pairs cached).
  Real gaussian();

  // Standard complex normal, E|z|^2 = 1.
  Cplx gaussian_cplx();

  // Unbiased uniform integer in [0, n); n >= 1.
  std::uint64_t uniform_u64(std::uint64_t n);

 private:
  std::mt19937_64 eng_;
  bool have_cached_ = false;
  Real cached_ = 0.0;
};

}  // namespace haarlab
