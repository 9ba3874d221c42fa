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

#include "haarlab/rng.hpp"

#include <cmath>
#include <limits>

namespace haarlab {

RngStream::RngStream(std::uint64_t seed) : eng_(seed) {}

RngStream RngStream::derive(std::uint64_t master_seed, std::uint64_t stream_index) {
  // seed_seq's expansion is fully specified by the standard, so derived
  // streams are reproducible everywhere. Both inputs are split into 32-bit
  // halves to feed all their entropy through.
  std::seed_seq seq{
      static_cast<std::uint32_t>(master_seed),
      static_cast<std::uint32_t>(master_seed >> 32),
      static_cast<std::uint32_t>(stream_index),
      static_cast<std::uint32_t>(stream_index >> 32),
      0x9e3779b9u,
  };
  RngStream out(0);
  out.eng_.seed(seq);
  return out;
}

std::uint64_t RngStream::raw() { return eng_(); }

Real RngStream::uniform() {
  return static_cast<Real>(raw() >> 11) * 0x1.0p-53;
}

Real RngStream::gaussian() {
  if (have_cached_) {
    have_cached_ = false;
    return cached_;
  }
  // u1 in (0, 1] so the log is finite.
  const Real u1 = 1.0 - uniform();
  const Real u2 = uniform();
  const Real r = std::sqrt(-2.0 * std::log(u1));
  const Real theta = 2.0 * kPi * u2;
  cached_ = r * std::sin(theta);
  have_cached_ = true;
  return r * std::cos(theta);
}

Cplx RngStream::gaussian_cplx() {
  const Real re = gaussian();
  const Real im = gaussian();
  return Cplx(re, im) / std::sqrt(2.0);
}

std::uint64_t RngStream::uniform_u64(std::uint64_t n) {
  require(n >= 1, "uniform_u64: n must be >= 1");
  if (n == 1) return 0;
  // Rejection sampling: accept only draws below the largest multiple of n,
  // which removes modulo bias.
  const std::uint64_t max = std::numeric_limits<std::uint64_t>::max();
  const std::uint64_t overflow = (max % n + 1) % n;  // 2^64 mod n
  const std::uint64_t cut = max - overflow;          // accept x <= cut
  std::uint64_t x = raw();
  while (x > cut) x = raw();
  return x % n;
}

}  // namespace haarlab
