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
#include <string>
#include <vector>

#include "haarlab/games.hpp"
#include "haarlab/schemes.hpp"
#include "haarlab/sdp.hpp"

namespace haarlab {

// A cloning attack against a one-bit keyed encryption scheme: a channel that
// splits the ciphertext register A into two receiver registers B and C,
// stored as its trace-one Choi state on A (x) B (x) C, together with the
// keyed two-outcome measurements each receiver applies once the key is
// announced.
struct CloningAttack {
  Index dim_b = 0;
  Index dim_c = 0;
  Matrix choi;  // trace-one Choi state of the splitting channel
  KeyedPovms bob = KeyedPovms::keyed_basis(2);
  KeyedPovms charlie = KeyedPovms::keyed_basis(2);
  std::string note;
};

// Checks the attack against the scheme: register dimensions, Hermiticity and
// positivity of the Choi state, its reduced state on A equal to the maximally
// mixed state within `tol` (the trace-preservation condition), and the keyed
// measurement families. Throws std::invalid_argument on any violation.
void validate_attack(const Qecm& scheme, const CloningAttack& attack,
                     Real tol = kOpTol);

// Success probability of the attack: the average over keys of the probability
// that both receivers recover the encrypted bit,
//
//   (1/2) sum_x tr[(B^k_x (x) C^k_x) Phi(ciphertext of x under key k)]
//
// summed over the uniform bit, evaluated through the Choi state of Phi.
// Exact finite-ensemble average; requires a finite ensemble.
Real attack_value(const Qecm& scheme, const CloningAttack& attack,
                  int threads = 1);

// Monte Carlo estimate of the same average for sampled ensembles.
McWinningProbability attack_value_mc(const Qecm& scheme,
                                     const CloningAttack& attack,
                                     std::size_t samples, RngStream& rng,
                                     int threads = 1);

// ---- Baseline attacks ------------------------------------------------------

// Discard the ciphertext; both receivers answer 0. Succeeds with probability
// exactly 1/2 on every scheme.
CloningAttack coordinated_guess_attack(const Qecm& scheme);

// Measure the ciphertext in the basis halfway between the computational and
// Hadamard bases and broadcast the classical outcome to both receivers, who
// answer it regardless of the key. Dimension-2 schemes only. On the
// two-basis scheme this wins with probability cos^2(pi/8).
CloningAttack broadcast_measure_attack(const Qecm& scheme);

// Forward the ciphertext to Bob untouched (Charlie keeps nothing); Bob
// decrypts in the keyed basis, Charlie answers 0. Bob is always right, so the
// value is exactly 1/2 on every scheme.
CloningAttack identity_to_bob_attack(const Qecm& scheme);

// ---- Reduction onto game strategies ----------------------------------------

// Maps a cloning attack to a strategy for the scheme's guessing game whose
// winning probability equals the attack value exactly. The shared state is
// the Choi state itself on A (x) B (x) C; the announced key enters the
// receivers' measurements through its entrywise conjugate. For ensembles
// closed under conjugation the resulting strategy plays the original game;
// otherwise the strategy is returned with `conjugated_game` set and is
// evaluated against the explicitly conjugated ensemble.
Strategy attack_to_strategy(const Qecm& scheme, const CloningAttack& attack);

// ---- See-saw optimization ----------------------------------------------------

struct SeesawOptions {
  int restarts = 10;
  int max_iterations = 60;  // full bob/charlie/channel cycles per restart
  Real tol = 1e-8;          // stop once a full cycle improves less than this
  std::uint64_t seed = 1;   // master seed; restart r uses stream (seed, r)
  int threads = 1;          // restarts run in parallel
};

struct SeesawStep {
  int restart = 0;
  int iteration = 0;  // 0 for the initial evaluation
  std::string step;   // "init", "bob", "charlie", or "channel"
  Real value = 0;
};

struct SeesawTrace {
  std::vector<SeesawStep> steps;  // grouped by restart, in iteration order
  int restarts = 0;
  CloningAttack best;
  Real best_value = 0;
  // Certificate from the accepted channel step of the best restart: for the
  // final measurement tables, the channel-optimal value lies within
  // [lower, upper] / dim(A), so best_value is within the certified gap of the
  // best value any channel could reach against those tables.
  CertifiedInterval channel_certificate;
};

// Alternating ascent over cloning attacks for a finite-ensemble scheme with
// fixed receiver dimensions. Each cycle solves three subproblems: the optimal
// two-outcome measurement per key for Bob (projector onto the nonnegative
// eigenspace of the effective-operator difference, ties and kernel assigned
// to outcome 0), the same for Charlie, and the optimal channel for fixed
// measurements through the operator-dominance program, whose dual certificate
// rebuilds the Choi state. A candidate channel is only accepted if it does
// not lower the value, so the per-restart value trace is nondecreasing; if
// the rebuilt Choi state regresses, a direct ascent over Stinespring
// isometries of the current channel is tried instead. Requires
// dim(A) * dim_b * dim_c <= 4096.
SeesawTrace seesaw_attack(const Qecm& scheme, Index dim_b, Index dim_c,
                          const SeesawOptions& opts = {});

}  // namespace haarlab
