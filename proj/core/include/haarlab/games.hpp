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
#include <functional>
#include <string>
#include <vector>

#include "haarlab/ensembles.hpp"
#include "haarlab/operators.hpp"
#include "haarlab/rng.hpp"
#include "haarlab/schemes.hpp"
#include "haarlab/types.hpp"

namespace haarlab {

// Two-answer monogamy game: a referee draws a key U from the ensemble,
// prepares the keyed encryption of a uniform bit, and Alice's measurement on
// her register is the keyed basis {U Pi_0 U^dag, U Pi_1 U^dag}. Bob and
// Charlie each hold a side register and must both output the bit.
class MoeGame {
 public:
  // Game induced by the keyed encryption scheme over `ensemble` (even dim).
  static MoeGame from_ensemble(UnitaryEnsemble ensemble);

  // Game induced by an existing scheme (shares its key ensemble/projectors).
  static MoeGame from_scheme(Qecm scheme);

  Index dim() const { return scheme_.dim(); }
  const UnitaryEnsemble& ensemble() const { return scheme_.ensemble(); }
  const Qecm& scheme() const { return scheme_; }

  // Projector selecting answer x before keying (diagonal, rank dim/2).
  const Matrix& message_projector(int x) const {
    return scheme_.message_projector(x);
  }

  // U Pi_x U^dag for a specific key (validated unitary).
  Matrix keyed_projector(const Matrix& key, int x) const;

  std::string descriptor() const;

 private:
  explicit MoeGame(Qecm scheme) : scheme_(std::move(scheme)) {}

  Qecm scheme_;
};

// A family of two-outcome POVMs indexed by the game key. Bob's and Charlie's
// measurements may depend on the announced key; the family is either a fixed
// POVM, an explicit per-key table, one of the built-in key-dependent rules,
// or an arbitrary callback.
class KeyedPovms {
 public:
  enum class Kind {
    Constant,             // same POVM for every key
    Table,                // explicit list, one POVM per key index
    KeyedBasis,           // {U Pi_0 U^dag, U Pi_1 U^dag}, even dim
    ConjugateKeyedBasis,  // the entrywise conjugate of KeyedBasis
    SeededRandom,         // random projective POVM per key index
    Rule,                 // arbitrary callback
  };

  static KeyedPovms constant(Povm povm);
  static KeyedPovms table(std::vector<Povm> per_key);
  static KeyedPovms keyed_basis(Index dim);
  static KeyedPovms conjugate_keyed_basis(Index dim);

  // Haar-random projective POVM of rank dim/2 (rounded down), regenerated on
  // demand from a stream derived from (seed, key_index). Never stores the
  // table, so it scales to ensembles with many keys.
  static KeyedPovms seeded_random(std::uint64_t seed, Index dim);

  // Arbitrary rule. `label` names the family in descriptors; the callback
  // must be a pure function of (key, key_index).
  static KeyedPovms rule(std::function<Povm(const Matrix&, std::size_t)> fn,
                         Index dim, std::string label);

  Kind kind() const { return kind_; }
  Index dim() const { return dim_; }
  const std::string& label() const { return label_; }

  // Table size (Table kind only; 0 otherwise).
  std::size_t table_size() const { return per_key_.size(); }
  const std::vector<Povm>& table_entries() const { return per_key_; }
  const Povm& constant_povm() const;
  std::uint64_t seed() const { return seed_; }

  // The POVM used at a given key. `key` is the key unitary, `key_index` its
  // position (table row / derivation index for sampled keys).
  Povm at(const Matrix& key, std::size_t key_index) const;

  // Same family with the two outcomes swapped.
  KeyedPovms complemented() const;

 private:
  KeyedPovms() = default;

  Kind kind_ = Kind::Constant;
  Index dim_ = 0;
  std::string label_;
  std::vector<Povm> per_key_;                              // Table
  std::function<Povm(const Matrix&, std::size_t)> fn_;     // Constant/Rule
  std::uint64_t seed_ = 0;                                 // SeededRandom
};

// One way for Bob and Charlie to play: a shared tripartite state plus keyed
// measurements for each of them. When `conjugated_game` is set the strategy
// is evaluated against the game over the entrywise-conjugated ensemble: the
// announced key becomes the conjugated element (for Alice's projector and for
// the keyed POVM rules alike) while key indices are unchanged.
struct Strategy {
  Index dim_b = 0;
  Index dim_c = 0;
  DensityMatrix rho_abc;  // on A (x) B (x) C, A slowest factor
  KeyedPovms bob;
  KeyedPovms charlie;
  bool conjugated_game = false;
  std::string note;
};

// Probability that both Bob and Charlie output Alice's bit, averaged exactly
// over a finite key ensemble. Throws for Haar ensembles (no exact average)
// and on any dimension mismatch. Result clamped to [0, 1].
Real winning_probability(const MoeGame& game, const Strategy& strategy,
                         int threads = 1);

struct McWinningProbability {
  Real value = 0;
  Real stderr_mean = 0;
  std::uint64_t samples = 0;
};

// Monte Carlo estimate over sampled keys (works for Haar and finite
// ensembles). Each sample derives an independent stream from a master seed
// drawn once from `rng`, so the estimate is identical for every thread count.
McWinningProbability winning_probability_mc(const MoeGame& game,
                                            const Strategy& strategy,
                                            std::uint64_t samples,
                                            RngStream& rng, int threads = 1);

// A game operator: the key-averaged product operator whose spectral norm is
// the best winning probability over shared states for fixed keyed POVMs.
// For the three-party operator (dim_b > 0)
//   P = avg_U sum_x U Pi_x U^dag (x) B^U_x (x) C^U_x   on A (x) B (x) C;
// for the Alice-Charlie operator (dim_b == 0)
//   Q = avg_U sum_x U Pi_x U^dag (x) C^U_x             on A (x) C.
// Both satisfy 0 <= op <= identity.
struct GameOperator {
  Matrix op;       // dense form; empty above the materialization limit (4096)
  Index dim_a = 0;
  Index dim_b = 0;  // 0 for the Alice-Charlie operator
  Index dim_c = 0;
  Real norm = 0;          // largest eigenvalue
  Vector top;             // unit eigenvector for `norm`
  Real top_residual = 0;  // ||op * top - norm * top||
  // Matrix-free application assembled from pairwise key moments; agrees with
  // `op * v` up to round-off and stays available when `op` is not stored.
  std::function<Vector(const Vector&)> apply;
};

// Assembles P for a finite ensemble. Exact: the average is computed per key
// (associative sum, parallelized over keys). Ensembles stored in factored
// form are not enumerated; they are accepted only with the built-in
// KeyedBasis / ConjugateKeyedBasis rules and canonical projectors, for which
// the key average has a closed form that is exact whenever the ensemble is a
// 2-design. Throws for Haar ensembles.
GameOperator game_operator_P(const MoeGame& game, const KeyedPovms& bob,
                             const KeyedPovms& charlie, int threads = 1);

// Assembles Q (Bob ignored) under the same rules as game_operator_P.
GameOperator game_operator_Q(const MoeGame& game, const KeyedPovms& charlie,
                             int threads = 1);

// Dense embedding of an Alice-Charlie operator into A (x) B (x) C with an
// identity on Bob's register: used to compare P against Q in the PSD order.
Matrix embed_charlie_operator(const GameOperator& q, Index dim_b);

}  // namespace haarlab
