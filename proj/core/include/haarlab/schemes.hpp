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

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "haarlab/ensembles.hpp"
#include "haarlab/rng.hpp"
#include "haarlab/types.hpp"

namespace haarlab {

// Probabilities of the two-outcome decryption measurement. Validated on
// construction: each entry in [0, 1] and p0 + p1 = 1, both within 1e-10.
struct DecryptionOutcome {
  DecryptionOutcome(Real p0_in, Real p1_in);
  Real p0;
  Real p1;
};

// Quantum encryption of a classical bit (a QECM with message set {0, 1}).
//
// The key is a unitary U on a register A of even dimension d = 2 * (d/2),
// viewed as A = A1 (x) A2 with |A1| = 2. The message projectors are
//   Pi_0 = |0><0| (x) 1_{d/2},   Pi_1 = |1><1| (x) 1_{d/2}
// (diagonal projectors onto the first and second half of the basis), and the
// ciphertext for bit x under key U is sigma^U_x = (2/d) U Pi_x U^dag.
// Decryption measures in the keyed basis {U Pi_0 U^dag, U Pi_1 U^dag}, which
// recovers the bit with probability 1 because Tr(sigma^U_0 sigma^U_1) = 0.
//
// Keys are distributed according to a UnitaryEnsemble: the Haar measure or a
// finite set (e.g. an exact 2-design), handled uniformly.
class Qecm {
 public:
  // Scheme with Haar-random keys on U(d); d must be even and >= 2.
  static Qecm haar(Index d);

  // Scheme whose keys are drawn from the given ensemble (even dimension).
  static Qecm from_ensemble(UnitaryEnsemble ensemble);

  Index dim() const { return d_; }
  const UnitaryEnsemble& ensemble() const { return ensemble_; }

  // Message projector Pi_bit (bit in {0, 1}).
  const Matrix& message_projector(int bit) const;

  // Copy of this scheme with the message projectors replaced VERBATIM and no
  // invariant validation. Test hook for negative controls (e.g. a perturbed
  // Pi_0 of wrong rank must surface as a verify_correctness violation); never
  // use it to build a working scheme.
  Qecm with_projectors_unchecked(Matrix pi0, Matrix pi1) const;

  // Ciphertext (2/d) U Pi_bit U^dag. Errors: non-unitary or mis-sized key.
  Matrix encrypt(const Matrix& key, int bit) const;

  // Keyed measurement probabilities p_x = Tr(U Pi_x U^dag rho) for a state
  // rho on A. Errors: dimension mismatch, non-hermitian or non-unit-trace
  // state, and any DecryptionOutcome invariant failure.
  DecryptionOutcome decrypt(const Matrix& key, const Matrix& state) const;

  // One-line structured description, e.g. "qecm ensemble=haar(8) dim=8".
  std::string descriptor() const;

 private:
  Qecm(UnitaryEnsemble ensemble, bool validate);

  UnitaryEnsemble ensemble_;
  Index d_ = 0;
  Matrix pi_[2];
};

// One key that failed a correctness check.
struct CorrectnessViolation {
  std::size_t key_index;  // index into the tested key list
  Real overlap;           // Tr(sigma_0 sigma_1), should be ~0
  Real round_trip0;       // p_0 of decrypt(key, encrypt(key, 0))
  Real round_trip1;       // p_1 of decrypt(key, encrypt(key, 1))
};

// Result of checking ciphertext orthogonality and decryption round trips.
// A key is a violation when overlap > tol or either round trip < 1 - tol.
// The projector completeness gap max|Pi_0 + Pi_1 - 1| is checked once per
// scheme. All quantities are computed raw (no density-matrix validation) so
// that broken schemes are reported instead of throwing.
struct CorrectnessReport {
  std::size_t keys_tested = 0;
  Real tol = 0;
  Real max_overlap = 0;
  Real min_round_trip = 1;
  Real completeness_gap = 0;
  std::vector<CorrectnessViolation> violations;

  bool correct() const { return violations.empty() && completeness_gap <= tol; }
};

// Checks every key of a finite materialized ensemble.
CorrectnessReport verify_correctness(const Qecm& q, Real tol);

// Checks `num_keys` keys sampled from the scheme's ensemble (works for Haar
// and for streamed finite ensembles). Deterministic in (rng seed, num_keys).
CorrectnessReport verify_correctness(const Qecm& q, std::uint64_t num_keys,
                                     RngStream& rng, Real tol);

// Distance of the key-averaged ciphertext from the maximally mixed state.
struct MixingReport {
  Real trace_distance = 0;  // (1/2) || avg - omega ||_1
  Real stderr_bound = 0;    // Frobenius-propagated standard error, 0 if exact
  std::uint64_t keys_used = 0;
  bool exhaustive = false;
};

// Exact key average over a finite materialized ensemble. For any exact
// 1-design the distance is 0 up to round-off; ensembles that are not
// 1-designs (e.g. bb84) give a genuinely positive distance.
MixingReport key_averaged_ciphertext(const Qecm& q, int bit);

// Monte Carlo key average with `samples` keys. stderr_bound is
// sqrt(d * total_entrywise_variance / samples), which upper-bounds the
// standard error of the trace-norm deviation. Bit-identical for any thread
// count at a fixed seed.
MixingReport key_averaged_ciphertext(const Qecm& q, int bit,
                                     std::uint64_t samples, RngStream& rng,
                                     int threads = 1);

}  // namespace haarlab
