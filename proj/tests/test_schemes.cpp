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

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "haarlab/ensembles.hpp"
#include "haarlab/linalg.hpp"
#include "haarlab/operators.hpp"
#include "haarlab/parallel.hpp"
#include "haarlab/rng.hpp"
#include "haarlab/schemes.hpp"
#include "haarlab/types.hpp"

namespace haarlab {
namespace {

TEST_SUITE("schemes") {

TEST_CASE("encryption matches the closed forms on identity keys") {
  // d = 2, bit 0: the ciphertext is the pure state |0><0|.
  const Qecm q2 = Qecm::haar(2);
  const Matrix id2 = Matrix::Identity(2, 2);
  Matrix expected2 = Matrix::Zero(2, 2);
  expected2(0, 0) = 1.0;
  CHECK((q2.encrypt(id2, 0) - expected2).cwiseAbs().maxCoeff() <= 1e-15);

  // d = 4, bit 1: diag(0, 0, 1/2, 1/2) in the A1 (x) A2 layout.
  const Qecm q4 = Qecm::haar(4);
  const Matrix id4 = Matrix::Identity(4, 4);
  Matrix expected4 = Matrix::Zero(4, 4);
  expected4(2, 2) = 0.5;
  expected4(3, 3) = 0.5;
  CHECK((q4.encrypt(id4, 1) - expected4).cwiseAbs().maxCoeff() <= 1e-15);

  // General key: trace 1, hermitian, and exactly d/2 eigenvalues equal to 2/d.
  RngStream rng(93011);
  for (Index d : {Index(2), Index(4), Index(8), Index(16)}) {
    const Qecm q = Qecm::haar(d);
    const Matrix u = sample_haar(rng, d);
    for (int bit : {0, 1}) {
      const Matrix sigma = q.encrypt(u, bit);
      CHECK(std::abs(sigma.trace().real() - 1.0) <= 1e-12);
      CHECK(herm_violation(sigma) <= 1e-12);
      const EigResult eig = herm_eig(sigma);
      for (Index i = 0; i < d / 2; ++i) {
        CHECK(std::abs(eig.values[i] - 2.0 / static_cast<Real>(d)) <= 1e-12);
      }
      for (Index i = d / 2; i < d; ++i) {
        CHECK(std::abs(eig.values[i]) <= 1e-12);
      }
    }
  }
}

TEST_CASE("ciphertexts of the two bits are orthogonal for every key") {
  RngStream rng(93012);
  for (Index d : {Index(2), Index(4), Index(8), Index(16)}) {
    const Qecm q = Qecm::haar(d);
    for (int rep = 0; rep < 8; ++rep) {
      const Matrix u = sample_haar(rng, d);
      const Matrix s0 = q.encrypt(u, 0);
      const Matrix s1 = q.encrypt(u, 1);
      CHECK(std::abs((s0 * s1).trace()) <= 1e-13);
    }
  }
}

TEST_CASE("decryption recovers the bit and is uniform on the mixed state") {
  RngStream rng(93013);
  for (Index d : {Index(2), Index(4), Index(8)}) {
    const Qecm q = Qecm::haar(d);
    for (int rep = 0; rep < 6; ++rep) {
      const Matrix u = sample_haar(rng, d);
      const DecryptionOutcome out0 = q.decrypt(u, q.encrypt(u, 0));
      const DecryptionOutcome out1 = q.decrypt(u, q.encrypt(u, 1));
      CHECK(std::abs(out0.p0 - 1.0) <= 1e-12);
      CHECK(std::abs(out1.p1 - 1.0) <= 1e-12);
    }
    const DecryptionOutcome mixed =
        q.decrypt(Matrix::Identity(d, d), maximally_mixed(d));
    CHECK(std::abs(mixed.p0 - 0.5) <= 1e-14);
    CHECK(std::abs(mixed.p1 - 0.5) <= 1e-14);
  }
}

TEST_CASE("decrypting with an independent random key is uniform on average") {
  // E_U' U' Pi_0 U'^dag = 1/2, so for any fixed ciphertext the wrong-key
  // probability averages to 1/2. Monte Carlo oracle with its own stderr.
  const Index d = 4;
  const Qecm q = Qecm::haar(d);
  RngStream rng(93014);
  const Matrix key = sample_haar(rng, d);
  const Matrix sigma = q.encrypt(key, 0);
  Accumulator acc;
  for (int i = 0; i < 20000; ++i) {
    const Matrix wrong = sample_haar(rng, d);
    acc.add(q.decrypt(wrong, sigma).p0);
  }
  CHECK(std::abs(acc.mean() - 0.5) <= 4.0 * acc.stderr_mean());
  CHECK(acc.stderr_mean() <= 0.01);
}

TEST_CASE("input validation rejects malformed keys, states, and outcomes") {
  CHECK_THROWS_AS(Qecm::haar(3), std::invalid_argument);
  CHECK_THROWS_AS(Qecm::haar(0), std::invalid_argument);
  CHECK_THROWS_AS(Qecm::from_ensemble(UnitaryEnsemble::haar(5)),
                  std::invalid_argument);

  const Qecm q = Qecm::haar(4);
  const Matrix id4 = Matrix::Identity(4, 4);
  CHECK_THROWS_AS(q.encrypt(id4, 2), std::invalid_argument);
  CHECK_THROWS_AS(q.encrypt(2.0 * id4, 0), std::invalid_argument);
  CHECK_THROWS_AS(q.encrypt(Matrix::Identity(2, 2), 0), std::invalid_argument);
  CHECK_THROWS_AS(q.message_projector(-1), std::invalid_argument);

  CHECK_THROWS_AS(q.decrypt(Matrix::Identity(2, 2), maximally_mixed(2)),
                  std::invalid_argument);
  CHECK_THROWS_AS(q.decrypt(id4, maximally_mixed(2)), std::invalid_argument);
  CHECK_THROWS_AS(q.decrypt(id4, 2.0 * maximally_mixed(4)),
                  std::invalid_argument);
  Matrix skew = Matrix::Zero(4, 4);
  skew(0, 1) = 1.0;
  CHECK_THROWS_AS(q.decrypt(id4, skew), std::invalid_argument);

  CHECK_NOTHROW(DecryptionOutcome(0.25, 0.75));
  CHECK_THROWS_AS(DecryptionOutcome(1.2, -0.2), std::invalid_argument);
  CHECK_THROWS_AS(DecryptionOutcome(0.5, 0.6), std::invalid_argument);
}

TEST_CASE("correctness verification passes every materialized ensemble") {
  const Real tol = 1e-10;
  const std::vector<UnitaryEnsemble> ensembles = {
      UnitaryEnsemble::clifford_group(1), UnitaryEnsemble::clifford_group(2),
      UnitaryEnsemble::pauli_group(1),    UnitaryEnsemble::bb84(),
      UnitaryEnsemble::symplectic_design(1),
  };
  for (const UnitaryEnsemble& e : ensembles) {
    const Qecm q = Qecm::from_ensemble(e);
    const CorrectnessReport report = verify_correctness(q, tol);
    CAPTURE(e.label());
    CHECK(report.correct());
    CHECK(report.keys_tested == e.size());
    CHECK(report.violations.empty());
    CHECK(report.max_overlap <= 1e-13);
    CHECK(report.min_round_trip >= 1.0 - 1e-12);
    CHECK(report.completeness_gap <= 1e-15);
  }
}

TEST_CASE("correctness verification passes sampled Haar keys") {
  for (Index d : {Index(2), Index(8), Index(16)}) {
    const Qecm q = Qecm::haar(d);
    RngStream rng(93015 + static_cast<std::uint64_t>(d));
    const CorrectnessReport report = verify_correctness(q, 200, rng, 1e-10);
    CHECK(report.correct());
    CHECK(report.keys_tested == 200);
    CHECK(report.max_overlap <= 1e-12);
    CHECK(report.min_round_trip >= 1.0 - 1e-12);
  }
}

TEST_CASE("perturbed message projectors surface as reported violations") {
  const Index d = 4;
  const Qecm q = Qecm::haar(d);
  const Matrix pi0 = q.message_projector(0);
  const Matrix pi1 = q.message_projector(1);

  // Rank d/2 + 1: overlaps become 4/d^2 Tr(Pi0' Pi1) = 0.25 at d = 4.
  Matrix bump = Matrix::Zero(d, d);
  bump(2, 2) = 1.0;
  const Qecm q_wide = q.with_projectors_unchecked(pi0 + bump, pi1);
  RngStream rng(93016);
  const CorrectnessReport wide = verify_correctness(q_wide, 20, rng, 1e-10);
  CHECK(!wide.correct());
  CHECK(wide.violations.size() == 20);
  CHECK(wide.max_overlap == doctest::Approx(0.25).epsilon(1e-10));
  CHECK(wide.completeness_gap == doctest::Approx(1.0));

  // Rank d/2 - 1: orthogonality still holds but round trips drop to 1/2.
  Matrix dent = Matrix::Zero(d, d);
  dent(0, 0) = 1.0;
  const Qecm q_narrow = q.with_projectors_unchecked(pi0 - dent, pi1);
  RngStream rng2(93017);
  const CorrectnessReport narrow = verify_correctness(q_narrow, 20, rng2, 1e-10);
  CHECK(!narrow.correct());
  CHECK(narrow.violations.size() == 20);
  CHECK(narrow.max_overlap <= 1e-13);
  CHECK(narrow.min_round_trip == doctest::Approx(0.5).epsilon(1e-10));

  // The exhaustive overload reports the same class of failure per key.
  const Qecm qc = Qecm::from_ensemble(UnitaryEnsemble::clifford_group(1));
  Matrix cbump = Matrix::Zero(2, 2);
  cbump(1, 1) = 1.0;
  const Qecm qc_bad =
      qc.with_projectors_unchecked(qc.message_projector(0) + cbump,
                                   qc.message_projector(1));
  const CorrectnessReport all_bad = verify_correctness(qc_bad, 1e-10);
  CHECK(!all_bad.correct());
  CHECK(all_bad.violations.size() == 24);
}

TEST_CASE("key-averaged ciphertext is maximally mixed for exact designs") {
  for (int bit : {0, 1}) {
    for (const UnitaryEnsemble& e :
         {UnitaryEnsemble::clifford_group(1), UnitaryEnsemble::clifford_group(2),
          UnitaryEnsemble::pauli_group(1), UnitaryEnsemble::pauli_group(2),
          UnitaryEnsemble::symplectic_design(2)}) {
      const MixingReport report =
          key_averaged_ciphertext(Qecm::from_ensemble(e), bit);
      CAPTURE(e.label());
      CHECK(report.exhaustive);
      CHECK(report.keys_used == e.size());
      CHECK(report.trace_distance <= 1e-10);
    }
  }
  // bb84 is not a 1-design: the average lands at distance sqrt(2)/4 from
  // the maximally mixed state.
  const MixingReport bb =
      key_averaged_ciphertext(Qecm::from_ensemble(UnitaryEnsemble::bb84()), 0);
  CHECK(bb.trace_distance == doctest::Approx(std::sqrt(2.0) / 4.0).epsilon(1e-12));
}

TEST_CASE("sampled key average concentrates within the reported stderr") {
  const Qecm q = Qecm::haar(4);
  RngStream rng(93018);
  const MixingReport report = key_averaged_ciphertext(q, 0, 20000, rng, 1);
  CHECK(!report.exhaustive);
  CHECK(report.keys_used == 20000);
  CHECK(report.stderr_bound > 0);
  CHECK(report.trace_distance <= 5.0 * report.stderr_bound);

  // Identical seed, different thread count: bit-identical output.
  RngStream rng_a(424243);
  RngStream rng_b(424243);
  const MixingReport one = key_averaged_ciphertext(q, 1, 4096, rng_a, 1);
  const MixingReport three = key_averaged_ciphertext(q, 1, 4096, rng_b, 3);
  CHECK(one.trace_distance == three.trace_distance);
  CHECK(one.stderr_bound == three.stderr_bound);
}

TEST_CASE("scheme bookkeeping: descriptor and exhaustive-mode errors") {
  CHECK(Qecm::haar(8).descriptor() == "qecm ensemble=haar(8) dim=8");
  const Qecm qb = Qecm::from_ensemble(UnitaryEnsemble::bb84());
  CHECK(qb.descriptor() == "qecm ensemble=bb84 dim=2");
  CHECK(qb.dim() == 2);

  const Qecm qh = Qecm::haar(4);
  CHECK_THROWS_AS(verify_correctness(qh, 1e-10), std::invalid_argument);
  CHECK_THROWS_AS(key_averaged_ciphertext(qh, 0), std::invalid_argument);
  RngStream rng(1);
  CHECK_THROWS_AS(key_averaged_ciphertext(qh, 0, 0, rng, 1),
                  std::invalid_argument);

  const Matrix pi0 = qh.message_projector(0);
  const Matrix pi1 = qh.message_projector(1);
  CHECK((pi0 + pi1 - Matrix::Identity(4, 4)).cwiseAbs().maxCoeff() == 0.0);
  CHECK((pi0 * pi0 - pi0).cwiseAbs().maxCoeff() == 0.0);
  CHECK(pi0.trace().real() == 2.0);
}

}  // TEST_SUITE

}  // namespace
}  // namespace haarlab
