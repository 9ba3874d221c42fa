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
#include <stdexcept>
#include <vector>

#include "doctest.h"
#include "haarlab/games.hpp"
#include "haarlab/linalg.hpp"
#include "haarlab/operators.hpp"

using namespace haarlab;

namespace {

Real max_abs_diff(const Matrix& a, const Matrix& b) {
  return (a - b).cwiseAbs().maxCoeff();
}

Povm half_identity_povm(Index d) {
  const Matrix h = 0.5 * Matrix::Identity(d, d);
  return Povm({h, h});
}

Povm always_answer(int answer, Index d) {
  Matrix yes = Matrix::Identity(d, d);
  Matrix no = Matrix::Zero(d, d);
  if (answer == 0) return Povm({yes, no});
  return Povm({no, yes});
}

Povm basis_guess_povm(bool anti) {
  Matrix e0 = Matrix::Zero(2, 2);
  Matrix e1 = Matrix::Zero(2, 2);
  e0(0, 0) = 1.0;
  e1(1, 1) = 1.0;
  if (anti) return Povm({e1, e0});
  return Povm({e0, e1});
}

// Shared uniform bit in the computational basis of B (x) C.
Matrix classically_correlated_bc() {
  Vector v00 = Vector::Zero(4);
  Vector v11 = Vector::Zero(4);
  v00[0] = 1.0;
  v11[3] = 1.0;
  return 0.5 * (projector(v00) + projector(v11));
}

// Reference game operator: explicit per-key sum of the product operators.
Matrix manual_operator_p(const MoeGame& g, const KeyedPovms& bob,
                         const KeyedPovms& charlie) {
  const UnitaryEnsemble& ens = g.ensemble();
  const Index n = g.dim() * bob.dim() * charlie.dim();
  Matrix p = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const Matrix key = ens.element(i);
    const Povm b = bob.at(key, i);
    const Povm c = charlie.at(key, i);
    for (int x = 0; x < 2; ++x) {
      p += kron(kron(g.keyed_projector(key, x), b.element(x)), c.element(x));
    }
  }
  return p / static_cast<Real>(ens.size());
}

Matrix manual_operator_q(const MoeGame& g, const KeyedPovms& charlie) {
  const UnitaryEnsemble& ens = g.ensemble();
  const Index n = g.dim() * charlie.dim();
  Matrix q = Matrix::Zero(n, n);
  for (std::size_t i = 0; i < ens.size(); ++i) {
    const Matrix key = ens.element(i);
    const Povm c = charlie.at(key, i);
    for (int x = 0; x < 2; ++x) {
      q += kron(g.keyed_projector(key, x), c.element(x));
    }
  }
  return q / static_cast<Real>(ens.size());
}

constexpr Real kBreidbart = 0.85355339059327376220;  // (2 + sqrt 2) / 4

}  // namespace

TEST_SUITE("games") {

TEST_CASE("trivial half-identity measurements flatten both operators") {
  for (const auto& ens :
       {UnitaryEnsemble::clifford_group(1), UnitaryEnsemble::bb84()}) {
    const MoeGame g = MoeGame::from_ensemble(ens);
    const KeyedPovms triv = KeyedPovms::constant(half_identity_povm(2));
    const GameOperator p = game_operator_P(g, triv, triv);
    CHECK(p.dim_a == 2);
    CHECK(p.dim_b == 2);
    CHECK(p.dim_c == 2);
    CHECK(max_abs_diff(p.op, 0.25 * Matrix::Identity(8, 8)) < 1e-14);
    CHECK(p.norm == doctest::Approx(0.25).epsilon(1e-13));

    const GameOperator q = game_operator_Q(g, triv);
    CHECK(q.dim_b == 0);
    CHECK(max_abs_diff(q.op, 0.5 * Matrix::Identity(4, 4)) < 1e-14);
    CHECK(q.norm == doctest::Approx(0.5).epsilon(1e-13));
  }
}

TEST_CASE("ignorant Charlie caps the three-party norm at one half") {
  const MoeGame g = MoeGame::from_ensemble(UnitaryEnsemble::clifford_group(1));
  const KeyedPovms bob = KeyedPovms::seeded_random(991, 2);
  const KeyedPovms triv = KeyedPovms::constant(half_identity_povm(2));
  const GameOperator p = game_operator_P(g, bob, triv);
  CHECK(p.norm <= 0.5 + 1e-12);
  CHECK(p.norm > 0.1);
}

TEST_CASE("intermediate-basis strategy on the two-basis game") {
  const MoeGame g = MoeGame::from_ensemble(UnitaryEnsemble::bb84());
  Vector beta(2);
  beta[0] = std::cos(kPi / 8.0);
  beta[1] = std::sin(kPi / 8.0);
  const Strategy s{1,
                   1,
                   DensityMatrix(projector(beta)),
                   KeyedPovms::constant(always_answer(0, 1)),
                   KeyedPovms::constant(always_answer(0, 1)),
                   false,
                   "intermediate basis, both answer 0"};
  const Real w = winning_probability(g, s);
  CHECK(w == doctest::Approx(kBreidbart).epsilon(1e-14));
  CHECK(std::cos(kPi / 8.0) * std::cos(kPi / 8.0) ==
        doctest::Approx(kBreidbart).epsilon(1e-15));
}

TEST_CASE("coordinated and anti-coordinated guessing") {
  const std::vector<UnitaryEnsemble> ensembles = {
      UnitaryEnsemble::clifford_group(1), UnitaryEnsemble::bb84(),
      UnitaryEnsemble::symplectic_design(2)};
  for (const auto& ens : ensembles) {
    const MoeGame g = MoeGame::from_ensemble(ens);
    const Matrix rho = kron(maximally_mixed(g.dim()), classically_correlated_bc());
    const Strategy coord{2,
                         2,
                         DensityMatrix(rho),
                         KeyedPovms::constant(basis_guess_povm(false)),
                         KeyedPovms::constant(basis_guess_povm(false)),
                         false,
                         "shared uniform bit"};
    CHECK(winning_probability(g, coord) == doctest::Approx(0.5).epsilon(1e-14));

    const Strategy anti{2,
                        2,
                        DensityMatrix(rho),
                        KeyedPovms::constant(basis_guess_povm(false)),
                        KeyedPovms::constant(basis_guess_povm(true)),
                        false,
                        "opposite answers"};
    CHECK(winning_probability(g, anti) == doctest::Approx(0.0).epsilon(1e-14));
  }
}

TEST_CASE("coordinated guessing is exactly one half per sampled key too") {
  const MoeGame g = MoeGame::from_ensemble(UnitaryEnsemble::haar(2));
  const Matrix rho = kron(maximally_mixed(2), classically_correlated_bc());
  const Strategy coord{2,
                       2,
                       DensityMatrix(rho),
                       KeyedPovms::constant(basis_guess_povm(false)),
                       KeyedPovms::constant(basis_guess_povm(false)),
                       false,
                       ""};
  RngStream rng(77);
  const McWinningProbability est = winning_probability_mc(g, coord, 500, rng);
  CHECK(est.value == doctest::Approx(0.5).epsilon(1e-13));
  CHECK(est.stderr_mean < 1e-13);
  CHECK(est.samples == 500);
}

TEST_CASE("keyed-basis operators match the explicit per-key averages") {
  const std::vector<UnitaryEnsemble> ensembles = {
      UnitaryEnsemble::clifford_group(1), UnitaryEnsemble::bb84(),
      UnitaryEnsemble::symplectic_design(2)};
  for (const auto& ens : ensembles) {
    const MoeGame g = MoeGame::from_ensemble(ens);
    const Index d = g.dim();
    const KeyedPovms bob = KeyedPovms::keyed_basis(d);
    const KeyedPovms charlie = KeyedPovms::conjugate_keyed_basis(d);

    const GameOperator p = game_operator_P(g, bob, charlie);
    const Matrix p_ref = manual_operator_p(g, bob, charlie);
    CHECK(max_abs_diff(p.op, p_ref) < 1e-12);

    const GameOperator q = game_operator_Q(g, charlie);
    const Matrix q_ref = manual_operator_q(g, charlie);
    CHECK(max_abs_diff(q.op, q_ref) < 1e-12);

    CHECK(p.norm <= q.norm + 1e-11);
    CHECK(q.norm <= 1.0 + 1e-11);
    const Matrix q_embedded = embed_charlie_operator(q, d);
    CHECK(psd_violation(q_embedded - p.op) < 1e-10);

    // The best shared state for these measurements achieves the norm.
    const Strategy top{d,
                       d,
                       DensityMatrix(projector(p.top)),
                       bob,
                       charlie,
                       false,
                       "top eigenvector"};
    CHECK(winning_probability(g, top) == doctest::Approx(p.norm).epsilon(1e-9));
  }
}

TEST_CASE("two-design averages have the closed second-moment form") {
  // On an exact 2-design the pairwise key moments are Haar moments, so the
  // assembled operators must match the twirl formulas used for streamed
  // ensembles.
  const std::vector<UnitaryEnsemble> ensembles = {
      UnitaryEnsemble::clifford_group(1), UnitaryEnsemble::symplectic_design(2)};
  for (const auto& ens : ensembles) {
    const MoeGame g = MoeGame::from_ensemble(ens);
    const Index d = g.dim();
    const Real dd = static_cast<Real>(d);
    const KeyedPovms bob = KeyedPovms::keyed_basis(d);
    const KeyedPovms charlie = KeyedPovms::conjugate_keyed_basis(d);
    const Matrix pi0 = g.message_projector(0);
    const Matrix twirl = twirl_second_order(kron(pi0, pi0), d);

    // Q = 1 - EA (x) 1 - 1 (x) EC + 2 EAC collapses to twice the twirl.
    const GameOperator q = game_operator_Q(g, charlie);
    CHECK(max_abs_diff(q.op, 2.0 * twirl) < 1e-11);

    // Its spectrum is 1 on the maximally entangled state and
    // (d^2 - 2) / (2 (d^2 - 1)) on the complement.
    const EigResult eig = herm_eig(q.op);
    CHECK(eig.values[0] == doctest::Approx(1.0).epsilon(1e-11));
    const Real bulk = (dd * dd - 2.0) / (2.0 * (dd * dd - 1.0));
    for (Index i = 1; i < d * d; ++i) {
      CHECK(eig.values[i] == doctest::Approx(bulk).epsilon(1e-10));
    }
    CHECK(std::abs(maximally_entangled(d).dot(q.top)) ==
          doctest::Approx(1.0).epsilon(1e-10));

    // P assembled from the closed-form pairwise moments.
    const Index n = d * d * d;
    const Matrix idn = Matrix::Identity(n, n);
    Matrix swap = Matrix::Zero(d * d, d * d);
    for (Index i = 0; i < d; ++i) {
      for (Index j = 0; j < d; ++j) swap(i * d + j, j * d + i) = 1.0;
    }
    const Real alpha = (dd * dd - 2.0) / (4.0 * (dd * dd - 1.0));
    const Real beta = dd / (4.0 * (dd * dd - 1.0));
    const Matrix eab = alpha * Matrix::Identity(d * d, d * d) + beta * swap;
    Matrix p_closed = -0.5 * idn;
    p_closed += kron(eab, Matrix::Identity(d, d));
    p_closed += permute_registers(kron(twirl, Matrix::Identity(d, d)),
                                  {d, d, d}, {0, 2, 1});
    p_closed += kron(Matrix::Identity(d, d), twirl);

    const GameOperator p = game_operator_P(g, bob, charlie);
    CHECK(max_abs_diff(p.op, p_closed) < 1e-11);
  }
}

TEST_CASE("random keyed measurements keep every structural invariant") {
  const MoeGame g = MoeGame::from_ensemble(UnitaryEnsemble::clifford_group(1));
  const KeyedPovms bob = KeyedPovms::seeded_random(101, 2);
  const KeyedPovms charlie = KeyedPovms::seeded_random(202, 2);

  const GameOperator p = game_operator_P(g, bob, charlie);
  const GameOperator q = game_operator_Q(g, charlie);
  CHECK(max_abs_diff(p.op, manual_operator_p(g, bob, charlie)) < 1e-12);
  CHECK(max_abs_diff(q.op, manual_operator_q(g, charlie)) < 1e-12);

  CHECK(psd_violation(p.op) < 1e-12);
  CHECK(psd_violation(Matrix::Identity(8, 8) - p.op) < 1e-12);
  CHECK(p.norm <= q.norm + 1e-11);
  CHECK(q.norm <= 1.0 + 1e-11);
  CHECK(psd_violation(embed_charlie_operator(q, 2) - p.op) < 1e-10);

  // Complemented Charlie flips the Alice-Charlie operator.
  const GameOperator q_flip = game_operator_Q(g, charlie.complemented());
  CHECK(max_abs_diff(q_flip.op, Matrix::Identity(4, 4) - q.op) < 1e-12);

  // Dense form and matrix-free application agree.
  RngStream rng(404);
  for (int rep = 0; rep < 3; ++rep) {
    const Vector v = random_state(rng, 8);
    CHECK((p.apply(v) - p.op * v).norm() < 1e-12);
    const Vector u = random_state(rng, 4);
    CHECK((q.apply(u) - q.op * u).norm() < 1e-12);
  }

  // The top eigenvector achieves the norm; other states never beat it.
  const Strategy top{2, 2, DensityMatrix(projector(p.top)), bob, charlie,
                     false, ""};
  CHECK(winning_probability(g, top) == doctest::Approx(p.norm).epsilon(1e-9));
  for (int rep = 0; rep < 5; ++rep) {
    const Strategy s{2,      2,       DensityMatrix(random_density(rng, 8)),
                     bob,    charlie, false,
                     "rand"};
    const Real w = winning_probability(g, s);
    CHECK(w <= p.norm + 1e-10);
    CHECK(w >= 0.0);
    // Exact evaluation agrees with the trace against the averaged operator.
    CHECK(w == doctest::Approx((p.op * s.rho_abc.matrix()).trace().real())
                   .epsilon(1e-11));
  }
}

TEST_CASE("streamed ensemble uses the closed form for the pair operator") {
  const UnitaryEnsemble design = UnitaryEnsemble::symplectic_design(4);
  REQUIRE(design.factored());
  const MoeGame g = MoeGame::from_ensemble(design);
  const KeyedPovms charlie = KeyedPovms::conjugate_keyed_basis(16);

  const GameOperator q = game_operator_Q(g, charlie);
  const Matrix pi0 = g.message_projector(0);
  CHECK(max_abs_diff(q.op, 2.0 * twirl_second_order(kron(pi0, pi0), 16)) <
        1e-13);
  CHECK(q.norm == doctest::Approx(1.0).epsilon(1e-11));
  CHECK(std::abs(maximally_entangled(16).dot(q.top)) ==
        doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("streamed ensemble assembles the full operator at the size limit") {
  const UnitaryEnsemble design = UnitaryEnsemble::symplectic_design(4);
  const MoeGame g = MoeGame::from_ensemble(design);
  const KeyedPovms bob = KeyedPovms::keyed_basis(16);
  const KeyedPovms charlie = KeyedPovms::conjugate_keyed_basis(16);

  const GameOperator p = game_operator_P(g, bob, charlie);
  CHECK(p.op.rows() == 4096);
  // Trace of the averaged operator is dim / 4 for keyed bases.
  CHECK(p.op.trace().real() == doctest::Approx(1024.0).epsilon(1e-10));
  CHECK(p.norm > 0.5);
  CHECK(p.norm <= 1.0 + 1e-9);
  CHECK(p.top_residual < 1e-9);

  RngStream rng(606);
  for (int rep = 0; rep < 3; ++rep) {
    const Vector v = random_state(rng, 4096);
    CHECK((p.apply(v) - p.op * v).norm() < 1e-11);
  }
  CHECK((p.op * p.top - p.norm * p.top).norm() < 1e-9);
}

TEST_CASE("keyed povm families: determinism, complement, validation") {
  const KeyedPovms sr = KeyedPovms::seeded_random(55, 4);
  const Matrix dummy = Matrix::Identity(4, 4);
  const Povm a = sr.at(dummy, 3);
  const Povm b = sr.at(dummy, 3);
  const Povm c = sr.at(dummy, 4);
  CHECK(max_abs_diff(a.element(0), b.element(0)) == 0.0);
  CHECK(max_abs_diff(a.element(0), c.element(0)) > 1e-3);
  CHECK(max_abs_diff(a.element(0) + a.element(1), Matrix::Identity(4, 4)) <
        1e-12);
  // Rank of the outcome-0 projector is dim / 2.
  CHECK(a.element(0).trace().real() == doctest::Approx(2.0).epsilon(1e-12));

  const KeyedPovms flipped = sr.complemented();
  CHECK(max_abs_diff(flipped.at(dummy, 3).element(0), a.element(1)) == 0.0);
  CHECK(flipped.label() == "seeded_random[seed=55]~complement");

  const KeyedPovms constant = KeyedPovms::constant(half_identity_povm(3));
  CHECK(constant.dim() == 3);
  CHECK(constant.at(dummy, 99).num_outcomes() == 2);

  const Matrix u = Matrix::Identity(2, 2);
  const KeyedPovms kb = KeyedPovms::keyed_basis(2);
  const Povm kb_povm = kb.at(u, 0);
  CHECK(kb_povm.element(0)(0, 0).real() == doctest::Approx(1.0));
  CHECK(kb_povm.element(0)(1, 1).real() == doctest::Approx(0.0));

  CHECK_THROWS_AS(KeyedPovms::keyed_basis(3), std::invalid_argument);
  CHECK_THROWS_AS(KeyedPovms::table({}), std::invalid_argument);
  CHECK_THROWS_AS(
      KeyedPovms::rule(nullptr, 2, "broken"), std::invalid_argument);
  const KeyedPovms bad_rule = KeyedPovms::rule(
      [](const Matrix&, std::size_t) { return half_identity_povm(3); }, 2,
      "wrong dim");
  CHECK_THROWS_AS(bad_rule.at(u, 0), std::invalid_argument);
}

TEST_CASE("sampled estimates agree with exact averages and are reproducible") {
  const MoeGame g = MoeGame::from_ensemble(UnitaryEnsemble::clifford_group(1));
  RngStream setup(99);
  const Strategy s{2,
                   2,
                   DensityMatrix(random_density(setup, 8)),
                   KeyedPovms::seeded_random(11, 2),
                   KeyedPovms::seeded_random(22, 2),
                   false,
                   ""};
  const Real exact = winning_probability(g, s);

  RngStream rng1(1234), rng3(1234);
  const McWinningProbability one = winning_probability_mc(g, s, 20000, rng1, 1);
  const McWinningProbability three =
      winning_probability_mc(g, s, 20000, rng3, 3);
  CHECK(one.value == three.value);
  CHECK(one.stderr_mean == three.stderr_mean);
  CHECK(one.stderr_mean > 0.0);
  CHECK(std::abs(one.value - exact) <= 4.0 * one.stderr_mean + 1e-12);

  // Threads never change the exact average either.
  CHECK(winning_probability(g, s, 3) == exact);
}

TEST_CASE("game construction and evaluation reject malformed inputs") {
  const MoeGame g = MoeGame::from_ensemble(UnitaryEnsemble::clifford_group(1));
  const MoeGame haar_game = MoeGame::from_ensemble(UnitaryEnsemble::haar(2));
  const KeyedPovms triv = KeyedPovms::constant(half_identity_povm(2));
  const Matrix rho = kron(maximally_mixed(2), classically_correlated_bc());
  const Strategy s{2, 2, DensityMatrix(rho), triv, triv, false, ""};

  CHECK_THROWS_AS(winning_probability(haar_game, s), std::invalid_argument);
  CHECK_THROWS_AS(game_operator_P(haar_game, triv, triv),
                  std::invalid_argument);
  CHECK_THROWS_AS(game_operator_Q(haar_game, triv), std::invalid_argument);

  // Shared-state dimension mismatch.
  const Strategy bad_dims{2, 2, DensityMatrix(maximally_mixed(4)), triv, triv,
                          false, ""};
  CHECK_THROWS_AS(winning_probability(g, bad_dims), std::invalid_argument);

  // POVM dimension inconsistent with the declared side dimension.
  const Strategy bad_povm{4, 2, DensityMatrix(kron(maximally_mixed(4), rho)),
                          triv, triv, false, ""};
  CHECK_THROWS_AS(winning_probability(g, bad_povm), std::invalid_argument);

  // Table length must match the key count.
  const KeyedPovms short_table =
      KeyedPovms::table({half_identity_povm(2), half_identity_povm(2)});
  CHECK_THROWS_AS(game_operator_P(g, short_table, triv),
                  std::invalid_argument);
  const Strategy bad_table{2, 2, DensityMatrix(rho), short_table, triv, false,
                           ""};
  CHECK_THROWS_AS(winning_probability(g, bad_table), std::invalid_argument);

  // Streamed ensembles only support the built-in keyed rules.
  const MoeGame big =
      MoeGame::from_ensemble(UnitaryEnsemble::symplectic_design(4));
  CHECK_THROWS_AS(
      game_operator_P(big, KeyedPovms::seeded_random(1, 16),
                      KeyedPovms::conjugate_keyed_basis(16)),
      std::invalid_argument);

  // Embedding requires an Alice-Charlie operator.
  const GameOperator p = game_operator_P(g, triv, triv);
  CHECK_THROWS_AS(embed_charlie_operator(p, 2), std::invalid_argument);

  // Keyed projector validation.
  CHECK_THROWS_AS(g.keyed_projector(Matrix::Identity(2, 2), 2),
                  std::invalid_argument);
  CHECK_THROWS_AS(g.keyed_projector(2.0 * Matrix::Identity(2, 2), 0),
                  std::invalid_argument);
  CHECK(g.descriptor() == "moe_game ensemble=clifford(1) dim=2");
}

}  // TEST_SUITE("games")
