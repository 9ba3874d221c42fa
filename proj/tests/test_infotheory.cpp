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

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "doctest.h"
#include "haarlab/ensembles.hpp"
#include "haarlab/games.hpp"
#include "haarlab/infotheory.hpp"
#include "haarlab/linalg.hpp"

using namespace haarlab;

namespace {

DensityMatrix maximally_entangled(Index d) {
  Vector phi = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) phi(i * d + i) = 1.0 / std::sqrt(Real(d));
  return DensityMatrix(Matrix(phi * phi.adjoint()));
}

Matrix random_density(RngStream& rng, Index d, Index rank) {
  Matrix g(d, rank);
  for (Index j = 0; j < rank; ++j)
    for (Index i = 0; i < d; ++i) g(i, j) = rng.gaussian_cplx();
  Matrix w = g * g.adjoint();
  w /= w.trace().real();
  return w;
}

int count_check(const ChainReport& report, const std::string& name,
                bool applicable_only) {
  int n = 0;
  for (const auto& r : report.records)
    if (r.check == name && (!applicable_only || r.applicable)) ++n;
  return n;
}

bool all_hold(const ChainReport& report) {
  return std::all_of(report.records.begin(), report.records.end(),
                     [](const ChainRecord& r) { return r.holds; });
}

}  // namespace

TEST_SUITE("infotheory") {

TEST_CASE("min-entropy program pins the canonical states") {
  // Maximally entangled pair: H_min(A|B) = -1.
  {
    const EntropyResult e = hmin_sdp(maximally_entangled(2), 2, 2);
    CHECK(e.method == "sdp");
    CHECK(e.hmin.converged);
    CHECK(std::abs(e.hmin.lower - (-1.0)) <= 1e-9);
    CHECK(e.hmin.upper >= -1.0 - 1e-12);
    CHECK(e.hmin.upper - e.hmin.lower <= 1e-4);
    CHECK(std::abs(e.value - (-1.0)) <= 1e-4);
    CHECK(e.gap_to_sdp == 0.0);
    CHECK(e.fingerprint.size() == 16);
  }
  // Product of the uniform state with an arbitrary marginal: H_min = log|A|.
  {
    RngStream rng(5150);
    const DensityMatrix rho(
        kron(Matrix::Identity(4, 4) / 4.0, random_density(rng, 2, 2)));
    const EntropyResult e = hmin_sdp(rho, 4, 2);
    CHECK(e.hmin.converged);
    CHECK(std::abs(e.hmin.upper - 2.0) <= 1e-9);
    CHECK(e.hmin.lower >= 2.0 - 1e-4);
    CHECK(std::abs(e.value - 2.0) <= 1e-4);
  }
  // Classically correlated bits: the best guess is certain, H_min = 0.
  {
    Matrix cc = Matrix::Zero(4, 4);
    cc(0, 0) = cc(3, 3) = 0.5;
    const EntropyResult e = hmin_sdp(DensityMatrix(cc), 2, 2);
    CHECK(e.hmin.converged);
    CHECK(e.hmin.lower <= 1e-12);
    CHECK(e.hmin.upper >= -1e-12);
    CHECK(e.hmin.upper - e.hmin.lower <= 1e-4);
    CHECK(std::abs(e.value) <= 1e-4);
  }
}

TEST_CASE("min-entropy enclosures stay in range and track convergence") {
  for (int i = 0; i < 6; ++i) {
    RngStream rng(600 + i);
    const Index a = 2 + (i % 3);
    const Index b = 2 + ((i + 1) % 3);
    const EntropyResult e =
        hmin_sdp(DensityMatrix(random_density(rng, a * b, a * b)), a, b);
    const Real cap = std::log2(Real(a));
    CHECK(e.hmin.lower >= -cap - 1e-12);
    CHECK(e.hmin.upper <= cap + 1e-12);
    CHECK(e.hmin.lower <= e.hmin.upper);
    CHECK(e.hmin.upper - e.hmin.lower <= 1e-4);
    CHECK(e.hmin.converged);
  }
  // Starving the solver must surface as converged = false with a wider
  // enclosure, never as a silently tight one.
  {
    RngStream rng(31337);
    const DensityMatrix rho(random_density(rng, 9, 9));
    DominanceOptions starved;
    starved.width_target = 1e-9;
    starved.max_outer = 2;
    starved.max_inner = 2;
    const EntropyResult e = hmin_sdp(rho, 3, 3, starved);
    CHECK_FALSE(e.hmin.converged);
    CHECK(e.hmin.upper - e.hmin.lower > 1e-3);
    const EntropyResult full = hmin_sdp(rho, 3, 3);
    CHECK(full.hmin.converged);
    // The starved enclosure still contains the converged one.
    CHECK(e.hmin.lower <= full.hmin.lower + 1e-12);
    CHECK(e.hmin.upper >= full.hmin.upper - 1e-12);
  }
  // Fingerprints identify the state and dimensions, not the method.
  {
    const DensityMatrix rho = maximally_entangled(2);
    const EntropyResult a = hmin_sdp(rho, 2, 2);
    const EntropyResult b = hmin_krs(rho, 2, 2);
    CHECK(a.fingerprint == b.fingerprint);
    const EntropyResult c = hmin_sdp(DensityMatrix(
                                         Matrix(Matrix::Identity(4, 4) / 4.0)),
                                     2, 2);
    CHECK(a.fingerprint != c.fingerprint);
  }
  // Input validation.
  {
    const DensityMatrix small(Matrix(Matrix::Identity(4, 4) / 4.0));
    CHECK_THROWS_AS((void)hmin_sdp(small, 3, 3, {}), std::invalid_argument);
    const DensityMatrix wide(Matrix(Matrix::Identity(65, 65) / 65.0));
    CHECK_THROWS_AS((void)hmin_sdp(wide, 65, 1, {}), std::invalid_argument);
  }
}

TEST_CASE("channel ascent reproduces the min-entropy program") {
  // Identity channel is optimal for the maximally entangled state, and the
  // canonical start finds it on the first iteration.
  {
    const EntropyResult e = hmin_krs(maximally_entangled(2), 2, 2);
    CHECK(e.method == "krs-seesaw");
    CHECK(e.hmin.converged);
    CHECK(std::abs(e.value - (-1.0)) <= 1e-6);
    CHECK(e.hmin.upper == e.value);
    CHECK(std::abs(e.hmin.lower - (-1.0)) <= 1e-12);
    CHECK(std::abs(e.gap_to_sdp) <= 1e-6);
  }
  // Fully uniform two-qubit state: H_min = 1.
  {
    const DensityMatrix rho(Matrix(Matrix::Identity(4, 4) / 4.0));
    const EntropyResult e = hmin_krs(rho, 2, 2);
    CHECK(std::abs(e.value - 1.0) <= 1e-4);
    CHECK(e.hmin.converged);
  }
  // Cross-validation against the program on random two-qubit states.
  {
    Real worst = 0, best = 1e9;
    for (int i = 0; i < 20; ++i) {
      RngStream rng(3000 + i);
      const DensityMatrix rho(random_density(rng, 4, 4));
      KrsOptions opts;
      opts.seed = 7000 + static_cast<std::uint64_t>(i);
      const EntropyResult e = hmin_krs(rho, 2, 2, opts);
      CHECK(e.hmin.converged);
      CHECK(std::abs(e.gap_to_sdp) <= 1e-3);
      // The ascent certifies an upper bound: it may not undercut the
      // certified lower end of the program's enclosure.
      const EntropyResult sdp = hmin_sdp(rho, 2, 2);
      CHECK(e.value >= sdp.hmin.lower - 1e-6);
      worst = std::max(worst, std::abs(e.gap_to_sdp));
      best = std::min(best, std::abs(e.gap_to_sdp));
    }
    CHECK(worst <= 1e-3);
    CHECK(best <= 1e-4);
  }
  // Input validation.
  {
    const DensityMatrix rho(Matrix(Matrix::Identity(17, 17) / 17.0));
    CHECK_THROWS_AS((void)hmin_krs(rho, 17, 1, {}), std::invalid_argument);
    const DensityMatrix ok(Matrix(Matrix::Identity(4, 4) / 4.0));
    KrsOptions bad;
    bad.restarts = 0;
    CHECK_THROWS_AS((void)hmin_krs(ok, 2, 2, bad), std::invalid_argument);
    bad = KrsOptions{};
    bad.max_iterations = 0;
    CHECK_THROWS_AS((void)hmin_krs(ok, 2, 2, bad), std::invalid_argument);
  }
}

TEST_CASE("conditional von Neumann entropy dominates the min-entropy") {
  // Exact values first.
  CHECK(std::abs(conditional_von_neumann(maximally_entangled(2), 2, 2) -
                 (-1.0)) <= 1e-12);
  {
    RngStream rng(5150);
    const DensityMatrix rho(
        kron(Matrix::Identity(4, 4) / 4.0, random_density(rng, 2, 2)));
    CHECK(std::abs(conditional_von_neumann(rho, 4, 2) - 2.0) <= 1e-12);
  }
  // H_min(A|B) <= H(A|B) on random states.
  for (int i = 0; i < 50; ++i) {
    RngStream rng(4400 + i);
    const Index a = 2 + (i % 3);
    const Index b = 2 + ((i / 3) % 3);
    const DensityMatrix rho(random_density(rng, a * b, a * b));
    const EntropyResult e = hmin_sdp(rho, a, b);
    CHECK(e.hmin.upper <= conditional_von_neumann(rho, a, b) + 1e-3);
  }
}

TEST_CASE("decoupling bounds hold across the built-in family") {
  const auto family = builtin_decoupling_instances();
  REQUIRE(family.size() == 4);

  for (const auto& inst : family) {
    CAPTURE(inst.label);
    CHECK(inst.dim_a1 == 2);
    const auto ensemble =
        UnitaryEnsemble::haar(inst.dim_a1 * inst.dim_a2);
    const DecouplingReport rep =
        decoupling_check(inst, ensemble, 2000, 99, 1, false);
    CHECK(rep.holds);
    CHECK(rep.samples == 2000);
    CHECK(rep.lhs_mean >= 0.0);
    CHECK(rep.rhs >= 0.0);
  }

  // Product with the uniform state: the rotated state never moves, so the
  // sampled distance is identically zero and the bound is 1/4.
  {
    const auto ensemble = UnitaryEnsemble::haar(4);
    const DecouplingReport rep =
        decoupling_check(family[0], ensemble, 400, 7, 1, true);
    CHECK(rep.label == "uniform-times-mixed-env");
    CHECK(rep.lhs_mean <= 1e-14);
    CHECK(std::abs(rep.rhs - 0.25) <= 1e-5);
    CHECK(std::abs(rep.hmin_lower - 2.0) <= 1e-4);
  }
  // Maximally entangled state: the distance is the same for every key, so
  // the estimator has zero variance; the bound degenerates to 1.
  {
    const auto ensemble = UnitaryEnsemble::haar(8);
    const DecouplingReport rep =
        decoupling_check(family[1], ensemble, 500, 11, 1, true);
    CHECK(rep.label == "max-entangled");
    CHECK(std::abs(rep.lhs_mean - 0.75) <= 1e-12);
    CHECK(rep.lhs_stderr <= 1e-14);
    CHECK(std::abs(rep.rhs - 1.0) <= 1e-9);
    CHECK(std::abs(rep.hmin_lower - (-3.0)) <= 1e-6);
  }
  // Uniform on sixteen dimensions with a pure environment: maximal entropy
  // pushes the bound down to 1/16 while the distance stays zero.
  {
    const auto ensemble = UnitaryEnsemble::haar(16);
    const DecouplingReport rep =
        decoupling_check(family[2], ensemble, 400, 13, 1, true);
    CHECK(rep.label == "uniform-times-pure-env");
    CHECK(rep.lhs_mean <= 1e-14);
    CHECK(std::abs(rep.rhs - 0.0625) <= 1e-5);
    CHECK(std::abs(rep.hmin_lower - 4.0) <= 1e-4);
  }
  // Random pure state: zero entropy, bound 1/4, strictly positive distance.
  {
    const auto ensemble = UnitaryEnsemble::haar(16);
    const DecouplingReport rep =
        decoupling_check(family[3], ensemble, 2000, 99, 1, true);
    CHECK(rep.label == "random-pure-times-pure-env");
    CHECK(std::abs(rep.hmin_lower) <= 1e-6);
    CHECK(std::abs(rep.rhs - 0.25) <= 1e-6);
    CHECK(rep.lhs_mean > 0.15);
    CHECK(rep.lhs_mean < 0.24);
    CHECK(rep.lhs_stderr > 0.0);
    CHECK(rep.lhs_mean - 3.0 * rep.lhs_stderr <= rep.rhs);
  }
  // Deterministic and thread-invariant estimates.
  {
    const auto ensemble = UnitaryEnsemble::haar(16);
    const DecouplingReport a =
        decoupling_check(family[3], ensemble, 600, 42, 1, false);
    const DecouplingReport b =
        decoupling_check(family[3], ensemble, 600, 42, 3, false);
    CHECK(a.lhs_mean == b.lhs_mean);
    CHECK(a.lhs_stderr == b.lhs_stderr);
    const DecouplingReport c =
        decoupling_check(family[3], ensemble, 600, 42, 1, false);
    CHECK(a.lhs_mean == c.lhs_mean);
  }
}

TEST_CASE("decoupling flags an ensemble that does not mix") {
  // A basis state on |A| = 16: the entropy bound is 1/4, but without any
  // actual key randomization the kept qubit stays a basis state at distance
  // 1/2 from uniform. The check must report the violation and the enforcing
  // variant must throw.
  Matrix rho = Matrix::Zero(32, 32);
  rho(0, 0) = 1.0;
  DecouplingInstance inst;
  inst.label = "basis-state-no-mixing";
  inst.rho_ae = DensityMatrix(rho);
  inst.dim_a1 = 2;
  inst.dim_a2 = 8;
  inst.dim_e = 2;
  const auto identity_only = UnitaryEnsemble::exact(
      {Matrix(Matrix::Identity(16, 16))}, "identity-only");
  const DecouplingReport rep =
      decoupling_check(inst, identity_only, 50, 3, 1, false);
  CHECK_FALSE(rep.holds);
  CHECK(std::abs(rep.lhs_mean - 0.5) <= 1e-12);
  CHECK(std::abs(rep.rhs - 0.25) <= 1e-6);
  CHECK_THROWS_AS(
      (void)decoupling_check(inst, identity_only, 50, 3, 1, true),
      std::runtime_error);
}

TEST_CASE("decoupling validates its inputs") {
  const auto family = builtin_decoupling_instances();
  const auto ensemble = UnitaryEnsemble::haar(4);
  CHECK_THROWS_AS(
      (void)decoupling_check(family[0], ensemble, 0, 1, 1, false),
      std::invalid_argument);
  const auto wrong_dim = UnitaryEnsemble::haar(8);
  CHECK_THROWS_AS(
      (void)decoupling_check(family[0], wrong_dim, 10, 1, 1, false),
      std::invalid_argument);
  DecouplingInstance bad = family[0];
  bad.dim_a1 = 4;
  bad.dim_a2 = 1;
  CHECK_THROWS_AS((void)decoupling_check(bad, ensemble, 10, 1, 1, false),
                  std::invalid_argument);
}

TEST_CASE("probe states purify uniform-by-environment products exactly") {
  RngStream rng(2024);
  const ChainProbe probe = chain_probe(4, 4, 2, rng);
  CHECK(probe.dim_a == 4);
  CHECK(probe.dim_b == 8);
  CHECK(probe.dim_c == 4);
  CHECK(probe.rank_c == 2);
  CHECK(std::abs(probe.state.norm() - 1.0) <= 1e-12);

  // sigma_c is a valid environment of the requested rank.
  CHECK(std::abs(probe.sigma_c.trace().real() - 1.0) <= 1e-12);
  const EigResult sc = herm_eig(probe.sigma_c);
  CHECK(sc.values(0) > 0.0);
  CHECK(sc.values(1) > 0.0);
  CHECK(std::abs(sc.values(2)) <= 1e-12);
  CHECK(std::abs(sc.values(3)) <= 1e-12);

  // The A (x) C marginal is exactly omega_A (x) sigma_c.
  const Matrix full = probe.state * probe.state.adjoint();
  const Matrix marginal = partial_trace(full, {4, 8, 4}, {1});
  const Matrix expected = kron(Matrix::Identity(4, 4) / 4.0, probe.sigma_c);
  CHECK((marginal - expected).cwiseAbs().maxCoeff() <= 1e-12);

  // Full-rank environments work too.
  RngStream rng2(2025);
  const ChainProbe full_rank = chain_probe(2, 3, 3, rng2);
  CHECK(full_rank.dim_b == 6);
  const Matrix marg2 =
      partial_trace(Matrix(full_rank.state * full_rank.state.adjoint()),
                    {2, 6, 3}, {1});
  CHECK((marg2 - kron(Matrix::Identity(2, 2) / 2.0, full_rank.sigma_c))
            .cwiseAbs()
            .maxCoeff() <= 1e-12);

  // Input validation.
  RngStream rng3(1);
  CHECK_THROWS_AS((void)chain_probe(4, 4, 0, rng3), std::invalid_argument);
  CHECK_THROWS_AS((void)chain_probe(4, 4, 5, rng3), std::invalid_argument);
  CHECK_THROWS_AS((void)chain_probe(3, 4, 1, rng3), std::invalid_argument);
}

TEST_CASE("chain suite holds with random measurements at dimension four") {
  const auto game =
      MoeGame::from_ensemble(UnitaryEnsemble::clifford_group(2));
  const ChainReport rep =
      chain_check(game, KeyedPovms::seeded_random(21, 16),
                  KeyedPovms::seeded_random(22, 4), 5, {0.05, 0.1, 0.2},
                  1234, 1);
  CHECK(all_hold(rep));
  CHECK(rep.dim_a == 4);
  CHECK(rep.dim_b == 16);
  CHECK(rep.dim_c == 4);
  CHECK(rep.probes == 5);
  CHECK(std::abs(rep.norm_p - 0.2576648252) <= 1e-8);
  CHECK(rep.epsilon < 0.0);
  CHECK(rep.hmin_upper - rep.hmin_lower <= 1e-4);

  // Five probes, four band half-widths each (the callers' three plus the
  // balanced width); overlap and entropy-floor are single not-applicable
  // records because the norm sits below one half.
  CHECK(count_check(rep, "band-mass", false) == 20);
  CHECK(count_check(rep, "band-mass", true) == 20);
  CHECK(count_check(rep, "overlap", false) == 1);
  CHECK(count_check(rep, "overlap", true) == 0);
  CHECK(count_check(rep, "entropy-floor", false) == 1);
  CHECK(count_check(rep, "entropy-floor", true) == 0);
  CHECK(count_check(rep, "norm-ceiling", true) == 1);
}

TEST_CASE("chain suite exercises every record with keyed measurements") {
  // d = 4: the key-basis strategies give norm (d+2)/(2(d+1)) = 3/5 exactly
  // under any exact 2-design.
  {
    const auto game =
        MoeGame::from_ensemble(UnitaryEnsemble::symplectic_design(2));
    const ChainReport rep = chain_check(
        game, KeyedPovms::keyed_basis(4), KeyedPovms::conjugate_keyed_basis(4),
        5, {0.05, 0.1, 0.2}, 1234, 1);
    CHECK(all_hold(rep));
    CHECK(std::abs(rep.norm_p - 0.6) <= 1e-12);
    CHECK(std::abs(rep.epsilon - 0.1) <= 1e-12);
    CHECK(count_check(rep, "band-mass", true) == 30);
    CHECK(count_check(rep, "overlap", true) >= 20);
    CHECK(count_check(rep, "entropy-floor", true) == 1);
    CHECK(count_check(rep, "norm-ceiling", true) == 1);
    CHECK(rep.hmin_upper - rep.hmin_lower <= 1e-4);
  }
  // Same game through the enumerated Clifford group.
  {
    const auto game =
        MoeGame::from_ensemble(UnitaryEnsemble::clifford_group(2));
    const ChainReport rep = chain_check(
        game, KeyedPovms::keyed_basis(4), KeyedPovms::conjugate_keyed_basis(4),
        5, {0.05, 0.1, 0.2}, 1234, 1);
    CHECK(all_hold(rep));
    CHECK(std::abs(rep.norm_p - 0.6) <= 1e-11);
  }
  // d = 8: norm 5/9.
  {
    const auto game =
        MoeGame::from_ensemble(UnitaryEnsemble::symplectic_design(3));
    const ChainReport rep = chain_check(
        game, KeyedPovms::keyed_basis(8), KeyedPovms::conjugate_keyed_basis(8),
        5, {0.05, 0.1, 0.2}, 4321, 1);
    CHECK(all_hold(rep));
    CHECK(std::abs(rep.norm_p - 5.0 / 9.0) <= 1e-12);
    CHECK(count_check(rep, "band-mass", true) == 30);
    CHECK(count_check(rep, "overlap", true) >= 15);
    CHECK(count_check(rep, "entropy-floor", true) == 1);
    CHECK(rep.hmin_upper - rep.hmin_lower <= 1e-4);
  }
  // Mixed strategies put the norm barely above one half; the near-threshold
  // records must still all hold.
  {
    const auto game =
        MoeGame::from_ensemble(UnitaryEnsemble::symplectic_design(2));
    const ChainReport rep = chain_check(
        game, KeyedPovms::seeded_random(31, 16),
        KeyedPovms::conjugate_keyed_basis(4), 5, {0.05, 0.1, 0.2}, 555, 1);
    CHECK(all_hold(rep));
    CHECK(rep.epsilon > 0.0);
    CHECK(rep.epsilon < 0.01);
    CHECK(count_check(rep, "overlap", true) >= 15);
  }
}

TEST_CASE("chain suite holds on the factored ensemble at dimension sixteen") {
  const auto game =
      MoeGame::from_ensemble(UnitaryEnsemble::symplectic_design(4));
  const ChainReport rep = chain_check(
      game, KeyedPovms::keyed_basis(16), KeyedPovms::conjugate_keyed_basis(16),
      5, {0.05, 0.1, 0.2}, 777, 1);
  CHECK(all_hold(rep));
  CHECK(rep.dim_a == 16);
  CHECK(rep.dim_b == 16);
  CHECK(rep.dim_c == 16);
  CHECK(std::abs(rep.norm_p - 9.0 / 17.0) <= 1e-9);
  CHECK(std::abs(rep.epsilon - 1.0 / 34.0) <= 1e-9);
  CHECK(rep.hmin_upper - rep.hmin_lower <= 1e-4);
  CHECK(count_check(rep, "band-mass", true) == 30);
  CHECK(count_check(rep, "overlap", true) == 15);
  CHECK(count_check(rep, "entropy-floor", true) == 1);
  CHECK(count_check(rep, "norm-ceiling", true) == 1);

  // The balanced band half-width 3 log2(log2 d) / (4 log2 d) lands on the
  // grid, and there its floor collapses to 1 - 4/log2 d = 0 at d = 16.
  bool found = false;
  for (const auto& r : rep.records) {
    if (r.check != "band-mass" || std::abs(r.delta - 0.375) > 1e-12) continue;
    found = true;
    CHECK(std::abs(r.rhs) <= 1e-12);
    CHECK(std::abs(r.rhs - (1.0 - 4.0 / std::log2(16.0))) <= 1e-12);
    CHECK(r.holds);
  }
  CHECK(found);
}

TEST_CASE("chain check is deterministic across threads and repeats") {
  const auto game =
      MoeGame::from_ensemble(UnitaryEnsemble::symplectic_design(2));
  const auto run = [&](int threads) {
    return chain_check(game, KeyedPovms::keyed_basis(4),
                       KeyedPovms::conjugate_keyed_basis(4), 3,
                       {0.05, 0.1, 0.2}, 9, threads);
  };
  const ChainReport a = run(1);
  const ChainReport b = run(2);
  const ChainReport c = run(1);
  REQUIRE(a.records.size() == b.records.size());
  REQUIRE(a.records.size() == c.records.size());
  CHECK(a.norm_p == b.norm_p);
  CHECK(a.hmin_lower == b.hmin_lower);
  CHECK(a.hmin_upper == b.hmin_upper);
  for (std::size_t i = 0; i < a.records.size(); ++i) {
    CAPTURE(i);
    CHECK(a.records[i].check == b.records[i].check);
    CHECK(a.records[i].lhs == b.records[i].lhs);
    CHECK(a.records[i].rhs == b.records[i].rhs);
    CHECK(a.records[i].delta == b.records[i].delta);
    CHECK(a.records[i].lhs == c.records[i].lhs);
  }
}

TEST_CASE("trivial measurements pin the band mass at one") {
  // A measurement that ignores the key and answers at random makes the
  // two-party operator exactly half the identity: every eigenvalue sits at
  // the band center, so each probe's band mass is 1 at every half-width.
  const auto game =
      MoeGame::from_ensemble(UnitaryEnsemble::clifford_group(2));
  const std::vector<Matrix> half = {Matrix(Matrix::Identity(2, 2) * 0.5),
                                    Matrix(Matrix::Identity(2, 2) * 0.5)};
  const ChainReport rep =
      chain_check(game, KeyedPovms::seeded_random(51, 8),
                  KeyedPovms::constant(Povm(half)), 3, {0.05, 0.3}, 99, 1);
  CHECK(all_hold(rep));
  int band = 0;
  for (const auto& r : rep.records) {
    if (r.check != "band-mass") continue;
    ++band;
    CHECK(std::abs(r.lhs - 1.0) <= 1e-12);
  }
  CHECK(band > 0);
}

TEST_CASE("chain check validates its inputs") {
  const auto game =
      MoeGame::from_ensemble(UnitaryEnsemble::symplectic_design(2));
  const auto bob = KeyedPovms::keyed_basis(4);
  const auto charlie = KeyedPovms::conjugate_keyed_basis(4);
  // Infinite key ensembles have no exact operator average.
  const auto haar_game = MoeGame::from_ensemble(UnitaryEnsemble::haar(4));
  CHECK_THROWS_AS(
      (void)chain_check(haar_game, bob, charlie, 2, {0.1}, 1, 1),
      std::invalid_argument);
  CHECK_THROWS_AS((void)chain_check(game, bob, charlie, 0, {0.1}, 1, 1),
                  std::invalid_argument);
  // Bob's register must purify the uniform state: a multiple of dim(game).
  CHECK_THROWS_AS(
      (void)chain_check(game, KeyedPovms::seeded_random(1, 6), charlie, 2,
                        {0.1}, 1, 1),
      std::invalid_argument);
  // ... and must not need more environment rank than Charlie has.
  CHECK_THROWS_AS(
      (void)chain_check(game, KeyedPovms::seeded_random(1, 32), charlie, 2,
                        {0.1}, 1, 1),
      std::invalid_argument);
  CHECK_THROWS_AS(
      (void)chain_check(game, bob, charlie, 2, {0.1, -0.05}, 1, 1),
      std::invalid_argument);
  CHECK_THROWS_AS((void)chain_check(game, bob, charlie, 2, {0.0}, 1, 1),
                  std::invalid_argument);
}

TEST_CASE("band formulas reproduce the balanced-width values") {
  // Exact collapse of the floor at the balanced half-width.
  CHECK(std::abs(balanced_band_delta(16.0) - 0.1875) <= 1e-15);
  CHECK(std::abs(band_floor(balanced_band_delta(16.0), 16.0) - 0.75) <=
        1e-15);
  CHECK(std::abs(band_floor(balanced_band_delta(16.0), 16.0) -
                 (1.0 - 4.0 / 16.0)) <= 1e-15);
  CHECK(std::abs(balanced_band_delta(4.0) - 0.375) <= 1e-15);
  CHECK(std::abs(band_floor(balanced_band_delta(4.0), 4.0)) <= 1e-15);
  CHECK(std::abs(band_floor(balanced_band_delta(4.0), 4.0) -
                 (1.0 - 4.0 / 4.0)) <= 1e-15);
  // Ceiling and floor agree on their shared exponential.
  CHECK(std::abs(overlap_ceiling(0.375, 4.0) - 8.0 * std::exp2(-2.0)) <=
        1e-15);
  CHECK(band_floor(0.05, 2.0) < 0.0);       // small-d floors are vacuous
  CHECK(overlap_ceiling(0.05, 2.0) > 1.0);  // ... and ceilings exceed one
}

TEST_CASE("bound table freezes the reference rows") {
  const auto rows = bound_table({1u << 20, 16u}, {8u, 16u, 32u});
  REQUIRE(rows.size() == 5);
  CHECK(rows[0].kind == "dimension");
  CHECK(rows[0].parameter == (1u << 20));
  CHECK(std::abs(rows[0].value - 0.8241446071) <= 1e-9);
  CHECK_FALSE(rows[0].vacuous);
  CHECK(rows[1].parameter == 16);
  CHECK(std::abs(rows[1].value - 1.25) <= 1e-12);
  CHECK(rows[1].vacuous);
  CHECK(rows[2].kind == "lambda");
  CHECK(rows[2].parameter == 8);
  CHECK(std::abs(rows[2].value - 0.5625) <= 1e-12);
  CHECK(rows[2].vacuous);  // 1/2 + 0.5625 >= 1
  CHECK(rows[3].parameter == 16);
  CHECK(std::abs(rows[3].value - 0.375) <= 1e-15);
  CHECK_FALSE(rows[3].vacuous);
  CHECK(rows[4].parameter == 32);
  CHECK(std::abs(rows[4].value - 1.5 * 5.0 / 32.0) <= 1e-15);
  CHECK_FALSE(rows[4].vacuous);

  // Monotone decreasing where the driving ratio decreases.
  Real prev = 2.0;
  for (int k = 16; k <= 30; ++k) {
    const auto row = bound_table({std::uint64_t{1} << k}, {});
    REQUIRE(row.size() == 1);
    CHECK(row[0].value < prev);
    prev = row[0].value;
  }

  // Hypothesis checks.
  CHECK_THROWS_AS((void)bound_table({13}, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)bound_table({15}, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)bound_table({12}, {}), std::invalid_argument);
  CHECK_THROWS_AS((void)bound_table({}, {3}), std::invalid_argument);
  CHECK(bound_table({14}, {}).at(0).vacuous);
  CHECK(bound_table({}, {4}).at(0).value == 0.75);
  CHECK(bound_table({}, {}).empty());
}

}  // TEST_SUITE
