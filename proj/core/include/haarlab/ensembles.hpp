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
#include <utility>
#include <vector>

#include "haarlab/rng.hpp"
#include "haarlab/types.hpp"

namespace haarlab {

// Haar-random unitary of dimension d (Ginibre + QR with the R diagonal
// normalized to positive reals, which makes the distribution exactly
// left/right invariant).
Matrix sample_haar(RngStream& rng, Index d);

// Multiplies a matrix by a global phase so that its first entry of modulus
// > 1e-6 (column-major scan order) becomes real positive. Used to identify
// unitaries that differ only by a global phase.
Matrix phase_canonical(const Matrix& m);

// A distribution over unitaries: either the Haar measure in some dimension or
// a finite set of unitaries with uniform weights. Finite ensembles may be
// stored factored as {sigma_a * L_s} (Pauli times lifted symplectic), in which
// case elements are materialized on demand and never held all at once.
class UnitaryEnsemble {
 public:
  enum class Kind { Haar, ExactFinite };

  // The Haar measure on U(d).
  static UnitaryEnsemble haar(Index d);

  // A finite list of unitaries (validated to 1e-10) with uniform weights.
  static UnitaryEnsemble exact(std::vector<Matrix> elements, std::string label);

  // The full Clifford group modulo global phase, enumerated by closure under
  // {H, S} (one qubit, 24 elements) or {H x 1, S x 1, 1 x H, 1 x S, CNOT}
  // (two qubits, 11520 elements). n_qubits must be 1 or 2.
  static UnitaryEnsemble clifford_group(int n_qubits);

  // The 4^n Pauli operators X^x Z^z modulo global phase.
  static UnitaryEnsemble pauli_group(int n_qubits);

  // The two-element basis-choice ensemble {1, H} in dimension 2.
  static UnitaryEnsemble bb84();

  // The group {sigma_a * L_s : a a Pauli label, s in SL(2, 2^m) embedded in
  // Sp(2m, 2)} modulo phase, of size 4^m * 2^m (4^m - 1). Its symplectic part
  // acts transitively on nonzero Pauli labels, which makes it an exact
  // 2-design in dimension 2^m. Materialized for m <= 3; for m = 4 only the
  // 4080 symplectic lifts are stored and the 1044480 elements are streamed.
  static UnitaryEnsemble symplectic_design(int m);

  Kind kind() const { return kind_; }
  bool finite() const { return kind_ == Kind::ExactFinite; }
  Index dim() const { return d_; }
  const std::string& label() const { return label_; }

  // Number of elements (finite ensembles only).
  std::size_t size() const;

  // i-th element (finite ensembles only; factored ensembles materialize it).
  Matrix element(std::size_t i) const;

  // A sample: a fresh Haar unitary, or a uniformly random element.
  Matrix sample(RngStream& rng) const;

  // True when the element list is closed under multiplication modulo global
  // phase. Enables the collapsed single-sum frame potential.
  bool group_mod_phase() const { return group_mod_phase_; }
  bool factored() const { return factored_; }

  // True when for every element U the conjugate matrix conj(U) is again an
  // element up to global phase. Haar is conjugation invariant.
  bool conjugation_closed() const { return conjugation_closed_; }

  // Permutation pi with conj(element(k)) = phase * element(pi[k]).
  // Available for materialized conjugation-closed ensembles.
  const std::vector<std::size_t>& conjugation_permutation() const;

 private:
  UnitaryEnsemble() = default;
  void finish_materialized(bool expect_group);

  Kind kind_ = Kind::Haar;
  Index d_ = 0;
  std::string label_;
  std::vector<Matrix> elements_;  // materialized finite storage
  bool group_mod_phase_ = false;
  bool conjugation_closed_ = false;
  std::vector<std::size_t> conj_perm_;
  // Factored storage: element(i) = sigma_(i % 4^n) * lifts_[i / 4^n].
  bool factored_ = false;
  int fact_qubits_ = 0;
  std::vector<Matrix> lifts_;
};

// Uniformly-ish random Clifford unitary on n qubits for n >= 1: for n <= 2 a
// uniform element of the enumerated group (cached); for larger n the product
// of a long random word in the generators {H_i, S_i, CNOT_{ij}}, which
// approximates the uniform distribution but is not exactly uniform.
Matrix sample_clifford(int n_qubits, RngStream& rng);

// Exact second-order twirl: the Haar average of (U x conj(U)) T (U x conj(U))^dag,
//   Tr(Pi T)/(d^2-1) Pi + <phi+|T|phi+> |phi+><phi+|,  Pi = 1 - |phi+><phi+|.
// T must act on a d^2-dimensional space.
Matrix twirl_second_order(const Matrix& t_op, Index d);

// Closed-form mean and second absolute moment of
//   T = (1/d) Tr(U_1 Pi_{x_1} U_1^dag ... U_n Pi_{x_n} U_n^dag)
// over i.i.d. Haar U_i, for complementary rank-d/2 projections:
//   E T     = 2^-n,
//   E|T|^2  = (1/4 - 1/(4(d^2-1)))^n (d^2-1)/d^2 + 1/(2^n d^2).
// Requires n >= 1 and even d >= 2. The implied standard deviation obeys
// sigma_T <= 1/(2^(n/2) d).
std::pair<Real, Real> moment_T_exact(int n, Index d);

// Monte Carlo moments of T for explicit outcome bits and a given ensemble.
struct MomentReport {
  int n = 0;
  Index d = 0;
  std::vector<int> outcomes;
  Real mean_exact = 0;
  Real second_moment_exact = 0;
  Real mean_mc = 0;
  Real mean_stderr = 0;
  Real second_moment_mc = 0;
  Real second_moment_stderr = 0;
  std::uint64_t samples = 0;
};

// Estimates E T (real part) and E|T|^2 by sampling the n unitaries i.i.d.
// from the ensemble. Each sample uses an independent stream derived from a
// master seed drawn once from rng, so the result is identical for every
// thread count. Pi_x is the diagonal projector onto the first (x = 0) or
// last (x = 1) d/2 basis states.
MomentReport moment_T_mc(int n, Index d, const std::vector<int>& outcomes,
                         const UnitaryEnsemble& ensemble, std::uint64_t samples,
                         RngStream& rng, int threads = 1);

// Exact ensemble moments of T by exhaustive enumeration over all n-tuples of
// elements; n <= 2 only (higher moments use i.i.d. resampling instead).
// Returns (mean real part, second absolute moment).
std::pair<Real, Real> moment_T_exhaustive(int n, Index d,
                                          const std::vector<int>& outcomes,
                                          const UnitaryEnsemble& ensemble);

// Frame potential F_t = (1/|V|^2) sum_{U,V} |Tr(U^dag V)|^(2t) for t in {1,2}.
// For ensembles closed under multiplication modulo phase this collapses to
// the single sum (1/|V|) sum_W |Tr W|^(2t), which is streamed without
// materializing factored ensembles. F_t >= the Haar value (2 for t = 2,
// d >= 2; 1 for t = 1), with equality exactly for t-designs.
Real frame_potential(const UnitaryEnsemble& ensemble, int t);

// The quadratic double sum, independent of any group structure. Intended for
// small ensembles and as an oracle for the collapsed form.
Real frame_potential_pairwise(const UnitaryEnsemble& ensemble, int t);

// The exact Haar moment operator E[U^(x t) x conj(U)^(x t)] on (C^d)^(2t):
// t = 1 gives |phi+><phi+|; t = 2 is assembled from twirl_second_order applied
// to a full operator basis. t in {1, 2}.
Matrix haar_moment_operator(Index d, int t);

struct DesignCheck {
  bool is_design = false;
  Real deviation = 0;  // operator norm gap to the Haar moment operator
};

// Compares (1/|V|) sum_U U^(x t) x conj(U)^(x t) with the Haar moment
// operator. t in {1, 2}; requires a materialized finite ensemble and small
// dimension (d^(2t) <= 4096).
DesignCheck is_t_design(const UnitaryEnsemble& ensemble, int t, Real tol);

}  // namespace haarlab
