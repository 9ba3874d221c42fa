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
#include <vector>

#include "haarlab/types.hpp"

namespace haarlab {

// ---- GF(2^m) ----------------------------------------------------------------
//
// Field elements are unsigned integers whose bit i is the coefficient of
// alpha^i in the power basis, where alpha is a root of the fixed primitive
// polynomial (x^2+x+1, x^3+x+1, x^4+x+1 for m = 2, 3, 4).
class GF2m {
 public:
  explicit GF2m(int m);  // m in {1, 2, 3, 4}

  int m() const { return m_; }
  unsigned q() const { return 1u << m_; }

  unsigned add(unsigned a, unsigned b) const { return a ^ b; }
  unsigned mul(unsigned a, unsigned b) const;
  unsigned inv(unsigned a) const;  // a != 0
  unsigned pow(unsigned a, unsigned e) const;

  // Absolute trace tr(a) = a + a^2 + ... + a^(2^(m-1)), valued in {0, 1}.
  unsigned trace(unsigned a) const;

 private:
  int m_;
  unsigned poly_;
  std::vector<std::uint8_t> mul_;  // q x q multiplication table
  std::vector<std::uint8_t> inv_;
};

// ---- Binary symplectic space -------------------------------------------------
//
// A Pauli label on n qubits is a vector in F_2^(2n) packed into a word:
// bits [0, n) are the X part, bits [n, 2n) the Z part. Qubit j corresponds to
// bit j of the computational-basis index (qubit 0 is the fastest axis).
using BinVec = std::uint32_t;

inline int parity(std::uint32_t w) { return __builtin_popcount(w) & 1; }

// <u, v> = x_u . z_v + z_u . x_v (mod 2); Pauli operators with labels u, v
// commute iff this is 0.
int symplectic_form(int n, BinVec u, BinVec v);

// Transvection T_v(u) = u + <u, v> v.
BinVec transvect(int n, BinVec v, BinVec u);

// Element of Sp(2n, 2) stored by columns: col[j] = image of basis vector j.
struct BinSymplectic {
  int n = 0;
  std::vector<BinVec> col;

  static BinSymplectic identity(int n);
  BinVec apply(BinVec v) const;
  // (*this) o other: other acts first.
  BinSymplectic compose(const BinSymplectic& other) const;
  bool is_symplectic() const;
  bool operator==(const BinSymplectic& o) const { return n == o.n && col == o.col; }
};

// Writes s as a composition of symplectic transvections,
// s = T_{v[0]} o T_{v[1]} o ... o T_{v.back()} (the last entry acts first).
// At most 4n vectors are returned.
std::vector<BinVec> factor_into_transvections(const BinSymplectic& s);

// ---- Pauli operators and Clifford lifts -------------------------------------

// Hermitian Pauli sigma_a = i^(x.z) X^x Z^z acting on n qubits; its action on
// a basis state is sigma_a |v> = i^(x.z) (-1)^(z.v) |v XOR x>.
Matrix pauli_matrix(int n, BinVec a);

// out = sigma_a * in, using the row-permutation form above (no matrix product).
void pauli_mult_left(int n, BinVec a, const Matrix& in, Matrix& out);

// Trace of sigma_a * m, evaluated in O(d) row lookups.
Cplx pauli_mult_trace(int n, BinVec a, const Matrix& m);

// Unitary (1 + i sigma_v)/sqrt(2); conjugation by it sends sigma_u to
// +/- sigma_{T_v(u)}.
Matrix transvection_unitary(int n, BinVec v);

// Unitary L with L sigma_a L^dagger = +/- sigma_{s(a)} for all labels a,
// built as the product of lifted transvections.
Matrix lift_symplectic(const BinSymplectic& s);

// ---- SL(2, 2^m) inside Sp(2m, 2) ---------------------------------------------

// 2x2 matrix over GF(2^m) with determinant ad + bc = 1.
struct SL2Element {
  unsigned a = 1, b = 0, c = 0, d = 1;
};

// All q(q^2 - 1) elements, in a fixed deterministic order.
std::vector<SL2Element> enumerate_sl2(const GF2m& f);

// Embedding of SL(2, 2^m) into Sp(2m, 2): a Pauli label (x, z) is read as a
// field pair (a, b) with a = sum_i x_i alpha^i in the power basis and b in the
// trace-dual basis (z_i = tr(alpha^i b)); the field map (a, b) -> (s.a a + s.b b,
// s.c a + s.d b) then preserves the symplectic form because
// tr(a b' + b a') equals x.z' + z.x'.
BinSymplectic embed_sl2(const GF2m& f, const SL2Element& s);

}  // namespace haarlab
