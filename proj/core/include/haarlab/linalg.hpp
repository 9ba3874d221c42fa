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
#include <vector>

#include "haarlab/layout.hpp"
#include "haarlab/rng.hpp"
#include "haarlab/types.hpp"

namespace haarlab {

// ---- Tensor structure ------------------------------------------------------

// Kronecker product with the first factor as the slowest index.
Matrix kron(const Matrix& a, const Matrix& b);
Matrix tensor(const std::vector<Matrix>& factors);

// Trace out the registers listed in `traced` (positions into `dims`).
// Remaining registers keep their relative order.
Matrix partial_trace(const Matrix& m, const std::vector<Index>& dims,
                     const std::vector<int>& traced);
// Same, by register name.
Matrix partial_trace(const Matrix& m, const RegisterLayout& layout,
                     const std::vector<std::string>& traced_names);

// Reorder tensor factors: `new_order[t]` is the old position of the register
// that ends up at position t.
Matrix permute_registers(const Matrix& m, const std::vector<Index>& dims,
                         const std::vector<int>& new_order);

// Column-major vectorization and its inverse. With kron() as above this obeys
// vec(B * M * A^T) = kron(A, B) * vec(M).
Vector vec(const Matrix& m);
Matrix unvec(const Vector& v, Index rows, Index cols);

// ---- Spectral helpers ------------------------------------------------------

struct EigResult {
  RealVector values;  // descending
  Matrix vectors;     // columns match values
};
EigResult herm_eig(const Matrix& m);

// Hermitian PSD square root (negative round-off eigenvalues clipped to 0).
Matrix sqrt_psd(const Matrix& m);

// Largest singular value.
Real op_norm(const Matrix& m);

// (1/2) * trace norm of (a - b) for hermitian a, b.
Real trace_distance(const Matrix& a, const Matrix& b);

// Uhlmann fidelity F(rho, sigma) = || sqrt(rho) sqrt(sigma) ||_1, in [0, 1].
Real fidelity(const Matrix& rho, const Matrix& sigma);

// ---- Standard states -------------------------------------------------------

Matrix maximally_mixed(Index d);

// (1/sqrt(d)) sum_i |ii>, a vector on a d*d-dimensional space.
Vector maximally_entangled(Index d);

// Projector |v><v| of a (not necessarily normalized) vector.
Matrix projector(const Vector& v);

// Spectral purification of rho on S (x) R with |R| = |S|; eigenvector phases
// are canonicalized so the output is a deterministic function of rho.
Vector purify(const Matrix& rho);

// ---- Iterative top eigenpair ----------------------------------------------

struct TopEig {
  Real value = 0;      // Rayleigh quotient of `vector`
  Vector vector;       // unit-norm approximate top eigenvector
  Real residual = 0;   // ||A v - value * v||
  int iterations = 0;  // total matrix applications
  bool converged = false;
};

// Largest eigenvalue and eigenvector of a hermitian operator given only as a
// matrix-vector product, via restarted Lanczos with full reorthogonalization.
// Intended for operators whose top eigenvalue is also the largest in absolute
// value (e.g. PSD operators). Deterministic for a fixed seed.
TopEig top_eigenpair(const std::function<Vector(const Vector&)>& apply,
                     Index n, Real tol = 1e-11, int max_apply = 4000,
                     std::uint64_t seed = 12345);

// ---- Random matrices -------------------------------------------------------

// Matrix with i.i.d. standard complex normal entries (drawn column-major).
Matrix ginibre(RngStream& rng, Index rows, Index cols);

// Haar-distributed unitary: QR of a Ginibre matrix with the phases of the
// R diagonal folded into Q.
Matrix haar_unitary(RngStream& rng, Index d);

// Haar-random isometry V: C^from_d -> C^to_d with V^dagger V = identity.
Matrix random_isometry(RngStream& rng, Index from_d, Index to_d);

// Random full-rank state rho = G G^dagger / tr (Hilbert-Schmidt ensemble).
Matrix random_density(RngStream& rng, Index d);

// Haar-random pure state vector.
Vector random_state(RngStream& rng, Index d);

}  // namespace haarlab
