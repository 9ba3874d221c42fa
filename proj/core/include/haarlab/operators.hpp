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

#include <string>
#include <vector>

#include "haarlab/types.hpp"

namespace haarlab {

// Largest entry of |M - M^dagger|; zero iff M is exactly hermitian.
Real herm_violation(const Matrix& m);

// Most negative eigenvalue deficit: max(0, -lambda_min(M)) for hermitian M.
Real psd_violation(const Matrix& m);

void require_square(const Matrix& m, const std::string& what);
void require_hermitian(const Matrix& m, Real tol, const std::string& what);
void require_unitary(const Matrix& m, Real tol, const std::string& what);

// Quantum state: validates hermiticity, positivity (eigenvalues >= -tol) and
// unit trace on construction, then stores the symmetrized matrix.
class DensityMatrix {
 public:
  explicit DensityMatrix(const Matrix& rho, Real tol = kOpTol);

  const Matrix& matrix() const { return rho_; }
  Index dim() const { return rho_.rows(); }

 private:
  Matrix rho_;
};

// Measurement: validates that every element is hermitian PSD and that the
// elements sum to the identity.
class Povm {
 public:
  explicit Povm(std::vector<Matrix> elements, Real tol = kOpTol);

  int num_outcomes() const { return static_cast<int>(elements_.size()); }
  Index dim() const { return elements_.empty() ? 0 : elements_[0].rows(); }
  const Matrix& element(int i) const { return elements_.at(static_cast<std::size_t>(i)); }
  const std::vector<Matrix>& elements() const { return elements_; }

 private:
  std::vector<Matrix> elements_;
};

}  // namespace haarlab
