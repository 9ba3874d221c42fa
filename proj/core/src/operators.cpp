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

#include "haarlab/operators.hpp"

#include <cmath>
#include <limits>

namespace haarlab {

Real herm_violation(const Matrix& m) {
  if (m.rows() != m.cols()) return std::numeric_limits<Real>::infinity();
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

Real psd_violation(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  const Real lmin = es.eigenvalues().minCoeff();
  return lmin < 0 ? -lmin : 0.0;
}

void require_square(const Matrix& m, const std::string& what) {
  require(m.rows() == m.cols(), what + ": matrix must be square");
}

void require_hermitian(const Matrix& m, Real tol, const std::string& what) {
  require_square(m, what);
  require(herm_violation(m) <= tol, what + ": matrix is not hermitian within tolerance");
}

void require_unitary(const Matrix& m, Real tol, const std::string& what) {
  require_square(m, what);
  const Matrix g = m.adjoint() * m;
  const Real dev = (g - Matrix::Identity(m.rows(), m.cols())).cwiseAbs().maxCoeff();
  require(dev <= tol, what + ": matrix is not unitary within tolerance");
}

DensityMatrix::DensityMatrix(const Matrix& rho, Real tol) {
  require_hermitian(rho, tol, "DensityMatrix");
  rho_ = 0.5 * (rho + rho.adjoint());
  require(std::abs(rho_.trace().real() - 1.0) <= tol && std::abs(rho_.trace().imag()) <= tol,
          "DensityMatrix: trace must equal 1");
  require(psd_violation(rho_) <= tol, "DensityMatrix: matrix has a negative eigenvalue");
}

Povm::Povm(std::vector<Matrix> elements, Real tol) : elements_(std::move(elements)) {
  require(!elements_.empty(), "Povm: need at least one element");
  const Index d = elements_[0].rows();
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const std::string what = "Povm element " + std::to_string(i);
    require(elements_[i].rows() == d && elements_[i].cols() == d,
            what + ": inconsistent dimension");
    require_hermitian(elements_[i], tol, what);
    elements_[i] = 0.5 * (elements_[i] + elements_[i].adjoint());
    require(psd_violation(elements_[i]) <= tol, what + ": negative eigenvalue");
    sum += elements_[i];
  }
  const Real dev = (sum - Matrix::Identity(d, d)).cwiseAbs().maxCoeff();
  require(dev <= tol, "Povm: elements do not sum to the identity");
}

}  // namespace haarlab
