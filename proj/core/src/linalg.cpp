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

#include "haarlab/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "haarlab/operators.hpp"

namespace haarlab {

namespace {

// Row/column strides of a multi-register space; first register is slowest.
std::vector<Index> strides_of(const std::vector<Index>& dims) {
  std::vector<Index> s(dims.size());
  Index acc = 1;
  for (std::size_t i = dims.size(); i-- > 0;) {
    s[i] = acc;
    acc *= dims[i];
  }
  return s;
}

Index total_of(const std::vector<Index>& dims) {
  Index d = 1;
  for (Index di : dims) d *= di;
  return d;
}

}  // namespace

Matrix kron(const Matrix& a, const Matrix& b) {
  Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    }
  }
  return out;
}

Matrix tensor(const std::vector<Matrix>& factors) {
  require(!factors.empty(), "tensor: need at least one factor");
  Matrix out = factors[0];
  for (std::size_t i = 1; i < factors.size(); ++i) out = kron(out, factors[i]);
  return out;
}

Matrix partial_trace(const Matrix& m, const std::vector<Index>& dims,
                     const std::vector<int>& traced) {
  const Index total = total_of(dims);
  require(m.rows() == total && m.cols() == total,
          "partial_trace: matrix size does not match register dimensions");
  std::vector<bool> is_traced(dims.size(), false);
  for (int t : traced) {
    require(t >= 0 && t < static_cast<int>(dims.size()), "partial_trace: register index out of range");
    require(!is_traced[static_cast<std::size_t>(t)], "partial_trace: register listed twice");
    is_traced[static_cast<std::size_t>(t)] = true;
  }

  std::vector<Index> keep_dims, traced_dims;
  std::vector<Index> keep_pos, traced_pos;
  for (std::size_t i = 0; i < dims.size(); ++i) {
    if (is_traced[i]) {
      traced_dims.push_back(dims[i]);
      traced_pos.push_back(static_cast<Index>(i));
    } else {
      keep_dims.push_back(dims[i]);
      keep_pos.push_back(static_cast<Index>(i));
    }
  }
  const std::vector<Index> strides = strides_of(dims);
  const Index keep_total = total_of(keep_dims);
  const Index traced_total = total_of(traced_dims);

  // Flat offset of each kept (resp. traced) multi-index within the full space.
  auto offsets = [&](const std::vector<Index>& sub_dims, const std::vector<Index>& pos) {
    const Index n = total_of(sub_dims);
    std::vector<Index> off(static_cast<std::size_t>(n), 0);
    for (Index flat = 0; flat < n; ++flat) {
      Index rest = flat, o = 0;
      for (std::size_t i = sub_dims.size(); i-- > 0;) {
        const Index digit = rest % sub_dims[i];
        rest /= sub_dims[i];
        o += digit * strides[static_cast<std::size_t>(pos[i])];
      }
      off[static_cast<std::size_t>(flat)] = o;
    }
    return off;
  };
  const std::vector<Index> keep_off = offsets(keep_dims, keep_pos);
  const std::vector<Index> traced_off = offsets(traced_dims, traced_pos);

  Matrix out = Matrix::Zero(keep_total, keep_total);
  for (Index r = 0; r < keep_total; ++r) {
    for (Index c = 0; c < keep_total; ++c) {
      Cplx acc = 0;
      for (Index t = 0; t < traced_total; ++t) {
        const Index o = traced_off[static_cast<std::size_t>(t)];
        acc += m(keep_off[static_cast<std::size_t>(r)] + o,
                 keep_off[static_cast<std::size_t>(c)] + o);
      }
      out(r, c) = acc;
    }
  }
  return out;
}

Matrix partial_trace(const Matrix& m, const RegisterLayout& layout,
                     const std::vector<std::string>& traced_names) {
  std::vector<int> traced;
  for (const auto& name : traced_names) {
    const int i = layout.index_of(name);
    require(i >= 0, "partial_trace: no register named '" + name + "'");
    traced.push_back(i);
  }
  return partial_trace(m, layout.dims(), traced);
}

Matrix permute_registers(const Matrix& m, const std::vector<Index>& dims,
                         const std::vector<int>& new_order) {
  const Index total = total_of(dims);
  require(m.rows() == total && m.cols() == total,
          "permute_registers: matrix size does not match register dimensions");
  require(new_order.size() == dims.size(), "permute_registers: order list has wrong length");
  std::vector<bool> seen(dims.size(), false);
  std::vector<Index> new_dims(dims.size());
  for (std::size_t t = 0; t < new_order.size(); ++t) {
    const int o = new_order[t];
    require(o >= 0 && o < static_cast<int>(dims.size()), "permute_registers: index out of range");
    require(!seen[static_cast<std::size_t>(o)], "permute_registers: index listed twice");
    seen[static_cast<std::size_t>(o)] = true;
    new_dims[t] = dims[static_cast<std::size_t>(o)];
  }
  const std::vector<Index> old_strides = strides_of(dims);
  const std::vector<Index> new_strides = strides_of(new_dims);

  // map[old_flat] = new_flat
  std::vector<Index> map(static_cast<std::size_t>(total));
  std::vector<Index> digits(dims.size());
  for (Index flat = 0; flat < total; ++flat) {
    Index rest = flat;
    for (std::size_t i = dims.size(); i-- > 0;) {
      digits[i] = rest % dims[i];
      rest /= dims[i];
    }
    Index nf = 0;
    for (std::size_t t = 0; t < new_order.size(); ++t) {
      nf += digits[static_cast<std::size_t>(new_order[t])] * new_strides[t];
    }
    map[static_cast<std::size_t>(flat)] = nf;
  }

  Matrix out(total, total);
  for (Index r = 0; r < total; ++r) {
    for (Index c = 0; c < total; ++c) {
      out(map[static_cast<std::size_t>(r)], map[static_cast<std::size_t>(c)]) = m(r, c);
    }
  }
  return out;
}

Vector vec(const Matrix& m) {
  return Eigen::Map<const Vector>(m.data(), m.size());
}

Matrix unvec(const Vector& v, Index rows, Index cols) {
  require(v.size() == rows * cols, "unvec: size mismatch");
  return Eigen::Map<const Matrix>(v.data(), rows, cols);
}

EigResult herm_eig(const Matrix& m) {
  require_square(m, "herm_eig");
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (m + m.adjoint()));
  require(es.info() == Eigen::Success, "herm_eig: eigensolver failed");
  const Index d = m.rows();
  EigResult out;
  out.values = RealVector(d);
  out.vectors = Matrix(d, d);
  // SelfAdjointEigenSolver sorts ascending; flip to descending.
  for (Index i = 0; i < d; ++i) {
    out.values(i) = es.eigenvalues()(d - 1 - i);
    out.vectors.col(i) = es.eigenvectors().col(d - 1 - i);
  }
  return out;
}

Matrix sqrt_psd(const Matrix& m) {
  const EigResult e = herm_eig(m);
  RealVector s = e.values.cwiseMax(0.0).cwiseSqrt();
  return e.vectors * s.asDiagonal() * e.vectors.adjoint();
}

Real op_norm(const Matrix& m) {
  if (m.size() == 0) return 0.0;
  Eigen::JacobiSVD<Matrix> svd(m);
  return svd.singularValues()(0);
}

Real trace_distance(const Matrix& a, const Matrix& b) {
  require(a.rows() == b.rows() && a.cols() == b.cols(), "trace_distance: shape mismatch");
  const EigResult e = herm_eig(a - b);
  return 0.5 * e.values.cwiseAbs().sum();
}

Real fidelity(const Matrix& rho, const Matrix& sigma) {
  const Matrix s = sqrt_psd(rho);
  const EigResult e = herm_eig(s * sigma * s);
  Real f = 0.0;
  for (Index i = 0; i < e.values.size(); ++i) f += std::sqrt(std::max(e.values(i), 0.0));
  return std::min(f, 1.0 + 1e-12);
}

Matrix maximally_mixed(Index d) {
  return Matrix::Identity(d, d) / static_cast<Real>(d);
}

Vector maximally_entangled(Index d) {
  Vector v = Vector::Zero(d * d);
  const Real a = 1.0 / std::sqrt(static_cast<Real>(d));
  for (Index i = 0; i < d; ++i) v(i * d + i) = a;
  return v;
}

Matrix projector(const Vector& v) { return v * v.adjoint(); }

Vector purify(const Matrix& rho) {
  const EigResult e = herm_eig(rho);
  const Index d = rho.rows();
  Vector psi = Vector::Zero(d * d);
  for (Index i = 0; i < d; ++i) {
    const Real li = std::max(e.values(i), 0.0);
    if (li == 0.0) continue;
    Vector v = e.vectors.col(i);
    // Canonical phase: the largest-modulus entry is made real positive.
    Index jmax = 0;
    Real best = -1.0;
    for (Index j = 0; j < d; ++j) {
      const Real a = std::abs(v(j));
      if (a > best + 1e-15) {
        best = a;
        jmax = j;
      }
    }
    if (best > 0) v *= std::conj(v(jmax)) / std::abs(v(jmax));
    for (Index j = 0; j < d; ++j) psi(j * d + i) = std::sqrt(li) * v(j);
  }
  return psi;
}

Matrix ginibre(RngStream& rng, Index rows, Index cols) {
  Matrix g(rows, cols);
  for (Index j = 0; j < cols; ++j) {
    for (Index i = 0; i < rows; ++i) g(i, j) = rng.gaussian_cplx();
  }
  return g;
}

Matrix haar_unitary(RngStream& rng, Index d) {
  const Matrix g = ginibre(rng, d, d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ();
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  // Fold the phases of diag(R) into Q; this makes the distribution exactly
  // Haar rather than QR-convention dependent.
  for (Index i = 0; i < d; ++i) {
    const Cplx rii = r(i, i);
    const Real a = std::abs(rii);
    q.col(i) *= (a > 0) ? rii / a : Cplx(1, 0);
  }
  return q;
}

Matrix random_isometry(RngStream& rng, Index from_d, Index to_d) {
  require(to_d >= from_d, "random_isometry: target dimension must be >= source dimension");
  const Matrix g = ginibre(rng, to_d, from_d);
  Eigen::HouseholderQR<Matrix> qr(g);
  Matrix q = qr.householderQ() * Matrix::Identity(to_d, from_d);
  const Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Index i = 0; i < from_d; ++i) {
    const Cplx rii = r(i, i);
    const Real a = std::abs(rii);
    q.col(i) *= (a > 0) ? rii / a : Cplx(1, 0);
  }
  return q;
}

Matrix random_density(RngStream& rng, Index d) {
  const Matrix g = ginibre(rng, d, d);
  Matrix rho = g * g.adjoint();
  rho /= rho.trace().real();
  return 0.5 * (rho + rho.adjoint());
}

Vector random_state(RngStream& rng, Index d) {
  Vector v(d);
  for (Index i = 0; i < d; ++i) v(i) = rng.gaussian_cplx();
  return v / v.norm();
}

TopEig top_eigenpair(const std::function<Vector(const Vector&)>& apply,
                     Index n, Real tol, int max_apply, std::uint64_t seed) {
  if (n < 1) throw std::invalid_argument("top_eigenpair: dimension must be >= 1");
  RngStream rng(seed);
  Vector v(n);
  for (Index i = 0; i < n; ++i) v[i] = rng.gaussian_cplx();
  v.normalize();

  TopEig result;
  const int block = static_cast<int>(std::min<Index>(n, 96));
  // Thick-restarted Lanczos with full reorthogonalization: each cycle starts
  // from the leading Ritz vectors of the previous cycle plus the residual
  // direction, which keeps convergence going when the top of the spectrum
  // is clustered.
  std::vector<Vector> seeds;
  seeds.push_back(v);
  while (result.iterations < max_apply) {
    std::vector<Vector> basis;
    basis.reserve(static_cast<std::size_t>(block));
    for (const Vector& s : seeds) {
      Vector w = s;
      for (int pass = 0; pass < 2; ++pass) {
        for (const Vector& q : basis) w -= q.dot(w) * q;
      }
      const Real nn = w.norm();
      if (nn > 1e-10 && static_cast<int>(basis.size()) < block) {
        basis.push_back(w / nn);
      }
    }
    if (basis.empty()) break;  // seeds collapsed; keep the last estimate
    Matrix h = Matrix::Zero(block, block);
    int m = 0;
    for (; m < static_cast<int>(basis.size()) && result.iterations < max_apply;
         ++m) {
      Vector w = apply(basis[static_cast<std::size_t>(m)]);
      ++result.iterations;
      const Real w0 = w.norm();
      for (int pass = 0; pass < 2; ++pass) {
        for (std::size_t j = 0; j < basis.size(); ++j) {
          const Cplx c = basis[j].dot(w);
          w -= c * basis[j];
          if (pass == 0) h(static_cast<Index>(j), m) += c;
        }
      }
      const Real beta = w.norm();
      if (static_cast<int>(basis.size()) < block &&
          beta > 1e-14 * std::max(1.0, w0)) {
        // The coupling of the new direction into the processed column; the
        // conjugate entry is recorded when that column itself is processed.
        h(static_cast<Index>(basis.size()), m) = beta;
        basis.push_back(w / beta);
      }
    }
    if (m == 0) break;  // application budget exhausted before any progress
    const Matrix hm =
        0.5 * (h.topLeftCorner(m, m) + h.topLeftCorner(m, m).adjoint());
    const EigResult ritz = herm_eig(hm);
    const int keep = std::min(8, m);
    std::vector<Vector> next;
    next.reserve(static_cast<std::size_t>(keep) + 1);
    for (int i = 0; i < keep; ++i) {
      Vector y = Vector::Zero(n);
      for (int j = 0; j < m; ++j) {
        y += ritz.vectors(j, i) * basis[static_cast<std::size_t>(j)];
      }
      y.normalize();
      next.push_back(std::move(y));
    }
    const Vector av = apply(next.front());
    ++result.iterations;
    const Real theta = next.front().dot(av).real();
    const Vector r = av - theta * next.front();
    const Real res = r.norm();
    result.value = theta;
    result.vector = next.front();
    result.residual = res;
    if (res <= tol * std::max(1.0, std::abs(theta))) {
      result.converged = true;
      break;
    }
    if (res > 1e-14) next.push_back(r / res);
    seeds = std::move(next);
  }
  return result;
}

}  // namespace haarlab
