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

#include "haarlab/sdp.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "haarlab/linalg.hpp"
#include "haarlab/operators.hpp"

namespace haarlab {

namespace {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Real log_det_from_llt(const Eigen::LLT<Matrix>& llt) {
  Real acc = 0;
  const auto& l = llt.matrixLLT();
  for (Index i = 0; i < l.rows(); ++i) acc += std::log(l(i, i).real());
  return 2.0 * acc;
}

// Tr(A B) without forming the product.
Cplx product_trace(const Matrix& a, const Matrix& b) {
  return a.transpose().cwiseProduct(b).sum();
}

// Barrier Hessian of -log det(Y (x) 1 - M) as a matrix on vec(Y):
//   H[D] = Tr_R( W (D (x) 1_R) W ),  W = Z^{-1},
// whose coefficient on (D_kl -> H_ij) is Tr( W_blk(i,k) W_blk(l,j) ) with
// W_blk(i,k) the (i,k) r x r block of W. Column-major vec index: i + j*s.
Matrix barrier_hessian(const Matrix& w, Index s, Index r) {
  Matrix t(s * s, s * s);
  for (Index j = 0; j < s; ++j) {
    for (Index i = 0; i < s; ++i) {
      const Index row = i + j * s;
      for (Index l = 0; l < s; ++l) {
        for (Index k = 0; k < s; ++k) {
          const Index col = k + l * s;
          if (col < row) continue;
          const Cplx v = product_trace(w.block(i * r, k * r, r, r),
                                       w.block(l * r, j * r, r, r));
          t(row, col) = v;
          if (col != row) t(col, row) = std::conj(v);
        }
      }
    }
  }
  return t;
}

Matrix trace_out_second(const Matrix& m, Index s, Index r) {
  Matrix out(s, s);
  for (Index i = 0; i < s; ++i) {
    for (Index k = 0; k < s; ++k) {
      out(i, k) = m.block(i * r, k * r, r, r).trace();
    }
  }
  return out;
}

struct Centered {
  Matrix w;        // Z^{-1} at the accepted point
  Real marg_res;   // ||Tr_R(W)/t - 1||_F / sqrt(s)
};

// Damped Newton until the relative centering residual drops below tol (or a
// stall / iteration cap). Y is updated in place and kept strictly feasible.
Centered center(Matrix& y, const Matrix& mn, Index s, Index r, Real t,
                Real tol, int max_inner) {
  const Index n = s * r;
  const Matrix id_n = Matrix::Identity(n, n);
  const Matrix id_s = Matrix::Identity(s, s);

  Matrix w;
  Real marg_res = 0;
  Real prev_res = -1;
  for (int it = 0;; ++it) {
    Matrix z = kron(y, Matrix::Identity(r, r)) - mn;
    Eigen::LLT<Matrix> llt(z);
    if (llt.info() != Eigen::Success) {
      throw std::logic_error("dominance_sdp: interior point left the cone");
    }
    w = hermitize(llt.solve(id_n));
    const Matrix pt = hermitize(trace_out_second(w, s, r));
    const Matrix marg = pt / t - id_s;
    marg_res = marg.norm() / std::sqrt(static_cast<Real>(s));
    if (marg_res <= tol || it >= max_inner) break;
    // Quadratic-zone stall: residual no longer contracting, more steps are
    // round-off churn.
    if (prev_res >= 0 && marg_res > 0.7 * prev_res && marg_res < 1e-6) break;
    prev_res = marg_res;

    const Matrix grad = t * id_s - pt;
    Matrix hess = barrier_hessian(w, s, r);
    const Real ridge = 1e-14 * hess.diagonal().real().maxCoeff();
    hess += ridge * Matrix::Identity(s * s, s * s);
    const Vector rhs = -vec(grad);
    Eigen::LDLT<Matrix> ldlt(hess);
    Matrix dir = hermitize(unvec(ldlt.solve(rhs), s, s));
    const Real dec = -product_trace(grad, dir).real();
    if (!(dec > 0) || !std::isfinite(dec)) break;

    const Real f0 = t * y.trace().real() - log_det_from_llt(llt);
    Real alpha = 1.0;
    bool accepted = false;
    for (int ls = 0; ls < 60; ++ls) {
      const Matrix y_try = hermitize(y + alpha * dir);
      const Matrix z_try = kron(y_try, Matrix::Identity(r, r)) - mn;
      Eigen::LLT<Matrix> llt_try(z_try);
      if (llt_try.info() == Eigen::Success) {
        const Real f1 = t * y_try.trace().real() - log_det_from_llt(llt_try);
        if (f1 <= f0 - 0.25 * alpha * dec) {
          y = y_try;
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
      if (alpha < 1e-13) break;
    }
    if (!accepted) break;
  }
  return {w, marg_res};
}

// Exactly feasible dual point from the centering residue W/t: congruence by
// (Tr_R X)^{-1/2} (x) 1 restores the marginal, then a small mix toward the
// strictly feasible point 1/r repairs any round-off negative eigenvalue.
Matrix feasible_dual(const Matrix& w, Real t, Index s, Index r) {
  const Index n = s * r;
  Matrix x = hermitize(w / t);
  const Matrix d = hermitize(trace_out_second(x, s, r));
  const EigResult de = herm_eig(d);
  Matrix g = Matrix::Zero(s, s);
  for (Index i = 0; i < s; ++i) {
    const Real lam = std::max(de.values[i], 1e-300);
    g += (1.0 / std::sqrt(lam)) * de.vectors.col(i) * de.vectors.col(i).adjoint();
  }
  const Matrix gr = kron(g, Matrix::Identity(r, r));
  x = hermitize(gr * x * gr);

  const Real lam_min = herm_eig(x).values[n - 1];
  if (lam_min < 0) {
    const Real scale = -lam_min * static_cast<Real>(r);
    const Real theta = std::min(1.0, 1.000001 * scale / (1.0 + scale));
    x = hermitize((1.0 - theta) * x +
                  (theta / static_cast<Real>(r)) * Matrix::Identity(n, n));
  }
  return x;
}

}  // namespace

CertifiedInterval dominance_sdp(const Matrix& m, Index dim_s, Index dim_r,
                                const DominanceOptions& opts) {
  if (dim_s < 1 || dim_r < 1) {
    throw std::invalid_argument("dominance_sdp: register dims must be >= 1");
  }
  const Index n = dim_s * dim_r;
  if (m.rows() != n || m.cols() != n) {
    throw std::invalid_argument("dominance_sdp: operator dim != dim_s * dim_r");
  }
  if (n > 4096) {
    throw std::invalid_argument("dominance_sdp: total dimension above 4096");
  }
  require_hermitian(m, 1e-9, "dominance_sdp operand");

  const Index s = dim_s;
  const Index r = dim_r;
  const Real scale = std::max(1.0, op_norm(m));
  const Matrix mn = hermitize(m) / scale;

  // ||Mn|| <= 1, so 2 * identity is strictly feasible with margin >= 1.
  Matrix y = 2.0 * Matrix::Identity(s, s);

  const Real width_n = std::max(opts.width_target / scale, 1e-13);
  const Real t_cap = 1e13;
  const Real t_final =
      std::min(4.0 * static_cast<Real>(n) / width_n, t_cap);
  const Real mu = 20.0;

  CertifiedInterval best;
  bool have_best = false;
  Real t = 1.0;
  int stalls = 0;
  for (int outer = 0; outer < opts.max_outer; ++outer) {
    const bool final_stage = t >= t_final;
    const Real tol = final_stage ? 1e-10 : 1e-2;
    const Centered c = center(y, mn, s, r, t, tol, opts.max_inner);

    if (final_stage) {
      const Matrix x = feasible_dual(c.w, t, s, r);
      CertifiedInterval cur;
      cur.primal = scale * y;
      cur.dual = x;
      cur.upper = scale * y.trace().real();
      cur.lower = scale * product_trace(mn, x).real();
      cur.gap = cur.upper - cur.lower;
      cur.converged = cur.gap <= opts.width_target;
      if (have_best && cur.gap >= 0.9 * best.gap) {
        ++stalls;
      } else {
        stalls = 0;
      }
      if (!have_best || cur.gap < best.gap) {
        best = cur;
        have_best = true;
      }
      if (best.converged || stalls >= 2) return best;
    }
    t = std::min(t * mu, t_cap);
  }

  if (!have_best) {
    // Iteration cap hit before the final stage: certify whatever we hold.
    const Centered c = center(y, mn, s, r, t, 1e-10, opts.max_inner);
    const Matrix x = feasible_dual(c.w, t, s, r);
    best.primal = scale * y;
    best.dual = x;
    best.upper = scale * y.trace().real();
    best.lower = scale * product_trace(mn, x).real();
    best.gap = best.upper - best.lower;
    best.converged = best.gap <= opts.width_target;
  }
  return best;
}

DominanceCheck verify_dominance_certificates(const Matrix& m, Index dim_s,
                                             Index dim_r,
                                             const CertifiedInterval& interval) {
  const Index n = dim_s * dim_r;
  if (m.rows() != n || m.cols() != n || interval.primal.rows() != dim_s ||
      interval.dual.rows() != n) {
    throw std::invalid_argument("verify_dominance_certificates: dim mismatch");
  }
  DominanceCheck check;
  const Matrix z =
      kron(interval.primal, Matrix::Identity(dim_r, dim_r)) - hermitize(m);
  check.primal_infeas = std::max(0.0, -herm_eig(z).values[n - 1]);
  check.dual_infeas = std::max(0.0, -herm_eig(hermitize(interval.dual)).values[n - 1]);
  const Matrix marg = trace_out_second(interval.dual, dim_s, dim_r) -
                      Matrix::Identity(dim_s, dim_s);
  check.marginal_gap = marg.cwiseAbs().maxCoeff();
  check.upper_mismatch = std::abs(interval.primal.trace().real() - interval.upper);
  check.lower_mismatch =
      std::abs(product_trace(hermitize(m), interval.dual).real() - interval.lower);
  return check;
}

}  // namespace haarlab
