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

#include "haarlab/types.hpp"

namespace haarlab {

// Two-sided enclosure of an SDP optimum with feasible certificates for both
// sides. `lower <= optimum <= upper` holds whenever the certificates pass
// verify_dominance_certificates, independently of how they were produced.
struct CertifiedInterval {
  Real lower = 0;
  Real upper = 0;
  Matrix primal;  // feasible Y on S:    Y (x) 1_R >= M, upper = tr Y
  Matrix dual;    // feasible X on S(x)R: X >= 0, Tr_R X = 1_S, lower = tr(M X)
  Real gap = 0;   // upper - lower
  bool converged = false;  // width target reached before the iteration cap

  Real width() const { return upper - lower; }
  Real midpoint() const { return 0.5 * (lower + upper); }
};

struct DominanceOptions {
  Real width_target = 1e-6;  // absolute enclosure width to aim for
  Real feas_tol = 1e-8;      // certificate re-verification tolerance
  int max_outer = 48;        // barrier-parameter increases
  int max_inner = 64;        // Newton steps per barrier stage
};

// Minimal dominating trace:
//
//   minimize  tr Y   over hermitian Y on S   subject to   Y (x) 1_R >= M,
//
// where M is hermitian on S (x) R and S is the FIRST (slowest) register.
// The dual reads: maximize tr(M X) over X >= 0 with Tr_R X = 1_S.
//
// Both the conditional min-entropy program (after permuting rho_AB to B (x) A)
// and the cloning see-saw channel step are instances of this form.
//
// Implementation: log-barrier path following with damped Newton steps on Y.
// The dual iterate is recovered from the barrier stationarity X ~ Z^{-1}/t
// (Z = Y (x) 1 - M) and then made exactly feasible by a congruence with
// (Tr_R X)^{-1/2} (x) 1, so the returned interval is valid regardless of how
// well the path was centered. Non-convergence yields a wider but still
// certified interval with `converged = false`.
CertifiedInterval dominance_sdp(const Matrix& m, Index dim_s, Index dim_r,
                                const DominanceOptions& opts = {});

// Independent re-verification of a CertifiedInterval against the problem
// data. All residuals are >= 0 and must be <= the tolerance used (1e-8).
struct DominanceCheck {
  Real primal_infeas = 0;    // max(0, -lambda_min(Y (x) 1 - M))
  Real dual_infeas = 0;      // max(0, -lambda_min(X))
  Real marginal_gap = 0;     // max-abs entry of Tr_R X - 1_S
  Real upper_mismatch = 0;   // |tr Y - upper|
  Real lower_mismatch = 0;   // |tr(M X) - lower|

  bool passes(Real tol) const {
    return primal_infeas <= tol && dual_infeas <= tol && marginal_gap <= tol &&
           upper_mismatch <= tol && lower_mismatch <= tol;
  }
};

DominanceCheck verify_dominance_certificates(const Matrix& m, Index dim_s,
                                             Index dim_r,
                                             const CertifiedInterval& interval);

}  // namespace haarlab
