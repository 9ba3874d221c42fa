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

#include "haarlab/schemes.hpp"

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

#include "haarlab/linalg.hpp"
#include "haarlab/operators.hpp"
#include "haarlab/parallel.hpp"

namespace haarlab {

namespace {

// Tr(A B) for matrices of equal shape, evaluated without forming the product.
Cplx product_trace(const Matrix& a, const Matrix& b) {
  return a.transpose().cwiseProduct(b).sum();
}

// Raw keyed measurement probability Tr(U Pi U^dag rho), real part.
Real keyed_probability(const Matrix& key, const Matrix& pi, const Matrix& rho) {
  const Matrix rotated = key.adjoint() * rho * key;
  return product_trace(pi, rotated).real();
}

struct KeyChecks {
  Real overlap;
  Real rt0;
  Real rt1;
};

KeyChecks check_one_key(const Qecm& q, const Matrix& key) {
  const Matrix sigma0 = q.encrypt(key, 0);
  const Matrix sigma1 = q.encrypt(key, 1);
  KeyChecks c;
  c.overlap = std::abs(product_trace(sigma0, sigma1));
  c.rt0 = keyed_probability(key, q.message_projector(0), sigma0);
  c.rt1 = keyed_probability(key, q.message_projector(1), sigma1);
  return c;
}

void fold_key_into_report(CorrectnessReport& report, std::size_t key_index,
                          const KeyChecks& c) {
  report.max_overlap = std::max(report.max_overlap, c.overlap);
  report.min_round_trip = std::min(report.min_round_trip, std::min(c.rt0, c.rt1));
  if (c.overlap > report.tol || c.rt0 < 1.0 - report.tol ||
      c.rt1 < 1.0 - report.tol) {
    report.violations.push_back({key_index, c.overlap, c.rt0, c.rt1});
  }
  ++report.keys_tested;
}

Real completeness_gap_of(const Qecm& q) {
  const Index d = q.dim();
  Matrix gap = q.message_projector(0) + q.message_projector(1) -
               Matrix::Identity(d, d);
  return gap.cwiseAbs().maxCoeff();
}

}  // namespace

DecryptionOutcome::DecryptionOutcome(Real p0_in, Real p1_in)
    : p0(p0_in), p1(p1_in) {
  constexpr Real tol = 1e-10;
  if (!(p0 >= -tol && p0 <= 1.0 + tol && p1 >= -tol && p1 <= 1.0 + tol)) {
    throw std::invalid_argument("DecryptionOutcome: probability out of [0,1]");
  }
  if (std::abs(p0 + p1 - 1.0) > tol) {
    throw std::invalid_argument("DecryptionOutcome: probabilities must sum to 1");
  }
}

Qecm Qecm::haar(Index d) { return from_ensemble(UnitaryEnsemble::haar(d)); }

Qecm Qecm::from_ensemble(UnitaryEnsemble ensemble) {
  return Qecm(std::move(ensemble), /*validate=*/true);
}

Qecm::Qecm(UnitaryEnsemble ensemble, bool validate)
    : ensemble_(std::move(ensemble)), d_(ensemble_.dim()) {
  if (validate) {
    if (d_ < 2 || d_ % 2 != 0) {
      throw std::invalid_argument("Qecm: key dimension must be even and >= 2");
    }
  }
  const Index half = d_ / 2;
  pi_[0] = Matrix::Zero(d_, d_);
  pi_[0].topLeftCorner(half, half) = Matrix::Identity(half, half);
  pi_[1] = Matrix::Identity(d_, d_) - pi_[0];
}

const Matrix& Qecm::message_projector(int bit) const {
  if (bit != 0 && bit != 1) {
    throw std::invalid_argument("Qecm: bit must be 0 or 1");
  }
  return pi_[bit];
}

Qecm Qecm::with_projectors_unchecked(Matrix pi0, Matrix pi1) const {
  Qecm q(ensemble_, /*validate=*/false);
  q.pi_[0] = std::move(pi0);
  q.pi_[1] = std::move(pi1);
  return q;
}

Matrix Qecm::encrypt(const Matrix& key, int bit) const {
  require_unitary(key, kOpTol, "Qecm::encrypt key");
  if (key.rows() != d_) {
    throw std::invalid_argument("Qecm::encrypt: key dimension mismatch");
  }
  const Matrix& pi = message_projector(bit);
  return (2.0 / static_cast<Real>(d_)) * (key * pi * key.adjoint());
}

DecryptionOutcome Qecm::decrypt(const Matrix& key, const Matrix& state) const {
  require_unitary(key, kOpTol, "Qecm::decrypt key");
  if (key.rows() != d_ || state.rows() != d_ || state.cols() != d_) {
    throw std::invalid_argument("Qecm::decrypt: dimension mismatch");
  }
  require_hermitian(state, 1e-8, "Qecm::decrypt state");
  const Matrix rotated = key.adjoint() * state * key;
  const Real p0 = product_trace(pi_[0], rotated).real();
  const Real p1 = product_trace(pi_[1], rotated).real();
  return DecryptionOutcome(p0, p1);
}

std::string Qecm::descriptor() const {
  return "qecm ensemble=" + ensemble_.label() + " dim=" + std::to_string(d_);
}

CorrectnessReport verify_correctness(const Qecm& q, Real tol) {
  const UnitaryEnsemble& e = q.ensemble();
  if (!e.finite() || e.factored()) {
    throw std::invalid_argument(
        "verify_correctness: exhaustive check needs a materialized finite "
        "ensemble; use the sampled overload");
  }
  CorrectnessReport report;
  report.tol = tol;
  report.completeness_gap = completeness_gap_of(q);
  for (std::size_t k = 0; k < e.size(); ++k) {
    fold_key_into_report(report, k, check_one_key(q, e.element(k)));
  }
  return report;
}

CorrectnessReport verify_correctness(const Qecm& q, std::uint64_t num_keys,
                                     RngStream& rng, Real tol) {
  CorrectnessReport report;
  report.tol = tol;
  report.completeness_gap = completeness_gap_of(q);
  const std::uint64_t master = rng.raw();
  for (std::uint64_t k = 0; k < num_keys; ++k) {
    RngStream key_rng = RngStream::derive(master, k);
    fold_key_into_report(report, static_cast<std::size_t>(k),
                         check_one_key(q, q.ensemble().sample(key_rng)));
  }
  return report;
}

MixingReport key_averaged_ciphertext(const Qecm& q, int bit) {
  const UnitaryEnsemble& e = q.ensemble();
  if (!e.finite() || e.factored()) {
    throw std::invalid_argument(
        "key_averaged_ciphertext: exhaustive average needs a materialized "
        "finite ensemble; use the sampled overload");
  }
  const Index d = q.dim();
  Matrix sum = Matrix::Zero(d, d);
  for (std::size_t k = 0; k < e.size(); ++k) {
    sum += q.encrypt(e.element(k), bit);
  }
  MixingReport report;
  report.keys_used = e.size();
  report.exhaustive = true;
  report.trace_distance =
      trace_distance(sum / static_cast<Real>(e.size()), maximally_mixed(d));
  return report;
}

MixingReport key_averaged_ciphertext(const Qecm& q, int bit,
                                     std::uint64_t samples, RngStream& rng,
                                     int threads) {
  if (samples == 0) {
    throw std::invalid_argument("key_averaged_ciphertext: samples must be >= 1");
  }
  const Index d = q.dim();

  struct State {
    Matrix sum;
    Real frob_sq = 0;
    explicit State(Index dim) : sum(Matrix::Zero(dim, dim)) {}
    State() = default;
  };
  const std::uint64_t master = rng.raw();
  State init(d);
  State total = run_blocked(
      static_cast<std::size_t>(samples), init,
      [&](State& st, std::size_t i) {
        RngStream key_rng = RngStream::derive(master, i);
        const Matrix sigma = q.encrypt(q.ensemble().sample(key_rng), bit);
        st.sum += sigma;
        st.frob_sq += sigma.squaredNorm();
      },
      [](State& into, const State& from) {
        into.sum += from.sum;
        into.frob_sq += from.frob_sq;
      },
      threads);

  const Real n = static_cast<Real>(samples);
  const Matrix mean = total.sum / n;
  const Real total_var = std::max(total.frob_sq / n - mean.squaredNorm(), 0.0);

  MixingReport report;
  report.keys_used = samples;
  report.exhaustive = false;
  report.trace_distance = trace_distance(mean, maximally_mixed(d));
  report.stderr_bound = std::sqrt(static_cast<Real>(d) * total_var / n);
  return report;
}

}  // namespace haarlab
