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

#include "haarlab/ensembles.hpp"

#include <cmath>
#include <cstring>
#include <deque>
#include <unordered_map>
#include <utility>

#include "haarlab/gf2.hpp"
#include "haarlab/linalg.hpp"
#include "haarlab/operators.hpp"
#include "haarlab/parallel.hpp"

namespace haarlab {

namespace {

// Quantized byte key of the phase-canonical form, used to identify unitaries
// modulo global phase. Entries of the finite groups handled here sit on a
// coarse discrete grid, so rounding at 1e-6 is collision-free while absorbing
// accumulated floating-point drift (~1e-12 per product).
std::string canonical_key(const Matrix& m) {
  const Matrix c = phase_canonical(m);
  std::string key;
  key.reserve(static_cast<std::size_t>(c.size()) * 16);
  for (Index col = 0; col < c.cols(); ++col) {
    for (Index row = 0; row < c.rows(); ++row) {
      const std::int64_t re = std::llround(c(row, col).real() * 1e6);
      const std::int64_t im = std::llround(c(row, col).imag() * 1e6);
      char buf[16];
      std::memcpy(buf, &re, 8);
      std::memcpy(buf + 8, &im, 8);
      key.append(buf, 16);
    }
  }
  return key;
}

Matrix hadamard2() {
  Matrix h(2, 2);
  const Real s = 1.0 / std::sqrt(2.0);
  h << Cplx(s, 0), Cplx(s, 0), Cplx(s, 0), Cplx(-s, 0);
  return h;
}

Matrix phase_gate2() {
  Matrix s = Matrix::Zero(2, 2);
  s(0, 0) = Cplx(1, 0);
  s(1, 1) = Cplx(0, 1);
  return s;
}

// CNOT on n qubits: target bit t flips when control bit c is set. Qubit j is
// bit j of the basis index.
Matrix cnot_matrix(int n, int control, int target) {
  const Index d = Index(1) << n;
  Matrix m = Matrix::Zero(d, d);
  for (Index v = 0; v < d; ++v) {
    const Index w = (v >> control) & 1 ? v ^ (Index(1) << target) : v;
    m(w, v) = Cplx(1, 0);
  }
  return m;
}

// Diagonal projector onto the first (x = 0) or last (x = 1) d/2 basis states.
// conjugated(U, x) = U Pi_x U^dag computed from the relevant column block.
Matrix conjugated_projector(const Matrix& u, int x) {
  const Index half = u.rows() / 2;
  const auto block = x == 0 ? u.leftCols(half) : u.rightCols(half);
  return block * block.adjoint();
}

Real trace_abs_pow(const Cplx& tr, int t) {
  const Real a2 = std::norm(tr);
  return t == 1 ? a2 : a2 * a2;
}

}  // namespace

Matrix sample_haar(RngStream& rng, Index d) { return haar_unitary(rng, d); }

Matrix phase_canonical(const Matrix& m) {
  for (Index col = 0; col < m.cols(); ++col) {
    for (Index row = 0; row < m.rows(); ++row) {
      const Cplx z = m(row, col);
      if (std::abs(z) > 1e-6) {
        return m * (std::conj(z) / std::abs(z));
      }
    }
  }
  return m;
}

// ---- UnitaryEnsemble ---------------------------------------------------------

UnitaryEnsemble UnitaryEnsemble::haar(Index d) {
  require(d >= 1, "haar ensemble: dimension must be >= 1");
  UnitaryEnsemble e;
  e.kind_ = Kind::Haar;
  e.d_ = d;
  e.label_ = "haar(" + std::to_string(d) + ")";
  e.conjugation_closed_ = true;  // the Haar measure is conjugation invariant
  return e;
}

UnitaryEnsemble UnitaryEnsemble::exact(std::vector<Matrix> elements,
                                       std::string label) {
  UnitaryEnsemble e;
  e.kind_ = Kind::ExactFinite;
  e.label_ = std::move(label);
  e.elements_ = std::move(elements);
  e.finish_materialized(/*expect_group=*/false);
  return e;
}

UnitaryEnsemble UnitaryEnsemble::clifford_group(int n_qubits) {
  require(n_qubits == 1 || n_qubits == 2,
          "clifford_group: exhaustive enumeration supports 1 or 2 qubits");
  const Matrix h = hadamard2();
  const Matrix s = phase_gate2();
  const Matrix id2 = Matrix::Identity(2, 2);
  std::vector<Matrix> gens;
  if (n_qubits == 1) {
    gens = {h, s};
  } else {
    gens = {kron(h, id2), kron(s, id2), kron(id2, h), kron(id2, s),
            cnot_matrix(2, 1, 0)};
  }
  const Index d = Index(1) << n_qubits;

  std::vector<Matrix> found;
  std::unordered_map<std::string, std::size_t> seen;
  std::deque<std::size_t> queue;
  found.push_back(phase_canonical(Matrix::Identity(d, d)));
  seen.emplace(canonical_key(found[0]), 0);
  queue.push_back(0);
  while (!queue.empty()) {
    const Matrix cur = found[queue.front()];
    queue.pop_front();
    for (const Matrix& g : gens) {
      Matrix next = phase_canonical(g * cur);
      std::string key = canonical_key(next);
      if (seen.emplace(std::move(key), found.size()).second) {
        queue.push_back(found.size());
        found.push_back(std::move(next));
      }
    }
  }
  const std::size_t expected = n_qubits == 1 ? 24 : 11520;
  require(found.size() == expected,
          "clifford_group: closure size mismatch (got " +
              std::to_string(found.size()) + ")");

  UnitaryEnsemble e;
  e.kind_ = Kind::ExactFinite;
  e.label_ = "clifford(" + std::to_string(n_qubits) + ")";
  e.elements_ = std::move(found);
  e.group_mod_phase_ = true;
  e.finish_materialized(/*expect_group=*/true);
  return e;
}

UnitaryEnsemble UnitaryEnsemble::pauli_group(int n_qubits) {
  require(n_qubits >= 1 && n_qubits <= 5, "pauli_group: need 1 <= n_qubits <= 5");
  const std::size_t count = std::size_t(1) << (2 * n_qubits);
  std::vector<Matrix> elements;
  elements.reserve(count);
  for (std::size_t a = 0; a < count; ++a) {
    elements.push_back(phase_canonical(pauli_matrix(n_qubits, BinVec(a))));
  }
  UnitaryEnsemble e;
  e.kind_ = Kind::ExactFinite;
  e.label_ = "pauli(" + std::to_string(n_qubits) + ")";
  e.elements_ = std::move(elements);
  e.group_mod_phase_ = true;
  e.finish_materialized(/*expect_group=*/true);
  return e;
}

UnitaryEnsemble UnitaryEnsemble::bb84() {
  UnitaryEnsemble e;
  e.kind_ = Kind::ExactFinite;
  e.label_ = "bb84";
  e.elements_ = {Matrix::Identity(2, 2), hadamard2()};
  e.group_mod_phase_ = true;  // {1, H} with H^2 = 1
  e.finish_materialized(/*expect_group=*/true);
  return e;
}

UnitaryEnsemble UnitaryEnsemble::symplectic_design(int m) {
  require(m >= 1 && m <= 4, "symplectic_design: need 1 <= m <= 4");
  const GF2m field(m);
  const std::vector<SL2Element> sl2 = enumerate_sl2(field);
  std::vector<Matrix> lifts;
  lifts.reserve(sl2.size());
  for (const SL2Element& s : sl2) {
    Matrix lift = phase_canonical(lift_symplectic(embed_sl2(field, s)));
    require_unitary(lift, 1e-10, "symplectic_design lift");
    lifts.push_back(std::move(lift));
  }
  const std::size_t num_paulis = std::size_t(1) << (2 * m);
  const Index d = Index(1) << m;

  UnitaryEnsemble e;
  e.kind_ = Kind::ExactFinite;
  e.label_ = "design(" + std::to_string(m) + ")";
  e.group_mod_phase_ = true;

  if (m <= 3) {
    std::vector<Matrix> elements;
    elements.reserve(num_paulis * lifts.size());
    Matrix scratch(d, d);
    for (const Matrix& lift : lifts) {
      for (std::size_t a = 0; a < num_paulis; ++a) {
        pauli_mult_left(m, BinVec(a), lift, scratch);
        elements.push_back(phase_canonical(scratch));
      }
    }
    e.elements_ = std::move(elements);
    e.finish_materialized(/*expect_group=*/true);
  } else {
    e.d_ = d;
    e.factored_ = true;
    e.fact_qubits_ = m;
    e.lifts_ = std::move(lifts);
    // Conjugation closure: conj(L) realizes the same symplectic action as L,
    // so conj(L) L^dag must be a Pauli up to phase; then
    // conj(sigma_a L) = phase * sigma_(a xor c) L stays in the set.
    bool closed = true;
    Matrix prod(d, d);
    for (const Matrix& lift : e.lifts_) {
      prod.noalias() = lift.conjugate() * lift.adjoint();
      bool pauli_found = false;
      for (std::size_t c = 0; c < num_paulis && !pauli_found; ++c) {
        const Cplx tr = pauli_mult_trace(m, BinVec(c), prod);
        if (std::abs(std::abs(tr) - Real(d)) < 1e-6) pauli_found = true;
      }
      if (!pauli_found) {
        closed = false;
        break;
      }
    }
    e.conjugation_closed_ = closed;
  }
  return e;
}

void UnitaryEnsemble::finish_materialized(bool expect_group) {
  require(!elements_.empty(), "finite ensemble: element list must be nonempty");
  d_ = elements_[0].rows();
  std::unordered_map<std::string, std::size_t> index;
  index.reserve(elements_.size() * 2);
  bool distinct = true;
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    require(elements_[i].rows() == d_ && elements_[i].cols() == d_,
            "finite ensemble: all elements must share one dimension");
    require_unitary(elements_[i], 1e-10, "finite ensemble element");
    if (!index.emplace(canonical_key(elements_[i]), i).second) distinct = false;
  }
  require(!expect_group || distinct,
          "finite ensemble: group enumeration produced duplicates");

  conjugation_closed_ = true;
  conj_perm_.assign(elements_.size(), 0);
  for (std::size_t i = 0; i < elements_.size(); ++i) {
    const auto it = index.find(canonical_key(elements_[i].conjugate()));
    if (it == index.end()) {
      conjugation_closed_ = false;
      conj_perm_.clear();
      break;
    }
    conj_perm_[i] = it->second;
  }
}

std::size_t UnitaryEnsemble::size() const {
  require(finite(), "size: Haar ensemble has no element count");
  if (factored_) {
    return lifts_.size() * (std::size_t(1) << (2 * fact_qubits_));
  }
  return elements_.size();
}

Matrix UnitaryEnsemble::element(std::size_t i) const {
  require(finite(), "element: Haar ensemble has no element list");
  require(i < size(), "element: index out of range");
  if (!factored_) return elements_[i];
  const std::size_t num_paulis = std::size_t(1) << (2 * fact_qubits_);
  Matrix out(d_, d_);
  pauli_mult_left(fact_qubits_, BinVec(i % num_paulis), lifts_[i / num_paulis],
                  out);
  return out;
}

Matrix UnitaryEnsemble::sample(RngStream& rng) const {
  if (kind_ == Kind::Haar) return sample_haar(rng, d_);
  return element(rng.uniform_u64(size()));
}

const std::vector<std::size_t>& UnitaryEnsemble::conjugation_permutation() const {
  require(finite() && !factored_,
          "conjugation_permutation: needs a materialized finite ensemble");
  require(conjugation_closed_,
          "conjugation_permutation: ensemble is not conjugation closed");
  return conj_perm_;
}

Matrix sample_clifford(int n_qubits, RngStream& rng) {
  require(n_qubits >= 1, "sample_clifford: need n_qubits >= 1");
  if (n_qubits == 1) {
    static const UnitaryEnsemble c1 = UnitaryEnsemble::clifford_group(1);
    return c1.sample(rng);
  }
  if (n_qubits == 2) {
    static const UnitaryEnsemble c2 = UnitaryEnsemble::clifford_group(2);
    return c2.sample(rng);
  }
  // Approximate uniformity: a long random word in the standard generators.
  // Not exactly uniform; adequate for sampling use at n >= 3.
  const Index d = Index(1) << n_qubits;
  std::vector<Matrix> gens;
  const Matrix h = hadamard2();
  const Matrix s = phase_gate2();
  for (int q = 0; q < n_qubits; ++q) {
    std::vector<Matrix> factors(static_cast<std::size_t>(n_qubits),
                                Matrix::Identity(2, 2));
    // tensor() lists the slowest axis first; qubit q is bit q of the index.
    factors[static_cast<std::size_t>(n_qubits - 1 - q)] = h;
    gens.push_back(tensor(factors));
    factors[static_cast<std::size_t>(n_qubits - 1 - q)] = s;
    gens.push_back(tensor(factors));
  }
  for (int c = 0; c < n_qubits; ++c) {
    for (int t = 0; t < n_qubits; ++t) {
      if (c != t) gens.push_back(cnot_matrix(n_qubits, c, t));
    }
  }
  Matrix acc = Matrix::Identity(d, d);
  const int word_length = 64 * n_qubits;
  for (int step = 0; step < word_length; ++step) {
    acc = gens[rng.uniform_u64(gens.size())] * acc;
  }
  return phase_canonical(acc);
}

// ---- Twirls and moments --------------------------------------------------------

Matrix twirl_second_order(const Matrix& t_op, Index d) {
  require(d >= 1, "twirl_second_order: dimension must be >= 1");
  require(t_op.rows() == d * d && t_op.cols() == d * d,
          "twirl_second_order: operator must act on a d^2-dimensional space");
  require(d >= 2, "twirl_second_order: formula needs d >= 2");
  const Vector phi = maximally_entangled(d);
  const Matrix proj = projector(phi);
  const Cplx phi_t = (phi.adjoint() * t_op * phi)(0, 0);
  const Cplx tr_pi_t = t_op.trace() - phi_t;
  const Matrix pi_op = Matrix::Identity(d * d, d * d) - proj;
  return (tr_pi_t / Real(d * d - 1)) * pi_op + phi_t * proj;
}

std::pair<Real, Real> moment_T_exact(int n, Index d) {
  require(n >= 1, "moment_T_exact: need n >= 1");
  require(d >= 2 && d % 2 == 0, "moment_T_exact: need even d >= 2");
  const Real mean = std::pow(0.5, n);
  const Real dd = Real(d) * Real(d);
  const Real base = 0.25 - 1.0 / (4.0 * (dd - 1.0));
  const Real second =
      std::pow(base, n) * (dd - 1.0) / dd + std::pow(0.5, n) / dd;
  return {mean, second};
}

namespace {

// T = (1/d) Tr(prod_i U_i Pi_{x_i} U_i^dag) for explicit unitaries.
Cplx moment_T_value(const std::vector<Matrix>& us, const std::vector<int>& xs,
                    Index d) {
  Matrix prod = Matrix::Identity(d, d);
  for (std::size_t i = 0; i < us.size(); ++i) {
    prod = prod * conjugated_projector(us[i], xs[i]);
  }
  return prod.trace() / Real(d);
}

void check_moment_args(int n, Index d, const std::vector<int>& outcomes,
                       const UnitaryEnsemble& ensemble) {
  require(n >= 1, "moment_T: need n >= 1");
  require(d >= 2 && d % 2 == 0, "moment_T: need even d >= 2");
  require(ensemble.dim() == d, "moment_T: ensemble dimension mismatch");
  require(outcomes.size() == static_cast<std::size_t>(n),
          "moment_T: need one outcome bit per factor");
  for (int x : outcomes) {
    require(x == 0 || x == 1, "moment_T: outcomes must be bits");
  }
}

struct MomentState {
  Accumulator re;
  Accumulator abs2;
};

}  // namespace

MomentReport moment_T_mc(int n, Index d, const std::vector<int>& outcomes,
                         const UnitaryEnsemble& ensemble, std::uint64_t samples,
                         RngStream& rng, int threads) {
  check_moment_args(n, d, outcomes, ensemble);
  require(samples >= 1, "moment_T_mc: need samples >= 1");
  const std::uint64_t master = rng.raw();

  const MomentState total = run_blocked(
      samples, MomentState{},
      [&](MomentState& st, std::size_t i) {
        RngStream stream = RngStream::derive(master, i);
        std::vector<Matrix> us;
        us.reserve(static_cast<std::size_t>(n));
        for (int k = 0; k < n; ++k) us.push_back(ensemble.sample(stream));
        const Cplx t = moment_T_value(us, outcomes, d);
        st.re.add(t.real());
        st.abs2.add(std::norm(t));
      },
      [](MomentState& a, const MomentState& b) {
        a.re.merge(b.re);
        a.abs2.merge(b.abs2);
      },
      threads);

  MomentReport report;
  report.n = n;
  report.d = d;
  report.outcomes = outcomes;
  const auto exact = moment_T_exact(n, d);
  report.mean_exact = exact.first;
  report.second_moment_exact = exact.second;
  report.mean_mc = total.re.mean();
  report.mean_stderr = total.re.stderr_mean();
  report.second_moment_mc = total.abs2.mean();
  report.second_moment_stderr = total.abs2.stderr_mean();
  report.samples = samples;
  return report;
}

std::pair<Real, Real> moment_T_exhaustive(int n, Index d,
                                          const std::vector<int>& outcomes,
                                          const UnitaryEnsemble& ensemble) {
  check_moment_args(n, d, outcomes, ensemble);
  require(n <= 2, "moment_T_exhaustive: higher moments use resampling instead");
  require(ensemble.finite() && !ensemble.factored(),
          "moment_T_exhaustive: needs a materialized finite ensemble");
  const std::size_t count = ensemble.size();
  Real mean = 0;
  Real second = 0;
  if (n == 1) {
    for (std::size_t i = 0; i < count; ++i) {
      const Cplx t = moment_T_value({ensemble.element(i)}, outcomes, d);
      mean += t.real();
      second += std::norm(t);
    }
    const Real norm = Real(count);
    return {mean / norm, second / norm};
  }
  // n == 2: precompute the conjugated projectors once per element.
  std::vector<Matrix> first(count), second_factor(count);
  for (std::size_t i = 0; i < count; ++i) {
    first[i] = conjugated_projector(ensemble.element(i), outcomes[0]);
    second_factor[i] = conjugated_projector(ensemble.element(i), outcomes[1]);
  }
  for (std::size_t i = 0; i < count; ++i) {
    for (std::size_t j = 0; j < count; ++j) {
      // Tr(F S) without forming the product.
      const Cplx t =
          first[i].transpose().cwiseProduct(second_factor[j]).sum() / Real(d);
      mean += t.real();
      second += std::norm(t);
    }
  }
  const Real norm = Real(count) * Real(count);
  return {mean / norm, second / norm};
}

// ---- Frame potential and design checks ----------------------------------------

Real frame_potential(const UnitaryEnsemble& ensemble, int t) {
  require(t == 1 || t == 2, "frame_potential: t must be 1 or 2");
  require(ensemble.finite(),
          "frame_potential: Haar ensemble rejected (use moment comparison)");
  if (!ensemble.group_mod_phase()) return frame_potential_pairwise(ensemble, t);

  // Group modulo phase: (1/|V|^2) sum_{U,V} |Tr(U^dag V)|^(2t) collapses to
  // (1/|V|) sum_W |Tr W|^(2t) because U^dag V sweeps the group |V| times and
  // |Tr| ignores the phase.
  Real sum = 0;
  if (ensemble.factored()) {
    // Stream Tr(sigma_a L_s) in O(d) per element; never materialize.
    const int m = static_cast<int>(std::log2(Real(ensemble.dim())) + 0.5);
    const std::size_t num_paulis = std::size_t(1) << (2 * m);
    const std::size_t num_lifts = ensemble.size() / num_paulis;
    for (std::size_t s = 0; s < num_lifts; ++s) {
      const Matrix lift = ensemble.element(s * num_paulis);  // sigma_0 * L_s
      Real lift_sum = 0;  // chunked accumulation keeps the long sum exact
      for (std::size_t a = 0; a < num_paulis; ++a) {
        lift_sum += trace_abs_pow(pauli_mult_trace(m, BinVec(a), lift), t);
      }
      sum += lift_sum;
    }
  } else {
    for (std::size_t i = 0; i < ensemble.size(); ++i) {
      sum += trace_abs_pow(ensemble.element(i).trace(), t);
    }
  }
  return sum / Real(ensemble.size());
}

Real frame_potential_pairwise(const UnitaryEnsemble& ensemble, int t) {
  require(t == 1 || t == 2, "frame_potential: t must be 1 or 2");
  require(ensemble.finite() && !ensemble.factored(),
          "frame_potential_pairwise: needs a materialized finite ensemble");
  const std::size_t count = ensemble.size();
  Real sum = 0;
  for (std::size_t i = 0; i < count; ++i) {
    const Matrix ui_dag = ensemble.element(i).adjoint();
    for (std::size_t j = 0; j < count; ++j) {
      sum += trace_abs_pow((ui_dag * ensemble.element(j)).trace(), t);
    }
  }
  return sum / (Real(count) * Real(count));
}

Matrix haar_moment_operator(Index d, int t) {
  require(d >= 2, "haar_moment_operator: need d >= 2");
  require(t == 1 || t == 2, "haar_moment_operator: t must be 1 or 2");
  if (t == 1) return projector(maximally_entangled(d));

  // Columns of the twirl superoperator: vec(twirl(E_rc)) for the matrix units
  // E_rc on H x H. As an operator this equals E[conj(U x conj(U)) x (U x conj(U))]
  // with factors (conj U, U, U, conj U); reordering the factors to
  // (U, U, conj U, conj U) gives the moment operator.
  const Index dd = d * d;
  const Vector phi = maximally_entangled(d);
  const Matrix proj = projector(phi);
  const Matrix pi_op = Matrix::Identity(dd, dd) - proj;
  Matrix superop(dd * dd, dd * dd);
  for (Index j = 0; j < dd * dd; ++j) {
    const Index r = j % dd;
    const Index c = j / dd;
    const Cplx weight = std::conj(phi(r)) * phi(c);  // <phi| E_rc |phi>
    const Cplx tr_pi = (r == c ? Cplx(1, 0) : Cplx(0, 0)) - weight;
    const Matrix tw = (tr_pi / Real(dd - 1)) * pi_op + weight * proj;
    superop.col(j) = vec(tw);
  }
  return permute_registers(superop, {d, d, d, d}, {1, 2, 0, 3});
}

DesignCheck is_t_design(const UnitaryEnsemble& ensemble, int t, Real tol) {
  require(t == 1 || t == 2, "is_t_design: t > 2 unsupported");
  require(ensemble.finite() && !ensemble.factored(),
          "is_t_design: needs a materialized finite ensemble");
  const Index d = ensemble.dim();
  Index moment_dim = 1;
  for (int k = 0; k < 2 * t; ++k) moment_dim *= d;
  require(moment_dim <= 4096, "is_t_design: moment operator too large");

  Matrix acc = Matrix::Zero(moment_dim, moment_dim);
  for (std::size_t i = 0; i < ensemble.size(); ++i) {
    const Matrix& u = ensemble.element(i);
    if (t == 1) {
      acc.noalias() += kron(u, u.conjugate());
    } else {
      const Matrix uu = kron(u, u);
      acc.noalias() += kron(uu, uu.conjugate());
    }
  }
  acc /= Real(ensemble.size());
  const Real deviation = op_norm(acc - haar_moment_operator(d, t));
  return {deviation <= tol, deviation};
}

}  // namespace haarlab
