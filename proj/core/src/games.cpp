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

#include "haarlab/games.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>
#include <utility>

#include "haarlab/linalg.hpp"
#include "haarlab/parallel.hpp"

namespace haarlab {

namespace {

Matrix hermitize(const Matrix& m) { return 0.5 * (m + m.adjoint()); }

Real re_trace_product(const Matrix& a, const Matrix& b) {
  return a.transpose().cwiseProduct(b).sum().real();
}

// Re Tr[(a (x) b) rho] for rho on the pair register, without forming the
// Kronecker product: sum over blocks rho_{(k,i)} of a(i,k) Tr(b rho_{(k,i)}).
Real re_pair_trace(const Matrix& a, const Matrix& b, const Matrix& rho) {
  const Index dw = a.rows();
  const Index dv = b.rows();
  Cplx acc = 0;
  for (Index i = 0; i < dw; ++i) {
    for (Index k = 0; k < dw; ++k) {
      const Cplx aik = a(i, k);
      if (aik == Cplx(0, 0)) continue;
      acc += aik * b.transpose().cwiseProduct(rho.block(k * dv, i * dv, dv, dv)).sum();
    }
  }
  return acc.real();
}

// dst += a (x) b without materializing the product.
void kron_add(Matrix& dst, const Matrix& a, const Matrix& b) {
  const Index rb = b.rows();
  const Index cb = b.cols();
  for (Index i = 0; i < a.rows(); ++i) {
    for (Index j = 0; j < a.cols(); ++j) {
      const Cplx aij = a(i, j);
      if (aij == Cplx(0, 0)) continue;
      dst.block(i * rb, j * cb, rb, cb) += aij * b;
    }
  }
}

// First-half-of-the-basis projector (answer 0 of the canonical scheme).
Matrix half_projector(Index d, int x) {
  Matrix pi = Matrix::Zero(d, d);
  const Index h = d / 2;
  for (Index i = 0; i < h; ++i) pi(x == 0 ? i : h + i, x == 0 ? i : h + i) = 1.0;
  return pi;
}

bool is_canonical_projector(const Matrix& pi0, Index d) {
  if (d % 2 != 0) return false;
  return (pi0 - half_projector(d, 0)).cwiseAbs().maxCoeff() <= 1e-13;
}

// Marginals of a tripartite state used by the two-outcome expansion of the
// winning probability.
struct StrategyMarginals {
  Matrix ra, rb, rc, rab, rac, rbc;
};

StrategyMarginals marginals_of(const Matrix& rho, Index da, Index db, Index dc) {
  const std::vector<Index> dims{da, db, dc};
  StrategyMarginals m;
  m.ra = partial_trace(rho, dims, {1, 2});
  m.rb = partial_trace(rho, dims, {0, 2});
  m.rc = partial_trace(rho, dims, {0, 1});
  m.rab = partial_trace(rho, dims, {2});
  m.rac = partial_trace(rho, dims, {1});
  m.rbc = partial_trace(rho, dims, {0});
  return m;
}

// Probability that both parties answer the encrypted bit for one key, via
// the two-outcome complement expansion: only the outcome-0 elements and the
// state's pairwise marginals enter.
Real per_key_win(const Matrix& a0, const Matrix& b0, const Matrix& c0,
                 const StrategyMarginals& m) {
  Real f = 1.0;
  f -= re_trace_product(a0, m.ra);
  f -= re_trace_product(b0, m.rb);
  f -= re_trace_product(c0, m.rc);
  f += re_pair_trace(a0, b0, m.rab);
  f += re_pair_trace(a0, c0, m.rac);
  f += re_pair_trace(b0, c0, m.rbc);
  return f;
}

Povm checked_povm(Povm p, Index dim, const std::string& who) {
  require(p.num_outcomes() == 2, who + ": keyed POVM must have 2 outcomes");
  require(p.dim() == dim, who + ": keyed POVM dimension mismatch");
  return p;
}

// ---- Pairwise key moments of the game operators -----------------------------

struct PairMoments {
  Index da = 0, db = 0, dc = 0;
  Matrix ea, eb, ec;    // key averages of the outcome-0 elements
  Matrix eab, eac, ebc;  // key averages of their pairwise products

  static PairMoments zero(Index da, Index db, Index dc) {
    PairMoments m;
    m.da = da;
    m.db = db;
    m.dc = dc;
    m.ea = Matrix::Zero(da, da);
    m.eb = Matrix::Zero(db, db);
    m.ec = Matrix::Zero(dc, dc);
    m.eab = Matrix::Zero(da * db, da * db);
    m.eac = Matrix::Zero(da * dc, da * dc);
    m.ebc = Matrix::Zero(db * dc, db * dc);
    return m;
  }

  void merge(const PairMoments& o) {
    ea += o.ea;
    eb += o.eb;
    ec += o.ec;
    eab += o.eab;
    eac += o.eac;
    ebc += o.ebc;
  }

  void finish(Real inv_keys) {
    ea = hermitize(ea * inv_keys);
    eb = hermitize(eb * inv_keys);
    ec = hermitize(ec * inv_keys);
    eab = hermitize(eab * inv_keys);
    eac = hermitize(eac * inv_keys);
    ebc = hermitize(ebc * inv_keys);
  }
};

// Exact key averages by enumeration (materialized or streamed ensembles).
PairMoments accumulate_moments(const MoeGame& game, const KeyedPovms& bob,
                               const KeyedPovms& charlie, int threads) {
  const UnitaryEnsemble& ens = game.ensemble();
  const Index da = game.dim();
  const Index db = bob.dim();
  const Index dc = charlie.dim();
  const Matrix pi0 = game.message_projector(0);
  const std::size_t keys = ens.size();

  const Index max_pair = std::max({da * db, da * dc, db * dc});
  require(max_pair <= 1024,
          "game operator: pairwise register dimension exceeds 1024");
  const int lanes = max_pair <= 128 ? 16 : 4;

  auto body = [&](PairMoments& st, std::size_t i) {
    const Matrix key = ens.element(i);
    const Matrix a0 = key * pi0 * key.adjoint();
    const Matrix b0 = bob.at(key, i).element(0);
    const Matrix c0 = charlie.at(key, i).element(0);
    st.ea += a0;
    st.eb += b0;
    st.ec += c0;
    kron_add(st.eab, a0, b0);
    kron_add(st.eac, a0, c0);
    kron_add(st.ebc, b0, c0);
  };
  auto merge = [](PairMoments& a, const PairMoments& b) { a.merge(b); };
  PairMoments m = run_blocked(keys, PairMoments::zero(da, db, dc), body, merge,
                              threads, 1024, lanes);
  m.finish(1.0 / static_cast<Real>(keys));
  return m;
}

// Closed-form key averages for the built-in keyed-basis rules. These are the
// exact averages whenever the ensemble reproduces the first two moments of
// the uniform measure (checked separately by the design diagnostics); they
// are used for ensembles whose element list is not materialized.
PairMoments closed_form_moments(const MoeGame& game, const KeyedPovms& bob,
                                const KeyedPovms& charlie) {
  const Index d = game.dim();
  require(bob.kind() == KeyedPovms::Kind::KeyedBasis && bob.dim() == d,
          "game operator: streamed ensembles need the keyed-basis rule for Bob");
  require(charlie.kind() == KeyedPovms::Kind::ConjugateKeyedBasis &&
              charlie.dim() == d,
          "game operator: streamed ensembles need the conjugate keyed-basis "
          "rule for Charlie");
  require(is_canonical_projector(game.message_projector(0), d),
          "game operator: streamed ensembles need the canonical projectors");

  PairMoments m = PairMoments::zero(d, d, d);
  const Real dd = static_cast<Real>(d);
  m.ea = 0.5 * Matrix::Identity(d, d);
  m.eb = m.ea;
  m.ec = m.ea;

  // avg UxU (Pi0 x Pi0) (UxU)^dag = alpha 1 + beta SWAP.
  const Real alpha = (dd * dd - 2.0) / (4.0 * (dd * dd - 1.0));
  const Real beta = dd / (4.0 * (dd * dd - 1.0));
  Matrix swap = Matrix::Zero(d * d, d * d);
  for (Index i = 0; i < d; ++i) {
    for (Index j = 0; j < d; ++j) swap(i * d + j, j * d + i) = 1.0;
  }
  m.eab = alpha * Matrix::Identity(d * d, d * d) + beta * swap;

  // avg (U x conj U) (Pi0 x Pi0) (U x conj U)^dag.
  const Matrix pi_pair = kron(game.message_projector(0), game.message_projector(0));
  m.eac = twirl_second_order(pi_pair, d);
  m.ebc = m.eac;
  return m;
}

// Moments of the Alice-Charlie operator only.
struct AcMoments {
  Index da = 0, dc = 0;
  Matrix ea, ec, eac;
};

AcMoments ac_moments(const MoeGame& game, const KeyedPovms& charlie, int threads) {
  const UnitaryEnsemble& ens = game.ensemble();
  const Index da = game.dim();
  const Index dc = charlie.dim();
  AcMoments out;
  out.da = da;
  out.dc = dc;
  if (ens.factored()) {
    require(charlie.kind() == KeyedPovms::Kind::ConjugateKeyedBasis &&
                charlie.dim() == da,
            "game operator: streamed ensembles need the conjugate keyed-basis "
            "rule for Charlie");
    require(is_canonical_projector(game.message_projector(0), da),
            "game operator: streamed ensembles need the canonical projectors");
    out.ea = 0.5 * Matrix::Identity(da, da);
    out.ec = out.ea;
    const Matrix pi_pair =
        kron(game.message_projector(0), game.message_projector(0));
    out.eac = twirl_second_order(pi_pair, da);
    return out;
  }

  struct State {
    Matrix ea, ec, eac;
  };
  State init{Matrix::Zero(da, da), Matrix::Zero(dc, dc),
             Matrix::Zero(da * dc, da * dc)};
  const Matrix pi0 = game.message_projector(0);
  auto body = [&](State& st, std::size_t i) {
    const Matrix key = ens.element(i);
    const Matrix a0 = key * pi0 * key.adjoint();
    const Matrix c0 = charlie.at(key, i).element(0);
    st.ea += a0;
    st.ec += c0;
    kron_add(st.eac, a0, c0);
  };
  auto merge = [](State& a, const State& b) {
    a.ea += b.ea;
    a.ec += b.ec;
    a.eac += b.eac;
  };
  const std::size_t keys = ens.size();
  State m = run_blocked(keys, init, body, merge, threads, 1024, 8);
  const Real inv = 1.0 / static_cast<Real>(keys);
  out.ea = hermitize(m.ea * inv);
  out.ec = hermitize(m.ec * inv);
  out.eac = hermitize(m.eac * inv);
  return out;
}

// ---- Matrix-free application of the operators from their moments ------------

Vector apply_from_moments(const PairMoments& m, const Vector& v) {
  const Index da = m.da, db = m.db, dc = m.dc;
  const Index n = da * db * dc;
  require(v.size() == n, "game operator apply: vector dimension mismatch");
  Vector out = v;  // identity term of the expansion
  {
    // EA (x) 1_{BC}
    Eigen::Map<const Matrix> vm(v.data(), dc * db, da);
    const Matrix r = vm * m.ea.transpose();
    out -= Eigen::Map<const Vector>(r.data(), n);
  }
  for (Index a = 0; a < da; ++a) {
    // 1_A (x) EB (x) 1_C, block a
    Eigen::Map<const Matrix> vs(v.data() + a * db * dc, dc, db);
    const Matrix r = vs * m.eb.transpose();
    out.segment(a * db * dc, db * dc) -= Eigen::Map<const Vector>(r.data(), db * dc);
  }
  {
    // 1_{AB} (x) EC
    Eigen::Map<const Matrix> vm(v.data(), dc, da * db);
    const Matrix r = m.ec * vm;
    out -= Eigen::Map<const Vector>(r.data(), n);
  }
  {
    // EAB (x) 1_C
    Eigen::Map<const Matrix> vm(v.data(), dc, da * db);
    const Matrix r = vm * m.eab.transpose();
    out += Eigen::Map<const Vector>(r.data(), n);
  }
  for (Index a = 0; a < da; ++a) {
    // 1_A (x) EBC, block a
    out.segment(a * db * dc, db * dc) += m.ebc * v.segment(a * db * dc, db * dc);
  }
  {
    // EAC acting on the outer pair with Bob's register in between
    Vector w(da * dc);
    for (Index b = 0; b < db; ++b) {
      for (Index a = 0; a < da; ++a) {
        for (Index c = 0; c < dc; ++c) {
          w[a * dc + c] = v[(a * db + b) * dc + c];
        }
      }
      const Vector w2 = m.eac * w;
      for (Index a = 0; a < da; ++a) {
        for (Index c = 0; c < dc; ++c) {
          out[(a * db + b) * dc + c] += w2[a * dc + c];
        }
      }
    }
  }
  return out;
}

Vector apply_ac_from_moments(const AcMoments& m, const Vector& v) {
  const Index n = m.da * m.dc;
  require(v.size() == n, "game operator apply: vector dimension mismatch");
  Vector out = v;
  Eigen::Map<const Matrix> vm(v.data(), m.dc, m.da);
  const Matrix r1 = vm * m.ea.transpose();
  out -= Eigen::Map<const Vector>(r1.data(), n);
  const Matrix r2 = m.ec * vm;
  out -= Eigen::Map<const Vector>(r2.data(), n);
  out += 2.0 * (m.eac * v);
  return out;
}

Matrix dense_from_moments(const PairMoments& m) {
  const Index da = m.da, db = m.db, dc = m.dc;
  const Index n = da * db * dc;
  Matrix p = Matrix::Identity(n, n);
  p -= kron(m.ea, Matrix::Identity(db * dc, db * dc));
  p -= kron(Matrix::Identity(da, da), kron(m.eb, Matrix::Identity(dc, dc)));
  p -= kron(Matrix::Identity(da * db, da * db), m.ec);
  p += kron(m.eab, Matrix::Identity(dc, dc));
  p += permute_registers(kron(m.eac, Matrix::Identity(db, db)), {da, dc, db},
                         {0, 2, 1});
  p += kron(Matrix::Identity(da, da), m.ebc);
  return hermitize(p);
}

Matrix dense_from_ac_moments(const AcMoments& m) {
  const Index n = m.da * m.dc;
  Matrix q = Matrix::Identity(n, n);
  q -= kron(m.ea, Matrix::Identity(m.dc, m.dc));
  q -= kron(Matrix::Identity(m.da, m.da), m.ec);
  q += 2.0 * m.eac;
  return hermitize(q);
}

// Fills norm/top/top_residual and enforces 0 <= op <= 1. Dense spectra are
// used up to dimension 1024; above that the top pairs of the operator and of
// its reflection are found iteratively through `apply`.
void finish_spectral(GameOperator& g, Index n) {
  const Real tol = kOpTol;
  if (n <= 1024) {
    const EigResult e = herm_eig(g.op);
    require(e.values[0] <= 1.0 + tol && e.values[n - 1] >= -tol,
            "game operator: averaged operator escapes [0, 1]");
    g.norm = e.values[0];
    g.top = e.vectors.col(0);
    g.top_residual = (g.op * g.top - g.norm * g.top).norm();
    return;
  }
  const TopEig te = top_eigenpair(g.apply, n, 1e-11, 4000, 7777);
  if (!te.converged) {
    throw std::runtime_error("game operator: top eigenpair did not converge");
  }
  const auto reflected = [&](const Vector& v) -> Vector {
    return 1.5 * v - g.apply(v);
  };
  const TopEig tr = top_eigenpair(reflected, n, 1e-11, 4000, 7901);
  if (!tr.converged) {
    throw std::runtime_error(
        "game operator: reflected top eigenpair did not converge");
  }
  const Real lam_min = 1.5 - tr.value;
  const Real slack = tol + 10.0 * (te.residual + tr.residual);
  require(te.value <= 1.0 + slack && lam_min >= -slack,
          "game operator: averaged operator escapes [0, 1]");
  g.norm = te.value;
  g.top = te.vector;
  g.top_residual = te.residual;
}

}  // namespace

// ---- MoeGame ----------------------------------------------------------------

MoeGame MoeGame::from_ensemble(UnitaryEnsemble ensemble) {
  return MoeGame(Qecm::from_ensemble(std::move(ensemble)));
}

MoeGame MoeGame::from_scheme(Qecm scheme) { return MoeGame(std::move(scheme)); }

Matrix MoeGame::keyed_projector(const Matrix& key, int x) const {
  require(x == 0 || x == 1, "keyed_projector: answer must be 0 or 1");
  require_unitary(key, kOpTol, "keyed_projector key");
  require(key.rows() == dim(), "keyed_projector: key dimension mismatch");
  return key * message_projector(x) * key.adjoint();
}

std::string MoeGame::descriptor() const {
  return "moe_game ensemble=" + ensemble().label() +
         " dim=" + std::to_string(dim());
}

// ---- KeyedPovms ---------------------------------------------------------------

KeyedPovms KeyedPovms::constant(Povm povm) {
  require(povm.num_outcomes() == 2, "keyed povms: need 2 outcomes");
  KeyedPovms k;
  k.kind_ = Kind::Constant;
  k.dim_ = povm.dim();
  k.label_ = "constant";
  k.per_key_.push_back(std::move(povm));
  return k;
}

KeyedPovms KeyedPovms::table(std::vector<Povm> per_key) {
  require(!per_key.empty(), "keyed povms: empty table");
  const Index d = per_key[0].dim();
  for (const Povm& p : per_key) {
    require(p.num_outcomes() == 2, "keyed povms: need 2 outcomes");
    require(p.dim() == d, "keyed povms: inconsistent table dimensions");
  }
  KeyedPovms k;
  k.kind_ = Kind::Table;
  k.dim_ = d;
  k.label_ = "table[" + std::to_string(per_key.size()) + "]";
  k.per_key_ = std::move(per_key);
  return k;
}

KeyedPovms KeyedPovms::keyed_basis(Index dim) {
  require(dim >= 2 && dim % 2 == 0, "keyed povms: keyed basis needs even dim");
  KeyedPovms k;
  k.kind_ = Kind::KeyedBasis;
  k.dim_ = dim;
  k.label_ = "keyed_basis";
  return k;
}

KeyedPovms KeyedPovms::conjugate_keyed_basis(Index dim) {
  require(dim >= 2 && dim % 2 == 0, "keyed povms: keyed basis needs even dim");
  KeyedPovms k;
  k.kind_ = Kind::ConjugateKeyedBasis;
  k.dim_ = dim;
  k.label_ = "conjugate_keyed_basis";
  return k;
}

KeyedPovms KeyedPovms::seeded_random(std::uint64_t seed, Index dim) {
  require(dim >= 1, "keyed povms: dimension must be >= 1");
  KeyedPovms k;
  k.kind_ = Kind::SeededRandom;
  k.dim_ = dim;
  k.seed_ = seed;
  k.label_ = "seeded_random[seed=" + std::to_string(seed) + "]";
  return k;
}

KeyedPovms KeyedPovms::rule(std::function<Povm(const Matrix&, std::size_t)> fn,
                            Index dim, std::string label) {
  require(static_cast<bool>(fn), "keyed povms: empty rule");
  require(dim >= 1, "keyed povms: dimension must be >= 1");
  KeyedPovms k;
  k.kind_ = Kind::Rule;
  k.dim_ = dim;
  k.label_ = std::move(label);
  k.fn_ = std::move(fn);
  return k;
}

const Povm& KeyedPovms::constant_povm() const {
  require(kind_ == Kind::Constant, "keyed povms: not a constant family");
  return per_key_[0];
}

Povm KeyedPovms::at(const Matrix& key, std::size_t key_index) const {
  switch (kind_) {
    case Kind::Constant:
      return per_key_[0];
    case Kind::Table:
      require(key_index < per_key_.size(), "keyed povms: key index out of range");
      return per_key_[key_index];
    case Kind::KeyedBasis: {
      require(key.rows() == dim_ && key.cols() == dim_,
              "keyed povms: key dimension mismatch");
      const Matrix p0 = key * half_projector(dim_, 0) * key.adjoint();
      const Matrix p1 = key * half_projector(dim_, 1) * key.adjoint();
      return Povm({p0, p1});
    }
    case Kind::ConjugateKeyedBasis: {
      require(key.rows() == dim_ && key.cols() == dim_,
              "keyed povms: key dimension mismatch");
      const Matrix ck = key.conjugate();
      const Matrix p0 = ck * half_projector(dim_, 0) * ck.adjoint();
      const Matrix p1 = ck * half_projector(dim_, 1) * ck.adjoint();
      return Povm({p0, p1});
    }
    case Kind::SeededRandom: {
      RngStream st = RngStream::derive(seed_, key_index);
      const Matrix v = haar_unitary(st, dim_);
      Matrix pi = Matrix::Zero(dim_, dim_);
      for (Index i = 0; i < dim_ / 2; ++i) pi(i, i) = 1.0;
      const Matrix p0 = v * pi * v.adjoint();
      return Povm({p0, Matrix::Identity(dim_, dim_) - p0});
    }
    case Kind::Rule:
      return checked_povm(fn_(key, key_index), dim_, "keyed povms rule");
  }
  throw std::logic_error("keyed povms: unknown kind");
}

KeyedPovms KeyedPovms::complemented() const {
  auto swap_outcomes = [](const Povm& p) {
    return Povm({p.element(1), p.element(0)});
  };
  switch (kind_) {
    case Kind::Constant:
      return constant(swap_outcomes(per_key_[0]));
    case Kind::Table: {
      std::vector<Povm> flipped;
      flipped.reserve(per_key_.size());
      for (const Povm& p : per_key_) flipped.push_back(swap_outcomes(p));
      return table(std::move(flipped));
    }
    default: {
      KeyedPovms self = *this;
      auto fn = [self, swap_outcomes](const Matrix& key, std::size_t idx) {
        return swap_outcomes(self.at(key, idx));
      };
      return rule(fn, dim_, label_ + "~complement");
    }
  }
}

// ---- Winning probability ------------------------------------------------------

namespace {

void validate_strategy(const MoeGame& game, const Strategy& s) {
  require(s.dim_b >= 1 && s.dim_c >= 1, "strategy: side dimensions must be >= 1");
  require(s.bob.dim() == s.dim_b, "strategy: Bob POVM dimension mismatch");
  require(s.charlie.dim() == s.dim_c, "strategy: Charlie POVM dimension mismatch");
  const Index n = game.dim() * s.dim_b * s.dim_c;
  require(s.rho_abc.dim() == n, "strategy: shared state dimension mismatch");
  if (s.bob.kind() == KeyedPovms::Kind::Table) {
    require(game.ensemble().finite() &&
                s.bob.table_size() == game.ensemble().size(),
            "strategy: Bob table size must match the key count");
  }
  if (s.charlie.kind() == KeyedPovms::Kind::Table) {
    require(game.ensemble().finite() &&
                s.charlie.table_size() == game.ensemble().size(),
            "strategy: Charlie table size must match the key count");
  }
}

}  // namespace

Real winning_probability(const MoeGame& game, const Strategy& strategy,
                         int threads) {
  validate_strategy(game, strategy);
  const UnitaryEnsemble& ens = game.ensemble();
  require(ens.finite(),
          "winning_probability: exact averages need a finite ensemble");
  const StrategyMarginals marg =
      marginals_of(strategy.rho_abc.matrix(), game.dim(), strategy.dim_b,
                   strategy.dim_c);
  const Matrix pi0 = game.message_projector(0);
  const std::size_t keys = ens.size();

  auto body = [&](Real& sum, std::size_t i) {
    Matrix key = ens.element(i);
    // In the conjugated game the announced key is the conjugated element;
    // key indices are unchanged.
    if (strategy.conjugated_game) key = key.conjugate();
    const Matrix a0 = key * pi0 * key.adjoint();
    const Matrix b0 = strategy.bob.at(key, i).element(0);
    const Matrix c0 = strategy.charlie.at(key, i).element(0);
    sum += per_key_win(a0, b0, c0, marg);
  };
  auto merge = [](Real& a, const Real& b) { a += b; };
  const Real total =
      run_blocked(keys, Real(0), body, merge, threads, 1024, 16);
  return std::clamp(total / static_cast<Real>(keys), 0.0, 1.0);
}

McWinningProbability winning_probability_mc(const MoeGame& game,
                                            const Strategy& strategy,
                                            std::uint64_t samples,
                                            RngStream& rng, int threads) {
  validate_strategy(game, strategy);
  require(samples >= 1, "winning_probability_mc: need at least one sample");
  const UnitaryEnsemble& ens = game.ensemble();
  const StrategyMarginals marg =
      marginals_of(strategy.rho_abc.matrix(), game.dim(), strategy.dim_b,
                   strategy.dim_c);
  const Matrix pi0 = game.message_projector(0);
  const std::uint64_t master = rng.raw();

  const Accumulator acc = blocked_mean(
      samples,
      [&](std::size_t i) {
        RngStream st = RngStream::derive(master, i);
        Matrix key;
        std::size_t key_index = i;
        if (ens.finite()) {
          key_index = st.uniform_u64(ens.size());
          key = ens.element(key_index);
        } else {
          key = ens.sample(st);
        }
        if (strategy.conjugated_game) key = key.conjugate();
        const Matrix a0 = key * pi0 * key.adjoint();
        const Matrix b0 = strategy.bob.at(key, key_index).element(0);
        const Matrix c0 = strategy.charlie.at(key, key_index).element(0);
        return per_key_win(a0, b0, c0, marg);
      },
      threads);

  McWinningProbability out;
  out.value = std::clamp(acc.mean(), 0.0, 1.0);
  out.stderr_mean = acc.stderr_mean();
  out.samples = samples;
  return out;
}

// ---- Game operators -------------------------------------------------------------

GameOperator game_operator_P(const MoeGame& game, const KeyedPovms& bob,
                             const KeyedPovms& charlie, int threads) {
  const UnitaryEnsemble& ens = game.ensemble();
  require(ens.finite(), "game operator: needs a finite ensemble");
  const Index da = game.dim();
  const Index db = bob.dim();
  const Index dc = charlie.dim();
  require(db >= 1 && dc >= 1, "game operator: side dimensions must be >= 1");
  if (bob.kind() == KeyedPovms::Kind::Table) {
    require(bob.table_size() == ens.size(),
            "game operator: Bob table size must match the key count");
  }
  if (charlie.kind() == KeyedPovms::Kind::Table) {
    require(charlie.table_size() == ens.size(),
            "game operator: Charlie table size must match the key count");
  }
  const Index n = da * db * dc;

  PairMoments moments;
  if (ens.factored()) {
    moments = closed_form_moments(game, bob, charlie);
  } else {
    moments = accumulate_moments(game, bob, charlie, threads);
  }

  GameOperator g;
  g.dim_a = da;
  g.dim_b = db;
  g.dim_c = dc;
  auto shared = std::make_shared<const PairMoments>(std::move(moments));
  g.apply = [shared](const Vector& v) { return apply_from_moments(*shared, v); };
  if (n <= 4096) g.op = dense_from_moments(*shared);
  finish_spectral(g, n);
  return g;
}

GameOperator game_operator_Q(const MoeGame& game, const KeyedPovms& charlie,
                             int threads) {
  const UnitaryEnsemble& ens = game.ensemble();
  require(ens.finite(), "game operator: needs a finite ensemble");
  const Index da = game.dim();
  const Index dc = charlie.dim();
  require(dc >= 1, "game operator: side dimensions must be >= 1");
  if (charlie.kind() == KeyedPovms::Kind::Table) {
    require(charlie.table_size() == ens.size(),
            "game operator: Charlie table size must match the key count");
  }
  const Index n = da * dc;
  require(n <= 4096, "game operator: Alice-Charlie dimension exceeds 4096");

  const AcMoments m = ac_moments(game, charlie, threads);
  GameOperator g;
  g.dim_a = da;
  g.dim_b = 0;
  g.dim_c = dc;
  auto shared = std::make_shared<const AcMoments>(m);
  g.apply = [shared](const Vector& v) {
    return apply_ac_from_moments(*shared, v);
  };
  g.op = dense_from_ac_moments(m);
  finish_spectral(g, n);
  return g;
}

Matrix embed_charlie_operator(const GameOperator& q, Index dim_b) {
  require(q.dim_b == 0, "embed_charlie_operator: expected an Alice-Charlie operator");
  require(dim_b >= 1, "embed_charlie_operator: Bob dimension must be >= 1");
  require(q.op.rows() == q.dim_a * q.dim_c,
          "embed_charlie_operator: dense form unavailable");
  return permute_registers(kron(q.op, Matrix::Identity(dim_b, dim_b)),
                           {q.dim_a, q.dim_c, dim_b}, {0, 2, 1});
}

}  // namespace haarlab
