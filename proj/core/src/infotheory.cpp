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

#include "haarlab/infotheory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>
#include <utility>

#include <Eigen/Dense>

#include "haarlab/linalg.hpp"
#include "haarlab/parallel.hpp"

namespace haarlab {

namespace {

constexpr Real kFourThirds = 4.0 / 3.0;

// FNV-1a over a fixed-precision text rendering of the state; platform-stable
// because the rendering is, and cheap at the dimensions involved.
std::string state_fingerprint(const Matrix& m, Index dim_a, Index dim_b) {
  std::uint64_t h = 1469598103934665603ull;
  auto mix = [&h](const char* buf) {
    for (const char* p = buf; *p; ++p) {
      h ^= static_cast<unsigned char>(*p);
      h *= 1099511628211ull;
    }
  };
  char buf[80];
  std::snprintf(buf, sizeof(buf), "%lld|%lld;", static_cast<long long>(dim_a),
                static_cast<long long>(dim_b));
  mix(buf);
  for (Index j = 0; j < m.cols(); ++j) {
    for (Index i = 0; i < m.rows(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.12e,%.12e;", m(i, j).real(),
                    m(i, j).imag());
      mix(buf);
    }
  }
  char out[17];
  std::snprintf(out, sizeof(out), "%016llx",
                static_cast<unsigned long long>(h));
  return std::string(out);
}

// Closest unitary-factor (polar) projection of a tall matrix onto the
// isometries, via the thin SVD.
Matrix polar_isometry(const Matrix& g) {
  Eigen::JacobiSVD<Matrix> svd(g, Eigen::ComputeThinU | Eigen::ComputeThinV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

Real spectral_entropy_bits(const Matrix& m) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(m, Eigen::EigenvaluesOnly);
  Real h = 0;
  for (Index i = 0; i < es.eigenvalues().size(); ++i) {
    const Real lambda = es.eigenvalues()(i);
    if (lambda > 1e-15) h -= lambda * std::log2(lambda);
  }
  return h;
}

}  // namespace

EntropyResult hmin_sdp(const DensityMatrix& rho_ab, Index dim_a, Index dim_b,
                       const DominanceOptions& options) {
  require(dim_a >= 1 && dim_b >= 1, "hmin_sdp: dimensions must be positive");
  require(dim_a <= 64 && dim_b <= 64,
          "hmin_sdp: dimensions above 64 per register are not supported");
  const Matrix& rho = rho_ab.matrix();
  require(rho.rows() == dim_a * dim_b,
          "hmin_sdp: state dimension must equal dim_a * dim_b");

  DominanceOptions opts = options;
  if (opts.width_target <= 0) {
    // The bit-width of the enclosure is about gap / (t * ln 2) and the
    // optimum t is at least 1/|A|; aim for half the 1e-4-bit budget there.
    opts.width_target = std::min(
        1e-6, 0.5 * 1e-4 * std::log(2.0) / static_cast<Real>(dim_a));
  }

  // Re-express "id_A (x) sigma_B >= rho" with the optimized register first.
  const Matrix swapped = permute_registers(rho, {dim_a, dim_b}, {1, 0});
  const CertifiedInterval ci = dominance_sdp(swapped, dim_b, dim_a, opts);

  // The optimum always lies in [1/|A|, |A|]; clamping keeps the enclosure
  // valid while discarding solver slack that would leave the a-priori range.
  const Real inv_a = 1.0 / static_cast<Real>(dim_a);
  const Real max_t = static_cast<Real>(dim_a);
  const Real lo_t = std::clamp(ci.lower, inv_a, max_t);
  const Real hi_t = std::clamp(ci.upper, lo_t, max_t);

  EntropyResult out;
  out.hmin = ci;  // keep the feasible certificates of the trace program
  out.hmin.lower = -std::log2(hi_t);
  out.hmin.upper = -std::log2(lo_t);
  out.hmin.gap = out.hmin.upper - out.hmin.lower;
  out.value = out.hmin.midpoint();
  out.method = "sdp";
  out.fingerprint = state_fingerprint(rho, dim_a, dim_b);
  out.gap_to_sdp = 0;
  return out;
}

EntropyResult hmin_krs(const DensityMatrix& rho_ab, Index dim_a, Index dim_b,
                       const KrsOptions& options) {
  require(dim_a >= 1 && dim_b >= 1, "hmin_krs: dimensions must be positive");
  require(dim_a <= 16 && dim_b <= 16,
          "hmin_krs: dimensions above 16 per register are not supported");
  const Matrix& rho = rho_ab.matrix();
  require(rho.rows() == dim_a * dim_b,
          "hmin_krs: state dimension must equal dim_a * dim_b");
  require(options.restarts >= 1, "hmin_krs: at least one restart required");
  require(options.max_iterations >= 1,
          "hmin_krs: at least one iteration required");

  const Index a = dim_a;
  const Index b = dim_b;
  // Stinespring environment large enough for any channel B -> A.
  const Index de = dim_a * dim_b;
  const Index rows = a * de;

  // A-blocks of the state: block(x, x') is the B-operator <x|_A rho |x'>_A.
  std::vector<Matrix> blocks(static_cast<std::size_t>(a * a));
  for (Index x = 0; x < a; ++x)
    for (Index xp = 0; xp < a; ++xp)
      blocks[static_cast<std::size_t>(x * a + xp)] =
          rho.block(x * b, xp * b, b, b);

  // Squared fidelity with the maximally entangled state after pushing B
  // through the channel of isometry v, together with its Wirtinger gradient.
  // Both come from f(v) = (1/|A|) sum_{x,x'} tr[C_{x'}^dag C_x rho^{(x,x')}]
  // with C_x the x-th row-block of v; f is a positive quadratic form in v,
  // which makes the polar update monotone.
  auto objective = [&](const Matrix& v, Matrix* grad) -> Real {
    Matrix g = Matrix::Zero(rows, b);
    for (Index xp = 0; xp < a; ++xp) {
      auto gxp = g.block(xp * de, 0, de, b);
      for (Index x = 0; x < a; ++x)
        gxp.noalias() += v.block(x * de, 0, de, b) *
                         blocks[static_cast<std::size_t>(x * a + xp)];
    }
    g /= static_cast<Real>(a);
    const Real f = v.conjugate().cwiseProduct(g).sum().real();
    if (grad) *grad = std::move(g);
    return f;
  };

  Real best_f = -1.0;
  bool best_converged = false;
  for (int r = 0; r < options.restarts; ++r) {
    Matrix v;
    if (r == 0) {
      // Canonical start: the injection that acts as the identity channel
      // whenever |B| <= |A| (and a fixed embedding otherwise).
      v = Matrix::Zero(rows, b);
      for (Index col = 0; col < b; ++col)
        v((col % a) * de + col / a, col) = 1.0;
    } else {
      RngStream rng =
          RngStream::derive(options.seed, static_cast<std::uint64_t>(r));
      v = random_isometry(rng, b, rows);
    }

    Matrix g;
    Real f = objective(v, &g);
    bool converged = false;
    for (int it = 0; it < options.max_iterations; ++it) {
      v = polar_isometry(g);
      const Real f_next = objective(v, &g);
      if (f_next - f <= options.tol * std::max<Real>(1.0, std::abs(f_next))) {
        f = std::max(f, f_next);
        converged = true;
        break;
      }
      f = f_next;
    }
    if (f > best_f) {
      best_f = f;
      best_converged = converged;
    }
  }

  const Real log2_a = std::log2(static_cast<Real>(a));
  Real value = best_f > 0
                   ? -std::log2(static_cast<Real>(a) * best_f)
                   : log2_a;
  value = std::clamp(value, -log2_a, log2_a);

  EntropyResult out;
  out.method = "krs-seesaw";
  out.fingerprint = state_fingerprint(rho, dim_a, dim_b);
  out.value = value;
  out.hmin.lower = -log2_a;
  out.hmin.upper = value;
  out.hmin.gap = out.hmin.upper - out.hmin.lower;
  out.hmin.converged = best_converged;
  if (options.cross_check) {
    const EntropyResult sdp = hmin_sdp(rho_ab, dim_a, dim_b);
    out.gap_to_sdp = value - sdp.value;
  }
  return out;
}

Real conditional_von_neumann(const DensityMatrix& rho_ab, Index dim_a,
                             Index dim_b) {
  require(dim_a >= 1 && dim_b >= 1,
          "conditional_von_neumann: dimensions must be positive");
  const Matrix& rho = rho_ab.matrix();
  require(rho.rows() == dim_a * dim_b,
          "conditional_von_neumann: state dimension must equal dim_a * dim_b");
  const Matrix rho_b = partial_trace(rho, {dim_a, dim_b}, {0});
  return spectral_entropy_bits(rho) - spectral_entropy_bits(rho_b);
}

std::vector<DecouplingInstance> builtin_decoupling_instances() {
  std::vector<DecouplingInstance> out;
  const Matrix pure_env = [] {
    Matrix e = Matrix::Zero(2, 2);
    e(0, 0) = 1.0;
    return e;
  }();
  {
    // Uniform on |A| = 4 next to a fixed mixed qubit environment: already
    // decoupled, and invariant under every key, so the distance is zero.
    RngStream rng(416);
    Matrix g(2, 2);
    for (Index j = 0; j < 2; ++j)
      for (Index i = 0; i < 2; ++i) g(i, j) = rng.gaussian_cplx();
    Matrix env = g * g.adjoint();
    env /= env.trace().real();
    out.push_back({"uniform-times-mixed-env",
                   DensityMatrix(kron(Matrix::Identity(4, 4) / 4.0, env)), 2,
                   2, 2});
  }
  {
    // Maximally entangled across A:E at |A| = |E| = 8: the conditional
    // min-entropy is -3 and the bound degenerates to 1.
    Vector phi = Vector::Zero(64);
    for (Index i = 0; i < 8; ++i) phi(i * 8 + i) = 1.0 / std::sqrt(8.0);
    out.push_back(
        {"max-entangled", DensityMatrix(Matrix(phi * phi.adjoint())), 2, 4,
         8});
  }
  {
    // Uniform on |A| = 16 with a pure environment: maximal min-entropy, a
    // small bound, and again an identically vanishing distance.
    out.push_back({"uniform-times-pure-env",
                   DensityMatrix(kron(Matrix::Identity(16, 16) / 16.0,
                                      pure_env)),
                   2, 8, 2});
  }
  {
    // A random pure state on |A| = 16 with a pure environment: zero
    // min-entropy, so the sampled distance is genuinely positive and the
    // bound is exercised away from its trivial regimes.
    RngStream rng(1617);
    const Vector psi = haar_unitary(rng, 16).col(0);
    out.push_back({"random-pure-times-pure-env",
                   DensityMatrix(kron(Matrix(psi * psi.adjoint()), pure_env)),
                   2, 8, 2});
  }
  return out;
}

DecouplingReport decoupling_check(const DecouplingInstance& instance,
                                  const UnitaryEnsemble& ensemble,
                                  std::size_t samples, std::uint64_t seed,
                                  int threads, bool enforce) {
  const Index a1 = instance.dim_a1;
  const Index a2 = instance.dim_a2;
  const Index e = instance.dim_e;
  require(a1 == 2, "decoupling_check: the kept register must be a qubit");
  require(a2 >= 1 && e >= 1,
          "decoupling_check: register dimensions must be positive");
  const Index a = a1 * a2;
  require(instance.rho_ae.dim() == a * e,
          "decoupling_check: state dimension must equal |A1||A2||E|");
  require(ensemble.dim() == a,
          "decoupling_check: ensemble dimension must match the rotated "
          "register");
  require(samples >= 1, "decoupling_check: sample count must be positive");

  const Matrix& rho = instance.rho_ae.matrix();
  const Matrix rho_e = partial_trace(rho, {a, e}, {0});
  const Matrix target = kron(Matrix::Identity(a1, a1) / static_cast<Real>(a1),
                             rho_e);
  const Matrix id_e = Matrix::Identity(e, e);

  const EntropyResult ent = hmin_sdp(instance.rho_ae, a, e);
  const Real h_lower = ent.hmin.lower;
  const Real rhs = std::exp2(-0.5 * h_lower -
                             0.5 * (std::log2(static_cast<Real>(a2)) -
                                    std::log2(static_cast<Real>(a1))) -
                             1.0);

  const Accumulator acc = blocked_mean(
      samples,
      [&](std::size_t i) -> Real {
        RngStream rng = RngStream::derive(seed, i);
        const Matrix rot = kron(ensemble.sample(rng), id_e);
        const Matrix sigma =
            partial_trace(rot * rho * rot.adjoint(), {a1, a2, e}, {1});
        Eigen::SelfAdjointEigenSolver<Matrix> es(sigma - target,
                                                 Eigen::EigenvaluesOnly);
        return 0.5 * es.eigenvalues().cwiseAbs().sum();
      },
      threads);

  DecouplingReport report;
  report.label = instance.label;
  report.dim_a1 = a1;
  report.dim_a2 = a2;
  report.dim_e = e;
  report.samples = samples;
  report.hmin_lower = h_lower;
  report.rhs = rhs;
  report.lhs_mean = acc.mean();
  report.lhs_stderr = acc.stderr_mean();
  report.holds = report.lhs_mean - 3.0 * report.lhs_stderr <= rhs + 1e-12;
  if (enforce && !report.holds) {
    char msg[160];
    std::snprintf(msg, sizeof(msg),
                  "decoupling_check: sampled distance %.6g (stderr %.2g) "
                  "exceeds the entropy bound %.6g",
                  report.lhs_mean, report.lhs_stderr, rhs);
    throw std::runtime_error(msg);
  }
  return report;
}

ChainProbe chain_probe(Index dim_a, Index dim_c, Index rank_c,
                       RngStream& rng) {
  require(dim_a >= 2 && dim_a % 2 == 0,
          "chain_probe: dim_a must be even and >= 2");
  require(dim_c >= 1, "chain_probe: dim_c must be positive");
  require(rank_c >= 1 && rank_c <= dim_c,
          "chain_probe: rank_c must lie in [1, dim_c]");

  // sigma_c from the partial-trace ensemble at the requested rank.
  Matrix g(dim_c, rank_c);
  for (Index j = 0; j < rank_c; ++j)
    for (Index i = 0; i < dim_c; ++i) g(i, j) = rng.gaussian_cplx();
  Matrix w = g * g.adjoint();
  w /= w.trace().real();
  const EigResult eig = herm_eig(w);

  Real mass = 0;
  for (Index i = 0; i < rank_c; ++i) mass += std::max<Real>(eig.values(i), 0);
  require(mass > 0, "chain_probe: degenerate environment draw");

  const Index dim_b = dim_a * rank_c;
  ChainProbe probe;
  probe.dim_a = dim_a;
  probe.dim_b = dim_b;
  probe.dim_c = dim_c;
  probe.rank_c = rank_c;
  probe.state = Vector::Zero(dim_a * dim_b * dim_c);
  probe.sigma_c = Matrix::Zero(dim_c, dim_c);
  // |phi> = sum_{x,i} sqrt(v_i/|A|) |x>_A |x * rank_c + i>_B |w_i>_C traces
  // to omega_A (x) sigma_c on A (x) C by construction.
  for (Index i = 0; i < rank_c; ++i) {
    const Real v = std::max<Real>(eig.values(i), 0) / mass;
    probe.sigma_c +=
        v * (eig.vectors.col(i) * eig.vectors.col(i).adjoint());
    const Real amp = std::sqrt(v / static_cast<Real>(dim_a));
    for (Index x = 0; x < dim_a; ++x) {
      const Index base = (x * dim_b + x * rank_c + i) * dim_c;
      for (Index c = 0; c < dim_c; ++c)
        probe.state(base + c) = amp * eig.vectors(c, i);
    }
  }
  return probe;
}

Real band_floor(Real delta, Real log2_d) {
  return 1.0 - 4.0 * std::exp2(-kFourThirds * delta * log2_d);
}

Real overlap_ceiling(Real delta, Real log2_d) {
  return 8.0 * std::exp2(-kFourThirds * delta * log2_d);
}

Real balanced_band_delta(Real log2_d) {
  return 3.0 * std::log2(log2_d) / (4.0 * log2_d);
}

ChainReport chain_check(const MoeGame& game, const KeyedPovms& bob,
                        const KeyedPovms& charlie, int probes,
                        const std::vector<Real>& deltas, std::uint64_t seed,
                        int threads) {
  const Index da = game.dim();
  const Index db = bob.dim();
  const Index dc = charlie.dim();
  require(game.ensemble().finite(),
          "chain_check: the key ensemble must be finite");
  require(probes >= 1, "chain_check: at least one probe is required");
  require(db % da == 0,
          "chain_check: dim(bob) must be a multiple of the game dimension "
          "for the probe purification");
  const Index rank_c = db / da;
  require(rank_c <= dc,
          "chain_check: probe rank dim(bob)/dim(game) must not exceed "
          "dim(charlie)");
  for (Real d : deltas)
    require(std::isfinite(d) && d > 0,
            "chain_check: band half-widths must be positive");

  const Real log2d = std::log2(static_cast<Real>(da));

  const GameOperator p = game_operator_P(game, bob, charlie, threads);
  const Real eps = p.norm - 0.5;
  const GameOperator q = game_operator_Q(game, charlie, threads);
  const EigResult qe = herm_eig(q.op);

  // A (x) B marginal of the top eigenstate, taken without materializing the
  // full projector: reshape the eigenvector to (|A||B|) x |C| and contract.
  Matrix resh(da * db, dc);
  for (Index ab = 0; ab < da * db; ++ab)
    for (Index c = 0; c < dc; ++c) resh(ab, c) = p.top(ab * dc + c);
  const EntropyResult ent =
      hmin_sdp(DensityMatrix(Matrix(resh * resh.adjoint())), da, db);

  ChainReport report;
  report.norm_p = p.norm;
  report.epsilon = eps;
  report.hmin_lower = ent.hmin.lower;
  report.hmin_upper = ent.hmin.upper;
  report.dim_a = da;
  report.dim_b = db;
  report.dim_c = dc;
  report.probes = static_cast<std::size_t>(probes);

  // Delta grids. Band-mass bounds hold for any delta in (0, 1/2]; overlap
  // bounds require delta < epsilon and are additionally evaluated at the
  // threshold itself.
  std::vector<Real> band_grid = deltas;
  band_grid.push_back(balanced_band_delta(log2d));
  if (eps > 0) {
    band_grid.push_back(0.9 * eps);
    band_grid.push_back(0.99 * eps);
  }
  std::sort(band_grid.begin(), band_grid.end());
  band_grid.erase(std::unique(band_grid.begin(), band_grid.end()),
                  band_grid.end());
  std::vector<Real> keep;
  for (Real d : band_grid)
    if (d > 0 && d <= 0.5) keep.push_back(d);
  band_grid = keep;

  std::vector<Real> overlap_grid;
  if (eps > 0) {
    overlap_grid = deltas;
    overlap_grid.push_back(0.9 * eps);
    overlap_grid.push_back(0.99 * eps);
    std::sort(overlap_grid.begin(), overlap_grid.end());
    overlap_grid.erase(
        std::unique(overlap_grid.begin(), overlap_grid.end()),
        overlap_grid.end());
    keep.clear();
    for (Real d : overlap_grid)
      if (d > 0 && d < eps) keep.push_back(d);
    overlap_grid = keep;
  }

  // Draw the probes and precompute, per probe, the weight each eigenvector
  // of the two-party operator puts on omega_A (x) sigma_c, plus the squared
  // overlap with the top eigenvector of the three-party operator.
  const Index nq = da * dc;
  std::vector<RealVector> weights(static_cast<std::size_t>(probes));
  std::vector<Real> overlap2(static_cast<std::size_t>(probes), 0.0);
  for (int k = 0; k < probes; ++k) {
    RngStream rng = RngStream::derive(seed, static_cast<std::uint64_t>(k));
    const ChainProbe probe = chain_probe(da, dc, rank_c, rng);
    const Matrix sig_t = probe.sigma_c.transpose();
    RealVector wts(nq);
    for (Index i = 0; i < nq; ++i) {
      Matrix r(da, dc);
      for (Index x = 0; x < da; ++x)
        for (Index c = 0; c < dc; ++c) r(x, c) = qe.vectors(x * dc + c, i);
      wts(i) = r.conjugate().cwiseProduct(r * sig_t).sum().real() /
               static_cast<Real>(da);
    }
    weights[static_cast<std::size_t>(k)] = std::move(wts);
    const Cplx ip = p.top.dot(probe.state);
    overlap2[static_cast<std::size_t>(k)] = std::norm(ip);
  }

  // Band-mass records: probe-major, then delta.
  for (int k = 0; k < probes; ++k) {
    const RealVector& wts = weights[static_cast<std::size_t>(k)];
    for (Real delta : band_grid) {
      Real lhs = 0;
      for (Index i = 0; i < nq; ++i)
        if (std::abs(qe.values(i) - 0.5) < delta) lhs += wts(i);
      const Real rhs = band_floor(delta, log2d);
      ChainRecord rec;
      rec.check = "band-mass";
      rec.probe = k;
      rec.delta = delta;
      rec.lhs = lhs;
      rec.rhs = rhs;
      rec.holds = lhs >= rhs - 1e-12;
      rec.vacuous = rhs <= 0;
      report.records.push_back(std::move(rec));
    }
  }

  // Overlap records: probe-major, then delta, threshold point last.
  if (eps > 0) {
    for (int k = 0; k < probes; ++k) {
      std::vector<Real> grid = overlap_grid;
      grid.push_back(eps);
      for (Real delta : grid) {
        const Real rhs = overlap_ceiling(delta, log2d);
        ChainRecord rec;
        rec.check = "overlap";
        rec.probe = k;
        rec.delta = delta;
        rec.lhs = overlap2[static_cast<std::size_t>(k)];
        rec.rhs = rhs;
        rec.holds = rec.lhs <= rhs + 1e-12;
        rec.vacuous = rhs >= 1;
        report.records.push_back(std::move(rec));
      }
    }
  } else {
    ChainRecord rec;
    rec.check = "overlap";
    rec.holds = true;
    rec.applicable = false;
    report.records.push_back(std::move(rec));
  }

  // Entropy floor for the top eigenstate, consumed at the strict (lower) end
  // of the certified interval.
  if (eps > 0) {
    ChainRecord rec;
    rec.check = "entropy-floor";
    rec.lhs = ent.hmin.lower;
    rec.rhs = -(1.0 - kFourThirds * eps) * log2d - 3.0;
    rec.holds = rec.lhs >= rec.rhs - 1e-9;
    rec.vacuous = rec.rhs <= -log2d;
    report.records.push_back(std::move(rec));
  } else {
    ChainRecord rec;
    rec.check = "entropy-floor";
    rec.holds = true;
    rec.applicable = false;
    report.records.push_back(std::move(rec));
  }

  // Norm ceiling from the entropy, consumed at the strict (upper) end.
  {
    ChainRecord rec;
    rec.check = "norm-ceiling";
    rec.lhs = p.norm;
    rec.rhs = 0.5 + std::exp2(-0.5 * ent.hmin.upper - 0.5 * log2d);
    rec.holds = rec.lhs <= rec.rhs + 1e-9;
    rec.vacuous = rec.rhs >= 1;
    report.records.push_back(std::move(rec));
  }

  return report;
}

std::vector<BoundRow> bound_table(const std::vector<std::uint64_t>& dims,
                                  const std::vector<std::uint64_t>& lambdas) {
  std::vector<BoundRow> rows;
  rows.reserve(dims.size() + lambdas.size());
  for (std::uint64_t d : dims) {
    require(d >= 14 && d % 2 == 0,
            "bound_table: dimension rows require even d >= 14");
    const Real t = std::log2(static_cast<Real>(d));
    BoundRow row;
    row.kind = "dimension";
    row.parameter = d;
    row.value = 0.5 + 1.5 * std::log2(t) / t;
    row.vacuous = row.value >= 1.0;
    rows.push_back(std::move(row));
  }
  for (std::uint64_t l : lambdas) {
    require(l >= 4, "bound_table: lambda rows require lambda >= 4");
    BoundRow row;
    row.kind = "lambda";
    row.parameter = l;
    row.value = 1.5 * std::log2(static_cast<Real>(l)) / static_cast<Real>(l);
    row.vacuous = 0.5 + row.value >= 1.0;
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace haarlab
