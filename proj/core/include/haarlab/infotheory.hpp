#pragma once
// Entropy certificates and spectral consistency checks.
//
// This header bundles three groups of tools:
//   * conditional min-entropy, computed two independent ways — a certified
//     semidefinite program (hmin_sdp) and an alternating channel-fidelity
//     ascent (hmin_krs) — plus the spectral conditional von Neumann entropy;
//   * a Monte Carlo harness (decoupling_check) that tests the one-shot
//     decoupling inequality: after a random key rotation, tracing out half of
//     a register leaves the rest nearly product with the environment, with an
//     error controlled by 2^{-H_min/2};
//   * verifiers (chain_check, bound_table) for the inequality chain that
//     links the spectrum of a game operator to the min-entropy of its top
//     eigenstate and to dimension-dependent winning-probability ceilings.

#include <cstdint>
#include <string>
#include <vector>

#include "haarlab/games.hpp"
#include "haarlab/operators.hpp"
#include "haarlab/rng.hpp"
#include "haarlab/sdp.hpp"
#include "haarlab/types.hpp"

namespace haarlab {

// Result of a conditional min-entropy computation, in bits.
struct EntropyResult {
  // Certified enclosure of H_min(A|B) in bits. For method "sdp" both ends
  // are rigorous up to the solver's feasibility tolerance; for method
  // "krs-seesaw" only the upper end is informative (ascent lower-bounds the
  // fidelity, hence upper-bounds the entropy) and the lower end is the
  // trivial floor -log2|A|.
  CertifiedInterval hmin;
  // Point estimate: midpoint of the enclosure for "sdp", the certified upper
  // bound for "krs-seesaw".
  Real value = 0;
  std::string method;       // "sdp" or "krs-seesaw"
  std::string fingerprint;  // hash of the input state and register dimensions
  // Signed difference between `value` and an independently computed SDP
  // midpoint. Zero for method "sdp"; for "krs-seesaw" it is filled when the
  // cross-check is enabled.
  Real gap_to_sdp = 0;
};

// H_min(A|B) of `rho_ab` via the dominance program
//   minimize Tr[sigma_B]  subject to  id_A (x) sigma_B >= rho_AB,
// whose optimum t gives H_min = -log2 t. Register A is the first (slowest)
// tensor factor. Returns a certified interval of width <= 1e-4 bits when the
// solver converges; non-convergence is propagated through the `converged`
// flag with the correspondingly widened interval. Both ends are clamped to
// the a-priori range [-log2|A|, log2|A|]. Requires dimensions <= 64 per
// register. Pass `options` to override solver targets; the default width
// target is tightened with |A| so the bit-width goal holds at any scale.
EntropyResult hmin_sdp(const DensityMatrix& rho_ab, Index dim_a, Index dim_b,
                       const DominanceOptions& options = DominanceOptions{
                           /*width_target=*/0.0});

// Options for the alternating-ascent entropy estimate.
struct KrsOptions {
  int restarts = 8;          // restart 0 is a canonical start, the rest random
  int max_iterations = 300;  // per restart
  Real tol = 1e-10;          // stop when the objective gain drops below tol
  std::uint64_t seed = 1;    // master seed for the random restarts
  bool cross_check = true;   // also run hmin_sdp and report the gap
};

// H_min(A|B) through its operational form: the best fidelity, over quantum
// channels E acting on B, between (id (x) E)(rho_AB) and the maximally
// entangled state, via H_min = -log2(|A| * max_E F^2). Channels are
// parametrized by Stinespring isometries V : B -> A (x) E' and optimized by
// polar-decomposition ascent (monotone: the objective is a positive
// quadratic form in V). The achieved fidelity certifies an upper bound on
// H_min, reported in `hmin.upper` and `value`; `hmin.lower` is the trivial
// floor. Requires dimensions <= 16 per register.
EntropyResult hmin_krs(const DensityMatrix& rho_ab, Index dim_a, Index dim_b,
                       const KrsOptions& options = {});

// Conditional von Neumann entropy H(A|B) = H(AB) - H(B) in bits, computed
// spectrally. Upper-bounds the conditional min-entropy.
Real conditional_von_neumann(const DensityMatrix& rho_ab, Index dim_a,
                             Index dim_b);

// One instance of the decoupling experiment: a joint state on A (x) E with
// A = A1 (x) A2 (A1 the first, slowest factor of A). A uniformly random key
// rotates A, A2 is traced out, and the remainder is compared against
// omega_A1 (x) rho_E.
struct DecouplingInstance {
  std::string label;
  DensityMatrix rho_ae;
  Index dim_a1 = 2;
  Index dim_a2 = 1;
  Index dim_e = 1;
};

// Deterministic built-in instance family: a product of the uniform state
// with a fixed environment (already decoupled, distance identically zero), a
// maximally entangled state at |A| = |E| = 8 (minimal entropy, vacuous
// bound), the uniform state on |A| = 16 with a pure environment (the bound
// is small and the distance is still identically zero), and a random pure
// state on |A| = 16 with a pure environment (zero entropy; the distance is
// strictly positive and the bound is tight within a constant).
std::vector<DecouplingInstance> builtin_decoupling_instances();

// Outcome of the Monte Carlo decoupling check.
struct DecouplingReport {
  std::string label;
  Index dim_a1 = 0;
  Index dim_a2 = 0;
  Index dim_e = 0;
  std::size_t samples = 0;
  Real hmin_lower = 0;  // certified lower bound on H_min(A|E), bits
  Real rhs = 0;         // 2^{-hmin_lower/2 - (log2|A2| - log2|A1|)/2 - 1}
  Real lhs_mean = 0;    // sampled average of (1/2)||Tr_A2[...] - target||_1
  Real lhs_stderr = 0;  // standard error of that average
  bool holds = false;   // lhs_mean - 3 * lhs_stderr <= rhs
};

// Samples `samples` keys from `ensemble` (dimension |A1|*|A2|), averages the
// normalized trace distance between the rotated, half-traced state and
// omega_A1 (x) rho_E, and compares against the entropy bound computed with
// the conservative (lower) end of the certified H_min(A|E) interval. The
// per-sample streams are derived from `seed`, so the estimate is independent
// of `threads`. With `enforce` set, a violated bound throws
// std::runtime_error after the report is fully assembled.
DecouplingReport decoupling_check(const DecouplingInstance& instance,
                                  const UnitaryEnsemble& ensemble,
                                  std::size_t samples, std::uint64_t seed,
                                  int threads = 1, bool enforce = false);

// A probe state for chain_check: a pure state on A (x) B (x) C whose
// marginal on A (x) C is exactly omega_A (x) sigma_c. It is built by
// purifying omega_A (x) sigma_c into B, which forces |B| = |A| * rank_c.
struct ChainProbe {
  Vector state;      // unit vector on A (x) B (x) C
  Matrix sigma_c;    // the C factor of the A (x) C marginal
  Index dim_a = 0;
  Index dim_b = 0;   // = dim_a * rank_c
  Index dim_c = 0;
  Index rank_c = 0;  // rank of sigma_c
};

// Draws sigma_c of rank `rank_c` from the partial-trace (Hilbert-Schmidt)
// ensemble and purifies omega_A (x) sigma_c into B. Requires even dim_a >= 2
// and 1 <= rank_c <= dim_c.
ChainProbe chain_probe(Index dim_a, Index dim_c, Index rank_c, RngStream& rng);

// One verified inequality. `check` is one of:
//   "band-mass":     the probe's mass in the spectral band of the
//                    Alice-Charlie operator at half-width delta is at least
//                    band_floor(delta, log2 d);
//   "overlap":       the squared overlap between the top eigenvector of the
//                    three-party operator and the probe is at most
//                    overlap_ceiling(delta, log2 d), for delta < epsilon;
//   "entropy-floor": H_min(A|B) of the top eigenstate is at least
//                    -(1 - (4/3) epsilon) log2 d - 3;
//   "norm-ceiling":  the operator norm is at most
//                    1/2 + 2^{-H_min(A|B)/2 - (log2 d)/2}.
struct ChainRecord {
  std::string check;
  int probe = -1;    // probe index; -1 for probe-independent records
  Real delta = 0;    // band half-width (0 where not meaningful)
  Real lhs = 0;
  Real rhs = 0;
  bool holds = false;
  bool vacuous = false;    // the bound carries no information here
  bool applicable = true;  // false when a precondition (epsilon > 0) fails
};

// Everything chain_check computed, with the records in a fixed deterministic
// order: all band-mass records (by probe, then delta), all overlap records
// (by probe, then delta, theorem point last), then entropy-floor, then
// norm-ceiling.
struct ChainReport {
  std::vector<ChainRecord> records;
  Real norm_p = 0;      // operator norm of the three-party operator
  Real epsilon = 0;     // norm_p - 1/2
  Real hmin_lower = 0;  // certified H_min(A|B) interval of the top eigenstate
  Real hmin_upper = 0;
  Index dim_a = 0;
  Index dim_b = 0;
  Index dim_c = 0;
  std::size_t probes = 0;
};

// Evaluates the full inequality chain for the game induced by a finite key
// ensemble and fixed keyed measurements. Builds the three-party operator P
// and the Alice-Charlie operator Q exactly, draws `probes` probe states
// (rank dim(bob)/dim(game), streams derived from `seed`), and evaluates
// every record on the delta grid: the caller's `deltas`, plus 0.9 epsilon
// and 0.99 epsilon (approaching the overlap threshold from below), plus
// balanced_band_delta(log2 d); band-mass deltas are kept in (0, 1/2],
// overlap deltas in (0, epsilon) with one extra record at delta = epsilon.
// Certified-interval ends are consumed in the strict direction: the
// entropy-floor record uses the lower end of H_min, the norm-ceiling record
// the upper end. When epsilon <= 0 the overlap and entropy-floor checks are
// reported as single not-applicable records.
ChainReport chain_check(const MoeGame& game, const KeyedPovms& bob,
                        const KeyedPovms& charlie, int probes,
                        const std::vector<Real>& deltas, std::uint64_t seed,
                        int threads = 1);

// Lower bound on the probe mass inside the spectral band of half-width
// `delta`: 1 - 4 * 2^{-(4/3) delta log2_d}.
Real band_floor(Real delta, Real log2_d);

// Upper bound on the squared top-eigenvector/probe overlap at band
// half-width `delta`: 8 * 2^{-(4/3) delta log2_d}.
Real overlap_ceiling(Real delta, Real log2_d);

// The band half-width 3 log2(log2_d) / (4 log2_d), at which band_floor
// simplifies to 1 - 4/log2_d.
Real balanced_band_delta(Real log2_d);

// One row of the asymptotic bound table.
struct BoundRow {
  std::string kind;  // "dimension" or "lambda"
  std::uint64_t parameter = 0;
  // For "dimension": the winning-probability ceiling
  //   1/2 + 3 log2(log2 d) / (2 log2 d).
  // For "lambda": the band half-width target 3 log2(lambda) / (2 lambda).
  Real value = 0;
  bool vacuous = false;  // the row says nothing (ceiling >= 1)
};

// Evaluates the dimension-indexed winning-probability ceiling on `dims`
// (each must be even and >= 14) and the security-parameter-indexed band
// half-width on `lambdas` (each >= 4). Dimension rows with value >= 1 and
// lambda rows with 1/2 + value >= 1 are flagged vacuous.
std::vector<BoundRow> bound_table(const std::vector<std::uint64_t>& dims,
                                  const std::vector<std::uint64_t>& lambdas);

}  // namespace haarlab
