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

#include "haarlab/gf2.hpp"

#include <cmath>

namespace haarlab {

namespace {

// Primitive polynomials, including the leading x^m term.
unsigned primitive_poly(int m) {
  switch (m) {
    case 1: return 0b11;     // x + 1
    case 2: return 0b111;    // x^2 + x + 1
    case 3: return 0b1011;   // x^3 + x + 1
    case 4: return 0b10011;  // x^4 + x + 1
    default: require(false, "GF2m: m must be in {1,2,3,4}"); return 0;
  }
}

unsigned clmul_mod(unsigned a, unsigned b, unsigned poly, int m) {
  unsigned r = 0;
  while (b) {
    if (b & 1u) r ^= a;
    b >>= 1;
    a <<= 1;
    if (a & (1u << m)) a ^= poly;
  }
  return r;
}

}  // namespace

GF2m::GF2m(int m) : m_(m), poly_(primitive_poly(m)) {
  const unsigned n = q();
  mul_.assign(n * n, 0);
  for (unsigned a = 0; a < n; ++a) {
    for (unsigned b = 0; b < n; ++b) {
      mul_[a * n + b] = static_cast<std::uint8_t>(clmul_mod(a, b, poly_, m_));
    }
  }
  inv_.assign(n, 0);
  for (unsigned a = 1; a < n; ++a) {
    for (unsigned b = 1; b < n; ++b) {
      if (mul_[a * n + b] == 1) {
        inv_[a] = static_cast<std::uint8_t>(b);
        break;
      }
    }
    require(inv_[a] != 0, "GF2m: element without inverse (polynomial not irreducible?)");
  }
}

unsigned GF2m::mul(unsigned a, unsigned b) const {
  require(a < q() && b < q(), "GF2m::mul: element out of range");
  return mul_[a * q() + b];
}

unsigned GF2m::inv(unsigned a) const {
  require(a >= 1 && a < q(), "GF2m::inv: element must be a nonzero field element");
  return inv_[a];
}

unsigned GF2m::pow(unsigned a, unsigned e) const {
  unsigned r = 1, base = a;
  while (e) {
    if (e & 1u) r = mul(r, base);
    base = mul(base, base);
    e >>= 1;
  }
  return r;
}

unsigned GF2m::trace(unsigned a) const {
  unsigned acc = a, t = a;
  for (int i = 1; i < m_; ++i) {
    t = mul(t, t);
    acc ^= t;
  }
  require(acc <= 1, "GF2m::trace: trace landed outside the prime field");
  return acc;
}

// ---- Binary symplectic space -------------------------------------------------

int symplectic_form(int n, BinVec u, BinVec v) {
  const BinVec lo = (1u << n) - 1;
  const BinVec xu = u & lo, zu = u >> n;
  const BinVec xv = v & lo, zv = v >> n;
  return parity(xu & zv) ^ parity(zu & xv);
}

BinVec transvect(int n, BinVec v, BinVec u) {
  return symplectic_form(n, u, v) ? (u ^ v) : u;
}

BinSymplectic BinSymplectic::identity(int n) {
  BinSymplectic s;
  s.n = n;
  s.col.resize(static_cast<std::size_t>(2 * n));
  for (int j = 0; j < 2 * n; ++j) s.col[static_cast<std::size_t>(j)] = 1u << j;
  return s;
}

BinVec BinSymplectic::apply(BinVec v) const {
  BinVec out = 0;
  for (int j = 0; j < 2 * n; ++j) {
    if (v & (1u << j)) out ^= col[static_cast<std::size_t>(j)];
  }
  return out;
}

BinSymplectic BinSymplectic::compose(const BinSymplectic& other) const {
  require(n == other.n, "BinSymplectic::compose: size mismatch");
  BinSymplectic out;
  out.n = n;
  out.col.resize(col.size());
  for (std::size_t j = 0; j < col.size(); ++j) out.col[j] = apply(other.col[j]);
  return out;
}

bool BinSymplectic::is_symplectic() const {
  if (static_cast<int>(col.size()) != 2 * n) return false;
  for (int i = 0; i < 2 * n; ++i) {
    for (int j = i + 1; j < 2 * n; ++j) {
      const int want = (j == i + n) ? 1 : 0;
      if (symplectic_form(n, col[static_cast<std::size_t>(i)],
                          col[static_cast<std::size_t>(j)]) != want) {
        return false;
      }
    }
  }
  return true;
}

std::vector<BinVec> factor_into_transvections(const BinSymplectic& s) {
  require(s.is_symplectic(), "factor_into_transvections: input is not symplectic");
  const int n = s.n;
  const BinVec mask = (n == 16) ? ~0u : ((1u << (2 * n)) - 1);
  BinSymplectic cur = s;
  std::vector<BinVec> vs;

  auto apply_t = [&](BinVec v) {
    for (auto& c : cur.col) c = transvect(n, v, c);
    vs.push_back(v);
  };
  // True when a transvection along w leaves every already-fixed pair alone.
  auto in_complement = [&](BinVec w, int k) {
    for (int j = 0; j < k; ++j) {
      if (symplectic_form(n, 1u << j, w)) return false;
      if (symplectic_form(n, 1u << (n + j), w)) return false;
    }
    return true;
  };

  for (int k = 0; k < n; ++k) {
    const BinVec ek = 1u << k;
    const BinVec fk = 1u << (n + k);

    // Send the image of e_k back to e_k. Both vectors lie in the symplectic
    // complement of the fixed pairs, so chaining vectors exist there.
    const BinVec a = cur.col[static_cast<std::size_t>(k)];
    if (a != ek) {
      if (symplectic_form(n, a, ek) == 1) {
        apply_t(a ^ ek);
      } else {
        BinVec z = 0;
        for (BinVec cand = 1; cand <= mask && !z; ++cand) {
          if (in_complement(cand, k) && symplectic_form(n, a, cand) == 1 &&
              symplectic_form(n, ek, cand) == 1) {
            z = cand;
          }
        }
        require(z != 0, "factor_into_transvections: no chaining vector for the first half");
        apply_t(a ^ z);
        apply_t(z ^ ek);
      }
    }

    // Send the image of f_k to f_k while keeping e_k; any chaining vector must
    // pair to 1 with e_k so both transvections leave e_k untouched.
    const BinVec b = cur.col[static_cast<std::size_t>(n + k)];
    if (b != fk) {
      if (symplectic_form(n, b, fk) == 1) {
        apply_t(b ^ fk);
      } else {
        BinVec z = 0;
        for (BinVec cand = 1; cand <= mask && !z; ++cand) {
          if (in_complement(cand, k) && symplectic_form(n, b, cand) == 1 &&
              symplectic_form(n, fk, cand) == 1 && symplectic_form(n, ek, cand) == 1) {
            z = cand;
          }
        }
        require(z != 0, "factor_into_transvections: no chaining vector for the second half");
        apply_t(b ^ z);
        apply_t(z ^ fk);
      }
    }
  }
  require(cur == BinSymplectic::identity(n), "factor_into_transvections: reduction failed");

  // cur = T_{vs[last]} o ... o T_{vs[0]} o s = identity, and transvections are
  // involutions, so s = T_{vs[0]} o ... o T_{vs[last]}.
  return vs;
}

// ---- Pauli operators and Clifford lifts -------------------------------------

namespace {

inline Cplx i_power(int k) {
  switch (k & 3) {
    case 0: return Cplx(1, 0);
    case 1: return Cplx(0, 1);
    case 2: return Cplx(-1, 0);
    default: return Cplx(0, -1);
  }
}

}  // namespace

Matrix pauli_matrix(int n, BinVec a) {
  const Index d = Index{1} << n;
  const BinVec lo = (1u << n) - 1;
  const BinVec x = a & lo, z = a >> n;
  const Cplx phase = i_power(__builtin_popcount(x & z));
  Matrix m = Matrix::Zero(d, d);
  for (BinVec v = 0; v < static_cast<BinVec>(d); ++v) {
    m(v ^ x, v) = phase * (parity(z & v) ? -1.0 : 1.0);
  }
  return m;
}

void pauli_mult_left(int n, BinVec a, const Matrix& in, Matrix& out) {
  const Index d = Index{1} << n;
  require(in.rows() == d, "pauli_mult_left: dimension mismatch");
  const BinVec lo = (1u << n) - 1;
  const BinVec x = a & lo, z = a >> n;
  const Cplx phase = i_power(__builtin_popcount(x & z));
  out.resize(d, in.cols());
  for (Index r = 0; r < d; ++r) {
    const BinVec rb = static_cast<BinVec>(r);
    const Cplx f = phase * (parity(z & (rb ^ x)) ? -1.0 : 1.0);
    out.row(r) = f * in.row(static_cast<Index>(rb ^ x));
  }
}

Cplx pauli_mult_trace(int n, BinVec a, const Matrix& m) {
  const Index d = Index{1} << n;
  require(m.rows() == d && m.cols() == d, "pauli_mult_trace: dimension mismatch");
  const BinVec lo = (1u << n) - 1;
  const BinVec x = a & lo, z = a >> n;
  const Cplx phase = i_power(__builtin_popcount(x & z));
  Cplx acc = 0;
  for (Index r = 0; r < d; ++r) {
    const BinVec rb = static_cast<BinVec>(r);
    const Real sign = parity(z & (rb ^ x)) ? -1.0 : 1.0;
    acc += sign * m(static_cast<Index>(rb ^ x), r);
  }
  return phase * acc;
}

Matrix transvection_unitary(int n, BinVec v) {
  const Index d = Index{1} << n;
  return (Matrix::Identity(d, d) + Cplx(0, 1) * pauli_matrix(n, v)) / std::sqrt(2.0);
}

Matrix lift_symplectic(const BinSymplectic& s) {
  const Index d = Index{1} << s.n;
  Matrix l = Matrix::Identity(d, d);
  for (BinVec v : factor_into_transvections(s)) l = l * transvection_unitary(s.n, v);
  return l;
}

// ---- SL(2, 2^m) inside Sp(2m, 2) ---------------------------------------------

std::vector<SL2Element> enumerate_sl2(const GF2m& f) {
  const unsigned q = f.q();
  std::vector<SL2Element> out;
  out.reserve(q * (q * q - 1));
  for (unsigned a = 0; a < q; ++a) {
    for (unsigned b = 0; b < q; ++b) {
      for (unsigned c = 0; c < q; ++c) {
        for (unsigned d = 0; d < q; ++d) {
          if ((f.mul(a, d) ^ f.mul(b, c)) == 1u) out.push_back({a, b, c, d});
        }
      }
    }
  }
  require(out.size() == static_cast<std::size_t>(q) * (q * q - 1),
          "enumerate_sl2: unexpected group order");
  return out;
}

namespace {

// Rows of the inverse of a GF(2) matrix given by row masks.
std::vector<unsigned> invert_gf2_rows(std::vector<unsigned> rows) {
  const int m = static_cast<int>(rows.size());
  std::vector<unsigned> inv(rows.size());
  for (int i = 0; i < m; ++i) inv[static_cast<std::size_t>(i)] = 1u << i;
  for (int c = 0; c < m; ++c) {
    int piv = -1;
    for (int r = c; r < m && piv < 0; ++r) {
      if (rows[static_cast<std::size_t>(r)] & (1u << c)) piv = r;
    }
    require(piv >= 0, "invert_gf2_rows: matrix is singular");
    std::swap(rows[static_cast<std::size_t>(piv)], rows[static_cast<std::size_t>(c)]);
    std::swap(inv[static_cast<std::size_t>(piv)], inv[static_cast<std::size_t>(c)]);
    for (int r = 0; r < m; ++r) {
      if (r != c && (rows[static_cast<std::size_t>(r)] & (1u << c))) {
        rows[static_cast<std::size_t>(r)] ^= rows[static_cast<std::size_t>(c)];
        inv[static_cast<std::size_t>(r)] ^= inv[static_cast<std::size_t>(c)];
      }
    }
  }
  return inv;
}

}  // namespace

BinSymplectic embed_sl2(const GF2m& f, const SL2Element& s) {
  const int m = f.m();
  require((f.mul(s.a, s.d) ^ f.mul(s.b, s.c)) == 1u, "embed_sl2: determinant must be 1");

  // Gram matrix of the power basis under the trace form, G_ij = tr(alpha^i alpha^j).
  std::vector<unsigned> gram(static_cast<std::size_t>(m), 0);
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      if (f.trace(f.mul(1u << i, 1u << j))) gram[static_cast<std::size_t>(i)] |= 1u << j;
    }
  }
  const std::vector<unsigned> gram_inv = invert_gf2_rows(gram);
  auto matvec = [m](const std::vector<unsigned>& rows, unsigned v) {
    unsigned out = 0;
    for (int i = 0; i < m; ++i) {
      if (parity(rows[static_cast<std::size_t>(i)] & v)) out |= 1u << i;
    }
    return out;
  };

  BinSymplectic out;
  out.n = m;
  out.col.resize(static_cast<std::size_t>(2 * m));
  for (int j = 0; j < 2 * m; ++j) {
    const unsigned x = (j < m) ? (1u << j) : 0u;
    const unsigned z = (j < m) ? 0u : (1u << (j - m));
    // Read the label as a field pair: X part in the power basis, Z part in the
    // trace-dual basis.
    const unsigned a = x;
    const unsigned b = matvec(gram_inv, z);
    const unsigned a2 = f.mul(s.a, a) ^ f.mul(s.b, b);
    const unsigned b2 = f.mul(s.c, a) ^ f.mul(s.d, b);
    const unsigned x2 = a2;
    const unsigned z2 = matvec(gram, b2);
    out.col[static_cast<std::size_t>(j)] = x2 | (z2 << m);
  }
  require(out.is_symplectic(), "embed_sl2: image is not symplectic");
  return out;
}

}  // namespace haarlab
