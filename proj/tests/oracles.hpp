#pragma once

// Reference constructions that share no code path with the library: dense
// Kronecker products in the spin product basis, a Taylor matrix exponential,
// brute-force operator-basis sums.

#include "nzfit/bath_thermo.hpp"
#include "nzfit/spin_model.hpp"

#include <array>
#include <cmath>

namespace oracle {

using nzfit::cplx;
using nzfit::MatXc;

inline MatXc kron(const MatXc& a, const MatXc& b) {
  MatXc out(a.rows() * b.rows(), a.cols() * b.cols());
  for (Eigen::Index i = 0; i < a.rows(); ++i)
    for (Eigen::Index j = 0; j < a.cols(); ++j)
      out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
  return out;
}

// Spin-1/2 components: index 0 is spin up along z.
inline std::array<MatXc, 3> half_spin() {
  const cplx i(0, 1);
  MatXc x(2, 2), y(2, 2), z(2, 2);
  x << 0, 0.5, 0.5, 0;
  y << 0, -0.5 * i, 0.5 * i, 0;
  z << 0.5, 0, 0, -0.5;
  return {x, y, z};
}

// Site j is bit j of the basis index, so it is the (n-1-j)th Kronecker factor.
inline MatXc site_op(int j, const MatXc& s, int n) {
  const MatXc left = MatXc::Identity(Eigen::Index(1) << (n - 1 - j), Eigen::Index(1) << (n - 1 - j));
  const MatXc right = MatXc::Identity(Eigen::Index(1) << j, Eigen::Index(1) << j);
  return kron(kron(left, s), right);
}

struct DenseBath {
  MatXc H, B;
};

// H_B = h_x0 sum I_x + (beta_dd/C) sum_{j<k} C_jk (3 Iz Iz - I.I)
// B   = (1/A) sum_k A_k (A_XX I_x + A_XY I_y + A_XZ I_z)
inline DenseBath dense_bath(const nzfit::BathGeometry& g, const nzfit::SystemParams& p) {
  const int n = int(g.positions.size());
  const auto I = half_spin();
  const Eigen::Index dim = Eigen::Index(1) << n;
  DenseBath d{MatXc::Zero(dim, dim), MatXc::Zero(dim, dim)};
  std::vector<std::array<MatXc, 3>> ops(n);
  for (int j = 0; j < n; ++j)
    for (int c = 0; c < 3; ++c) ops[j][c] = site_op(j, I[c], n);
  for (int j = 0; j < n; ++j) d.H += p.h_x0 * ops[j][0];
  for (int j = 0; j < n; ++j)
    for (int k = j + 1; k < n; ++k) {
      const MatXc dot = ops[j][0] * ops[k][0] + ops[j][1] * ops[k][1] + ops[j][2] * ops[k][2];
      d.H += (p.beta_dd / g.C_norm) * g.C(j, k) * (3.0 * ops[j][2] * ops[k][2] - dot);
    }
  for (int k = 0; k < n; ++k)
    d.B += (g.A(k) / g.A_norm) * (p.A_XX * ops[k][0] + p.A_XY * ops[k][1] + p.A_XZ * ops[k][2]);
  return d;
}

// exp(A) by scaling and squaring of the Taylor series.
inline MatXc expm(const MatXc& A) {
  const double norm = A.cwiseAbs().rowwise().sum().maxCoeff();
  int s = 0;
  while (norm / std::ldexp(1.0, s) > 0.25) ++s;
  const MatXc X = A / std::ldexp(1.0, s);
  MatXc term = MatXc::Identity(A.rows(), A.cols());
  MatXc sum = term;
  for (int k = 1; k < 30; ++k) {
    term = (term * X) / double(k);
    sum += term;
  }
  for (int i = 0; i < s; ++i) sum = sum * sum;
  return sum;
}

// All BathMoments entries as plain traces over the full product space.
inline nzfit::BathMoments product_basis_moments(const MatXc& H, const MatXc& B, double kBT,
                                                const Eigen::VectorXd& eta) {
  const Eigen::Index n = H.rows();
  const MatXc Id = MatXc::Identity(n, n);
  MatXc rho = expm(-H / kBT);
  rho /= rho.trace();
  MatXc factor = Id;
  MatXc Hj = Id;
  for (Eigen::Index j = 0; j < eta.size(); ++j) {
    Hj = Hj * H;
    factor += eta(j) * (Hj - (rho * Hj).trace() * Id);
  }
  const MatXc L = rho * factor;
  const MatXc B2 = B * B, B3 = B2 * B, B4 = B3 * B, H2 = H * H;
  auto tr = [](const MatXc& m) { return m.trace().real(); };
  nzfit::BathMoments m;
  m.Bbar = tr(B * rho);
  m.B2bar = tr(B2 * rho);
  m.B3bar = tr(B3 * rho);
  m.calBbar = tr(B * L);
  m.calB2 = tr(B2 * L);
  m.calB3 = tr(B3 * L);
  m.calB4 = tr(B4 * L);
  m.TrB[0] = double(n);
  m.TrB[1] = tr(B);
  m.TrB[2] = tr(B2);
  m.TrB[3] = tr(B3);
  m.LambdaBar = tr(L * rho);
  m.TrLambda2 = tr(L * L);
  m.TrBLambda2 = tr(B * L * L);
  m.Kubo3[0] = tr(B * H2 * B * L);
  m.Kubo3[1] = tr(H * B * H * B * L);
  m.Kubo3[2] = tr(H2 * B2 * L);
  return m;
}

// (1/N^2) sum_j Tr{chi_j^+ [X,[Y,chi_j]]} over the matrix units chi = E_ab,
// an orthonormal basis under the Hilbert-Schmidt product.
inline cplx brute_force_dc_mean(const MatXc& X, const MatXc& Y) {
  const Eigen::Index N = X.rows();
  cplx s = 0;
  for (Eigen::Index a = 0; a < N; ++a)
    for (Eigen::Index b = 0; b < N; ++b) {
      MatXc chi = MatXc::Zero(N, N);
      chi(a, b) = 1;
      const MatXc inner = Y * chi - chi * Y;
      const MatXc outer = X * inner - inner * X;
      s += (chi.adjoint() * outer).trace();
    }
  return s / double(N * N);
}

inline MatXc random_hermitian(int n, std::uint64_t seed) {
  std::uint64_t st = seed * 6364136223846793005ULL + 1442695040888963407ULL;
  auto next = [&]() {
    st = st * 6364136223846793005ULL + 1442695040888963407ULL;
    return double(st >> 11) * 0x1.0p-53 * 2 - 1;
  };
  MatXc a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = cplx(next(), next());
  return (a + a.adjoint()) / 2.0;
}

}  // namespace oracle
