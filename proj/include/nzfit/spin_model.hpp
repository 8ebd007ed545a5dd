#pragma once

#include "nzfit/linalg.hpp"

#include <cstdint>
#include <vector>

namespace nzfit {

// Axis carrying the D term of the zero-field splitting. The z form is the
// physical NV Hamiltonian and the default; x is kept for comparison runs.
enum class ZfsAxis { z, x };

struct SystemParams {
  double h_x = 0.194;
  double D = 2.88;
  double E = 0.1;
  double A_XX = 0.2;
  double A_XY = 0.02;
  double A_XZ = 0.02;
  double h_x0 = 1.08e-3;
  double beta_dd = 4.52e-5;
  double kBT = 3e-4;
  int n_spins = 12;
  int lattice_radius = 5;
  std::uint64_t seed = 1;
  ZfsAxis zfs_axis = ZfsAxis::z;
};

void validate(const SystemParams& p);

template <class T = double>
struct SpinOps {
  CMatrix3<T> Sx, Sy, Sz;
};

template <class T = double>
SpinOps<T> build_spin1_ops() {
  using C = std::complex<T>;
  const T r = T(1) / std::sqrt(T(2));
  const C i(0, 1);
  SpinOps<T> s;
  s.Sx << 0, r, 0, r, 0, r, 0, r, 0;
  s.Sy << 0, -i * r, 0, i * r, 0, -i * r, 0, i * r, 0;
  s.Sz << 1, 0, 0, 0, 0, 0, 0, 0, -1;
  return s;
}

// H = h_x S_X + D S_a^2 + E (S_X^2 - S_Y^2), a = zfs_axis
template <class T = double>
CMatrix3<T> build_system_hamiltonian(const SystemParams& p) {
  const auto s = build_spin1_ops<T>();
  const CMatrix3<T>& Sa = p.zfs_axis == ZfsAxis::z ? s.Sz : s.Sx;
  CMatrix3<T> h = T(p.h_x) * s.Sx + T(p.D) * (Sa * Sa) + T(p.E) * (s.Sx * s.Sx - s.Sy * s.Sy);
  return h;
}

using Site = Eigen::Vector3i;

// All nonzero integer points with |r|^2 <= radius^2, in lexicographic order.
std::vector<Site> lattice_sites(int radius);

// n_spins distinct sites drawn uniformly without replacement.
std::vector<Site> sample_lattice(int radius, int n_spins, std::uint64_t seed);

struct BathGeometry {
  std::vector<Site> positions;
  Eigen::MatrixXd C;  // symmetric, zero diagonal
  double C_norm = 0;
  Eigen::VectorXd A;
  double A_norm = 0;
};

BathGeometry compute_couplings(const std::vector<Site>& positions);

// Sum of c * X^x_mask Z^z_mask over n spin-1/2 sites. Bit j of a basis index
// is 0 for spin up along z. Terms are grouped by flip mask so the diagonal
// part is applied once.
struct PauliOperator {
  struct Term {
    std::uint32_t z_mask;
    cplx coef;
  };
  struct Group {
    std::uint32_t x_mask;
    std::vector<Term> terms;
  };
  int n_sites = 0;
  std::vector<Group> groups;  // sorted by x_mask, merged
  std::vector<cplx> diag;     // x_mask == 0 part, filled by finalize()

  std::size_t dim() const { return std::size_t(1) << n_sites; }
  bool is_real() const;
  void add(std::uint32_t x_mask, std::uint32_t z_mask, cplx coef);
  // Tabulates the diagonal group; add() clears it again.
  void finalize();

  // y = O x. Real scalar requires is_real().
  template <class Scalar>
  void apply(const Scalar* x, Scalar* y) const;

  MatXc dense() const;
};

struct BathOperators {
  PauliOperator H_B;
  PauliOperator B;
};

BathOperators build_bath_operators(const BathGeometry& g, const SystemParams& p);

}  // namespace nzfit
