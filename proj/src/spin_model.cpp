#include "nzfit/spin_model.hpp"

#include "nzfit/rng.hpp"

#include <algorithm>
#include <bit>
#include <cmath>

namespace nzfit {

void validate(const SystemParams& p) {
  const double e[] = {p.h_x, p.D, p.E, p.A_XX, p.A_XY, p.A_XZ, p.h_x0, p.beta_dd, p.kBT};
  for (double v : e)
    if (!std::isfinite(v)) throw NumericalError("system parameters must be finite");
  if (p.n_spins < 1) throw NumericalError("n_spins must be at least 1");
  if (p.n_spins > 24) throw NumericalError("n_spins above 24 exceeds the supported bath size");
  if (p.lattice_radius < 1) throw NumericalError("lattice_radius must be at least 1");
  if (!(p.kBT > 0)) throw NumericalError("kBT must be positive");
}

std::vector<Site> lattice_sites(int radius) {
  std::vector<Site> out;
  const int r2 = radius * radius;
  for (int x = -radius; x <= radius; ++x)
    for (int y = -radius; y <= radius; ++y)
      for (int z = -radius; z <= radius; ++z) {
        if (x == 0 && y == 0 && z == 0) continue;
        if (x * x + y * y + z * z <= r2) out.emplace_back(x, y, z);
      }
  return out;
}

std::vector<Site> sample_lattice(int radius, int n_spins, std::uint64_t seed) {
  auto pool = lattice_sites(radius);
  if (n_spins < 0 || std::size_t(n_spins) > pool.size())
    throw NumericalError("lattice of radius " + std::to_string(radius) + " has only " +
                         std::to_string(pool.size()) + " nonzero sites, cannot place " +
                         std::to_string(n_spins));
  auto g = make_stream(seed, "lattice");
  // partial Fisher-Yates
  for (int i = 0; i < n_spins; ++i) {
    const auto j = i + uniform_index(g, pool.size() - i);
    std::swap(pool[i], pool[j]);
  }
  pool.resize(n_spins);
  return pool;
}

BathGeometry compute_couplings(const std::vector<Site>& positions) {
  const int n = int(positions.size());
  BathGeometry g;
  g.positions = positions;
  g.C = Eigen::MatrixXd::Zero(n, n);
  g.A = Eigen::VectorXd::Zero(n);
  double c2 = 0, a2 = 0;
  for (int j = 0; j < n; ++j) {
    const Eigen::Vector3d r = positions[j].cast<double>();
    const double rr = r.squaredNorm();
    if (rr == 0) throw NumericalError("impurity placed at the origin");
    g.A(j) = (1 - 3 * r.z() * r.z() / rr) / (rr * std::sqrt(rr));
    a2 += g.A(j) * g.A(j);
    for (int k = j + 1; k < n; ++k) {
      const Eigen::Vector3d d = r - positions[k].cast<double>();
      const double dd = d.squaredNorm();
      if (dd == 0) throw NumericalError("coincident impurity positions");
      const double c = (1 - 3 * d.z() * d.z() / dd) / (dd * std::sqrt(dd));
      g.C(j, k) = g.C(k, j) = c;
      c2 += c * c;
    }
  }
  g.C_norm = std::sqrt(c2);
  g.A_norm = std::sqrt(a2);
  return g;
}

bool PauliOperator::is_real() const {
  for (const auto& gr : groups)
    for (const auto& t : gr.terms)
      if (t.coef.imag() != 0) return false;
  return true;
}

void PauliOperator::add(std::uint32_t x_mask, std::uint32_t z_mask, cplx coef) {
  if (coef == cplx(0)) return;
  diag.clear();
  auto it = std::lower_bound(groups.begin(), groups.end(), x_mask,
                             [](const Group& g, std::uint32_t m) { return g.x_mask < m; });
  if (it == groups.end() || it->x_mask != x_mask) it = groups.insert(it, Group{x_mask, {}});
  for (auto& t : it->terms)
    if (t.z_mask == z_mask) {
      t.coef += coef;
      return;
    }
  it->terms.push_back({z_mask, coef});
}

void PauliOperator::finalize() {
  diag.assign(dim(), cplx(0));
  if (groups.empty() || groups.front().x_mask != 0) return;
  for (std::size_t s = 0; s < dim(); ++s) {
    cplx acc = 0;
    for (const auto& t : groups.front().terms)
      acc += (std::popcount(t.z_mask & std::uint32_t(s)) & 1) ? -t.coef : t.coef;
    diag[s] = acc;
  }
}

namespace {
template <class Scalar>
Scalar as_scalar(cplx c) {
  if constexpr (std::is_same_v<Scalar, double>)
    return c.real();
  else
    return c;
}
}  // namespace

template <class Scalar>
void PauliOperator::apply(const Scalar* x, Scalar* y) const {
  const std::size_t n = dim();
  std::size_t first = 0;
  if (!diag.empty()) {
    for (std::size_t s = 0; s < n; ++s) y[s] = as_scalar<Scalar>(diag[s]) * x[s];
    if (!groups.empty() && groups.front().x_mask == 0) first = 1;
  } else {
    std::fill(y, y + n, Scalar(0));
  }
  for (std::size_t gi = first; gi < groups.size(); ++gi) {
    const auto& g = groups[gi];
    if (g.terms.size() == 1) {
      const Scalar c = as_scalar<Scalar>(g.terms[0].coef);
      const std::uint32_t zm = g.terms[0].z_mask;
      for (std::size_t s = 0; s < n; ++s) {
        const std::uint32_t src = std::uint32_t(s) ^ g.x_mask;
        y[s] += (std::popcount(zm & src) & 1) ? -c * x[src] : c * x[src];
      }
    } else {
      for (std::size_t s = 0; s < n; ++s) {
        const std::uint32_t src = std::uint32_t(s) ^ g.x_mask;
        Scalar c = 0;
        for (const auto& t : g.terms) {
          const Scalar tc = as_scalar<Scalar>(t.coef);
          c += (std::popcount(t.z_mask & src) & 1) ? -tc : tc;
        }
        y[s] += c * x[src];
      }
    }
  }
}

template void PauliOperator::apply<double>(const double*, double*) const;
template void PauliOperator::apply<cplx>(const cplx*, cplx*) const;

MatXc PauliOperator::dense() const {
  const std::size_t n = dim();
  MatXc m = MatXc::Zero(n, n);
  for (const auto& g : groups)
    for (const auto& t : g.terms)
      for (std::size_t s = 0; s < n; ++s) {
        const std::uint32_t src = std::uint32_t(s) ^ g.x_mask;
        m(s, src) += (std::popcount(t.z_mask & src) & 1) ? -t.coef : t.coef;
      }
  return m;
}

BathOperators build_bath_operators(const BathGeometry& g, const SystemParams& p) {
  const int n = int(g.positions.size());
  BathOperators ops;
  ops.H_B.n_sites = n;
  ops.B.n_sites = n;
  for (int j = 0; j < n; ++j) ops.H_B.add(1u << j, 0, p.h_x0 / 2);
  // 3 Iz Iz - I.I = 2 Iz Iz - Ix Ix - Iy Iy, and Iy Iy = -(XZ)(XZ)/4
  if (g.C_norm > 0) {
    const double f = p.beta_dd / g.C_norm;
    for (int j = 0; j < n; ++j)
      for (int k = j + 1; k < n; ++k) {
        const double c = f * g.C(j, k);
        const std::uint32_t m = (1u << j) | (1u << k);
        ops.H_B.add(0, m, c / 2);
        ops.H_B.add(m, 0, -c / 4);
        ops.H_B.add(m, m, c / 4);
      }
  }
  if (g.A_norm > 0) {
    const cplx i(0, 1);
    for (int k = 0; k < n; ++k) {
      const double a = g.A(k) / g.A_norm;
      const std::uint32_t m = 1u << k;
      ops.B.add(m, 0, a * p.A_XX / 2);
      ops.B.add(m, m, i * (a * p.A_XY / 2));
      ops.B.add(0, m, a * p.A_XZ / 2);
    }
  }
  ops.H_B.finalize();
  ops.B.finalize();
  return ops;
}

}  // namespace nzfit
