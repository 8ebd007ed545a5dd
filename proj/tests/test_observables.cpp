#include "doctest.h"

#include "nzfit/observables.hpp"
#include "nzfit/spin_model.hpp"

#include <Eigen/Eigenvalues>

using namespace nzfit;

namespace {

const double kBc = 9.3276e-2;

Trajectory short_sme_run() {
  SystemParams p;
  const Mat3 H = build_system_hamiltonian(p);
  std::vector<double> tg;
  for (int i = 0; i <= 400; ++i) tg.push_back(0.25 * i);
  return integrate_sme(H, build_spin1_ops().Sx, kBc, make_sme_kernel(45.9675, 46.4375, 21.6505, 106.1616, 1.1665e-3),
                       pure_state(default_initial_state()), tg);
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("purity and eigenvalues") {
  const Mat3 r = pure_state(default_initial_state());
  CHECK(purity(r) == doctest::Approx(1).epsilon(1e-12));
  CHECK(std::abs(min_eigenvalue(r)) < 1e-15);
  CHECK(purity(Mat3::Identity() / 3.0) == doctest::Approx(1.0 / 3));
}

TEST_CASE("frame invariants along a trajectory") {
  SystemParams p;
  const Mat3 H = build_system_hamiltonian(p);
  const Mat3 S = build_spin1_ops().Sx;
  const auto tr = short_sme_run();
  const auto o = compute_observables(tr, H, S, kBc);
  const auto b = shifted_eigenbasis(H, S, kBc);
  REQUIRE(o.size() == tr.t.size());
  CHECK((rotating_frame(b, 0, tr.rho[0]) - b.U.adjoint() * tr.rho[0] * b.U).cwiseAbs().maxCoeff() == 0);
  CHECK(o.Sx[0] == doctest::Approx(-0.4).epsilon(1e-12));
  const Mat3 Sxe = b.U.adjoint() * S * b.U;
  for (std::size_t j = 0; j < o.size(); j += 17) {
    const Mat3 sig = rotating_frame(b, tr.t[j], tr.rho[j]);
    CHECK(std::abs(purity(sig) - o.purity[j]) < 1e-12);
    const Mat3 lab = b.U.adjoint() * tr.rho[j] * b.U;
    for (int i = 0; i < 3; ++i) CHECK(std::abs(lab(i, i).real() - o.rho_diag[j][i]) < 1e-12);
    CHECK(o.rho_diag[j][0] + o.rho_diag[j][1] + o.rho_diag[j][2] == doctest::Approx(1).epsilon(1e-10));
    // S_X counter-rotated into the frame reproduces the lab mean
    Mat3 Sxr;
    for (int m = 0; m < 3; ++m)
      for (int n = 0; n < 3; ++n) Sxr(m, n) = std::polar(1.0, (b.energies(m) - b.energies(n)) * tr.t[j]) * Sxe(m, n);
    CHECK(std::abs((Sxr * sig).trace().real() - o.Sx[j]) < 1e-10);
    CHECK(std::abs(o.Sx[j]) <= 1);
  }
}

TEST_CASE("series access") {
  const auto tr = short_sme_run();
  SystemParams p;
  const auto o = compute_observables(tr, build_system_hamiltonian(p), build_spin1_ops().Sx, kBc);
  CHECK(series_names().size() == 13);
  for (const auto& n : series_names()) CHECK(series(o, n).size() == o.size());
  CHECK(series(o, "rho22")[5] == o.rho_diag[5][1]);
  CHECK(series(o, "sigma13_im")[7] == o.sigma_offdiag[7][1].imag());
  CHECK_THROWS_AS(series(o, "rho12"), NumericalError);
  CHECK_THROWS_AS(series(o, "nope"), NumericalError);
}

TEST_CASE("comparison metrics") {
  const auto tr = short_sme_run();
  SystemParams p;
  const auto a = compute_observables(tr, build_system_hamiltonian(p), build_spin1_ops().Sx, kBc);
  const auto same = compare(a, a);
  for (const auto& e : same.entries) {
    CHECK(e.max_abs == 0);
    CHECK(e.max_rel == 0);
    CHECK(e.long_rel == 0);
    CHECK(e.lag == 0);
  }
  auto b = a;
  for (auto& d : b.rho_diag) d[2] *= 1.05;
  const auto rep = compare(a, b);
  CHECK(rep.at("rho33").max_rel == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(rep.at("rho33").long_rel == doctest::Approx(0.05).epsilon(1e-9));
  CHECK(rep.at("rho11").max_abs == 0);
  CHECK(rep.format().rfind("series,max_abs,max_rel,long_mean_ref,long_mean_test,long_rel,lag\n", 0) == 0);
  CHECK_THROWS_AS(rep.at("missing"), NumericalError);

  auto shorter = a;
  shorter.t.pop_back();
  CHECK_THROWS_AS(compare(a, shorter), NumericalError);
}

TEST_CASE("lag of a shifted oscillation") {
  ObservableSeries a;
  const int n = 400;
  const double dt = 0.1;
  for (int i = 0; i < n; ++i) {
    a.t.push_back(i * dt);
    a.Sx.push_back(std::sin(0.9 * i * dt));
    a.Sy.push_back(0);
    a.Sz.push_back(0);
    a.purity.push_back(1);
    a.rho_diag.push_back({1, 0, 0});
    a.sigma_offdiag.push_back({});
    a.min_eig.push_back(0);
  }
  auto b = a;
  for (int i = 0; i < n; ++i) b.Sx[i] = std::sin(0.9 * (i - 3) * dt);
  CHECK(compare(a, b).at("Sx").lag == doctest::Approx(3 * dt).epsilon(1e-12));
}

}
