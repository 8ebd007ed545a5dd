#pragma once

#include "nzfit/dynamics.hpp"

#include <array>
#include <string>
#include <vector>

namespace nzfit {

struct ObservableSeries {
  std::vector<double> t;
  std::vector<double> Sx, Sy, Sz;
  std::vector<double> purity;
  // populations in the eigenbasis of H + calBbar S, ascending energy
  std::vector<std::array<double, 3>> rho_diag;
  // sigma_12, sigma_13, sigma_23 in the rotating frame
  std::vector<std::array<cplx, 3>> sigma_offdiag;
  std::vector<double> min_eig;

  std::size_t size() const { return t.size(); }
};

double purity(const Mat3& rho);
double min_eigenvalue(const Mat3& rho);

// sigma(t) = e^{i(H + calBbar S)t} rho(t) e^{-i(H + calBbar S)t}, returned in
// the eigenbasis.
Mat3 rotating_frame(const ShiftedBasis& b, double t, const Mat3& rho);

ObservableSeries compute_observables(const Trajectory& traj, const Mat3& H, const Mat3& S,
                                     double calBbar);

// Named real series: Sx Sy Sz purity rho11 rho22 rho33 and the real and
// imaginary parts of sigma12 sigma13 sigma23.
std::vector<std::string> series_names();
std::vector<double> series(const ObservableSeries& o, const std::string& name);

struct SeriesComparison {
  std::string name;
  double max_abs = 0;
  // max |b - a| / max(|a|, floor), floor = 1e-6 max|a|
  double max_rel = 0;
  // time averages over the final 10% of the grid
  double long_mean_a = 0, long_mean_b = 0;
  double long_rel = 0;
  // shift of b against a maximizing the cross-correlation, in time units
  double lag = 0;
};

struct ComparisonReport {
  std::vector<SeriesComparison> entries;
  const SeriesComparison& at(const std::string& name) const;
  std::string format() const;
};

// a is the reference. Throws if the grids differ.
ComparisonReport compare(const ObservableSeries& a, const ObservableSeries& b);

}  // namespace nzfit
