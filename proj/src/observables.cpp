#include "nzfit/observables.hpp"

#include "nzfit/spin_model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace nzfit {

double purity(const Mat3& rho) { return (rho * rho).trace().real(); }

double min_eigenvalue(const Mat3& rho) {
  Mat3 r = rho;
  symmetrize(r);
  return Eigen::SelfAdjointEigenSolver<Mat3>(r, Eigen::EigenvaluesOnly).eigenvalues()(0);
}

Mat3 rotating_frame(const ShiftedBasis& b, double t, const Mat3& rho) {
  const Mat3 e = b.U.adjoint() * rho * b.U;
  Mat3 s;
  for (int m = 0; m < 3; ++m)
    for (int n = 0; n < 3; ++n) s(m, n) = std::polar(1.0, (b.energies(m) - b.energies(n)) * t) * e(m, n);
  return s;
}

ObservableSeries compute_observables(const Trajectory& traj, const Mat3& H, const Mat3& S,
                                     double calBbar) {
  if (traj.t.size() != traj.rho.size()) throw NumericalError("trajectory has mismatched sizes");
  const auto ops = build_spin1_ops();
  const ShiftedBasis b = shifted_eigenbasis(H, S, calBbar);
  ObservableSeries o;
  const std::size_t n = traj.t.size();
  o.t = traj.t;
  o.Sx.resize(n);
  o.Sy.resize(n);
  o.Sz.resize(n);
  o.purity.resize(n);
  o.rho_diag.resize(n);
  o.sigma_offdiag.resize(n);
  o.min_eig.resize(n);
  for (std::size_t j = 0; j < n; ++j) {
    const Mat3& r = traj.rho[j];
    o.Sx[j] = (ops.Sx * r).trace().real();
    o.Sy[j] = (ops.Sy * r).trace().real();
    o.Sz[j] = (ops.Sz * r).trace().real();
    o.purity[j] = purity(r);
    const Mat3 s = rotating_frame(b, traj.t[j], r);
    o.rho_diag[j] = {s(0, 0).real(), s(1, 1).real(), s(2, 2).real()};
    o.sigma_offdiag[j] = {s(0, 1), s(0, 2), s(1, 2)};
    o.min_eig[j] = min_eigenvalue(r);
  }
  return o;
}

std::vector<std::string> series_names() {
  return {"Sx",          "Sy",          "Sz",          "purity",      "rho11",
          "rho22",       "rho33",       "sigma12_re",  "sigma12_im",  "sigma13_re",
          "sigma13_im",  "sigma23_re",  "sigma23_im"};
}

std::vector<double> series(const ObservableSeries& o, const std::string& name) {
  if (name == "Sx") return o.Sx;
  if (name == "Sy") return o.Sy;
  if (name == "Sz") return o.Sz;
  if (name == "purity") return o.purity;
  std::vector<double> v(o.size());
  if (name.size() == 5 && name.rfind("rho", 0) == 0 && name[3] == name[4]) {
    const int i = name[3] - '1';
    if (i < 0 || i > 2) throw NumericalError("unknown series " + name);
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = o.rho_diag[j][i];
    return v;
  }
  static const char* offd[] = {"sigma12", "sigma13", "sigma23"};
  for (int i = 0; i < 3; ++i) {
    if (name == std::string(offd[i]) + "_re") {
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = o.sigma_offdiag[j][i].real();
      return v;
    }
    if (name == std::string(offd[i]) + "_im") {
      for (std::size_t j = 0; j < v.size(); ++j) v[j] = o.sigma_offdiag[j][i].imag();
      return v;
    }
  }
  throw NumericalError("unknown series " + name);
}

namespace {

// Lag of b against a (in samples) maximizing the normalized cross-correlation.
long best_lag(const std::vector<double>& a, const std::vector<double>& b, long max_lag) {
  const long n = long(a.size());
  auto mean = [](const std::vector<double>& v) {
    double s = 0;
    for (double x : v) s += x;
    return v.empty() ? 0.0 : s / double(v.size());
  };
  const double ma = mean(a), mb = mean(b);
  long best = 0;
  double best_c = -std::numeric_limits<double>::infinity();
  // shifts visited by increasing magnitude so ties keep the smaller one
  for (long k = 0; k <= 2 * max_lag; ++k) {
    const long L = (k % 2 == 0) ? k / 2 : -(k + 1) / 2;
    double c = 0;
    long cnt = 0;
    for (long i = std::max(0L, -L); i < n && i + L < n; ++i) {
      c += (a[i] - ma) * (b[i + L] - mb);
      ++cnt;
    }
    if (cnt == 0) continue;
    c /= double(cnt);
    if (c > best_c) {
      best_c = c;
      best = L;
    }
  }
  return best;
}

}  // namespace

ComparisonReport compare(const ObservableSeries& a, const ObservableSeries& b) {
  if (a.t.size() != b.t.size()) throw NumericalError("cannot compare series on different grids");
  for (std::size_t j = 0; j < a.t.size(); ++j)
    if (std::abs(a.t[j] - b.t[j]) > 1e-12 * std::max(1.0, std::abs(a.t[j])))
      throw NumericalError("cannot compare series on different grids");
  ComparisonReport rep;
  const std::size_t n = a.size();
  const std::size_t tail = n == 0 ? 0 : std::max<std::size_t>(1, n / 10);
  const double dt = n > 1 ? (a.t.back() - a.t.front()) / double(n - 1) : 0;
  for (const std::string& name : series_names()) {
    const std::vector<double> x = series(a, name), y = series(b, name);
    SeriesComparison c;
    c.name = name;
    double amax = 0;
    for (double v : x) amax = std::max(amax, std::abs(v));
    const double floor = 1e-6 * amax;
    for (std::size_t j = 0; j < n; ++j) {
      const double d = std::abs(y[j] - x[j]);
      c.max_abs = std::max(c.max_abs, d);
      const double den = std::max(std::abs(x[j]), floor);
      if (den > 0) c.max_rel = std::max(c.max_rel, d / den);
    }
    for (std::size_t j = n - tail; j < n; ++j) {
      c.long_mean_a += x[j];
      c.long_mean_b += y[j];
    }
    if (tail > 0) {
      c.long_mean_a /= double(tail);
      c.long_mean_b /= double(tail);
    }
    const double lden = std::max(std::abs(c.long_mean_a), floor);
    c.long_rel = lden > 0 ? std::abs(c.long_mean_b - c.long_mean_a) / lden : 0;
    const long max_lag = std::min<long>(long(n) / 4, 64);
    c.lag = double(best_lag(x, y, max_lag)) * dt;
    rep.entries.push_back(c);
  }
  return rep;
}

const SeriesComparison& ComparisonReport::at(const std::string& name) const {
  for (const auto& e : entries)
    if (e.name == name) return e;
  throw NumericalError("no comparison entry " + name);
}

std::string ComparisonReport::format() const {
  std::ostringstream os;
  os << "series,max_abs,max_rel,long_mean_ref,long_mean_test,long_rel,lag\n";
  char buf[256];
  for (const auto& e : entries) {
    std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e.name.c_str(), e.max_abs,
                  e.max_rel, e.long_mean_a, e.long_mean_b, e.long_rel, e.lag);
    os << buf;
  }
  return os.str();
}

}  // namespace nzfit
