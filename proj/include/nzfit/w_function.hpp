#pragma once

#include "nzfit/double_double.hpp"
#include "nzfit/linalg.hpp"

#include <vector>

namespace nzfit {

// J_0..J_nmax of integer order, Miller backward recurrence normalized by
// J_0 + 2 sum J_2k = 1.
std::vector<dd> bessel_j_integer(dd x, int nmax);

// Spherical j_0..j_nmax, backward recurrence normalized by
// sum (2n+1) j_n^2 = 1. J_{n+1/2}(x) = sqrt(2x/pi) j_n(x).
std::vector<dd> bessel_j_spherical(dd x, int nmax);

// h_nu(x) = Gamma(nu+1) (2/x)^nu J_nu(x) by its power series; for small x.
dd bessel_h_series(dd x, double nu);

enum class WMethod { Auto, Series, Quadrature };

struct WOptions {
  WMethod method = WMethod::Auto;
  int max_terms = 400;
  double term_tol = 1e-14;
  // Series result rejected when max|term| * 1e-30 exceeds this times |W|.
  double loss_tol = 1e-12;
};

struct WResult {
  double value = 0;
  int terms = 0;
  double max_term = 0;
  WMethod used = WMethod::Series;
};

struct WSeriesError : NumericalError {
  double partial_sum;
  int terms;
  double max_term;
  WSeriesError(const std::string& what, double partial, int n, double mt)
      : NumericalError(what), partial_sum(partial), terms(n), max_term(mt) {}
};

// W(alpha, beta, t) = pi^{-1/2} sum_n Gamma((n+1)/2)/n! (-alpha t)^n
//                     (2/(beta t))^{n/2+1} J_{n/2+1}(beta t)
WResult eval_W_detail(double alpha, double beta, double t, const WOptions& opt = {});

inline double eval_W(double alpha, double beta, double t, const WOptions& opt = {}) {
  return eval_W_detail(alpha, beta, t, opt).value;
}

// Same function from its integral form
// (4/pi) int_0^{pi/2} sin^2 th phi(alpha t sin th) cos(beta t cos th) dth,
// phi(y) = (1 - e^{-y})/y. Stable in double precision for any alpha t.
double eval_W_quadrature(double alpha, double beta, double t);

// W at t_i = i dt, i < n, from the integral form with one set of nodes sized
// for the last point; the oscillating and decaying factors are advanced by
// recurrence, so the whole grid costs about one quadrature per node.
std::vector<double> eval_W_grid(double alpha, double beta, double dt, int n);

}  // namespace nzfit
