#pragma once

// W(alpha, beta, t) summed term by term in 50-digit arithmetic with Boost's
// Bessel functions.

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/gamma.hpp>
#include <boost/multiprecision/cpp_bin_float.hpp>

namespace oracle {

inline double W_series_mp(double alpha, double beta, double t) {
  using mp = boost::multiprecision::cpp_bin_float_50;
  if (t == 0) return 1;
  const mp x = mp(beta) * t;
  const mp at = mp(alpha) * t;
  mp sum = 0, pw = 1;  // (-alpha t)^n / n!
  for (int n = 0; n < 600; ++n) {
    const mp nu = mp(n) / 2 + 1;
    const mp term =
        boost::math::tgamma(mp(n + 1) / 2) * pw * pow(2 / x, nu) * boost::math::cyl_bessel_j(nu, x);
    sum += term;
    if (n > 2 * double(abs(at)) + 20 && abs(term) < mp(1e-40) * abs(sum)) break;
    pw *= -at / (n + 1);
  }
  return double(sum / sqrt(boost::math::constants::pi<mp>()));
}

}  // namespace oracle
