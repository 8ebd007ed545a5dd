#pragma once

#include <cmath>

namespace nzfit {

// Unevaluated sum hi + lo with |lo| <= ulp(hi)/2, about 32 significant digits.
// Relies on fma and on the compiler not reassociating floating-point math.
struct dd {
  double hi = 0, lo = 0;

  constexpr dd() = default;
  constexpr dd(double h) : hi(h), lo(0) {}
  constexpr dd(double h, double l) : hi(h), lo(l) {}

  static constexpr double eps = 0x1.0p-104;

  explicit operator double() const { return hi + lo; }
};

namespace dd_detail {
inline dd quick_two_sum(double a, double b) {
  const double s = a + b;
  return {s, b - (s - a)};
}
inline dd two_sum(double a, double b) {
  const double s = a + b;
  const double bb = s - a;
  return {s, (a - (s - bb)) + (b - bb)};
}
inline dd two_prod(double a, double b) {
  const double p = a * b;
  return {p, std::fma(a, b, -p)};
}
}  // namespace dd_detail

inline dd operator+(dd a, dd b) {
  dd s = dd_detail::two_sum(a.hi, b.hi);
  dd t = dd_detail::two_sum(a.lo, b.lo);
  s.lo += t.hi;
  s = dd_detail::quick_two_sum(s.hi, s.lo);
  s.lo += t.lo;
  return dd_detail::quick_two_sum(s.hi, s.lo);
}
inline dd operator-(dd a) { return {-a.hi, -a.lo}; }
inline dd operator-(dd a, dd b) { return a + (-b); }
inline dd operator*(dd a, dd b) {
  dd p = dd_detail::two_prod(a.hi, b.hi);
  p.lo += a.hi * b.lo + a.lo * b.hi;
  return dd_detail::quick_two_sum(p.hi, p.lo);
}
inline dd operator*(dd a, double b) {
  dd p = dd_detail::two_prod(a.hi, b);
  p.lo += a.lo * b;
  return dd_detail::quick_two_sum(p.hi, p.lo);
}
inline dd operator*(double a, dd b) { return b * a; }
inline dd operator/(dd a, dd b) {
  const double q1 = a.hi / b.hi;
  dd r = a - b * q1;
  const double q2 = r.hi / b.hi;
  r = r - b * q2;
  const double q3 = r.hi / b.hi;
  return dd_detail::quick_two_sum(q1, q2) + dd(q3);
}
inline dd operator/(dd a, double b) { return a / dd(b); }

inline dd& operator+=(dd& a, dd b) { return a = a + b; }
inline dd& operator-=(dd& a, dd b) { return a = a - b; }
inline dd& operator*=(dd& a, dd b) { return a = a * b; }
inline dd& operator/=(dd& a, dd b) { return a = a / b; }

inline dd abs(dd a) { return a.hi < 0 ? -a : a; }
inline double to_double(dd a) { return a.hi + a.lo; }

inline dd sqrt(dd a) {
  if (a.hi <= 0) return dd(0);
  const double x = std::sqrt(a.hi);
  // one Newton step in extended precision
  const dd xx = dd_detail::two_prod(x, x);
  return dd_detail::two_sum(x, to_double(a - xx) / (2 * x));
}

}  // namespace nzfit
