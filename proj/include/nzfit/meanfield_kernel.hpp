#pragma once

#include "nzfit/bath_thermo.hpp"
#include "nzfit/linalg.hpp"
#include "nzfit/w_function.hpp"

#include <array>

namespace nzfit {

struct DoubleCommutatorMeans {
  double HH = 0, SH = 0, HS = 0, SS = 0;
  // Tr{S}; the explicit channel forms assume a traceless coupling operator
  double trace_s = 0;
};

// <[X,[Y,.]]> = (1/N^2) sum_j Tr{chi_j^+ [X,[Y,chi_j]]} over an orthonormal
// operator basis, which reduces to (2/N^2)(N Tr{XY} - Tr{X} Tr{Y}).
template <class T>
Complex<T> double_commutator_mean(const CMatrix<T>& X, const CMatrix<T>& Y) {
  const T N = T(X.rows());
  return (T(2) / (N * N)) * (N * (X * Y).trace() - X.trace() * Y.trace());
}

template <class T>
DoubleCommutatorMeans double_commutator_means(const CMatrix<T>& H, const CMatrix<T>& S) {
  DoubleCommutatorMeans dc;
  dc.HH = double(std::real(double_commutator_mean<T>(H, H)));
  dc.SH = double(std::real(double_commutator_mean<T>(S, H)));
  dc.HS = double(std::real(double_commutator_mean<T>(H, S)));
  dc.SS = double(std::real(double_commutator_mean<T>(S, S)));
  dc.trace_s = double(std::real(S.trace()));
  return dc;
}

struct Channel {
  double I_hat = 0;
  double AA = 0;
  double AAdag = 0;
  double mf_alpha = 0;
  double mf_beta = 0;
};

struct ChannelParams {
  std::array<Channel, 3> ch;  // k = 1, 2, 3
};

// Channel k (1..3) from the explicit double-commutator forms.
Channel channel_param(int k, const DoubleCommutatorMeans& dc, const BathMoments& m);
ChannelParams channel_params(const DoubleCommutatorMeans& dc, const BathMoments& m);

struct MeanFieldKernel {
  ChannelParams channels;
  double Bbar = 0, calBbar = 0, calB2 = 0;
  WOptions w;
};

MeanFieldKernel make_meanfield_kernel(const DoubleCommutatorMeans& dc, const BathMoments& m);

// K1(t) = calB2 W3(t) - calBbar^2 W2(t)
double eval_K1_mf(const MeanFieldKernel& k, double t);
// K0(t) = Bbar W1(t) - calBbar W2(t)
double eval_K0_mf(const MeanFieldKernel& k, double t);

// Validator flags for each channel: beta > 0, beta >= |alpha|, AAdag >= 0.
struct ChannelCheck {
  bool beta_positive, decaying, aadag_nonnegative;
};
std::array<ChannelCheck, 3> check_channels(const ChannelParams& c);

}  // namespace nzfit
