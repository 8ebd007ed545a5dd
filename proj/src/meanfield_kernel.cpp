#include "nzfit/meanfield_kernel.hpp"

#include <cmath>

namespace nzfit {

Channel channel_param(int k, const DoubleCommutatorMeans& dc, const BathMoments& m) {
  const double scale = std::abs(dc.SS) + std::abs(dc.HS) + std::abs(dc.HH) + 1;
  if (std::abs(dc.trace_s) > 1e-12 * scale)
    throw NumericalError("explicit channel forms need a traceless coupling operator");
  const double HH = dc.HH, SH = dc.SH, HS = dc.HS, SS = dc.SS;
  const double B1 = m.Bbar, B2 = m.B2bar, B3 = m.B3bar;
  const double c1 = m.calBbar, c2 = m.calB2, c3 = m.calB3, c4 = m.calB4;
  const double n = m.TrB[0], t1 = m.TrB[1], t2 = m.TrB[2], t3 = m.TrB[3];
  const double kubo = m.kubo_combination();
  Channel c;
  switch (k) {
    case 1:
      c.I_hat = B1;
      c.AA = HH * (B1 - c1) + SH * (B2 - c2 - c1 * (B1 - c1)) + HS * (B2 - B1 * c1) +
             SS * (B3 - B2 * c1 - B1 * c2 + c1 * c1 * B1);
      c.AAdag = HH * (B1 - c1 - m.LambdaBar * (t1 - n * c1)) +
                (SH + HS) * (B2 - c1 * B1 - m.LambdaBar * (t2 - t1 * c1)) +
                SS * (B3 - B2 * c1 - m.LambdaBar * (t3 - t2 * c1));
      break;
    case 2:
      c.I_hat = c1;
      c.AA = HS * (c2 - c1 * c1) + SS * (c3 - 2 * c2 * c1 + c1 * c1 * c1);
      c.AAdag = HH * m.TrLambda2 * (n * c1 - t1) +
                (SH + HS) * (c2 - c1 * c1 - m.TrLambda2 * (t2 - t1 * c1)) +
                SS * (c3 - c2 * c1 - m.TrLambda2 * (t3 - t2 * c1));
      break;
    case 3:
      c.I_hat = c2;
      c.AA = HH * (c2 - c1 * c1) + SH * (c3 - 2 * c2 * c1 + c1 * c1 * c1) + HS * (c3 - c1 * c2) +
             SS * (c4 - c3 * c1 - c2 * c2 + c1 * c1 * c2) + kubo;
      c.AAdag = HH * (c2 - c1 * c1 - m.TrBLambda2 * (t1 - n * c1)) +
                (SH + HS) * (c3 - c2 * c1 - m.TrBLambda2 * (t2 - t1 * c1)) +
                SS * (c4 - c3 * c1 - m.TrBLambda2 * (t3 - t2 * c1)) + kubo;
      break;
    default:
      throw NumericalError("channel index must be 1, 2 or 3");
  }
  const double d = c.I_hat * c.AAdag;
  if (!(d > 0))
    throw NumericalError("channel " + std::to_string(k) + ": I_hat * AAdag = " + std::to_string(d) +
                         " is not positive");
  // alpha, beta are set by the normalized moments AAdag/I and AA/I, so a
  // negative normalizer (B-bar < 0 for some geometries) carries its sign
  const double r = std::copysign(std::sqrt(d), c.I_hat);
  c.mf_alpha = (c.AAdag - c.AA) / r;
  c.mf_beta = (c.AAdag + c.AA) / r;
  return c;
}

ChannelParams channel_params(const DoubleCommutatorMeans& dc, const BathMoments& m) {
  ChannelParams p;
  for (int k = 1; k <= 3; ++k) p.ch[k - 1] = channel_param(k, dc, m);
  return p;
}

MeanFieldKernel make_meanfield_kernel(const DoubleCommutatorMeans& dc, const BathMoments& m) {
  MeanFieldKernel k;
  k.channels = channel_params(dc, m);
  k.Bbar = m.Bbar;
  k.calBbar = m.calBbar;
  k.calB2 = m.calB2;
  return k;
}

namespace {
double W_of(const MeanFieldKernel& k, int ch, double t) {
  const Channel& c = k.channels.ch[ch - 1];
  return eval_W(c.mf_alpha, c.mf_beta, t, k.w);
}
}  // namespace

double eval_K1_mf(const MeanFieldKernel& k, double t) {
  return k.calB2 * W_of(k, 3, t) - k.calBbar * k.calBbar * W_of(k, 2, t);
}

double eval_K0_mf(const MeanFieldKernel& k, double t) {
  return k.Bbar * W_of(k, 1, t) - k.calBbar * W_of(k, 2, t);
}

std::array<ChannelCheck, 3> check_channels(const ChannelParams& c) {
  std::array<ChannelCheck, 3> out;
  for (int i = 0; i < 3; ++i) {
    const Channel& ch = c.ch[i];
    out[i] = {ch.mf_beta > 0, ch.mf_beta >= std::abs(ch.mf_alpha), ch.AAdag >= 0};
  }
  return out;
}

}  // namespace nzfit
