#include "qfc/sim/pump.hpp"

#include <cmath>
#include <numbers>

#include "qfc/core/errors.hpp"
#include "qfc/core/units.hpp"

namespace qfc {

using cplx = std::complex<double>;

cplx PumpEnvelope::rate() const {
  if (!(duration_fwhm_ps > 0.0)) throw PreconditionError("PumpEnvelope: duration must be positive");
  const double t = units::ps_to_s(duration_fwhm_ps);
  const double a = 2.0 * std::numbers::ln2 / (t * t);
  const double c = chirp * 1e24;  // rad/ps^2 -> rad/s^2
  return {a, -c};
}

cplx PumpEnvelope::at(double t_s) const {
  const double dt = t_s - units::ps_to_s(delay_ps);
  return peak_amplitude * std::exp(-rate() * dt * dt);
}

cplx pump_product(const PumpEnvelope& p, const PumpEnvelope& q, double t_s) {
  return p.at(t_s) * std::conj(q.at(t_s));
}

cplx pump_product_spectrum(const PumpEnvelope& p, const PumpEnvelope& q, double nu) {
  // P conj(Q) = Ap Aq exp(-pp (t-tp)^2 - conj(pq) (t-tq)^2) = Ap Aq exp(C) exp(-s (t - tm)^2)
  const cplx pp = p.rate();
  const cplx pq = std::conj(q.rate());
  const double tp = units::ps_to_s(p.delay_ps);
  const double tq = units::ps_to_s(q.delay_ps);
  const cplx s = pp + pq;
  const cplx tm = (pp * tp + pq * tq) / s;
  const cplx c = s * tm * tm - pp * tp * tp - pq * tq * tq;
  // (2 pi)^(-1/2) int exp(-s (t-tm)^2 + i nu t) dt = exp(i nu tm - nu^2 / (4 s)) / sqrt(2 s)
  const cplx amp = p.peak_amplitude * q.peak_amplitude;
  return amp * std::exp(c + cplx(0.0, nu) * tm - nu * nu / (4.0 * s)) / std::sqrt(2.0 * s);
}

PumpEnvelope disperse_product(const PumpEnvelope& p, const PumpEnvelope& q, double gdd_ps2) {
  if (p.delay_ps != q.delay_ps) throw PreconditionError("disperse_product: pumps must share a delay");
  const cplx pq = std::conj(q.rate());
  const cplx s = p.rate() + pq;
  const double gamma = 0.5 * gdd_ps2 * 1e-24;  // phase coefficient on nu^2, s^2
  const cplx s_new = s / (1.0 - cplx(0.0, 4.0 * gamma) * s);
  const cplx rate_new = s_new - pq;
  if (!(rate_new.real() > 0.0))
    throw PreconditionError("disperse_product: requested dispersion needs a non-normalizable pump");
  PumpEnvelope out = p;
  out.duration_fwhm_ps = units::s_to_ps(std::sqrt(2.0 * std::numbers::ln2 / rate_new.real()));
  out.chirp = -rate_new.imag() * 1e-24;
  out.peak_amplitude = p.peak_amplitude * std::sqrt(std::abs(s_new / s));
  return out;
}

}  // namespace qfc
