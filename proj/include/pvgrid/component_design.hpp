#pragma once

// Closed-form sizing of the PV boost converter, the LCL grid filter and the
// wye capacitor bank, plus the LCL resonance placement check.

#include <cmath>
#include <numbers>

#include "pvgrid/error.hpp"

namespace pvgrid {

struct BoostDesignInput {
  double p = 0.0;      // W, PV power at STC
  double v_in = 0.0;   // V, PV voltage at STC
  double v_out = 0.0;  // V, dc link
  double f_s = 0.0;    // Hz
  double ripple_i_frac = 0.07;
  double ripple_v_frac = 0.007;
};

struct BoostDesign {
  double i_out_max = 0.0;    // A
  double delta_i_l = 0.0;    // A
  double delta_v_out = 0.0;  // V
  double l = 0.0;            // H
  double c = 0.0;            // F
};

struct LCLDesignInput {
  double p = 0.0;     // W
  double v_g = 0.0;   // V, per-phase RMS
  double f_g = 0.0;   // Hz
  double v_dc = 0.0;  // V
  double f_sw = 0.0;  // Hz
  double cap_frac = 0.05;
  double ripple_frac = 0.10;
  double atten_factor = 0.2;
};

struct LCLDesign {
  double omega_g = 0.0;      // rad/s
  double z_b = 0.0;          // ohm
  double c_b = 0.0;          // F
  double i_max = 0.0;        // A
  double delta_i_max = 0.0;  // A
  double l_1 = 0.0;          // H, inverter side
  double c_g = 0.0;          // F
  double l_2 = 0.0;          // H, grid side
};

struct ResonanceReport {
  double omega_res = 0.0;  // rad/s
  double f_res = 0.0;      // Hz
  double f_min = 0.0;      // Hz
  double f_max = 0.0;      // Hz
  bool pass = false;
};

namespace detail {
inline bool positive(double x) { return std::isfinite(x) && x > 0.0; }
inline bool unit_open(double x) { return std::isfinite(x) && x > 0.0 && x < 1.0; }
}  // namespace detail

inline BoostDesign boost_design(const BoostDesignInput& in) {
  require(detail::positive(in.p), ErrorKind::InvalidInput, "boost p must be > 0");
  require(detail::positive(in.v_in), ErrorKind::InvalidInput, "boost v_in must be > 0");
  require(detail::positive(in.v_out), ErrorKind::InvalidInput, "boost v_out must be > 0");
  require(detail::positive(in.f_s), ErrorKind::InvalidInput, "boost f_s must be > 0");
  require(detail::unit_open(in.ripple_i_frac), ErrorKind::InvalidInput,
          "boost ripple_i_frac must lie in (0, 1)");
  require(detail::unit_open(in.ripple_v_frac), ErrorKind::InvalidInput,
          "boost ripple_v_frac must lie in (0, 1)");
  require(in.v_in < in.v_out, ErrorKind::DegenerateInput,
          "boost requires v_in < v_out (duty ratio would be <= 0)");

  BoostDesign d;
  d.i_out_max = in.p / in.v_out;
  d.delta_i_l = in.ripple_i_frac * d.i_out_max * in.v_out / in.v_in;
  d.delta_v_out = in.ripple_v_frac * in.v_out;
  d.l = in.v_in * (in.v_out - in.v_in) / (d.delta_i_l * in.f_s * in.v_out);
  d.c = d.i_out_max * (1.0 - in.v_in / in.v_out) / (d.delta_v_out * in.f_s);
  return d;
}

inline LCLDesign lcl_design(const LCLDesignInput& in) {
  require(detail::positive(in.p), ErrorKind::InvalidInput, "lcl p must be > 0");
  require(detail::positive(in.v_g), ErrorKind::InvalidInput, "lcl v_g must be > 0");
  require(detail::positive(in.f_g), ErrorKind::InvalidInput, "lcl f_g must be > 0");
  require(detail::positive(in.v_dc), ErrorKind::InvalidInput, "lcl v_dc must be > 0");
  require(detail::positive(in.f_sw), ErrorKind::InvalidInput, "lcl f_sw must be > 0");
  require(detail::unit_open(in.cap_frac), ErrorKind::InvalidInput, "lcl cap_frac must lie in (0, 1)");
  require(detail::unit_open(in.ripple_frac), ErrorKind::InvalidInput,
          "lcl ripple_frac must lie in (0, 1)");
  require(detail::unit_open(in.atten_factor), ErrorKind::InvalidInput,
          "lcl atten_factor must lie in (0, 1)");

  constexpr double two_pi = 2.0 * std::numbers::pi;
  LCLDesign d;
  d.omega_g = two_pi * in.f_g;
  d.z_b = in.v_g * in.v_g / (in.p / 3.0);
  d.c_b = 1.0 / (d.omega_g * d.z_b);
  // 0.9 is the modulation headroom in the peak-current rating.
  d.i_max = in.p * std::numbers::sqrt2 / (3.0 * in.v_g * 0.9);
  d.delta_i_max = in.ripple_frac * d.i_max;
  d.l_1 = in.v_dc / (6.0 * in.f_sw * d.delta_i_max);
  d.c_g = in.cap_frac * d.c_b;
  const double w_sw = two_pi * in.f_sw;
  d.l_2 = std::sqrt(1.0 / (in.atten_factor * in.atten_factor) + 1.0) / (d.c_g * w_sw * w_sw);
  return d;
}

/// Resonance of the LCL network against the window (10 f_g, f_sw / 2), compared in hertz.
inline ResonanceReport resonance_check(double l_1, double l_2, double c_g, double f_g, double f_sw) {
  require(detail::positive(l_1) && detail::positive(l_2) && detail::positive(c_g) &&
              detail::positive(f_g) && detail::positive(f_sw),
          ErrorKind::InvalidInput, "resonance check needs positive l_1, l_2, c_g, f_g, f_sw");
  ResonanceReport r;
  r.omega_res = std::sqrt((l_1 + l_2) / (l_1 * l_2 * c_g));
  r.f_res = r.omega_res / (2.0 * std::numbers::pi);
  r.f_min = 10.0 * f_g;
  r.f_max = 0.5 * f_sw;
  r.pass = r.f_min < r.f_res && r.f_res < r.f_max;
  return r;
}

inline ResonanceReport resonance_check(const LCLDesign& d, double f_g, double f_sw) {
  return resonance_check(d.l_1, d.l_2, d.c_g, f_g, f_sw);
}

/// Per-phase capacitance of a wye bank rated q_rated at phase voltage v_phase.
inline double capbank_size(double q_rated, double v_phase, double f_g) {
  require(std::isfinite(q_rated) && q_rated >= 0.0, ErrorKind::InvalidInput,
          "capacitor bank rating must be >= 0");
  require(detail::positive(v_phase) && detail::positive(f_g), ErrorKind::InvalidInput,
          "capacitor bank needs positive v_phase and f_g");
  return q_rated / (3.0 * 2.0 * std::numbers::pi * f_g * v_phase * v_phase);
}

}  // namespace pvgrid
