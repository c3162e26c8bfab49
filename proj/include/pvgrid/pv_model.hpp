#pragma once

// Five-parameter single-diode PV model: datasheet calibration, translation to
// arbitrary irradiance/temperature, implicit I-V evaluation and MPP search.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "pvgrid/error.hpp"
#include "pvgrid/roots.hpp"

namespace pvgrid {

inline constexpr double kBoltzmann = 1.380649e-23;       // J/K
inline constexpr double kElementaryCharge = 1.602176634e-19;  // C
inline constexpr double kZeroCelsius = 273.15;

/// Datasheet ratings of one module plus the knobs of the environment translation.
struct PVModuleSpec {
  double p_mp = 0.0;  // W
  double v_mp = 0.0;  // V
  double i_mp = 0.0;  // A
  double v_oc = 0.0;  // V
  double i_sc = 0.0;  // A
  int n_cells = 60;
  double alpha_isc = 0.00102;  // 1/degC, relative
  double beta_voc = -0.0032;   // 1/degC, relative
  double g_stc = 1000.0;       // W/m^2
  double t_stc = 25.0;         // degC
  double ideality = 1.0;       // per-cell diode ideality used by the calibration
  // Low-light shunt: Rsh(g) decays exponentially from rsh_dark_ratio * Rsh_stc
  // at g = 0 to Rsh_stc at g = g_stc. A ratio of 1 keeps Rsh constant.
  double rsh_dark_ratio = 4.0;
  double rsh_exponent = 5.5;

  bool operator==(const PVModuleSpec&) const = default;
};

struct PVArraySpec {
  PVModuleSpec module;
  int n_series = 1;
  int n_parallel = 1;

  bool operator==(const PVArraySpec&) const = default;
};

/// Electrical parameters of one module at a given cell temperature.
struct SingleDiodeParams {
  double i_ph = 0.0;        // photocurrent, A
  double i_0 = 0.0;         // diode saturation current, A
  double n_ideality = 1.0;  // per-cell
  double r_s = 0.0;         // ohm
  double r_sh = 0.0;        // ohm
  int n_cells = 60;
  double t_cell = 25.0;     // degC the parameters describe

  bool operator==(const SingleDiodeParams&) const = default;

  /// n * Ncells * k * T / q, the exponent scale of the diode term.
  [[nodiscard]] double diode_voltage() const noexcept {
    return n_ideality * n_cells * kBoltzmann * (t_cell + kZeroCelsius) / kElementaryCharge;
  }
};

struct EnvCondition {
  double g = 1000.0;  // W/m^2
  double t = 25.0;    // degC, cell temperature

  bool operator==(const EnvCondition&) const = default;
};

struct IVPoint {
  double v = 0.0;
  double i = 0.0;
  double p = 0.0;
};

struct IVCurve {
  std::vector<IVPoint> points;
};

struct MPPResult {
  double v_mp = 0.0;
  double i_mp = 0.0;
  double p_mp = 0.0;
};

inline void validate(const PVModuleSpec& s) {
  require(std::isfinite(s.v_mp) && s.v_mp > 0.0 && s.v_mp < s.v_oc, ErrorKind::InvalidInput,
          "module requires 0 < v_mp < v_oc");
  require(std::isfinite(s.i_mp) && s.i_mp > 0.0 && s.i_mp < s.i_sc, ErrorKind::InvalidInput,
          "module requires 0 < i_mp < i_sc");
  require(std::isfinite(s.p_mp) && std::abs(s.p_mp - s.v_mp * s.i_mp) <= 0.01 * s.p_mp,
          ErrorKind::InvalidInput, "module p_mp must equal v_mp * i_mp within 1%");
  require(s.n_cells >= 1, ErrorKind::InvalidInput, "module n_cells must be >= 1");
  require(s.alpha_isc > 0.0, ErrorKind::InvalidInput, "module alpha_isc must be > 0");
  require(s.beta_voc < 0.0, ErrorKind::InvalidInput, "module beta_voc must be < 0");
  require(s.g_stc > 0.0, ErrorKind::InvalidInput, "module g_stc must be > 0");
  require(s.ideality > 0.0, ErrorKind::InvalidInput, "module ideality must be > 0");
  require(s.rsh_dark_ratio >= 1.0, ErrorKind::InvalidInput, "module rsh_dark_ratio must be >= 1");
  require(s.rsh_exponent > 0.0, ErrorKind::InvalidInput, "module rsh_exponent must be > 0");
}

inline void validate(const PVArraySpec& a) {
  validate(a.module);
  require(a.n_series >= 1 && a.n_parallel >= 1, ErrorKind::InvalidInput,
          "array requires n_series >= 1 and n_parallel >= 1");
}

inline void validate(const EnvCondition& env) {
  require(std::isfinite(env.g) && env.g >= 0.0, ErrorKind::InvalidInput, "irradiance must be >= 0");
  require(std::isfinite(env.t) && env.t >= -40.0 && env.t <= 90.0, ErrorKind::InvalidInput,
          "cell temperature must lie in [-40, 90] degC");
}

/// Residual of the implicit diode equation; zero at the operating current.
inline double diode_residual(const SingleDiodeParams& p, double v, double i) noexcept {
  const double vd = v + i * p.r_s;
  return p.i_ph - p.i_0 * std::expm1(vd / p.diode_voltage()) - vd / p.r_sh - i;
}

/// Module terminal current at voltage v (v >= 0).
inline double module_current(const SingleDiodeParams& p, double v) {
  require(std::isfinite(v) && v >= 0.0, ErrorKind::InvalidInput, "module voltage must be >= 0");
  const double a = p.diode_voltage();
  // f(hi) <= 0 because both loss terms are non-negative; at i = -v / r_s the
  // diode sees zero volts so f(lo) = i_ph + v / r_s >= 0.
  const double hi = std::max(p.i_ph, 0.0);
  const double lo = v > 0.0 ? -v / p.r_s : 0.0;
  if (hi == lo) return hi;

  auto f = [&](double i) { return diode_residual(p, v, i); };
  auto df = [&](double i) {
    return -p.i_0 * p.r_s / a * std::exp((v + i * p.r_s) / a) - p.r_s / p.r_sh - 1.0;
  };
  const double guess = p.i_ph - p.i_0 * std::expm1(v / a) - v / p.r_sh;
  const double ftol = 1e-12 * std::max(p.i_ph, 1e-3);
  const auto r = roots::newton_bisect(f, df, lo, hi, std::clamp(guess, lo, hi), ftol, 100);
  if (!r.converged) {
    throw Error(ErrorKind::NonConvergence,
                "module current did not converge at v = " + std::to_string(v));
  }
  return r.x;
}

/// dI/dV of the module curve at (v, i), from implicit differentiation.
inline double module_slope(const SingleDiodeParams& p, double v, double i) noexcept {
  const double a = p.diode_voltage();
  const double g = p.i_0 / a * std::exp((v + i * p.r_s) / a) + 1.0 / p.r_sh;
  return -g / (1.0 + p.r_s * g);
}

/// Voltage where the module current crosses zero. Zero for a dark module.
inline double open_circuit_voltage(const SingleDiodeParams& p) {
  if (p.i_ph <= 0.0) return 0.0;
  const double a = p.diode_voltage();
  const double hi = a * std::log1p(p.i_ph / p.i_0);
  auto h = [&](double v) { return p.i_ph - p.i_0 * std::expm1(v / a) - v / p.r_sh; };
  auto dh = [&](double v) { return -p.i_0 / a * std::exp(v / a) - 1.0 / p.r_sh; };
  const auto r = roots::newton_bisect(h, dh, 0.0, hi, hi, 1e-13 * p.i_ph, 100);
  if (!r.converged) throw Error(ErrorKind::NonConvergence, "open-circuit voltage did not converge");
  return r.x;
}

namespace detail {

struct ShuntSaturation {
  double g = 0.0;    // 1 / r_sh
  double i_0 = 0.0;
  bool ok = false;
};

// With i_ph eliminated through I(0) = i_sc, the open-circuit and MPP conditions
// are linear in (1/r_sh, i_0) for fixed r_s.
inline ShuntSaturation solve_shunt_and_saturation(const PVModuleSpec& s, double a, double rs) {
  const double e_sc = std::exp(s.i_sc * rs / a);
  const double e_oc = std::exp(s.v_oc / a);
  const double e_mp = std::exp((s.v_mp + s.i_mp * rs) / a);
  const double a00 = s.i_sc * rs - s.v_oc;
  const double a01 = e_sc - e_oc;
  const double a10 = s.i_sc * rs - s.v_mp - s.i_mp * rs;
  const double a11 = e_sc - e_mp;
  const double b0 = -s.i_sc;
  const double b1 = -(s.i_sc - s.i_mp);
  const double det = a00 * a11 - a01 * a10;
  if (det == 0.0 || !std::isfinite(det)) return {};
  ShuntSaturation out;
  out.g = (b0 * a11 - a01 * b1) / det;
  out.i_0 = (a00 * b1 - b0 * a10) / det;
  out.ok = std::isfinite(out.g) && std::isfinite(out.i_0) && out.g > 0.0 && out.i_0 > 0.0;
  return out;
}

// Zero when dP/dV vanishes at (v_mp, i_mp).
inline double mpp_slope_mismatch(const PVModuleSpec& s, double a, double rs,
                                 const ShuntSaturation& ss) {
  const double e_mp = std::exp((s.v_mp + s.i_mp * rs) / a);
  return ss.i_0 / a * e_mp + ss.g - s.i_mp / (s.v_mp - s.i_mp * rs);
}

inline double shunt_at_irradiance(const PVModuleSpec& s, double rsh_stc, double g) {
  if (s.rsh_dark_ratio == 1.0) return rsh_stc;
  const double rsh_dark = s.rsh_dark_ratio * rsh_stc;
  const double decay = std::exp(-s.rsh_exponent);
  const double rsh_base = (rsh_stc - rsh_dark * decay) / (1.0 - decay);
  return rsh_base + (rsh_dark - rsh_base) * std::exp(-s.rsh_exponent * g / s.g_stc);
}

}  // namespace detail

/// Calibrates the five parameters at STC so that the curve passes through
/// (0, i_sc), (v_oc, 0) and has its maximum at (v_mp, i_mp). The ideality is
/// taken from the module data; r_s is found by a scan-then-bisect on the MPP slope
/// condition with the other three parameters eliminated in closed form.
inline SingleDiodeParams extract_single_diode_params(const PVModuleSpec& spec) {
  validate(spec);
  const double a = spec.ideality * spec.n_cells * kBoltzmann * (spec.t_stc + kZeroCelsius) /
                   kElementaryCharge;

  auto mismatch = [&](double rs) {
    const auto ss = detail::solve_shunt_and_saturation(spec, a, rs);
    return ss.ok ? detail::mpp_slope_mismatch(spec, a, rs, ss) : std::nan("");
  };

  // r_s cannot exceed the voltage drop from MPP to open circuit over i_mp.
  const double rs_max = (spec.v_oc - spec.v_mp) / spec.i_mp;
  constexpr int kScan = 400;
  double lo = 0.0;
  double f_lo = mismatch(lo);
  bool bracketed = false;
  double hi = 0.0;
  for (int k = 1; k <= kScan; ++k) {
    hi = rs_max * k / kScan;
    const double f_hi = mismatch(hi);
    if (std::isfinite(f_lo) && std::isfinite(f_hi) && (f_lo > 0.0) != (f_hi > 0.0)) {
      bracketed = true;
      break;
    }
    lo = hi;
    f_lo = f_hi;
  }
  if (!bracketed) {
    throw Error(ErrorKind::InfeasibleSpec,
                "no series resistance >= 0 reproduces the datasheet fill factor with ideality " +
                    std::to_string(spec.ideality));
  }
  const auto root = roots::bisect(mismatch, lo, hi, 1e-15 * rs_max, 0.0, 200);
  if (!root.converged) throw Error(ErrorKind::NonConvergence, "series-resistance search failed");

  const double rs = root.x;
  const auto ss = detail::solve_shunt_and_saturation(spec, a, rs);
  if (!ss.ok) throw Error(ErrorKind::InfeasibleSpec, "calibration yields a non-physical shunt");

  SingleDiodeParams p;
  p.n_ideality = spec.ideality;
  p.n_cells = spec.n_cells;
  p.t_cell = spec.t_stc;
  p.r_s = rs;
  p.r_sh = 1.0 / ss.g;
  p.i_0 = ss.i_0;
  p.i_ph = spec.i_sc * (1.0 + rs / p.r_sh) + p.i_0 * std::expm1(spec.i_sc * rs / a);
  if (!(p.r_sh >= 10.0 * p.r_s)) {
    throw Error(ErrorKind::InfeasibleSpec, "calibrated shunt resistance is below 10x series");
  }
  return p;
}

/// Translates STC parameters to env. Photocurrent follows the short-circuit
/// target i_sc * g/g_stc * (1 + alpha dT); saturation current is rescaled so the
/// full-sun open-circuit voltage shifts by beta_voc; r_sh follows the low-light
/// shunt law configured on the module.
inline SingleDiodeParams adjust_params(const SingleDiodeParams& stc, const PVModuleSpec& spec,
                                       const EnvCondition& env) {
  validate(env);
  if (env.g == spec.g_stc && env.t == spec.t_stc) return stc;

  const double dt = env.t - spec.t_stc;
  SingleDiodeParams out = stc;
  out.t_cell = env.t;
  const double a_stc = stc.diode_voltage();
  const double a_env = out.diode_voltage();

  const double isc_hot = spec.i_sc * (1.0 + spec.alpha_isc * dt);
  const double voc_hot = spec.v_oc * (1.0 + spec.beta_voc * dt);
  const double i0_ref = spec.i_sc / std::expm1(spec.v_oc / a_stc);
  out.i_0 = stc.i_0 * (isc_hot / std::expm1(voc_hot / a_env)) / i0_ref;

  out.r_sh = detail::shunt_at_irradiance(spec, stc.r_sh, env.g);
  const double isc_env = isc_hot * env.g / spec.g_stc;
  out.i_ph = isc_env * (1.0 + out.r_s / out.r_sh) + out.i_0 * std::expm1(isc_env * out.r_s / a_env);
  return out;
}

/// MPP of a single module described by already-translated parameters.
inline MPPResult module_mpp(const SingleDiodeParams& p) {
  if (p.i_ph <= 0.0) throw Error(ErrorKind::DarkArray, "no power is produced at zero irradiance");
  const double voc = open_circuit_voltage(p);
  const double xtol = 1e-6 * voc;
  auto power = [&](double v) { return v * module_current(p, v); };
  const auto coarse = roots::golden_section_max(power, 0.0, voc, xtol);
  if (!coarse.converged) throw Error(ErrorKind::NonConvergence, "MPP golden-section search failed");

  // Polish on the analytic dP/dV = I + V dI/dV inside the final bracket.
  auto dpdv = [&](double v) {
    const double i = module_current(p, v);
    return i + v * module_slope(p, v, i);
  };
  double v = coarse.x;
  const double lo = std::max(0.0, v - 10.0 * xtol);
  const double hi = std::min(voc, v + 10.0 * xtol);
  const auto fine = roots::bisect(dpdv, lo, hi, 1e-15 * voc, 0.0, 200);
  if (fine.converged) v = fine.x;

  const double i = module_current(p, v);
  return {v, i, v * i};
}

/// Array MPP from identical modules: module MPP scaled by n_series (voltage)
/// and n_parallel (current).
inline MPPResult mpp(const PVArraySpec& array, const SingleDiodeParams& stc,
                     const EnvCondition& env) {
  validate(env);
  if (env.g == 0.0) throw Error(ErrorKind::DarkArray, "no power is produced at zero irradiance");
  const auto m = module_mpp(adjust_params(stc, array.module, env));
  const double v = array.n_series * m.v_mp;
  const double i = array.n_parallel * m.i_mp;
  return {v, i, v * i};
}

/// Uniform voltage sweep of the array from 0 to its open-circuit voltage at env.
/// A dark array is swept up to the temperature-shifted datasheet v_oc.
inline IVCurve array_iv_sweep(const PVArraySpec& array, const SingleDiodeParams& stc,
                              const EnvCondition& env, std::size_t n_points) {
  require(n_points >= 3, ErrorKind::InvalidInput, "sweep needs at least 3 points");
  const auto p = adjust_params(stc, array.module, env);
  double voc = open_circuit_voltage(p);
  if (voc <= 0.0) {
    voc = array.module.v_oc * (1.0 + array.module.beta_voc * (env.t - array.module.t_stc));
  }
  IVCurve curve;
  curve.points.reserve(n_points);
  for (std::size_t k = 0; k < n_points; ++k) {
    const double vm = k + 1 == n_points ? voc : voc * static_cast<double>(k) / (n_points - 1);
    const double v = array.n_series * vm;
    const double i = array.n_parallel * module_current(p, vm);
    curve.points.push_back({v, i, v * i});
  }
  return curve;
}

}  // namespace pvgrid
