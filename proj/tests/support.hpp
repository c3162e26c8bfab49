#pragma once

#include <cmath>
#include <cstdint>
#include <fstream>
#include <random>
#include <sstream>
#include <string>

#include "pvgrid/pvgrid.hpp"

namespace support {

// 213.15 W polycrystalline module used throughout the reference cases.
inline pvgrid::PVModuleSpec reference_module() {
  pvgrid::PVModuleSpec m;
  m.p_mp = 213.15;
  m.v_mp = 29.0;
  m.i_mp = 7.35;
  m.v_oc = 36.3;
  m.i_sc = 7.84;
  m.n_cells = 60;
  return m;
}

inline pvgrid::PVArraySpec reference_array() { return {reference_module(), 10, 47}; }

inline double rel_err(double got, double want) { return std::abs(got - want) / std::abs(want); }

inline std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

inline std::string scenario_path(const std::string& name) {
  return std::string(PVGRID_SCENARIO_DIR) + "/" + name;
}

// Terminal current by plain bisection on the implicit diode equation. Shares
// nothing with the library solver beyond the parameter struct.
inline double oracle_current(const pvgrid::SingleDiodeParams& p, double v) {
  const double vt = 1.380649e-23 * (p.t_cell + 273.15) / 1.602176634e-19;
  const double a = p.n_ideality * p.n_cells * vt;
  auto f = [&](double i) {
    const double vd = v + i * p.r_s;
    return p.i_ph - p.i_0 * (std::exp(vd / a) - 1.0) - vd / p.r_sh - i;
  };
  double lo = v > 0.0 ? -v / p.r_s : -1.0;
  double hi = p.i_ph + 1.0;
  for (int k = 0; k < 300; ++k) {
    const double mid = 0.5 * (lo + hi);
    (f(mid) > 0.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

// Brute-force module MPP: dense sweep, then a local refinement by bisection on
// the secant slope of P(V).
struct OracleMpp {
  double v = 0.0;
  double p = 0.0;
};

inline OracleMpp oracle_module_mpp(const pvgrid::SingleDiodeParams& p, double v_max) {
  const int n = 20000;
  OracleMpp best;
  for (int k = 1; k < n; ++k) {
    const double v = v_max * k / n;
    const double pw = v * oracle_current(p, v);
    if (pw > best.p) best = {v, pw};
  }
  double lo = std::max(0.0, best.v - v_max / n);
  double hi = best.v + v_max / n;
  const double h = 1e-7;
  for (int k = 0; k < 100; ++k) {
    const double mid = 0.5 * (lo + hi);
    const double slope = (mid + h) * oracle_current(p, mid + h) - (mid - h) * oracle_current(p, mid - h);
    (slope > 0.0 ? lo : hi) = mid;
  }
  best.v = 0.5 * (lo + hi);
  best.p = best.v * oracle_current(p, best.v);
  return best;
}

// Random but valid scenario on the reference module.
inline pvgrid::Scenario random_scenario(std::mt19937_64& rng) {
  using namespace pvgrid;
  auto uni = [&](double a, double b) { return std::uniform_real_distribution<double>(a, b)(rng); };
  auto pick = [&](int a, int b) { return std::uniform_int_distribution<int>(a, b)(rng); };

  Scenario s;
  s.id = "random";
  s.array = {reference_module(), pick(1, 20), pick(1, 60)};
  s.grid.v_phase = uni(200.0, 260.0);
  s.grid.f = pick(0, 1) ? 50.0 : 60.0;
  s.inverter_efficiency = uni(0.9, 1.0);
  s.dt = 0.01 * pick(1, 5);
  s.t_end = s.dt * pick(1, 20);

  const int n_sun = pick(1, 4);
  double t = 0.0;
  for (int k = 0; k < n_sun; ++k) {
    s.irradiance_profile.push_back({t, pick(0, 5) == 0 ? 0.0 : uni(50.0, 1100.0), uni(-10.0, 70.0)});
    t += uni(0.01, 0.1);
  }
  const int n_load = pick(1, 4);
  t = 0.0;
  for (int k = 0; k < n_load; ++k) {
    s.load_profile.push_back({t, uni(0.0, 200e3), uni(-50e3, 200e3)});
    t += uni(0.01, 0.1);
  }
  switch (pick(0, 2)) {
    case 0: s.compensator = NoCompensator{}; break;
    case 1: s.compensator = FixedCapacitor{uni(1e3, 200e3), s.grid.v_phase, uni(0.0, 2000.0)}; break;
    default: s.compensator = Statcom{uni(1e3, 250e3), uni(0.0, 1500.0), uni(0.0, 0.05)}; break;
  }
  return s;
}

}  // namespace support
