#pragma once

// Quasi-steady-state power balance at the PCC, stepped over piecewise-constant
// irradiance and load profiles. Each step is an independent equilibrium with a
// stiff grid (PCC voltage fixed at nominal) and ideal MPP tracking.
//
// Sign conventions: p_grid / q_grid > 0 when the grid supplies toward the PCC;
// q_comp > 0 when the compensator injects vars toward the load.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <iterator>
#include <string>
#include <vector>

#include "pvgrid/compensation.hpp"
#include "pvgrid/error.hpp"
#include "pvgrid/pv_model.hpp"

namespace pvgrid {

struct GridSpec {
  double v_phase = 230.0;  // V RMS
  double f = 50.0;         // Hz
  double v_dc = 700.0;     // V, reported dc-link voltage

  bool operator==(const GridSpec&) const = default;
};

struct IrradianceSegment {
  double t_start = 0.0;  // s
  double g = 1000.0;     // W/m^2
  double t_cell = 25.0;  // degC

  bool operator==(const IrradianceSegment&) const = default;
};

struct LoadSegment {
  double t_start = 0.0;  // s
  double p = 0.0;        // W
  double q = 0.0;        // var, > 0 inductive

  bool operator==(const LoadSegment&) const = default;
};

struct Scenario {
  std::string id = "scenario";
  std::string description;
  GridSpec grid;
  PVArraySpec array;
  double inverter_efficiency = 0.997;
  std::vector<IrradianceSegment> irradiance_profile;
  std::vector<LoadSegment> load_profile;
  CompensatorConfig compensator = NoCompensator{};
  double t_end = 0.2;  // s
  double dt = 0.01;    // s

  bool operator==(const Scenario&) const = default;
};

struct PowerFlowRecord {
  double t = 0.0;
  double p_pv = 0.0;
  double p_inv = 0.0;
  double q_inv = 0.0;
  double p_load = 0.0;
  double q_load = 0.0;
  double q_comp = 0.0;
  double p_comp_loss = 0.0;
  double p_grid = 0.0;
  double q_grid = 0.0;
  double pf_grid = 1.0;
  double v_dc = 0.0;

  bool operator==(const PowerFlowRecord&) const = default;
};

struct TimeSeries {
  std::string scenario_id;
  CompensatorKind mode = CompensatorKind::None;
  std::vector<PowerFlowRecord> records;
};

namespace detail {

template <typename Segment>
void validate_profile(const std::vector<Segment>& profile, const std::string& name) {
  require(!profile.empty(), ErrorKind::InvalidScenario, name + " must have at least one segment");
  require(profile.front().t_start == 0.0, ErrorKind::InvalidScenario,
          name + "[0].t_start must be 0");
  for (std::size_t k = 1; k < profile.size(); ++k) {
    require(std::isfinite(profile[k].t_start) && profile[k].t_start > profile[k - 1].t_start,
            ErrorKind::InvalidScenario,
            name + "[" + std::to_string(k) + "].t_start must be strictly increasing");
  }
}

// Segment with the largest t_start <= t; a record at exactly t_start uses the new segment.
template <typename Segment>
const Segment& active_segment(const std::vector<Segment>& profile, double t, double slack) {
  auto it = std::upper_bound(profile.begin(), profile.end(), t + slack,
                             [](double x, const Segment& s) { return x < s.t_start; });
  return it == profile.begin() ? profile.front() : *std::prev(it);
}

}  // namespace detail

inline void validate(const Scenario& s) {
  try {
    validate(s.array);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidScenario, e.message());
  }
  require(std::isfinite(s.grid.v_phase) && s.grid.v_phase > 0.0, ErrorKind::InvalidScenario,
          "grid.v_phase must be > 0");
  require(std::isfinite(s.grid.f) && s.grid.f > 0.0, ErrorKind::InvalidScenario,
          "grid.f must be > 0");
  require(std::isfinite(s.grid.v_dc) && s.grid.v_dc >= 0.0, ErrorKind::InvalidScenario,
          "grid.v_dc must be >= 0");
  require(s.inverter_efficiency > 0.0 && s.inverter_efficiency <= 1.0, ErrorKind::InvalidScenario,
          "inverter.efficiency must lie in (0, 1]");
  require(std::isfinite(s.dt) && s.dt > 0.0, ErrorKind::InvalidScenario, "sim.dt must be > 0");
  require(std::isfinite(s.t_end) && s.t_end >= 0.0, ErrorKind::InvalidScenario,
          "sim.t_end must be >= 0");
  // t_end = 0 is the degenerate single-record horizon; otherwise at least one full step.
  require(s.t_end == 0.0 || s.t_end >= s.dt, ErrorKind::InvalidScenario,
          "sim.t_end must be 0 or >= sim.dt");
  detail::validate_profile(s.irradiance_profile, "profiles.irradiance");
  detail::validate_profile(s.load_profile, "profiles.load");
  for (std::size_t k = 0; k < s.irradiance_profile.size(); ++k) {
    try {
      validate(EnvCondition{s.irradiance_profile[k].g, s.irradiance_profile[k].t_cell});
    } catch (const Error& e) {
      throw Error(ErrorKind::InvalidScenario,
                  "profiles.irradiance[" + std::to_string(k) + "]: " + e.message());
    }
  }
  for (std::size_t k = 0; k < s.load_profile.size(); ++k) {
    require(std::isfinite(s.load_profile[k].p) && std::isfinite(s.load_profile[k].q),
            ErrorKind::InvalidScenario,
            "profiles.load[" + std::to_string(k) + "] must have finite p and q");
  }
  try {
    validate(s.compensator);
  } catch (const Error& e) {
    throw Error(ErrorKind::InvalidScenario, e.message());
  }
}

inline std::size_t step_count(const Scenario& s) {
  return static_cast<std::size_t>(std::floor(s.t_end / s.dt + 1e-9)) + 1;
}

/// Power balance at time t using STC-calibrated module parameters.
inline PowerFlowRecord step(const Scenario& s, const SingleDiodeParams& params, double t) {
  const double slack = 1e-9 * s.dt;
  require(std::isfinite(t) && t >= 0.0 && t <= s.t_end + slack, ErrorKind::InvalidInput,
          "step time must lie in [0, t_end]");
  const auto& sun = detail::active_segment(s.irradiance_profile, t, slack);
  const auto& load = detail::active_segment(s.load_profile, t, slack);

  PowerFlowRecord r;
  r.t = t;
  r.p_pv = sun.g > 0.0 ? mpp(s.array, params, {sun.g, sun.t_cell}).p_mp : 0.0;
  r.p_inv = s.inverter_efficiency * r.p_pv;
  r.q_inv = 0.0;
  r.p_load = load.p;
  r.q_load = load.q;
  const auto comp = compensator_output(s.compensator, load.q, s.grid.v_phase);
  r.q_comp = comp.q_out;
  r.p_comp_loss = comp.p_loss;
  r.p_grid = r.p_load + r.p_comp_loss - r.p_inv;
  r.q_grid = r.q_load - r.q_comp;
  // A zero exchange with the grid is reported as unity.
  r.pf_grid = (r.p_grid == 0.0 && r.q_grid == 0.0) ? 1.0 : power_factor(r.p_grid, r.q_grid).pf;
  r.v_dc = s.grid.v_dc;
  return r;
}

inline TimeSeries run(const Scenario& s) {
  validate(s);
  SingleDiodeParams params;
  try {
    params = extract_single_diode_params(s.array.module);
  } catch (const Error& e) {
    throw Error(ErrorKind::CalibrationFailure, e.message());
  }
  TimeSeries out;
  out.scenario_id = s.id;
  out.mode = kind_of(s.compensator);
  const std::size_t n = step_count(s);
  out.records.reserve(n);
  for (std::size_t k = 0; k < n; ++k) {
    out.records.push_back(step(s, params, static_cast<double>(k) * s.dt));
  }
  return out;
}

enum class Verdict {
  FirstBetter,   // a keeps |q_grid| <= b at every step, strictly smaller at some
  SecondBetter,
  Equal,
  Mixed,
};

struct ComparisonReport {
  std::string id_a;
  std::string id_b;
  CompensatorKind mode_a = CompensatorKind::None;
  CompensatorKind mode_b = CompensatorKind::None;
  std::vector<double> t;
  std::vector<double> delta_q_grid;   // b - a, var
  std::vector<double> delta_pf_grid;  // b - a
  double max_abs_q_grid_a = 0.0;
  double max_abs_q_grid_b = 0.0;
  Verdict verdict = Verdict::Equal;
};

inline ComparisonReport compare_runs(const TimeSeries& a, const TimeSeries& b) {
  require(a.records.size() == b.records.size(), ErrorKind::GridMismatch,
          "series have different lengths (" + std::to_string(a.records.size()) + " vs " +
              std::to_string(b.records.size()) + ")");
  ComparisonReport rep;
  rep.id_a = a.scenario_id;
  rep.id_b = b.scenario_id;
  rep.mode_a = a.mode;
  rep.mode_b = b.mode;
  bool a_wins_somewhere = false;
  bool b_wins_somewhere = false;
  for (std::size_t k = 0; k < a.records.size(); ++k) {
    const auto& ra = a.records[k];
    const auto& rb = b.records[k];
    require(ra.t == rb.t, ErrorKind::GridMismatch,
            "time grids differ at index " + std::to_string(k));
    rep.t.push_back(ra.t);
    rep.delta_q_grid.push_back(rb.q_grid - ra.q_grid);
    rep.delta_pf_grid.push_back(rb.pf_grid - ra.pf_grid);
    const double qa = std::abs(ra.q_grid);
    const double qb = std::abs(rb.q_grid);
    rep.max_abs_q_grid_a = std::max(rep.max_abs_q_grid_a, qa);
    rep.max_abs_q_grid_b = std::max(rep.max_abs_q_grid_b, qb);
    a_wins_somewhere |= qa < qb;
    b_wins_somewhere |= qb < qa;
  }
  if (a_wins_somewhere && b_wins_somewhere) {
    rep.verdict = Verdict::Mixed;
  } else if (a_wins_somewhere) {
    rep.verdict = Verdict::FirstBetter;
  } else if (b_wins_somewhere) {
    rep.verdict = Verdict::SecondBetter;
  } else {
    rep.verdict = Verdict::Equal;
  }
  return rep;
}

}  // namespace pvgrid
