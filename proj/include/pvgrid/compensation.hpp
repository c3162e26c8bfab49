#pragma once

// Steady-state reactive compensators at the PCC and power-factor arithmetic.
// Sign convention: q_out > 0 means vars injected toward the load.

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string_view>
#include <type_traits>
#include <variant>

#include "pvgrid/error.hpp"

namespace pvgrid {

struct NoCompensator {
  bool operator==(const NoCompensator&) const = default;
};

struct FixedCapacitor {
  double q_rated = 0.0;   // var at v_rated
  double v_rated = 0.0;   // V, per phase
  double loss_w = 1300.0;

  bool operator==(const FixedCapacitor&) const = default;
};

struct Statcom {
  double q_max = 0.0;  // var
  double loss_floor_w = 800.0;
  double loss_frac = 0.0;  // W per var of |q_out|

  bool operator==(const Statcom&) const = default;
};

using CompensatorConfig = std::variant<NoCompensator, FixedCapacitor, Statcom>;

struct CompensatorOutput {
  double q_out = 0.0;   // var
  double p_loss = 0.0;  // W, drawn from the grid
};

enum class CompensatorKind { None, FixedCapacitor, Statcom };

inline CompensatorKind kind_of(const CompensatorConfig& c) noexcept {
  return static_cast<CompensatorKind>(c.index());
}

/// Scenario-file tag.
constexpr std::string_view tag(CompensatorKind k) noexcept {
  switch (k) {
    case CompensatorKind::None: return "none";
    case CompensatorKind::FixedCapacitor: return "fixed_capacitor";
    case CompensatorKind::Statcom: return "statcom";
  }
  return "none";
}

/// Report label.
constexpr std::string_view label(CompensatorKind k) noexcept {
  switch (k) {
    case CompensatorKind::None: return "Compensator";
    case CompensatorKind::FixedCapacitor: return "Capacitor";
    case CompensatorKind::Statcom: return "STATCOM";
  }
  return "Compensator";
}

inline void validate(const CompensatorConfig& config) {
  std::visit(
      [](const auto& c) {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FixedCapacitor>) {
          require(std::isfinite(c.q_rated) && c.q_rated > 0.0, ErrorKind::InvalidInput,
                  "fixed capacitor q_rated must be > 0");
          require(std::isfinite(c.v_rated) && c.v_rated > 0.0, ErrorKind::InvalidInput,
                  "fixed capacitor v_rated must be > 0");
          require(std::isfinite(c.loss_w) && c.loss_w >= 0.0, ErrorKind::InvalidInput,
                  "fixed capacitor loss_w must be >= 0");
        } else if constexpr (std::is_same_v<T, Statcom>) {
          require(std::isfinite(c.q_max) && c.q_max > 0.0, ErrorKind::InvalidInput,
                  "statcom q_max must be > 0");
          require(std::isfinite(c.loss_floor_w) && c.loss_floor_w >= 0.0, ErrorKind::InvalidInput,
                  "statcom loss_floor_w must be >= 0");
          require(std::isfinite(c.loss_frac) && c.loss_frac >= 0.0 && c.loss_frac <= 0.05,
                  ErrorKind::InvalidInput, "statcom loss_frac must lie in [0, 0.05]");
        }
      },
      config);
}

/// Capacitor bank output under the V^2 law. The bank's loss is a constant feeder loss.
inline CompensatorOutput capbank_q(double q_rated, double v_rated, double v, double loss_w = 0.0) {
  require(std::isfinite(v) && v >= 0.0, ErrorKind::InvalidInput, "capacitor voltage must be >= 0");
  const double ratio = v / v_rated;
  return {q_rated * ratio * ratio, loss_w};
}

inline CompensatorOutput capbank_q(const FixedCapacitor& bank, double v) {
  return capbank_q(bank.q_rated, bank.v_rated, v, bank.loss_w);
}

/// Reactive output of a wye bank with per-phase capacitance c at phase voltage v.
inline double capacitor_reactive_power(double c_per_phase, double v_phase, double f_g) noexcept {
  return 3.0 * (2.0 * std::numbers::pi * f_g) * v_phase * v_phase * c_per_phase;
}

/// Demand-following STATCOM, clamped to its rating.
inline CompensatorOutput statcom_dispatch(double q_demand, const Statcom& config) {
  const double q = std::clamp(q_demand, -config.q_max, config.q_max);
  return {q, config.loss_floor_w + config.loss_frac * std::abs(q)};
}

/// Output of any compensator given the reactive demand and PCC phase voltage.
inline CompensatorOutput compensator_output(const CompensatorConfig& config, double q_demand,
                                            double v_phase) {
  return std::visit(
      [&](const auto& c) -> CompensatorOutput {
        using T = std::decay_t<decltype(c)>;
        if constexpr (std::is_same_v<T, FixedCapacitor>) {
          return capbank_q(c, v_phase);
        } else if constexpr (std::is_same_v<T, Statcom>) {
          return statcom_dispatch(q_demand, c);
        } else {
          return {};
        }
      },
      config);
}

enum class PFSense { Lagging, Leading, Unity };

constexpr std::string_view to_string(PFSense s) noexcept {
  switch (s) {
    case PFSense::Lagging: return "lagging";
    case PFSense::Leading: return "leading";
    case PFSense::Unity: return "unity";
  }
  return "unity";
}

struct PowerFactor {
  double pf = 1.0;
  PFSense sense = PFSense::Unity;
};

inline PowerFactor power_factor(double p, double q) {
  require(!(p == 0.0 && q == 0.0), ErrorKind::UndefinedPF,
          "power factor is undefined when both p and q are zero");
  PowerFactor out;
  out.pf = std::abs(p) / std::hypot(p, q);
  out.sense = q > 0.0 ? PFSense::Lagging : (q < 0.0 ? PFSense::Leading : PFSense::Unity);
  return out;
}

}  // namespace pvgrid
