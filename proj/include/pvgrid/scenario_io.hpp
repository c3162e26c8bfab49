#pragma once

// Scenario documents (JSON, strict schema), CSV serialization of curves and
// time series, JSON views of results and the plain-text run report.

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "pvgrid/component_design.hpp"
#include "pvgrid/compensation.hpp"
#include "pvgrid/error.hpp"
#include "pvgrid/format.hpp"
#include "pvgrid/pv_model.hpp"
#include "pvgrid/simulator.hpp"

namespace pvgrid {

using Json = nlohmann::ordered_json;

inline constexpr std::string_view kSeriesCsvHeader =
    "t,p_pv,p_inv,q_inv,p_load,q_load,q_comp,p_comp_loss,p_grid,q_grid,pf_grid,v_dc";
inline constexpr std::string_view kCurveCsvHeader = "v,i,p";

namespace detail {

// Reads one JSON object, tracking which keys were consumed so that anything
// left over can be reported as unknown.
class ObjectReader {
 public:
  ObjectReader(const Json& node, std::string path) : node_(node), path_(std::move(path)) {
    require(node_.is_object(), ErrorKind::ValidationError, where() + " must be an object");
  }

  [[nodiscard]] bool has(const std::string& key) const { return node_.contains(key); }

  [[nodiscard]] const Json& child(const std::string& key) {
    require(has(key), ErrorKind::ValidationError, "missing required key '" + join(key) + "'");
    seen_.insert(key);
    return node_.at(key);
  }

  double number(const std::string& key) {
    const Json& v = child(key);
    require(v.is_number(), ErrorKind::ValidationError, "key '" + join(key) + "' must be a number");
    const double x = v.get<double>();
    require(std::isfinite(x), ErrorKind::ValidationError, "key '" + join(key) + "' must be finite");
    return x;
  }

  double number_or(const std::string& key, double fallback) {
    return has(key) ? number(key) : fallback;
  }

  int integer(const std::string& key) {
    const Json& v = child(key);
    require(v.is_number_integer(), ErrorKind::ValidationError,
            "key '" + join(key) + "' must be an integer");
    return v.get<int>();
  }

  int integer_or(const std::string& key, int fallback) { return has(key) ? integer(key) : fallback; }

  std::string text(const std::string& key) {
    const Json& v = child(key);
    require(v.is_string(), ErrorKind::ValidationError, "key '" + join(key) + "' must be a string");
    return v.get<std::string>();
  }

  std::string text_or(const std::string& key, std::string fallback) {
    return has(key) ? text(key) : std::move(fallback);
  }

  [[nodiscard]] std::string join(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  /// Throws ValidationError listing every key that was never read.
  void finish() const {
    std::string unknown;
    for (const auto& [key, value] : node_.items()) {
      if (!seen_.contains(key)) {
        if (!unknown.empty()) unknown += ", ";
        unknown += "'" + join(key) + "'";
      }
    }
    require(unknown.empty(), ErrorKind::ValidationError, "unknown keys: " + unknown);
  }

 private:
  [[nodiscard]] std::string where() const { return path_.empty() ? "document" : "'" + path_ + "'"; }

  const Json& node_;
  std::string path_;
  std::set<std::string> seen_;
};

inline std::pair<std::size_t, std::size_t> line_and_column(std::string_view text, std::size_t byte) {
  std::size_t line = 1;
  std::size_t col = 1;
  for (std::size_t k = 0; k < std::min(byte, text.size()); ++k) {
    if (text[k] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

inline CompensatorConfig read_compensator(ObjectReader& r, double v_phase) {
  const std::string type = r.text("type");
  CompensatorConfig out;
  if (type == "none") {
    out = NoCompensator{};
  } else if (type == "fixed_capacitor") {
    FixedCapacitor c;
    c.q_rated = r.number("q_rated");
    c.v_rated = r.number_or("v_rated", v_phase);
    c.loss_w = r.number_or("loss_w", c.loss_w);
    out = c;
  } else if (type == "statcom") {
    Statcom c;
    c.q_max = r.number("q_max");
    c.loss_floor_w = r.number_or("loss_floor_w", c.loss_floor_w);
    c.loss_frac = r.number_or("loss_frac", c.loss_frac);
    out = c;
  } else {
    throw Error(ErrorKind::ValidationError,
                "key '" + r.join("type") + "' must be one of none, fixed_capacitor, statcom (got '" +
                    type + "')");
  }
  r.finish();
  return out;
}

}  // namespace detail

/// Parses and validates a scenario document. Optional fields receive their defaults.
inline Scenario parse_scenario(std::string_view text) {
  Json doc;
  try {
    doc = Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    const auto [line, col] = detail::line_and_column(text, e.byte == 0 ? 0 : e.byte - 1);
    throw Error(ErrorKind::ParseError, "line " + std::to_string(line) + ", column " +
                                           std::to_string(col) + ": " + e.what());
  }

  Scenario s;
  detail::ObjectReader root(doc, "");
  s.id = root.text_or("id", s.id);
  s.description = root.text_or("description", "");
  {
    detail::ObjectReader r(root.child("grid"), "grid");
    s.grid.v_phase = r.number("v_phase");
    s.grid.f = r.number("f");
    s.grid.v_dc = r.number_or("v_dc", s.grid.v_dc);
    r.finish();
  }
  {
    detail::ObjectReader r(root.child("pv_module"), "pv_module");
    PVModuleSpec& m = s.array.module;
    m.p_mp = r.number("p_mp");
    m.v_mp = r.number("v_mp");
    m.i_mp = r.number("i_mp");
    m.v_oc = r.number("v_oc");
    m.i_sc = r.number("i_sc");
    m.n_cells = r.integer_or("n_cells", m.n_cells);
    m.alpha_isc = r.number_or("alpha_isc", m.alpha_isc);
    m.beta_voc = r.number_or("beta_voc", m.beta_voc);
    m.g_stc = r.number_or("g_stc", m.g_stc);
    m.t_stc = r.number_or("t_stc", m.t_stc);
    m.ideality = r.number_or("ideality", m.ideality);
    m.rsh_dark_ratio = r.number_or("rsh_dark_ratio", m.rsh_dark_ratio);
    m.rsh_exponent = r.number_or("rsh_exponent", m.rsh_exponent);
    r.finish();
  }
  {
    detail::ObjectReader r(root.child("pv_array"), "pv_array");
    s.array.n_series = r.integer("n_series");
    s.array.n_parallel = r.integer("n_parallel");
    r.finish();
  }
  if (root.has("inverter")) {
    detail::ObjectReader r(root.child("inverter"), "inverter");
    s.inverter_efficiency = r.number_or("efficiency", s.inverter_efficiency);
    r.finish();
  }
  {
    detail::ObjectReader r(root.child("compensator"), "compensator");
    s.compensator = detail::read_compensator(r, s.grid.v_phase);
  }
  {
    detail::ObjectReader r(root.child("profiles"), "profiles");
    const Json& sun = r.child("irradiance");
    require(sun.is_array(), ErrorKind::ValidationError, "key 'profiles.irradiance' must be an array");
    for (std::size_t k = 0; k < sun.size(); ++k) {
      detail::ObjectReader seg(sun[k], "profiles.irradiance[" + std::to_string(k) + "]");
      IrradianceSegment x;
      x.t_start = seg.number("t_start");
      x.g = seg.number("g");
      x.t_cell = seg.number_or("t_cell", x.t_cell);
      seg.finish();
      s.irradiance_profile.push_back(x);
    }
    const Json& load = r.child("load");
    require(load.is_array(), ErrorKind::ValidationError, "key 'profiles.load' must be an array");
    for (std::size_t k = 0; k < load.size(); ++k) {
      detail::ObjectReader seg(load[k], "profiles.load[" + std::to_string(k) + "]");
      LoadSegment x;
      x.t_start = seg.number("t_start");
      x.p = seg.number("p");
      x.q = seg.number("q");
      seg.finish();
      s.load_profile.push_back(x);
    }
    r.finish();
  }
  if (root.has("sim")) {
    detail::ObjectReader r(root.child("sim"), "sim");
    s.t_end = r.number_or("t_end", s.t_end);
    s.dt = r.number_or("dt", s.dt);
    r.finish();
  }
  root.finish();

  try {
    validate(s);
  } catch (const Error& e) {
    throw Error(ErrorKind::ValidationError, e.message());
  }
  return s;
}

inline Json to_json(const CompensatorConfig& c) {
  Json j;
  j["type"] = std::string(tag(kind_of(c)));
  if (const auto* bank = std::get_if<FixedCapacitor>(&c)) {
    j["q_rated"] = bank->q_rated;
    j["v_rated"] = bank->v_rated;
    j["loss_w"] = bank->loss_w;
  } else if (const auto* st = std::get_if<Statcom>(&c)) {
    j["q_max"] = st->q_max;
    j["loss_floor_w"] = st->loss_floor_w;
    j["loss_frac"] = st->loss_frac;
  }
  return j;
}

/// Full scenario document with every default written out; parse_scenario inverts it.
inline std::string emit_scenario(const Scenario& s) {
  Json j;
  j["id"] = s.id;
  if (!s.description.empty()) j["description"] = s.description;
  j["grid"] = {{"v_phase", s.grid.v_phase}, {"f", s.grid.f}, {"v_dc", s.grid.v_dc}};
  const auto& m = s.array.module;
  j["pv_module"] = {{"p_mp", m.p_mp},
                    {"v_mp", m.v_mp},
                    {"i_mp", m.i_mp},
                    {"v_oc", m.v_oc},
                    {"i_sc", m.i_sc},
                    {"n_cells", m.n_cells},
                    {"alpha_isc", m.alpha_isc},
                    {"beta_voc", m.beta_voc},
                    {"g_stc", m.g_stc},
                    {"t_stc", m.t_stc},
                    {"ideality", m.ideality},
                    {"rsh_dark_ratio", m.rsh_dark_ratio},
                    {"rsh_exponent", m.rsh_exponent}};
  j["pv_array"] = {{"n_series", s.array.n_series}, {"n_parallel", s.array.n_parallel}};
  j["inverter"] = {{"efficiency", s.inverter_efficiency}};
  j["compensator"] = to_json(s.compensator);
  Json sun = Json::array();
  for (const auto& x : s.irradiance_profile) {
    sun.push_back({{"t_start", x.t_start}, {"g", x.g}, {"t_cell", x.t_cell}});
  }
  Json load = Json::array();
  for (const auto& x : s.load_profile) {
    load.push_back({{"t_start", x.t_start}, {"p", x.p}, {"q", x.q}});
  }
  j["profiles"] = {{"irradiance", sun}, {"load", load}};
  j["sim"] = {{"t_end", s.t_end}, {"dt", s.dt}};
  return j.dump(2) + "\n";
}

inline std::string emit_csv(const TimeSeries& series) {
  std::string out(kSeriesCsvHeader);
  out += '\n';
  for (const auto& r : series.records) {
    const double row[] = {r.t,      r.p_pv,        r.p_inv,  r.q_inv,  r.p_load,  r.q_load,
                          r.q_comp, r.p_comp_loss, r.p_grid, r.q_grid, r.pf_grid, r.v_dc};
    for (std::size_t k = 0; k < std::size(row); ++k) {
      if (k) out += ',';
      out += fmt::sig(row[k], 6);
    }
    out += '\n';
  }
  return out;
}

/// Reads records back from emit_csv output (values at the emitted precision).
inline std::vector<PowerFlowRecord> parse_csv(std::string_view text) {
  std::vector<PowerFlowRecord> out;
  std::size_t pos = 0;
  std::size_t line_no = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= text.size()) return std::nullopt;
    const std::size_t end = std::min(text.find('\n', pos), text.size());
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    ++line_no;
    return line;
  };
  const auto header = next_line();
  require(header && *header == kSeriesCsvHeader, ErrorKind::ParseError,
          "line 1: expected header '" + std::string(kSeriesCsvHeader) + "'");
  while (const auto line = next_line()) {
    if (line->empty()) continue;
    std::array<double, 12> v{};
    std::size_t field = 0;
    const char* p = line->data();
    const char* end = line->data() + line->size();
    while (field < v.size()) {
      const auto res = std::from_chars(p, end, v[field]);
      require(res.ec == std::errc{}, ErrorKind::ParseError,
              "line " + std::to_string(line_no) + ": bad number in column " +
                  std::to_string(field + 1));
      p = res.ptr;
      ++field;
      if (field < v.size()) {
        require(p < end && *p == ',', ErrorKind::ParseError,
                "line " + std::to_string(line_no) + ": expected 12 columns");
        ++p;
      }
    }
    require(p == end, ErrorKind::ParseError,
            "line " + std::to_string(line_no) + ": trailing characters");
    out.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8], v[9], v[10], v[11]});
  }
  return out;
}

inline std::string curve_csv(const IVCurve& curve) {
  std::string out(kCurveCsvHeader);
  out += '\n';
  for (const auto& pt : curve.points) {
    out += fmt::sig(pt.v) + "," + fmt::sig(pt.i) + "," + fmt::sig(pt.p) + "\n";
  }
  return out;
}

inline Json to_json(const BoostDesign& d) {
  return {{"i_out_max", d.i_out_max},
          {"delta_i_l", d.delta_i_l},
          {"delta_v_out", d.delta_v_out},
          {"l", d.l},
          {"c", d.c}};
}

inline Json to_json(const LCLDesign& d) {
  return {{"omega_g", d.omega_g}, {"z_b", d.z_b},   {"c_b", d.c_b},
          {"i_max", d.i_max},     {"delta_i_max", d.delta_i_max},
          {"l_1", d.l_1},         {"c_g", d.c_g},   {"l_2", d.l_2}};
}

inline Json to_json(const ResonanceReport& r) {
  return {{"omega_res", r.omega_res},
          {"f_res", r.f_res},
          {"f_min", r.f_min},
          {"f_max", r.f_max},
          {"pass", r.pass}};
}

inline Json to_json(const MPPResult& m) {
  return {{"v_mp", m.v_mp}, {"i_mp", m.i_mp}, {"p_mp", m.p_mp}};
}

inline Json to_json(const IVCurve& c) {
  Json pts = Json::array();
  for (const auto& p : c.points) pts.push_back({{"v", p.v}, {"i", p.i}, {"p", p.p}});
  return pts;
}

inline Json to_json(const TimeSeries& s) {
  Json recs = Json::array();
  for (const auto& r : s.records) {
    recs.push_back({{"t", r.t},
                    {"p_pv", r.p_pv},
                    {"p_inv", r.p_inv},
                    {"q_inv", r.q_inv},
                    {"p_load", r.p_load},
                    {"q_load", r.q_load},
                    {"q_comp", r.q_comp},
                    {"p_comp_loss", r.p_comp_loss},
                    {"p_grid", r.p_grid},
                    {"q_grid", r.q_grid},
                    {"pf_grid", r.pf_grid},
                    {"v_dc", r.v_dc}});
  }
  return {{"scenario_id", s.scenario_id}, {"mode", std::string(tag(s.mode))}, {"records", recs}};
}

constexpr std::string_view to_string(Verdict v) noexcept {
  switch (v) {
    case Verdict::FirstBetter: return "first";
    case Verdict::SecondBetter: return "second";
    case Verdict::Equal: return "equal";
    case Verdict::Mixed: return "mixed";
  }
  return "mixed";
}

inline Json to_json(const ComparisonReport& c) {
  return {{"a", {{"scenario_id", c.id_a}, {"mode", std::string(tag(c.mode_a))},
                 {"max_abs_q_grid", c.max_abs_q_grid_a}}},
          {"b", {{"scenario_id", c.id_b}, {"mode", std::string(tag(c.mode_b))},
                 {"max_abs_q_grid", c.max_abs_q_grid_b}}},
          {"verdict", std::string(to_string(c.verdict))},
          {"t", c.t},
          {"delta_q_grid", c.delta_q_grid},
          {"delta_pf_grid", c.delta_pf_grid}};
}

namespace detail {

inline std::string kw(double watts) { return fmt::fixed(watts / 1e3, 1) + " kW"; }
inline std::string kvar(double var) { return fmt::fixed(var / 1e3, 1) + " kVAr"; }

inline std::string run_label(CompensatorKind mode, const std::string& id) {
  std::string name = mode == CompensatorKind::None ? "uncompensated" : std::string(label(mode));
  return name + " run '" + id + "'";
}

inline bool same_operating_point(const PowerFlowRecord& a, const PowerFlowRecord& b) {
  return a.p_pv == b.p_pv && a.p_load == b.p_load && a.q_load == b.q_load &&
         a.q_comp == b.q_comp && a.p_comp_loss == b.p_comp_loss;
}

}  // namespace detail

inline std::string verdict_line(const ComparisonReport& c) {
  const std::string maxima =
      " (max |grid Q| " + detail::kvar(c.max_abs_q_grid_a) + " for '" + c.id_a + "' vs " +
      detail::kvar(c.max_abs_q_grid_b) + " for '" + c.id_b + "')";
  switch (c.verdict) {
    case Verdict::FirstBetter:
      return "Verdict: " + detail::run_label(c.mode_a, c.id_a) +
             " kept |grid Q| no larger at every step and smaller overall" + maxima;
    case Verdict::SecondBetter:
      return "Verdict: " + detail::run_label(c.mode_b, c.id_b) +
             " kept |grid Q| no larger at every step and smaller overall" + maxima;
    case Verdict::Equal:
      return "Verdict: both runs drew identical |grid Q| at every step" + maxima;
    case Verdict::Mixed:
      return "Verdict: neither run kept |grid Q| smaller at every step" + maxima;
  }
  return {};
}

/// Human-readable summary: one block per steady-state segment, the grid PF
/// range and, when a comparison is supplied, its verdict.
inline std::string render_report(const TimeSeries& series,
                                 const std::optional<ComparisonReport>& comparison = std::nullopt) {
  require(!series.records.empty(), ErrorKind::EmptySeries, "cannot report on an empty series");
  std::ostringstream os;
  const std::string comp = std::string(label(series.mode));
  os << "Scenario: " << series.scenario_id << " (compensator: " << tag(series.mode) << ")\n";

  const auto& recs = series.records;
  std::size_t block = 0;
  for (std::size_t begin = 0; begin < recs.size();) {
    std::size_t end = begin + 1;
    while (end < recs.size() && detail::same_operating_point(recs[begin], recs[end])) ++end;
    const auto& r = recs[begin];
    os << "\nSegment " << ++block << ": t = " << fmt::sig(r.t) << " s to "
       << fmt::sig(recs[end - 1].t) << " s (" << (end - begin) << " steps)\n";
    os << "  PV P: " << detail::kw(r.p_pv) << "\n";
    os << "  Inverter P: " << detail::kw(r.p_inv) << "\n";
    os << "  Inverter Q: " << detail::kvar(r.q_inv) << "\n";
    os << "  Load P: " << detail::kw(r.p_load) << "\n";
    os << "  Load Q: " << detail::kvar(r.q_load) << "\n";
    os << "  " << comp << " Q: " << detail::kvar(r.q_comp) << "\n";
    os << "  " << comp << " loss P: " << detail::kw(r.p_comp_loss) << "\n";
    os << "  Grid P: " << detail::kw(r.p_grid) << "\n";
    os << "  Grid Q: " << detail::kvar(r.q_grid) << "\n";
    const std::string sense = r.q_grid > 0.0 ? "lagging" : (r.q_grid < 0.0 ? "leading" : "unity");
    os << "  Grid PF: " << fmt::fixed(r.pf_grid, 3) << " (" << sense << ")\n";
    begin = end;
  }

  const auto [lo, hi] = std::minmax_element(
      recs.begin(), recs.end(), [](const auto& a, const auto& b) { return a.pf_grid < b.pf_grid; });
  os << "\nGrid PF range: min " << fmt::fixed(lo->pf_grid, 3) << " at t = " << fmt::sig(lo->t)
     << " s, max " << fmt::fixed(hi->pf_grid, 3) << " at t = " << fmt::sig(hi->t) << " s\n";
  if (comparison) os << verdict_line(*comparison) << "\n";
  return os.str();
}

}  // namespace pvgrid
