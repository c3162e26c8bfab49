// pvgrid: design calculators, PV curve sweeps and PCC power-flow simulation.
//
// Exit codes: 0 success, 1 validation/parse error, 2 numerical failure.

#include <unistd.h>

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

#include "CLI11.hpp"
#include "pvgrid/pvgrid.hpp"

namespace fs = std::filesystem;
using namespace pvgrid;

namespace {

bool use_color() {
  return std::getenv("PVGRID_NO_COLOR") == nullptr && ::isatty(::fileno(stderr)) != 0;
}

void report_error(const std::string& message) {
  if (use_color()) {
    std::cerr << "\x1b[1;31merror:\x1b[0m " << message << "\n";
  } else {
    std::cerr << "error: " << message << "\n";
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ValidationError, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_output(const std::string& data, const std::string& path) {
  if (path.empty()) {
    std::cout << data;
    std::cout.flush();
    return;
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::ValidationError, "cannot write '" + path + "'");
  out << data;
}

Scenario load_scenario(const std::string& path) {
  try {
    return parse_scenario(read_file(path));
  } catch (const Error& e) {
    throw Error(e.kind(), path + ": " + e.message());
  }
}

std::string key_values(const std::vector<std::pair<std::string, std::string>>& rows) {
  std::string out;
  for (const auto& [k, v] : rows) out += k + " = " + v + "\n";
  return out;
}

std::string dump(const Json& j) { return j.dump(2) + "\n"; }

// Appends the CLI flags corresponding to field names mentioned in a library error.
Error with_flags(const Error& e, const std::vector<std::pair<std::string, std::string>>& names) {
  std::string flags;
  for (const auto& [field, flag] : names) {
    const auto& msg = e.message();
    const auto pos = msg.find(field);
    const bool word = pos != std::string::npos &&
                      (pos + field.size() == msg.size() ||
                       !(std::isalnum(static_cast<unsigned char>(msg[pos + field.size()])) ||
                         msg[pos + field.size()] == '_'));
    if (word) flags += (flags.empty() ? "" : ", ") + flag;
  }
  return flags.empty() ? e : Error(e.kind(), e.message() + " (flags: " + flags + ")");
}

struct Common {
  bool json = false;
  std::string output;
};

void add_common(CLI::App* cmd, Common& c) {
  cmd->add_flag("--json", c.json, "Emit a JSON object instead of the text block");
  cmd->add_option("-o,--output", c.output, "Write data to this file instead of stdout");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"pvgrid: PV grid-integration design and quasi-steady-state simulation"};
  app.require_subcommand(1);

  // design-boost
  Common boost_io;
  BoostDesignInput boost_in;
  auto* boost = app.add_subcommand("design-boost", "Size the PV boost converter");
  boost->add_option("--p", boost_in.p, "PV power at STC [W]")->required();
  boost->add_option("--vin", boost_in.v_in, "PV voltage at STC [V]")->required();
  boost->add_option("--vout", boost_in.v_out, "dc-link voltage [V]")->required();
  boost->add_option("--fsw", boost_in.f_s, "switching frequency [Hz]")->required();
  boost->add_option("--ripple-i", boost_in.ripple_i_frac, "inductor ripple fraction")
      ->capture_default_str();
  boost->add_option("--ripple-v", boost_in.ripple_v_frac, "output ripple fraction")
      ->capture_default_str();
  add_common(boost, boost_io);

  // design-lcl
  Common lcl_io;
  LCLDesignInput lcl_in;
  auto* lcl = app.add_subcommand("design-lcl", "Size the inverter LCL filter and check resonance");
  lcl->add_option("--p", lcl_in.p, "rated power [W]")->required();
  lcl->add_option("--vg", lcl_in.v_g, "grid phase voltage RMS [V]")->required();
  lcl->add_option("--fg", lcl_in.f_g, "grid frequency [Hz]")->required();
  lcl->add_option("--vdc", lcl_in.v_dc, "dc-link voltage [V]")->required();
  lcl->add_option("--fsw", lcl_in.f_sw, "inverter switching frequency [Hz]")->required();
  lcl->add_option("--cap-frac", lcl_in.cap_frac, "filter capacitor fraction of base")
      ->capture_default_str();
  lcl->add_option("--ripple-frac", lcl_in.ripple_frac, "current ripple fraction")
      ->capture_default_str();
  lcl->add_option("--atten", lcl_in.atten_factor, "ripple attenuation factor")->capture_default_str();
  add_common(lcl, lcl_io);

  // check-resonance
  Common res_io;
  double l1 = 0, l2 = 0, cg = 0, res_fg = 0, res_fsw = 0;
  auto* res = app.add_subcommand("check-resonance", "Check LCL resonance placement");
  res->add_option("--l1", l1, "inverter-side inductance [H]")->required();
  res->add_option("--l2", l2, "grid-side inductance [H]")->required();
  res->add_option("--cg", cg, "filter capacitance [F]")->required();
  res->add_option("--fg", res_fg, "grid frequency [Hz]")->required();
  res->add_option("--fsw", res_fsw, "switching frequency [Hz]")->required();
  add_common(res, res_io);

  // pv-curve
  Common curve_io;
  std::string curve_scenario;
  PVArraySpec curve_array;
  double curve_g = 0, curve_t = 0;
  std::size_t curve_points = 100;
  auto* curve = app.add_subcommand("pv-curve", "Sweep the array I-V / P-V curve");
  curve->add_option("--scenario", curve_scenario, "take module and array from a scenario file");
  auto* o_pmp = curve->add_option("--pmp", curve_array.module.p_mp, "module Pmp [W]");
  auto* o_vmp = curve->add_option("--vmp", curve_array.module.v_mp, "module Vmp [V]");
  auto* o_imp = curve->add_option("--imp", curve_array.module.i_mp, "module Imp [A]");
  auto* o_voc = curve->add_option("--voc", curve_array.module.v_oc, "module Voc [V]");
  auto* o_isc = curve->add_option("--isc", curve_array.module.i_sc, "module Isc [A]");
  curve->add_option("--cells", curve_array.module.n_cells, "cells per module")->capture_default_str();
  curve->add_option("--alpha", curve_array.module.alpha_isc, "Isc temperature coefficient [1/degC]")
      ->capture_default_str();
  curve->add_option("--beta", curve_array.module.beta_voc, "Voc temperature coefficient [1/degC]")
      ->capture_default_str();
  curve->add_option("--series", curve_array.n_series, "modules in series")->capture_default_str();
  curve->add_option("--parallel", curve_array.n_parallel, "strings in parallel")
      ->capture_default_str();
  curve->add_option("--g", curve_g, "irradiance [W/m^2]")->required();
  curve->add_option("--t", curve_t, "cell temperature [degC]")->required();
  curve->add_option("--points", curve_points, "number of sweep points")->capture_default_str();
  add_common(curve, curve_io);
  for (auto* opt : {o_pmp, o_vmp, o_imp, o_voc, o_isc}) opt->excludes("--scenario");

  // simulate
  Common sim_io;
  std::string sim_file;
  std::string sim_batch;
  bool sim_report = false;
  auto* sim = app.add_subcommand("simulate", "Run a scenario and emit its power-flow series");
  sim->add_option("scenario", sim_file, "scenario JSON file");
  sim->add_option("--batch", sim_batch, "run every *.json in this directory (requires -o <dir>)");
  sim->add_flag("--report", sim_report, "emit the text report instead of CSV");
  add_common(sim, sim_io);

  // compare
  Common cmp_io;
  std::string cmp_a, cmp_b;
  auto* cmp = app.add_subcommand("compare", "Run two scenarios and compare grid reactive power");
  cmp->add_option("first", cmp_a, "first scenario JSON file")->required();
  cmp->add_option("second", cmp_b, "second scenario JSON file")->required();
  add_common(cmp, cmp_io);

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    report_error(e.what());
    return 1;
  }

  try {
    if (boost->parsed()) {
      BoostDesign d;
      try {
        d = boost_design(boost_in);
      } catch (const Error& e) {
        throw with_flags(e, {{"v_in", "--vin"}, {"v_out", "--vout"}, {"f_s", "--fsw"},
                             {"p", "--p"}, {"ripple_i_frac", "--ripple-i"},
                             {"ripple_v_frac", "--ripple-v"}});
      }
      write_output(boost_io.json ? dump(to_json(d))
                                 : key_values({{"i_out_max", fmt::engineering(d.i_out_max, "A")},
                                               {"delta_i_l", fmt::engineering(d.delta_i_l, "A")},
                                               {"delta_v_out", fmt::engineering(d.delta_v_out, "V")},
                                               {"l", fmt::engineering(d.l, "H")},
                                               {"c", fmt::engineering(d.c, "F")}}),
                   boost_io.output);
    } else if (lcl->parsed()) {
      LCLDesign d;
      try {
        d = lcl_design(lcl_in);
      } catch (const Error& e) {
        throw with_flags(e, {{"p", "--p"}, {"v_g", "--vg"}, {"f_g", "--fg"}, {"v_dc", "--vdc"},
                             {"f_sw", "--fsw"}, {"cap_frac", "--cap-frac"},
                             {"ripple_frac", "--ripple-frac"}, {"atten_factor", "--atten"}});
      }
      const auto r = resonance_check(d, lcl_in.f_g, lcl_in.f_sw);
      if (lcl_io.json) {
        write_output(dump({{"design", to_json(d)}, {"resonance", to_json(r)}}), lcl_io.output);
      } else {
        write_output(key_values({{"omega_g", fmt::engineering(d.omega_g, "rad/s")},
                                 {"z_b", fmt::engineering(d.z_b, "ohm")},
                                 {"c_b", fmt::engineering(d.c_b, "F")},
                                 {"i_max", fmt::engineering(d.i_max, "A")},
                                 {"delta_i_max", fmt::engineering(d.delta_i_max, "A")},
                                 {"l_1", fmt::engineering(d.l_1, "H")},
                                 {"c_g", fmt::engineering(d.c_g, "F")},
                                 {"l_2", fmt::engineering(d.l_2, "H")},
                                 {"omega_res", fmt::engineering(r.omega_res, "rad/s")},
                                 {"f_res", fmt::engineering(r.f_res, "Hz")},
                                 {"f_min", fmt::engineering(r.f_min, "Hz")},
                                 {"f_max", fmt::engineering(r.f_max, "Hz")},
                                 {"pass", r.pass ? "true" : "false"}}),
                     lcl_io.output);
      }
    } else if (res->parsed()) {
      ResonanceReport r;
      try {
        r = resonance_check(l1, l2, cg, res_fg, res_fsw);
      } catch (const Error& e) {
        throw Error(e.kind(), e.message() + " (flags: --l1, --l2, --cg, --fg, --fsw)");
      }
      write_output(res_io.json ? dump(to_json(r))
                               : key_values({{"omega_res", fmt::engineering(r.omega_res, "rad/s")},
                                             {"f_res", fmt::engineering(r.f_res, "Hz")},
                                             {"f_min", fmt::engineering(r.f_min, "Hz")},
                                             {"f_max", fmt::engineering(r.f_max, "Hz")},
                                             {"pass", r.pass ? "true" : "false"}}),
                   res_io.output);
    } else if (curve->parsed()) {
      PVArraySpec array = curve_array;
      if (!curve_scenario.empty()) {
        array = load_scenario(curve_scenario).array;
      } else {
        for (auto* opt : {o_pmp, o_vmp, o_imp, o_voc, o_isc}) {
          require(opt->count() > 0, ErrorKind::ValidationError,
                  "pv-curve needs --scenario or every module flag; missing " + opt->get_name());
        }
      }
      validate(array);
      const EnvCondition env{curve_g, curve_t};
      try {
        validate(env);
      } catch (const Error& e) {
        throw Error(e.kind(), e.message() + " (flags: --g, --t)");
      }
      const auto params = extract_single_diode_params(array.module);
      const auto c = array_iv_sweep(array, params, env, curve_points);
      if (curve_io.json) {
        Json j;
        j["g"] = env.g;
        j["t"] = env.t;
        j["mpp"] = env.g > 0.0 ? to_json(mpp(array, params, env)) : Json(nullptr);
        j["points"] = to_json(c);
        write_output(dump(j), curve_io.output);
      } else {
        write_output(curve_csv(c), curve_io.output);
      }
    } else if (sim->parsed()) {
      auto render = [&](const TimeSeries& s) {
        if (sim_report) return render_report(s);
        return sim_io.json ? dump(to_json(s)) : emit_csv(s);
      };
      if (!sim_batch.empty()) {
        require(sim_file.empty(), ErrorKind::ValidationError,
                "--batch and a scenario file are mutually exclusive");
        require(!sim_io.output.empty(), ErrorKind::ValidationError, "--batch requires -o <dir>");
        std::vector<fs::path> files;
        for (const auto& entry : fs::directory_iterator(sim_batch)) {
          if (entry.is_regular_file() && entry.path().extension() == ".json") {
            files.push_back(entry.path());
          }
        }
        std::sort(files.begin(), files.end());
        // Parse everything up front so a bad file fails before any output is written.
        std::vector<Scenario> scenarios;
        for (const auto& f : files) scenarios.push_back(load_scenario(f.string()));
        std::vector<std::future<std::string>> jobs;
        for (const auto& s : scenarios) {
          jobs.push_back(std::async(std::launch::async, [&render, &s] { return render(run(s)); }));
        }
        fs::create_directories(sim_io.output);
        const std::string ext = sim_report ? ".txt" : (sim_io.json ? ".json" : ".csv");
        for (std::size_t k = 0; k < files.size(); ++k) {
          const auto out = fs::path(sim_io.output) / (files[k].stem().string() + ext);
          write_output(jobs[k].get(), out.string());
        }
      } else {
        require(!sim_file.empty(), ErrorKind::ValidationError,
                "simulate needs a scenario file or --batch <dir>");
        write_output(render(run(load_scenario(sim_file))), sim_io.output);
      }
    } else if (cmp->parsed()) {
      const auto a = run(load_scenario(cmp_a));
      const auto b = run(load_scenario(cmp_b));
      const auto report = compare_runs(a, b);
      if (cmp_io.json) {
        write_output(dump(to_json(report)), cmp_io.output);
      } else {
        write_output(render_report(a) + "\n" + render_report(b, report), cmp_io.output);
      }
    }
  } catch (const Error& e) {
    report_error(e.what());
    return is_numerical(e.kind()) ? 2 : 1;
  } catch (const std::exception& e) {
    report_error(e.what());
    return 1;
  }
  return 0;
}
