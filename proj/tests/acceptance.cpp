// Acceptance run: one PASS/FAIL line per criterion, non-zero exit if any fail.

#include <array>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "support.hpp"

using namespace pvgrid;

namespace {

struct Check {
  std::ostringstream notes;
  bool ok = true;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      ok = false;
      notes << " [failed: " << what << "]";
    }
  }
  void within_rel(double got, double want, double tol, const std::string& what) {
    const double err = support::rel_err(got, want);
    notes << " " << what << "=" << fmt::sig(got) << " (" << fmt::sig(100.0 * err, 3) << "% vs "
          << fmt::sig(want) << ")";
    expect(err <= tol, what);
  }
  void within_abs(double got, double want, double tol, const std::string& what) {
    notes << " " << what << "=" << fmt::sig(got);
    expect(std::abs(got - want) <= tol, what);
  }
};

Scenario bundled(const std::string& name) {
  return parse_scenario(support::read_file(support::scenario_path(name)));
}

std::string capture(const std::string& cmd) {
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return out;
  std::array<char, 4096> buf{};
  std::size_t n = 0;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) out.append(buf.data(), n);
  pclose(pipe);
  return out;
}

void ac1(Check& c) {
  const auto d = boost_design({100345.0, 290.0, 700.0, 5000.0});
  c.within_rel(d.i_out_max, 143.35, 5e-4, "i_out_max");
  c.within_rel(d.delta_i_l, 24.21, 5e-3, "delta_i_l");
  c.expect(d.delta_v_out == 4.9, "delta_v_out exact");
  c.notes << " delta_v_out=" << fmt::sig(d.delta_v_out);
  c.within_rel(d.l, 1.40e-3, 1e-2, "L");
  // 3400 uF when rounded to two figures; the hand evaluation gives 3427 uF.
  c.within_rel(d.c, 3427e-6, 5e-3, "C");
}

void ac2(Check& c) {
  const auto d = lcl_design({100000.0, 230.0, 50.0, 700.0, 10000.0});
  c.within_rel(d.z_b, 1.5870, 1e-3, "z_b");
  c.within_rel(d.i_max, 227.7317, 1e-3, "i_max");
  c.within_rel(d.delta_i_max, 22.7732, 1e-3, "delta_i_max");
  c.within_rel(d.c_g, 100.29e-6, 1e-3, "c_g");
  // Strict formula values; the built filter's 0.6 mH / 15 uH do not follow from them.
  c.within_rel(d.l_1, 512.3e-6, 5e-3, "l_1");
  c.within_rel(d.l_2, 12.88e-6, 5e-3, "l_2");
}

void ac3(Check& c) {
  const auto inv = resonance_check(0.6e-3, 15e-6, 100.29e-6, 50.0, 10000.0);
  const auto st = resonance_check(0.6e-3, 15.15e-6, 100.29e-6, 50.0, 10000.0);
  c.within_rel(inv.f_res, 4154.0, 1e-2, "f_res(15uH)");
  c.within_rel(st.f_res, 4134.0, 1e-2, "f_res(15.15uH)");
  c.expect(inv.pass && st.pass, "both inside window");
  c.expect(inv.f_min == 500.0 && inv.f_max == 5000.0, "window (500, 5000) Hz");
}

void ac4(Check& c) {
  const auto arr = support::reference_array();
  const auto stc = extract_single_diode_params(arr.module);
  struct Anchor {
    double g, t, kw;
    const char* name;
  };
  for (const auto& a : {Anchor{1000, 25, 100.345, "P(1000,25)"}, Anchor{500, 25, 50.75, "P(500,25)"},
                        Anchor{100, 25, 9.72, "P(100,25)"}, Anchor{1000, 15, 104.1, "P(1000,15)"},
                        Anchor{1000, 35, 98.78, "P(1000,35)"}, Anchor{1000, 45, 95.03, "P(1000,45)"}}) {
    c.within_rel(mpp(arr, stc, {a.g, a.t}).p_mp / 1e3, a.kw, 0.03, a.name);
  }
  c.within_rel(module_mpp(stc).p_mp, 213.15, 5e-3, "module_P");
}

void ac5(Check& c) {
  const auto ts = run(bundled("case1.json"));
  const auto& r = ts.records.front();
  c.within_abs(r.p_grid / 1e3, -44.8, 1.0, "p_grid_kW");
  c.within_abs(r.q_grid / 1e3, 100.0, 0.5, "q_grid_kVAr");
  // The reported half-sun grid reading does not balance and is not checked.
}

void ac6(Check& c) {
  double worst2 = 0.0;
  for (const auto& r : run(bundled("case2.json")).records) worst2 = std::max(worst2, std::abs(r.q_grid));
  c.notes << " case2 max|q_grid|=" << fmt::sig(worst2 / 1e3) << " kVAr";
  c.expect(worst2 <= 2e3, "case2 |q_grid| <= 2 kVAr");

  double worst3 = 0.0;
  double comp_err = 0.0;
  for (const auto& r : run(bundled("case3.json")).records) {
    worst3 = std::max(worst3, std::abs(r.q_grid));
    comp_err = std::max(comp_err, std::abs(r.q_comp - 150e3));
  }
  c.notes << " case3 max|q_grid|=" << fmt::sig(worst3 / 1e3) << " kVAr, max|q_comp-150k|="
          << fmt::sig(comp_err / 1e3) << " kVAr";
  c.expect(worst3 <= 2e3, "case3 |q_grid| <= 2 kVAr");
  c.expect(comp_err <= 1e3, "case3 q_comp = 150 +- 1 kVAr");
}

void ac7(Check& c) {
  std::mt19937_64 rng(7001);
  double worst_p = 0.0;
  double worst_q = 0.0;
  for (int n = 0; n < 1000; ++n) {
    const auto ts = run(support::random_scenario(rng));
    for (const auto& r : ts.records) {
      const double ps = std::max({std::abs(r.p_load), std::abs(r.p_inv), r.p_comp_loss, 1.0});
      const double qs = std::max({std::abs(r.q_load), std::abs(r.q_comp), 1.0});
      worst_p = std::max(worst_p, std::abs(r.p_grid + r.p_inv - r.p_load - r.p_comp_loss) / ps);
      worst_q = std::max(worst_q, std::abs(r.q_grid + r.q_comp - r.q_load) / qs);
    }
  }
  c.notes << " balance P=" << fmt::sig(worst_p, 2) << " Q=" << fmt::sig(worst_q, 2);
  c.expect(worst_p < 1e-9 && worst_q < 1e-9, "balance < 1e-9");

  const auto mod = support::reference_module();
  const auto stc = extract_single_diode_params(mod);
  std::uniform_real_distribution<double> g(20.0, 1200.0), t(-40.0, 90.0);
  std::uniform_int_distribution<int> count(1, 60);
  bool scaling = true;
  double worst_grad = 0.0;
  for (int n = 0; n < 200; ++n) {
    const EnvCondition env{g(rng), t(rng)};
    const PVArraySpec one{mod, 1, 1};
    const PVArraySpec big{mod, count(rng), count(rng)};
    const auto a = mpp(one, stc, env);
    const auto b = mpp(big, stc, env);
    scaling &= b.v_mp == big.n_series * a.v_mp && b.i_mp == big.n_parallel * a.i_mp;

    const auto p = adjust_params(stc, mod, env);
    const double h = 1e-4 * a.v_mp;
    auto power = [&](double v) { return v * module_current(p, v); };
    const double dpdv = (power(a.v_mp + h) - power(a.v_mp - h)) / (2.0 * h);
    worst_grad = std::max(worst_grad, std::abs(dpdv) * a.v_mp / a.p_mp);
  }
  c.notes << " scaling=" << (scaling ? "exact" : "inexact") << " grad=" << fmt::sig(worst_grad, 2);
  c.expect(scaling, "array scaling exact");
  c.expect(worst_grad < 1e-4, "MPP gradient < 1e-4");

  bool statcom_ok = true;
  bool cap_ok = true;
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int n = 0; n < 2000; ++n) {
    const Statcom st{1.0 + 1e6 * u(rng), 800.0, 0.0};
    const double a = (6.0 * u(rng) - 3.0) * st.q_max;
    const double b = (6.0 * u(rng) - 3.0) * st.q_max;
    const double qa = statcom_dispatch(a, st).q_out;
    const double qb = statcom_dispatch(b, st).q_out;
    statcom_ok &= statcom_dispatch(qa, st).q_out == qa && std::abs(qa - qb) <= std::abs(a - b) &&
                  (std::abs(a) > st.q_max || qa == a);
    const double qr = 1.0 + 1e6 * u(rng), vr = 50.0 + 500.0 * u(rng), v = 50.0 + 500.0 * u(rng);
    const double k = 3.0 * u(rng);
    cap_ok &= support::rel_err(capbank_q(qr, vr, k * v).q_out, k * k * capbank_q(qr, vr, v).q_out) < 1e-13 ||
              k == 0.0;
  }
  c.notes << " statcom=" << (statcom_ok ? "ok" : "bad") << " V2=" << (cap_ok ? "ok" : "bad");
  c.expect(statcom_ok, "statcom clamp properties");
  c.expect(cap_ok, "capacitor V^2 law");

  bool round_trip = true;
  for (int n = 0; n < 300; ++n) {
    const auto s = support::random_scenario(rng);
    round_trip &= parse_scenario(emit_scenario(s)) == s;
  }
  c.notes << " round-trip=" << (round_trip ? "ok" : "bad");
  c.expect(round_trip, "parse/emit round trip");

  bool same = true;
  for (const char* name : {"case1.json", "case2.json", "case3.json"}) {
    const std::string cmd = std::string("'") + PVGRID_CLI_PATH + "' simulate '" +
                            support::scenario_path(name) + "' 2>/dev/null";
    const auto first = capture(cmd);
    same &= !first.empty() && first == capture(cmd) && first == capture(cmd);
  }
  c.notes << " cli=" << (same ? "identical" : "differs");
  c.expect(same, "simulate byte-identical");
}

void ac8(Check& c) {
  std::mt19937_64 rng(8001);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  int trials = 0;
  bool ordered = true;
  for (int n = 0; n < 300; ++n) {
    Scenario s;
    s.id = "ordering";
    s.array = support::reference_array();
    s.irradiance_profile = {{0.0, 1000.0 * u(rng), 25.0 + 20.0 * u(rng)}};
    double q_peak = 0.0;
    const int segments = 1 + static_cast<int>(6 * u(rng));
    for (int k = 0; k < segments; ++k) {
      const double q = 250e3 * u(rng);
      q_peak = std::max(q_peak, q);
      s.load_profile.push_back({0.03 * k, 200e3 * u(rng), q});
    }
    auto max_abs_q = [](const Scenario& x) {
      double m = 0.0;
      for (const auto& r : run(x).records) m = std::max(m, std::abs(r.q_grid));
      return m;
    };
    auto cap = s;
    cap.compensator = FixedCapacitor{q_peak * (0.01 + 0.99 * u(rng)), s.grid.v_phase, 1300.0};
    auto st = s;
    st.compensator = Statcom{q_peak * (1.0 + u(rng)), 800.0, 0.0};
    const double none = max_abs_q(s), fixed = max_abs_q(cap), statcom = max_abs_q(st);
    ordered &= statcom <= fixed && fixed <= none;
    ++trials;
  }
  c.notes << " trials=" << trials;
  c.expect(ordered, "STATCOM <= FixedCapacitor <= None");
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<void(Check&)>>> criteria = {
      {"AC1 boost design", ac1},
      {"AC2 LCL design", ac2},
      {"AC3 resonance check", ac3},
      {"AC4 PV anchor points", ac4},
      {"AC5 case 1 balance", ac5},
      {"AC6 case 2/3 compensation", ac6},
      {"AC7 property suites", ac7},
      {"AC8 mode ordering", ac8},
  };
  int failed = 0;
  for (const auto& [name, body] : criteria) {
    Check c;
    try {
      body(c);
    } catch (const std::exception& e) {
      c.ok = false;
      c.notes << " [exception: " << e.what() << "]";
    }
    std::printf("[%s] %s:%s\n", c.ok ? "PASS" : "FAIL", name.c_str(), c.notes.str().c_str());
    failed += !c.ok;
  }
  std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
