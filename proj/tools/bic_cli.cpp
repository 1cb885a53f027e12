// bic: command-line surface over the bound-state solvers. JSON for single
// structured results (top-level {manifest, results}), CSV for sweeps, with
// the manifest in a .manifest.json sidecar. Exit codes: 0 ok, 2 usage,
// 3 numerical failure.
#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "bic/oracle.hpp"
#include "bic/poles.hpp"
#include "bic/spectrum.hpp"

using json = nlohmann::ordered_json;
using namespace bic;

namespace {

constexpr const char* kVersion = "0.1.0";

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

std::string now_iso() {
  const auto t = std::chrono::system_clock::to_time_t(
      std::chrono::system_clock::now());
  char buf[32];
  std::strftime(buf, sizeof(buf), "%FT%TZ", std::gmtime(&t));
  return buf;
}

struct Output {
  std::string path;  // empty -> stdout
  void write_text(const std::string& text) const {
    if (path.empty()) {
      std::cout << text;
    } else {
      std::ofstream f(path, std::ios::binary);
      f << text;
    }
  }
  void write_json(const json& j) const { write_text(j.dump(2) + "\n"); }
  void write_csv(const std::string& csv, const json& manifest) const {
    write_text(csv);
    if (!path.empty()) {
      std::ofstream f(path + ".manifest.json", std::ios::binary);
      f << manifest.dump(2) << "\n";
    }
  }
};

json params_json(const EmitterArrayParams& p) {
  return json{{"n", p.n}, {"epsilon", p.epsilon}, {"d", p.d},
              {"gamma", p.gamma}};
}

json make_manifest(const std::string& command, const json& params,
                   const json& tolerances, const json& seed_grid,
                   const std::string& timestamp) {
  return json{{"command", command},
              {"params", params},
              {"tolerances", tolerances},
              {"seed_grid", seed_grid},
              {"library_version", kVersion},
              {"timestamp", timestamp}};
}

json state_json(const BoundStateInContinuum& st) {
  json amps = json::array();
  for (int i = 0; i < st.amplitudes.size(); ++i) {
    amps.push_back(json{{"re", st.amplitudes[i].real()},
                        {"im", st.amplitudes[i].imag()}});
  }
  return json{{"E", st.E},
              {"epsilon", st.epsilon},
              {"chi", st.chi},
              {"nu_nearest", st.nu_nearest},
              {"sector", to_string(st.sector)},
              {"amplitudes", amps},
              {"p", st.p},
              {"constraint_residual", st.constraint_residual},
              {"sigma_min", st.sigma_min},
              {"mode", st.mode == SolveMode::Full ? "full" : "markov"}};
}

BoundStateInContinuum state_from_json(const json& j) {
  BoundStateInContinuum st;
  st.E = j.at("E").get<double>();
  st.epsilon = j.at("epsilon").get<double>();
  st.chi = j.value("chi", 0.0);
  st.nu_nearest = j.value("nu_nearest", 0);
  const std::string sec = j.value("sector", "indefinite");
  st.sector = sec == "symmetric" ? Parity::Symmetric
              : sec == "antisymmetric" ? Parity::Antisymmetric
                                       : Parity::Indefinite;
  const auto& amps = j.at("amplitudes");
  st.amplitudes.resize(amps.size());
  for (size_t i = 0; i < amps.size(); ++i) {
    st.amplitudes[int(i)] = Complex(amps[i].at("re").get<double>(),
                                    amps[i].at("im").get<double>());
  }
  st.p = j.value("p", st.amplitudes.squaredNorm());
  st.mode = j.value("mode", std::string("full")) == "markov"
                ? SolveMode::LargeSpacing
                : SolveMode::Full;
  return st;
}

struct CommonFlags {
  std::string out;
  std::string timestamp;
  std::string stamp() const { return timestamp.empty() ? now_iso() : timestamp; }
};

void add_common(CLI::App* cmd, CommonFlags& cf) {
  cmd->add_option("--out", cf.out, "output file (default: stdout)");
  cmd->add_option("--timestamp", cf.timestamp,
                  "manifest timestamp override (for byte-identical reruns)");
}

int run_find(int n, double d, double gamma, double emin, double emax,
             const std::string& sector, const std::string& mode,
             int grid_points, const CommonFlags& cf) {
  if (emax <= 1.0 || emin <= 1.0) {
    throw CLI::ValidationError("--emin/--emax",
                               "the continuum starts at E = 1");
  }
  EmitterArrayParams params(n, 1.0 + 1e-9, d, gamma);
  SolveOptions opt;
  opt.emin = emin;
  opt.emax = emax;
  opt.grid_points = grid_points;
  opt.mode = (mode == "markov") ? SolveMode::LargeSpacing : SolveMode::Full;
  Parity sel = sector == "s"   ? Parity::Symmetric
               : sector == "a" ? Parity::Antisymmetric
                               : Parity::Indefinite;
  SolveReport rep = sel == Parity::Indefinite ? solve_bic_all(params, opt)
                                              : solve_bic(params, sel, opt);
  json results = json::array();
  for (auto& st : rep.states) results.push_back(state_json(st));
  json unresolved = json::array();
  for (auto& u : rep.unresolved) {
    unresolved.push_back(json{{"E", u.E},
                              {"sector", to_string(u.sector)},
                              {"reason", u.reason}});
  }
  json manifest = make_manifest(
      "bic find", params_json(params),
      json{{"accept_im_tol", opt.accept_im_tol},
           {"sigma_rel_tol", opt.sigma_rel_tol},
           {"constraint_tol", opt.constraint_tol},
           {"quad_tol", opt.quad_tol}},
      json{{"emin", emin}, {"emax", emax}, {"grid_points", grid_points}},
      cf.stamp());
  Output{cf.out}.write_json(json{{"manifest", manifest},
                                 {"results", results},
                                 {"unresolved", unresolved}});
  return 0;
}

int run_lines(int n, double gamma, double dmin, double dmax, int dpoints,
              double emax, const CommonFlags& cf) {
  SpectralLines lines = spectral_lines(n, gamma, dmin, dmax, dpoints, emax);
  std::string csv = "d[1/m],E[m],sector,nu,branch\n";
  for (auto& p : lines.points) {
    csv += fmt17(p.d) + "," + fmt17(p.E) + "," + to_string(p.sector) + "," +
           std::to_string(p.nu) + "," + std::to_string(p.branch) + "\n";
  }
  json manifest = make_manifest(
      "bic lines", json{{"n", n}, {"gamma", gamma}},
      json{{"defaults", true}},
      json{{"dmin", dmin}, {"dmax", dmax}, {"dpoints", dpoints},
           {"emax", emax}},
      cf.stamp());
  Output{cf.out}.write_csv(csv, manifest);
  return 0;
}

int run_resonant_eps(int n, int nu, double d, double gamma,
                     const CommonFlags& cf) {
  ExactResonantResult res = exact_resonant_epsilons(n, nu, d, gamma);
  json states = json::array();
  for (auto& st : res.states) {
    json amps = json::array();
    for (int i = 0; i < st.amplitudes.size(); ++i)
      amps.push_back(json{{"re", st.amplitudes[i].real()},
                          {"im", st.amplitudes[i].imag()}});
    states.push_back(json{{"epsilon", st.epsilon},
                          {"chi", st.chi},
                          {"p", st.p},
                          {"amplitudes", amps}});
  }
  json comp = json::array();
  for (auto& c : res.complementary_chis)
    comp.push_back(json{{"re", c.real()}, {"im", c.imag()}});
  json manifest = make_manifest(
      "bic resonant-eps",
      json{{"n", n}, {"nu", nu}, {"d", d}, {"gamma", gamma}}, json{},
      json{}, cf.stamp());
  Output{cf.out}.write_json(
      json{{"manifest", manifest},
           {"results",
            json{{"E", res.E},
                 {"hermitian_sector", to_string(res.hermitian_sector)},
                 {"states", states},
                 {"complementary_chis", comp}}}});
  return 0;
}

int run_field(const std::string& state_path, int n, double d, double gamma,
              double xmin, double xmax, int points, const CommonFlags& cf) {
  std::ifstream f(state_path);
  if (!f) throw CLI::ValidationError("--state", "cannot open state file");
  json j = json::parse(f);
  if (j.contains("results") && j["results"].is_array() &&
      !j["results"].empty()) {
    j = j["results"][0];  // accept `bic find` output directly
  }
  BoundStateInContinuum st = state_from_json(j);
  EmitterArrayParams params(n, st.epsilon, d, gamma);
  Eigen::VectorXd grid(points);
  for (int i = 0; i < points; ++i)
    grid[i] = xmin + (xmax - xmin) * i / std::max(1, points - 1);
  FieldSample fs = field_wavefunction(st, params, grid);
  std::string csv = "x[1/m],Re_xi,Im_xi,abs2_xi\n";
  for (int i = 0; i < points; ++i) {
    csv += fmt17(fs.grid[i]) + "," + fmt17(fs.values[i].real()) + "," +
           fmt17(fs.values[i].imag()) + "," + fmt17(std::norm(fs.values[i])) +
           "\n";
  }
  json manifest = make_manifest(
      "bic field",
      json{{"n", n}, {"d", d}, {"gamma", gamma}, {"state", state_path}},
      json{},
      json{{"xmin", xmin}, {"xmax", xmax}, {"points", points}}, cf.stamp());
  Output{cf.out}.write_csv(csv, manifest);
  return 0;
}

int run_prob(int n, const std::string& label, int nu, double d, double gamma,
             const CommonFlags& cf) {
  const StateClass cls = state_class_from_string(label);
  const double p_approx = probability_approximant(cls, nu, d, gamma);

  // exact p: solve in a window around E_nu and pick the state of the class
  EmitterArrayParams params(n, 1.0 + 1e-9, d, gamma);
  const double Enu = resonant_energy(nu, d);
  SolveOptions opt;
  opt.emin = std::max(1.0 + 1e-9, resonant_energy(nu, d) * 0.9 -
                                      (nu > 1 ? 0.4 * (Enu - 1.0) : 0.0));
  opt.emin = 1.0 + 0.5 * (resonant_energy(std::max(1, nu - 1), d) - 1.0);
  if (nu == 1) opt.emin = 1.0 + 1e-7;
  opt.emax = 1.0 + 1.6 * (resonant_energy(nu, d) - 1.0);
  Parity want = Parity::Symmetric;
  switch (cls) {
    case StateClass::Anti3:
    case StateClass::GoldenAntiPlus:
    case StateClass::GoldenAntiMinus:
      want = Parity::Antisymmetric;
      break;
    case StateClass::Persistent4:
      want = (nu % 2 == 1) ? Parity::Antisymmetric : Parity::Symmetric;
      break;
    default:
      want = Parity::Symmetric;
  }
  SolveReport rep = solve_bic(params, want, opt);
  std::optional<BoundStateInContinuum> pick;
  auto ratio_match = [](double r, double target) {
    return std::abs(r - target) < 0.25 * (1.0 + std::abs(target));
  };
  for (auto& st : rep.states) {
    if (st.nu_nearest != nu) continue;
    if (n == 3) {
      const double r = (st.amplitudes[1] / st.amplitudes[0]).real();
      const bool anti = std::abs(st.amplitudes[1]) < 1e-6 * st.amplitudes.norm();
      if (cls == StateClass::Anti3 && !anti) continue;
      if (cls == StateClass::Sym3 && anti) continue;
      (void)r;
    } else if (n == 4) {
      const double r = (st.amplitudes[0] / st.amplitudes[1]).real();
      const double s5 = std::sqrt(5.0);
      if (cls == StateClass::GoldenSymPlus || cls == StateClass::GoldenAntiPlus) {
        if (!ratio_match(r, -(1.0 + s5) / 2.0)) continue;
      } else if (cls == StateClass::GoldenSymMinus ||
                 cls == StateClass::GoldenAntiMinus) {
        if (!ratio_match(r, (s5 - 1.0) / 2.0)) continue;
      } else if (cls == StateClass::Persistent4) {
        if (!ratio_match(r, 1.0)) continue;
      } else if (cls == StateClass::Numeric4) {
        if (!(r > 0.05 && r < 0.75)) continue;
      }
    }
    if (!pick || std::abs(st.E - Enu) < std::abs(pick->E - Enu)) pick = st;
  }
  json results;
  if (pick) {
    results = json{{"p_exact", pick->p},
                   {"p_approx", p_approx},
                   {"E", pick->E},
                   {"epsilon", pick->epsilon},
                   {"class", to_string(cls)}};
  } else {
    throw std::runtime_error("no state of class " + label +
                             " found near E_nu; try a different (nu, d)");
  }
  json manifest = make_manifest(
      "bic prob",
      json{{"n", n}, {"class", label}, {"nu", nu}, {"d", d},
           {"gamma", gamma}},
      json{{"accept_im_tol", opt.accept_im_tol}},
      json{{"emin", opt.emin}, {"emax", opt.emax}}, cf.stamp());
  Output{cf.out}.write_json(json{{"manifest", manifest}, {"results", results}});
  return 0;
}

int run_poles(int n, double d, double gamma, double eps_min, double eps_max,
              const std::string& sheet_str, int steps, const CommonFlags& cf) {
  const Sheet sheet = (sheet_str == "III") ? Sheet::Third : Sheet::Second;
  EmitterArrayParams base(n, 0.5 * (eps_min + eps_max), d, gamma);
  std::string csv = "epsilon[m],Re_z[m],Im_z[m],sector,branch,residual\n";
  for (Parity sector : {Parity::Antisymmetric, Parity::Symmetric}) {
    Trajectory tr = pole_trajectory_epsilon(base, sector, sheet, eps_min,
                                            eps_max, steps);
    for (auto& pt : tr.points) {
      csv += fmt17(pt.parameter) + "," + fmt17(pt.pole.z.real()) + "," +
             fmt17(pt.pole.z.imag()) + "," + to_string(sector) + "," +
             std::to_string(pt.branch) + "," + fmt17(pt.pole.residual) + "\n";
    }
  }
  json manifest = make_manifest(
      "bic poles",
      json{{"n", n}, {"d", d}, {"gamma", gamma}, {"sheet", sheet_str}},
      json{{"residual_tol", 1e-12}},
      json{{"eps_min", eps_min}, {"eps_max", eps_max}, {"steps", steps}},
      cf.stamp());
  Output{cf.out}.write_csv(csv, manifest);
  return 0;
}

int run_critical(int n, double gamma, int window, const CommonFlags& cf) {
  CriticalPoint cp = critical_distance(n, gamma, {window, window + 1});
  json manifest = make_manifest(
      "bic critical",
      json{{"n", n}, {"gamma", gamma}, {"window", window}},
      json{{"d_tol", 1e-3}}, json{}, cf.stamp());
  Output{cf.out}.write_json(
      json{{"manifest", manifest},
           {"results", json{{"n", cp.n},
                            {"d_c", cp.d_c},
                            {"E_c", cp.E_c},
                            {"nu_window", json::array({cp.nu_window.first,
                                                       cp.nu_window.second})},
                            {"chi_c", cp.chi_c},
                            {"epsilon_c", cp.epsilon_c}}}});
  return 0;
}

int run_oracle(int n, double d, double gamma, double epsilon, double L,
               int modes, double emin, double emax, const CommonFlags& cf) {
  EmitterArrayParams params(n, epsilon, d, gamma);
  DiscretizedModel model = build_hamiltonian(params, L, modes);
  std::vector<OracleState> states = window_states(model, emin, emax);
  json results = json::array();
  for (auto& st : states) {
    json amps = json::array();
    for (int i = 0; i < st.atomic_amplitudes.size(); ++i)
      amps.push_back(json{{"re", st.atomic_amplitudes[i].real()},
                          {"im", st.atomic_amplitudes[i].imag()}});
    results.push_back(json{{"energy", st.energy},
                           {"atomic_weight", st.atomic_weight},
                           {"confinement", st.confinement},
                           {"atomic_amplitudes", amps}});
  }
  json manifest = make_manifest(
      "bic oracle", params_json(params), json{},
      json{{"L", L}, {"modes", modes}, {"emin", emin}, {"emax", emax}},
      cf.stamp());
  Output{cf.out}.write_json(json{{"manifest", manifest}, {"results", results}});
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Bound states in the continuum for an equally spaced emitter array "
      "coupled to a massive 1D boson field (units of the boson mass m)"};
  app.require_subcommand(1);

  // find
  auto* find = app.add_subcommand("find", "locate bound states in an E-window");
  int n = 3, grid_points = 400;
  double d = 7.0, gamma = 0.01, emin = 1.0 + 1e-7, emax = 1.3;
  std::string sector = "both", mode = "full";
  CommonFlags cf_find;
  find->add_option("--n", n, "emitter count")->required();
  find->add_option("--d", d, "spacing [1/m]")->required();
  find->add_option("--gamma", gamma, "coupling [m^2]")->required();
  find->add_option("--emin", emin, "window lower edge [m]")->required();
  find->add_option("--emax", emax, "window upper edge [m]")->required();
  find->add_option("--sector", sector, "s | a | both")
      ->check(CLI::IsMember({"s", "a", "both"}));
  find->add_option("--mode", mode, "full | markov")
      ->check(CLI::IsMember({"full", "markov"}));
  find->add_option("--grid", grid_points, "scan grid points");
  add_common(find, cf_find);

  // lines
  auto* lines = app.add_subcommand("lines", "spectral lines in the (E,d) plane");
  int ln = 3, dpoints = 120;
  double lgamma = 0.01, dmin = 2.0, dmax = 10.0, lemax = 1.6;
  CommonFlags cf_lines;
  lines->add_option("--n", ln)->required();
  lines->add_option("--gamma", lgamma)->required();
  lines->add_option("--dmin", dmin)->required();
  lines->add_option("--dmax", dmax)->required();
  lines->add_option("--emax", lemax)->required();
  lines->add_option("--dpoints", dpoints, "sweep resolution");
  add_common(lines, cf_lines);

  // resonant-eps
  auto* reps = app.add_subcommand(
      "resonant-eps", "exact resonant epsilon spectrum at E_nu(d)");
  int rn = 3, rnu = 1;
  double rd = 7.0, rgamma = 0.01;
  CommonFlags cf_reps;
  reps->add_option("--n", rn)->required();
  reps->add_option("--nu", rnu)->required();
  reps->add_option("--d", rd)->required();
  reps->add_option("--gamma", rgamma)->required();
  add_common(reps, cf_reps);

  // field
  auto* field = app.add_subcommand("field", "sample a state's field wavefunction");
  std::string state_path;
  int fn = 3, fpoints = 800;
  double fd = 7.0, fgamma = 0.01, xmin = -5.0, xmax = 20.0;
  CommonFlags cf_field;
  field->add_option("--state", state_path, "state JSON (or `bic find` output)")
      ->required();
  field->add_option("--n", fn)->required();
  field->add_option("--d", fd)->required();
  field->add_option("--gamma", fgamma)->required();
  field->add_option("--xmin", xmin)->required();
  field->add_option("--xmax", xmax)->required();
  field->add_option("--points", fpoints);
  add_common(field, cf_field);

  // prob
  auto* prob = app.add_subcommand("prob", "exact vs approximant probability");
  int pn = 3, pnu = 1;
  double pd = 7.0, pgamma = 0.01;
  std::string plabel = "sym3";
  CommonFlags cf_prob;
  prob->add_option("--n", pn)->required();
  prob->add_option("--class", plabel,
                   "sym3|anti3|golden-sym-plus|golden-sym-minus|"
                   "golden-anti-plus|golden-anti-minus|persistent|numeric")
      ->required();
  prob->add_option("--nu", pnu)->required();
  prob->add_option("--d", pd)->required();
  prob->add_option("--gamma", pgamma)->required();
  add_common(prob, cf_prob);

  // poles
  auto* poles = app.add_subcommand("poles", "pole trajectories on sheet II/III");
  int on = 3, osteps = 60;
  double od = 15.0, ogamma = 2.0e-3 * M_PI, oeps_min = 1.05, oeps_max = 1.4;
  std::string sheet = "II";
  CommonFlags cf_poles;
  poles->add_option("--n", on)->required();
  poles->add_option("--d", od)->required();
  poles->add_option("--gamma", ogamma)->required();
  poles->add_option("--eps-min", oeps_min)->required();
  poles->add_option("--eps-max", oeps_max)->required();
  poles->add_option("--sheet", sheet)->check(CLI::IsMember({"II", "III"}));
  poles->add_option("--steps", osteps);
  add_common(poles, cf_poles);

  // critical
  auto* crit = app.add_subcommand("critical", "critical distance for pair birth");
  int cn = 3, cwindow = 1;
  double cgamma = 0.01;
  CommonFlags cf_crit;
  crit->add_option("--n", cn)->required();
  crit->add_option("--gamma", cgamma)->required();
  crit->add_option("--window", cwindow, "lower resonance index nu");
  add_common(crit, cf_crit);

  // oracle
  auto* orac = app.add_subcommand("oracle", "box-discretized brute-force check");
  int qn = 3, qmodes = 2000;
  double qd = 7.0, qgamma = 0.01, qeps = 1.09, qL = 400.0, qemin = 1.0001,
         qemax = 1.3;
  CommonFlags cf_orac;
  orac->add_option("--n", qn)->required();
  orac->add_option("--d", qd)->required();
  orac->add_option("--gamma", qgamma)->required();
  orac->add_option("--epsilon", qeps)->required();
  orac->add_option("--L", qL, "box length [1/m]")->required();
  orac->add_option("--modes", qmodes, "momentum mode count M")->required();
  orac->add_option("--emin", qemin);
  orac->add_option("--emax", qemax);
  add_common(orac, cf_orac);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return (e.get_exit_code() == 0) ? 0 : 2;
  }

  try {
    if (find->parsed())
      return run_find(n, d, gamma, emin, emax, sector, mode, grid_points,
                      cf_find);
    if (lines->parsed())
      return run_lines(ln, lgamma, dmin, dmax, dpoints, lemax, cf_lines);
    if (reps->parsed()) return run_resonant_eps(rn, rnu, rd, rgamma, cf_reps);
    if (field->parsed())
      return run_field(state_path, fn, fd, fgamma, xmin, xmax, fpoints,
                       cf_field);
    if (prob->parsed()) return run_prob(pn, plabel, pnu, pd, pgamma, cf_prob);
    if (poles->parsed())
      return run_poles(on, od, ogamma, oeps_min, oeps_max, sheet, osteps,
                       cf_poles);
    if (crit->parsed()) return run_critical(cn, cgamma, cwindow, cf_crit);
    if (orac->parsed())
      return run_oracle(qn, qd, qgamma, qeps, qL, qmodes, qemin, qemax,
                        cf_orac);
  } catch (const CLI::ValidationError& e) {
    std::cerr << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    nlohmann::ordered_json err{
        {"error", {{"type", "numerical_failure"}, {"message", e.what()}}}};
    std::cerr << err.dump(2) << "\n";
    return 3;
  }
  return 2;
}
