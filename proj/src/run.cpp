#include "watched/run.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <ostream>
#include <sstream>

#include "watched/analytic.hpp"
#include "watched/errors.hpp"
#include "watched/geometry.hpp"
#include "watched/resolvent.hpp"

namespace watched::cli {

namespace fs = std::filesystem;
using nlohmann::json;

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

namespace {

std::string opt_str(const std::optional<double>& v) { return v ? format_double(*v) : ""; }

json opt_json(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

json finite(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

// ---- output plumbing -------------------------------------------------------

struct Artifacts {
  fs::path dir;
  std::string results_csv;
  json summary;
  std::vector<std::string> report;
  std::vector<std::pair<std::string, std::string>> extra_files;  // relative path, content
};

void prepare_output(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir / "plotdata", ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  const fs::path probe = dir / ".write_probe";
  {
    std::ofstream out(probe);
    if (!out) throw IoError("output directory '" + dir.string() + "' is not writable");
  }
  fs::remove(probe, ec);
}

void write_file(const fs::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << content;
  if (!out) throw IoError("write failed for '" + path.string() + "'");
}

void flush(const Artifacts& a) {
  write_file(a.dir / "results.csv", a.results_csv);
  write_file(a.dir / "summary.json", a.summary.dump(2) + "\n");
  std::string report;
  for (const auto& line : a.report) report += line + "\n";
  write_file(a.dir / "report.txt", report);
  for (const auto& [rel, content] : a.extra_files) write_file(a.dir / rel, content);
}

template <class... Args>
std::string line(Args&&... args) {
  std::ostringstream os;
  (os << ... << args);
  return os.str();
}

// ---- shared physics helpers ------------------------------------------------

geometry::DipoleGeometry first_geometry(const PhysicalSystem& s) {
  if (s.detector_atoms.empty()) {
    geometry::DipoleGeometry g;
    g.p_a = s.atom.dipole_dir;
    g.p_d = s.atom.dipole_dir;
    g.r_hat = Vec3::UnitX();
    return g;
  }
  return geometry::DipoleGeometry::from_detector(s.atom.dipole_dir, s.detector_atoms.front(), s.omega0);
}

json reduction_json(const analytic::ReductionReport& r) {
  return {{"u_general", r.u_general},
          {"u_far_field", r.u_far_field},
          {"u_near_field", r.u_near_field},
          {"u_oracle", r.u_oracle},
          {"d_printed", r.d_printed},
          {"d_oracle", r.d_oracle},
          {"l", r.l},
          {"far_field_applicable", r.far_field_applicable},
          {"near_field_applicable", r.near_field_applicable},
          {"discrepancy", r.discrepancy}};
}

// Printed-versus-quadrature kernel comparison, plus the spread of the
// closed-form variants at a near-field and a far-field distance.
json normalization_section(const RunConfig& c, std::vector<std::string>& report) {
  const auto rep = geometry::d_normalization_report({0.0, 0.05, 0.5, 1.0, 2.0, 3.0, 5.0, 10.0});
  json j = {{"match_constant", rep.match_constant},
            {"min_ratio", rep.min_ratio},
            {"max_ratio", rep.max_ratio},
            {"max_rel_spread", rep.max_rel_spread},
            {"single_constant", rep.single_constant}};
  report.push_back("");
  report.push_back("[angular kernel normalization]");
  report.push_back(line("printed/quadrature at z=0 (parallel dipoles normal to r): ", format_double(rep.match_constant)));
  report.push_back(line("ratio range over samples: [", format_double(rep.min_ratio), ", ", format_double(rep.max_ratio),
                        "], max relative spread ", format_double(rep.max_rel_spread)));
  report.push_back(line("single global constant: ", rep.single_constant ? "yes" : "no"));

  json probes = json::array();
  geometry::DipoleGeometry g = first_geometry(c.system);
  for (double z : {0.05, 10.0}) {
    g.z = z;
    const auto r = analytic::reduction_single(g, c.system.beta, c.thresholds);
    const double spread = std::max({std::abs(r.u_general - r.u_far_field), std::abs(r.u_general - r.u_near_field),
                                    std::abs(r.u_far_field - r.u_near_field)});
    json p = reduction_json(r);
    p["z"] = z;
    p["printed_variant_spread"] = spread;
    probes.push_back(p);
    report.push_back(line("z=", format_double(z), ": u_general=", format_double(r.u_general),
                          " u_far_field=", format_double(r.u_far_field), " u_near_field=", format_double(r.u_near_field),
                          " u_oracle=", format_double(r.u_oracle), " spread=", format_double(spread)));
  }
  j["probes"] = probes;
  return j;
}

json regime_section(const PhysicalSystem& s, const ValidationReport& v, std::vector<std::string>& report) {
  const auto r = analytic::magnitude_checks(s);
  report.push_back("");
  report.push_back("[regime]");
  report.push_back(line("L*I = ", format_double(r.li), (r.li_small ? " (small)" : " (NOT small)")));
  report.push_back(line("mu_a^2*I/omega0 = ", format_double(r.self_energy),
                        (r.self_energy_small ? " (small)" : " (NOT small)")));
  for (const auto& w : v.warnings) report.push_back("warning: " + w);
  return {{"li", r.li},
          {"self_energy", r.self_energy},
          {"li_small", r.li_small},
          {"self_energy_small", r.self_energy_small},
          {"warnings", v.warnings}};
}

std::pair<double, double> fit_window(const RunConfig& c, double gamma_expected, double t_max) {
  auto [lo, hi] = dynamics::default_fit_window(gamma_expected, t_max);
  if (c.fit.t_lo > 0.0) lo = c.fit.t_lo;
  if (c.fit.t_hi > 0.0) hi = c.fit.t_hi;
  return {lo, hi};
}

json fit_json(const dynamics::RateFit& f) {
  return {{"rate", f.rate},     {"stderr", f.std_error}, {"t_lo", f.t_lo},
          {"t_hi", f.t_hi},     {"r_squared", f.r_squared}, {"samples", f.samples}};
}

json trajectory_meta(const dynamics::Trajectory& t) {
  return {{"model_kind", t.model_kind},
          {"n_modes", t.n_modes},
          {"n_channels", t.n_channels},
          {"n_atoms", t.n_atoms},
          {"recurrence_time", finite(t.recurrence_time)},
          {"rtol", t.rtol},
          {"atol", t.atol},
          {"rotating_frame", t.rotating_frame},
          {"steps_accepted", t.stats.accepted},
          {"steps_rejected", t.stats.rejected},
          {"max_norm_drift", t.max_norm_drift()}};
}

std::string trajectory_csv(const dynamics::Trajectory& t) {
  std::ostringstream os;
  write_trajectory_csv(t, os);
  return os.str();
}

std::string plot_string(const dynamics::Trajectory& t, double rate) {
  std::ostringstream os;
  os << "# t survival reference\n";
  for (std::size_t i = 0; i < t.times.size(); ++i)
    os << format_double(t.times[i]) << ' ' << format_double(t.survival[i]) << ' '
       << format_double(std::exp(-rate * t.times[i])) << '\n';
  return os.str();
}

PhysicalSystem without_detector_response(PhysicalSystem s) {
  s.beta = 0.0;
  return s;
}

// ---- scenarios -------------------------------------------------------------

void scenario_vacuum(const RunConfig& c, Artifacts& a) {
  const auto& s = c.system;
  const auto m = build_radial_vacuum(s, c.grid);
  const auto traj = dynamics::integrate(m, c.grid.t_max, c.solver);
  const auto [lo, hi] = fit_window(c, s.gamma, c.grid.t_max);
  const auto fit = dynamics::fit_decay_rate(traj, lo, hi);
  const auto pole = resolvent::ww_pole(m, {.gamma_probe = s.gamma});
  const auto dressed = resolvent::ww_pole(m, {.gamma_probe = s.gamma, .richardson = true, .dressed = true});
  const auto early = dynamics::early_time_slope(m);

  a.results_csv = trajectory_csv(traj);
  const double rel = fit.rate / s.gamma - 1.0;
  a.summary["results"] = {{"fit", fit_json(fit)},
                          {"fitted_rate", fit.rate},
                          {"gamma", s.gamma},
                          {"relative_error", rel},
                          {"pole_rate", pole.rate},
                          {"dressed_pole_rate", dressed.rate},
                          {"dressed_pole_shift", dressed.shift},
                          {"sum_rule_density", sum_rule_density(m)},
                          {"early_time_slope", early.slope},
                          {"trajectory", trajectory_meta(traj)}};
  a.report.push_back("");
  a.report.push_back("[vacuum decay]");
  a.report.push_back(line("modes: ", m.n_modes(), ", omega_cut: ", format_double(c.grid.omega_cut),
                          ", recurrence time: ", format_double(m.recurrence_time)));
  a.report.push_back(line("fitted rate: ", format_double(fit.rate), " +- ", format_double(fit.std_error), " on [",
                          format_double(fit.t_lo), ", ", format_double(fit.t_hi), "]"));
  a.report.push_back(line("gamma: ", format_double(s.gamma), ", relative error: ", format_double(rel)));
  a.report.push_back(line("pole rate at omega0: ", format_double(pole.rate),
                          ", at the shifted frequency: ", format_double(dressed.rate)));
  a.report.push_back(line("early-time log-log slope of 1-P: ", format_double(early.slope)));
  a.report.push_back(line("max norm drift: ", format_double(traj.max_norm_drift())));
  if (c.output.plot_data) a.extra_files.emplace_back("plotdata/trajectory.dat", plot_string(traj, s.gamma));
}

void scenario_single_detector(const RunConfig& c, Artifacts& a) {
  const auto& s = c.system;
  const auto m = build_full_3d(s, c.grid);
  const auto mv = build_full_3d(without_detector_response(s), c.grid);
  const auto ud = resolvent::u_discrete(m, {.gamma_probe = s.gamma});
  const auto geom = first_geometry(s);
  const auto red = analytic::reduction_single(geom, s.beta, c.thresholds);
  std::optional<analytic::MultiResult> multi;
  bool all_off_origin = true;
  for (const auto& d : s.detector_atoms) all_off_origin = all_off_origin && d.position.norm() > 0.0;
  if (all_off_origin) multi = analytic::reduction_multi(s.detector_atoms, s.atom.dipole_dir, s.beta, s.omega0);

  const auto traj = dynamics::integrate(m, c.grid.t_max, c.solver);
  const auto vac = dynamics::integrate(mv, c.grid.t_max, c.solver);
  const auto [lo, hi] = fit_window(c, s.gamma * ud.u, c.grid.t_max);
  const auto fit = dynamics::fit_decay_rate(traj, lo, hi);
  const auto fit_v = dynamics::fit_decay_rate(vac, lo, hi);
  const double predicted = s.gamma * ud.u;

  a.results_csv = trajectory_csv(traj);
  json res = {{"fit", fit_json(fit)},
              {"vacuum_fit", fit_json(fit_v)},
              {"fitted_rate", fit.rate},
              {"vacuum_rate", fit_v.rate},
              {"slowing_sigma", (fit_v.rate - fit.rate) / std::hypot(fit.std_error, fit_v.std_error)},
              {"u_discrete", ud.u},
              {"predicted_rate", predicted},
              {"relative_deviation", fit.rate / predicted - 1.0},
              {"directed_asymmetry", ud.directed_asymmetry},
              {"reduction", reduction_json(red)},
              {"trajectory", trajectory_meta(traj)}};
  if (multi) {
    res["u_multi"] = multi->u;
    res["multi_warnings"] = multi->warnings;
  }
  if (m.n_modes() > 0) res["factorization_error"] = factorization_spot_check(m, s, 1000, c.seed);
  a.summary["results"] = res;

  a.report.push_back("");
  a.report.push_back("[single detector]");
  a.report.push_back(line("modes: ", m.n_modes(), ", channels per atom: ", m.n_channels(), ", atoms: ", m.n_atoms(),
                          ", recurrence time: ", format_double(m.recurrence_time)));
  a.report.push_back(line("z = ", format_double(geom.z), ", l = ", format_double(red.l)));
  a.report.push_back(line("fitted rate: ", format_double(fit.rate), " +- ", format_double(fit.std_error)));
  a.report.push_back(line("vacuum rate on the same grid: ", format_double(fit_v.rate), " +- ",
                          format_double(fit_v.std_error)));
  a.report.push_back(line("U from the discrete kernels: ", format_double(ud.u), ", gamma*U = ", format_double(predicted)));
  a.report.push_back(line("closed forms: u_general=", format_double(red.u_general), " u_far_field=",
                          format_double(red.u_far_field), " u_near_field=", format_double(red.u_near_field),
                          " u_oracle=", format_double(red.u_oracle)));
  a.report.push_back(line("max norm drift: ", format_double(traj.max_norm_drift())));
  if (c.output.plot_data) {
    a.extra_files.emplace_back("plotdata/trajectory.dat", plot_string(traj, predicted));
    a.extra_files.emplace_back("plotdata/vacuum_trajectory.dat", plot_string(vac, s.gamma));
  }
  if (c.output.model_csv) {
    std::ostringstream modes, channels;
    write_model_csv(m, modes, channels);
    a.extra_files.emplace_back("modes.csv", modes.str());
    a.extra_files.emplace_back("channels.csv", channels.str());
  }
}

void scenario_shell(const RunConfig& c, Artifacts& a) {
  const auto& sh = c.shell;
  const double u_shell = analytic::reduction_shell(sh.n_atoms, sh.radius_z, sh.beta);
  const auto mc = analytic::reduction_shell_mc(sh.n_atoms, sh.radius_z, sh.beta, sh.mc_samples, c.seed);
  const double l2 = geometry::angular_average_l2(sh.l2_order);
  const auto l2_mc = geometry::angular_average_l2_mc(sh.l2_mc_samples, c.seed);

  std::ostringstream csv;
  csv << "quantity,value\n";
  csv << "u_shell," << format_double(u_shell) << '\n';
  csv << "u_multi_mc," << format_double(mc.mean) << '\n';
  csv << "u_multi_mc_stderr," << format_double(mc.std_error) << '\n';
  csv << "l2_quadrature," << format_double(l2) << '\n';
  csv << "l2_mc," << format_double(l2_mc.mean) << '\n';
  csv << "l2_mc_stderr," << format_double(l2_mc.std_error) << '\n';
  a.results_csv = csv.str();

  const double rel = u_shell != 0.0 ? mc.mean / u_shell - 1.0 : 0.0;
  a.summary["results"] = {{"u", u_shell},
                          {"u_multi_mc", mc.mean},
                          {"u_multi_mc_stderr", mc.std_error},
                          {"mc_samples", mc.samples},
                          {"relative_difference", rel},
                          {"l2_quadrature", l2},
                          {"l2_mc", l2_mc.mean},
                          {"l2_mc_stderr", l2_mc.std_error},
                          {"l2_target", 2.0 / 7.0}};
  a.report.push_back("");
  a.report.push_back("[spherical shell]");
  a.report.push_back(line("N = ", sh.n_atoms, ", omega0 R / c = ", format_double(sh.radius_z),
                          ", beta = ", format_double(sh.beta)));
  a.report.push_back(line("shell formula U: ", format_double(u_shell)));
  a.report.push_back(line("average of the additive formula over random shells: ", format_double(mc.mean), " +- ",
                          format_double(mc.std_error), " (", mc.samples, " samples)"));
  a.report.push_back(line("<l^2>: quadrature ", format_double(l2), ", Monte Carlo ", format_double(l2_mc.mean),
                          " +- ", format_double(l2_mc.std_error), ", value assumed by the shell formula 2/7"));
}

void scenario_toy(const RunConfig& c, Artifacts& a) {
  const auto m = build_scalar_toy(c.toy);
  ToySpec vac_spec = c.toy;
  vac_spec.beta = 0.0;
  const auto mv = build_scalar_toy(vac_spec);
  const auto ud = resolvent::u_discrete(m, {.gamma_probe = c.toy.gamma});
  const auto traj = dynamics::integrate(m, c.toy.t_max, c.solver);
  const auto vac = dynamics::integrate(mv, c.toy.t_max, c.solver);
  const auto [lo, hi] = fit_window(c, c.toy.gamma * ud.u, c.toy.t_max);
  const auto fit = dynamics::fit_decay_rate(traj, lo, hi);
  const auto fit_v = dynamics::fit_decay_rate(vac, lo, hi);
  const double predicted = c.toy.gamma * ud.u;

  a.results_csv = trajectory_csv(traj);
  a.summary["results"] = {{"fit", fit_json(fit)},
                          {"vacuum_fit", fit_json(fit_v)},
                          {"fitted_rate", fit.rate},
                          {"vacuum_rate", fit_v.rate},
                          {"slowing_sigma", (fit_v.rate - fit.rate) / std::hypot(fit.std_error, fit_v.std_error)},
                          {"u_discrete", ud.u},
                          {"predicted_rate", predicted},
                          {"relative_deviation", fit.rate / predicted - 1.0},
                          {"directed_asymmetry", ud.directed_asymmetry},
                          {"trajectory", trajectory_meta(traj)}};
  a.report.push_back("");
  a.report.push_back("[scalar toy]");
  a.report.push_back(line("modes: ", m.n_modes(), ", channels: ", m.n_channels(), ", beta: ", format_double(c.toy.beta)));
  a.report.push_back(line("fitted rate: ", format_double(fit.rate), " +- ", format_double(fit.std_error)));
  a.report.push_back(line("vacuum rate: ", format_double(fit_v.rate), " +- ", format_double(fit_v.std_error)));
  a.report.push_back(line("U from the discrete kernels: ", format_double(ud.u), ", gamma*U = ", format_double(predicted)));
  if (c.output.plot_data) {
    a.extra_files.emplace_back("plotdata/trajectory.dat", plot_string(traj, predicted));
    a.extra_files.emplace_back("plotdata/vacuum_trajectory.dat", plot_string(vac, c.toy.gamma));
  }
}

DiscreteModel route_model(const RunConfig& c) {
  switch (c.route.model) {
    case ModelKind::ScalarToy: {
      ToySpec t = c.toy;
      t.t_max = 0.0;
      return build_scalar_toy(t);
    }
    case ModelKind::Radial1D: {
      GridSpec g = c.grid;
      g.t_max = 0.0;
      return build_radial_vacuum(c.system, g);
    }
    case ModelKind::Full3D: {
      GridSpec g = c.grid;
      g.t_max = 0.0;
      return build_full_3d(c.system, g);
    }
  }
  throw InvalidInput("unknown route model");
}

void scenario_routes(const RunConfig& c, Artifacts& a) {
  const auto m = route_model(c);
  if (!std::isfinite(m.recurrence_time)) throw InvalidInput("compare-routes: model has no finite recurrence time");
  const double horizon = c.route.horizon_fraction * m.recurrence_time;
  std::vector<double> times;
  for (std::size_t i = 1; i <= c.route.n_times; ++i)
    times.push_back(horizon * static_cast<double>(i) / static_cast<double>(c.route.n_times));
  const auto cmp = dynamics::compare_routes(m, times, c.solver, c.contour);

  std::ostringstream csv;
  csv << "t,re_a0,im_a0,survival,norm\n";
  std::ostringstream routes;
  routes << "t,re_a0_ode,im_a0_ode,re_a0_resolvent,im_a0_resolvent,abs_diff\n";
  for (std::size_t i = 0; i < times.size(); ++i) {
    const cplx o = cmp.a0_ode[i], r = cmp.a0_resolvent[i];
    csv << format_double(times[i]) << ',' << format_double(o.real()) << ',' << format_double(o.imag()) << ','
        << format_double(std::norm(o)) << ",\n";
    routes << format_double(times[i]) << ',' << format_double(o.real()) << ',' << format_double(o.imag()) << ','
           << format_double(r.real()) << ',' << format_double(r.imag()) << ',' << format_double(std::abs(o - r))
           << '\n';
  }
  a.results_csv = csv.str();
  a.extra_files.emplace_back("routes.csv", routes.str());
  a.summary["results"] = {{"model_kind", to_string(m.kind)},
                          {"n_modes", m.n_modes()},
                          {"n_channels", m.n_channels() * m.n_atoms()},
                          {"recurrence_time", m.recurrence_time},
                          {"horizon", horizon},
                          {"max_abs_diff", cmp.max_abs_diff},
                          {"inversion_error", cmp.inversion_error}};
  a.report.push_back("");
  a.report.push_back("[route comparison]");
  a.report.push_back(line("model: ", to_string(m.kind), ", modes: ", m.n_modes(), ", channels: ",
                          m.n_channels() * m.n_atoms()));
  a.report.push_back(line("horizon: ", format_double(horizon), " (", format_double(c.route.horizon_fraction),
                          " of the recurrence time)"));
  a.report.push_back(line("max |A0(ode) - A0(resolvent)|: ", format_double(cmp.max_abs_diff)));
  a.report.push_back(line("inversion self-estimate: ", format_double(cmp.inversion_error)));
}

std::string sweep_csv(const SweepResult& s) {
  std::ostringstream os;
  write_sweep_csv(s, os);
  return os.str();
}

std::string sweep_plot(const SweepResult& s) {
  std::ostringstream os;
  os << "# " << s.parameter << " fitted_rate analytic_rate\n";
  for (const auto& r : s.rows)
    os << format_double(r.value) << ' ' << (r.fitted_rate ? format_double(*r.fitted_rate) : "nan") << ' '
       << (r.analytic_rate ? format_double(*r.analytic_rate) : "nan") << '\n';
  return os.str();
}

void scenario_sweep(const RunConfig& c, Artifacts& a) {
  const auto result = run_sweep(c);
  a.results_csv = sweep_csv(result);
  json rows = json::array();
  std::size_t failed = 0;
  for (const auto& r : result.rows) {
    rows.push_back({{"value", r.value},
                    {"fitted_rate", opt_json(r.fitted_rate)},
                    {"rate_stderr", opt_json(r.rate_stderr)},
                    {"vacuum_rate", opt_json(r.vacuum_rate)},
                    {"analytic_rate", opt_json(r.analytic_rate)},
                    {"u_discrete", opt_json(r.u_discrete)},
                    {"u_general", opt_json(r.u_general)},
                    {"u_far_field", opt_json(r.u_far_field)},
                    {"u_near_field", opt_json(r.u_near_field)},
                    {"u_oracle", opt_json(r.u_oracle)},
                    {"route_disagreement", opt_json(r.route_disagreement)},
                    {"error", r.error}});
    if (!r.error.empty()) ++failed;
  }
  a.summary["results"] = {{"parameter", result.parameter}, {"rows", rows}, {"failed_points", failed}};
  a.report.push_back("");
  a.report.push_back(line("[sweep over ", result.parameter, "]"));
  for (const auto& r : result.rows) {
    if (!r.error.empty()) {
      a.report.push_back(line(format_double(r.value), ": FAILED: ", r.error));
      continue;
    }
    a.report.push_back(line(format_double(r.value), ": fitted ", opt_str(r.fitted_rate), " +- ", opt_str(r.rate_stderr),
                            ", vacuum ", opt_str(r.vacuum_rate), ", closed form ", opt_str(r.analytic_rate)));
  }
  if (c.output.plot_data) a.extra_files.emplace_back("plotdata/sweep.dat", sweep_plot(result));
}

}  // namespace

// ---- sweep -----------------------------------------------------------------

namespace {

PhysicalSystem sweep_system(const RunConfig& c, double v) {
  PhysicalSystem s = c.system;
  const std::string& p = c.sweep->parameter;
  if (p == "beta") {
    s.beta = v;
  } else if (p == "r") {
    auto& d = s.detector_atoms.front();
    const double r = d.position.norm();
    const Vec3 dir = r > 0.0 ? Vec3(d.position / r) : Vec3(Vec3::UnitX());
    d.position = v * dir;
  } else if (p == "n_atoms") {
    // Ring through the first detector, in the plane normal to the atom's
    // dipole, every atom copying the first detector's dipole.
    const DetectorAtom proto = s.detector_atoms.front();
    const double radius = proto.position.norm();
    const Vec3 axis = s.atom.dipole_dir;
    Vec3 e1 = radius > 0.0 ? Vec3(proto.position - proto.position.dot(axis) * axis) : Vec3::Zero();
    if (e1.norm() < 1e-12) e1 = geometry::polarization_basis(axis).e1;
    e1.normalize();
    const Vec3 e2 = axis.cross(e1);
    const auto n = static_cast<std::size_t>(std::llround(v));
    s.detector_atoms.clear();
    for (std::size_t i = 0; i < n; ++i) {
      const double phi = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(n);
      DetectorAtom d = proto;
      d.position = radius * (std::cos(phi) * e1 + std::sin(phi) * e2);
      s.detector_atoms.push_back(d);
    }
  }
  return s;
}

SweepRow sweep_point(const RunConfig& c, double v) {
  SweepRow row;
  row.value = v;
  const std::string& p = c.sweep->parameter;
  const auto& s0 = c.system;

  if (p == "n_modes") {
    GridSpec g = c.grid;
    g.n_modes = static_cast<int>(std::llround(v));
    const auto m = build_radial_vacuum(s0, g);
    const auto traj = dynamics::integrate(m, g.t_max, c.solver);
    const auto [lo, hi] = fit_window(c, s0.gamma, g.t_max);
    const auto fit = dynamics::fit_decay_rate(traj, lo, hi);
    row.fitted_rate = fit.rate;
    row.rate_stderr = fit.std_error;
    row.vacuum_rate = fit.rate;
    row.analytic_rate = s0.gamma;
    row.u_discrete = 1.0;
    return row;
  }

  const PhysicalSystem s = sweep_system(c, v);
  const auto report = validate(s);
  if (!report.usable()) throw InvalidInput("invalid system: " + report.violations.front());

  if (!s.detector_atoms.empty()) {
    const auto geom = first_geometry(s);
    const auto red = analytic::reduction_single(geom, s.beta, c.thresholds);
    row.u_general = red.u_general;
    row.u_far_field = red.u_far_field;
    row.u_near_field = red.u_near_field;
    row.u_oracle = red.u_oracle;
    bool off_origin = true;
    for (const auto& d : s.detector_atoms) off_origin = off_origin && d.position.norm() > 0.0;
    if (p == "n_atoms" && off_origin)
      row.analytic_rate = s.gamma * analytic::reduction_multi(s.detector_atoms, s.atom.dipole_dir, s.beta, s.omega0).u;
    else
      row.analytic_rate = s.gamma * red.u_oracle;
  } else {
    row.analytic_rate = s.gamma;
  }

  const auto m = build_full_3d(s, c.grid);
  const auto mv = build_full_3d(without_detector_response(s), c.grid);
  row.u_discrete = m.n_atoms() > 0 ? resolvent::u_discrete(m, {.gamma_probe = s.gamma}).u : 1.0;
  const auto traj = dynamics::integrate(m, c.grid.t_max, c.solver);
  const auto vac = dynamics::integrate(mv, c.grid.t_max, c.solver);
  const auto [lo, hi] = fit_window(c, s.gamma * *row.u_discrete, c.grid.t_max);
  const auto fit = dynamics::fit_decay_rate(traj, lo, hi);
  row.fitted_rate = fit.rate;
  row.rate_stderr = fit.std_error;
  row.vacuum_rate = dynamics::fit_decay_rate(vac, lo, hi).rate;
  return row;
}

}  // namespace

SweepResult run_sweep(const RunConfig& c) {
  if (!c.sweep) throw InvalidInput("run_sweep: no sweep section");
  SweepResult out;
  out.parameter = c.sweep->parameter;
  const auto& values = c.sweep->values;
  out.rows.resize(values.size());
#pragma omp parallel for schedule(dynamic) num_threads(c.jobs)
  for (std::size_t i = 0; i < values.size(); ++i) {
    try {
      out.rows[i] = sweep_point(c, values[i]);
    } catch (const std::exception& e) {
      out.rows[i] = SweepRow{};
      out.rows[i].value = values[i];
      out.rows[i].error = e.what();
    }
  }
  return out;
}

// ---- public writers --------------------------------------------------------

void write_trajectory_csv(const dynamics::Trajectory& t, std::ostream& out) {
  out << "t,re_a0,im_a0,survival,norm\n";
  for (std::size_t i = 0; i < t.times.size(); ++i)
    out << format_double(t.times[i]) << ',' << format_double(t.a0[i].real()) << ',' << format_double(t.a0[i].imag())
        << ',' << format_double(t.survival[i]) << ',' << format_double(1.0 + t.norm_drift[i]) << '\n';
}

void write_sweep_csv(const SweepResult& s, std::ostream& out) {
  out << s.parameter
      << ",fitted_rate,rate_stderr,vacuum_rate,analytic_rate,u_discrete,u_general,u_far_field,u_near_field,u_oracle,"
         "route_disagreement,error\n";
  for (const auto& r : s.rows) {
    std::string err = r.error;
    for (char& ch : err)
      if (ch == ',' || ch == '\n' || ch == '"') ch = ' ';
    out << format_double(r.value) << ',' << opt_str(r.fitted_rate) << ',' << opt_str(r.rate_stderr) << ','
        << opt_str(r.vacuum_rate) << ',' << opt_str(r.analytic_rate) << ',' << opt_str(r.u_discrete) << ','
        << opt_str(r.u_general) << ',' << opt_str(r.u_far_field) << ',' << opt_str(r.u_near_field) << ','
        << opt_str(r.u_oracle) << ',' << opt_str(r.route_disagreement) << ',' << err << '\n';
  }
}

void emit_plot_data(const dynamics::Trajectory& traj, double reference_rate, const std::string& path) {
  write_file(path, plot_string(traj, reference_rate));
}

void emit_plot_data(const SweepResult& sweep, const std::string& path) { write_file(path, sweep_plot(sweep)); }

// ---- entry point -----------------------------------------------------------

namespace {

void report_error(std::ostream& err, int code, const char* kind, const std::string& message) {
  json j = {{"error", {{"exit_code", code}, {"kind", kind}, {"message", message}}}};
  err << j.dump() << std::endl;
}

}  // namespace

int run(const RunConfig& c, std::ostream& err) {
  try {
    auto problems = check_config(c);
    const auto validation = validate(c.system);
    for (const auto& v : validation.violations) problems.push_back(v);
    if (!problems.empty()) {
      std::string msg = "invalid configuration: " + problems.front();
      for (std::size_t i = 1; i < problems.size(); ++i) msg += "; " + problems[i];
      report_error(err, kValidation, "validation", msg);
      return kValidation;
    }

    Artifacts a;
    a.dir = c.output.dir;
    prepare_output(a.dir);

    a.summary["schema_version"] = kSchemaVersion;
    a.summary["scenario"] = to_string(c.scenario);
    a.summary["config"] = config_to_json(c);
    a.report.push_back(line("scenario: ", to_string(c.scenario)));
    a.report.push_back(line("gamma = ", format_double(c.system.gamma), ", beta = ", format_double(c.system.beta),
                            ", omega_i = ", format_double(c.system.omega_i), ", detector atoms = ",
                            c.system.detector_atoms.size(), ", seed = ", c.seed));
    a.summary["regime"] = regime_section(c.system, validation, a.report);

    switch (c.scenario) {
      case Scenario::Vacuum:
        scenario_vacuum(c, a);
        break;
      case Scenario::SingleDetector:
        scenario_single_detector(c, a);
        break;
      case Scenario::Shell:
        scenario_shell(c, a);
        break;
      case Scenario::ToyDynamics:
        scenario_toy(c, a);
        break;
      case Scenario::RouteCompare:
        scenario_routes(c, a);
        break;
      case Scenario::Sweep:
        scenario_sweep(c, a);
        break;
    }
    a.summary["normalization"] = normalization_section(c, a.report);
    flush(a);
    return kOk;
  } catch (const InvalidInput& e) {
    report_error(err, kValidation, "validation", e.what());
    return kValidation;
  } catch (const IoError& e) {
    report_error(err, kIo, "io", e.what());
    return kIo;
  } catch (const NumericalError& e) {
    report_error(err, kNumerical, "numerical", e.what());
    return kNumerical;
  } catch (const std::exception& e) {
    report_error(err, kNumerical, "numerical", e.what());
    return kNumerical;
  }
}

}  // namespace watched::cli
