#include "watched/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include "watched/errors.hpp"

namespace watched::cli {

using nlohmann::json;

const char* to_string(Scenario s) {
  switch (s) {
    case Scenario::Vacuum:
      return "vacuum";
    case Scenario::SingleDetector:
      return "single-detector";
    case Scenario::Shell:
      return "shell";
    case Scenario::ToyDynamics:
      return "toy";
    case Scenario::RouteCompare:
      return "compare-routes";
    case Scenario::Sweep:
      return "sweep";
  }
  return "unknown";
}

Scenario scenario_from_string(const std::string& name) {
  for (auto s : {Scenario::Vacuum, Scenario::SingleDetector, Scenario::Shell, Scenario::ToyDynamics,
                 Scenario::RouteCompare, Scenario::Sweep})
    if (name == to_string(s)) return s;
  throw InvalidInput("unknown scenario '" + name + "'");
}

namespace {

ModelKind kind_from_string(const std::string& name) {
  for (auto k : {ModelKind::Radial1D, ModelKind::Full3D, ModelKind::ScalarToy})
    if (name == to_string(k)) return k;
  throw InvalidInput("unknown model kind '" + name + "'");
}

// Reads fields of one JSON object, rejecting keys it was never asked about.
class Reader {
 public:
  Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) throw InvalidInput(path_ + ": expected an object");
  }

  template <class T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    if (!j_.contains(key)) return;
    try {
      out = j_.at(key).get<T>();
    } catch (const json::exception& e) {
      throw InvalidInput(where(key) + ": " + e.what());
    }
  }

  void get_vec3(const char* key, Vec3& out) {
    std::vector<double> v;
    get(key, v);
    if (!j_.contains(key)) return;
    if (v.size() != 3) throw InvalidInput(where(key) + ": expected 3 numbers");
    out = Vec3(v[0], v[1], v[2]);
  }

  const json* child(const char* key) {
    seen_.insert(key);
    return j_.contains(key) ? &j_.at(key) : nullptr;
  }

  std::string where(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

  void finish() const {
    for (const auto& [k, v] : j_.items())
      if (!seen_.count(k)) throw InvalidInput("unknown config key '" + where(k) + "'");
  }

 private:
  const json& j_;
  std::string path_;
  std::set<std::string> seen_;
};

json vec3_json(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

PhysicalSystem system_from(const json& j) {
  PhysicalSystem s;
  Reader r(j, "system");
  r.get("omega0", s.omega0);
  r.get("gamma", s.gamma);
  r.get("omega_i", s.omega_i);
  r.get("beta", s.beta);
  if (const json* a = r.child("atom")) {
    Reader ra(*a, "system.atom");
    ra.get_vec3("dipole_dir", s.atom.dipole_dir);
    ra.finish();
  }
  if (const json* d = r.child("detector_atoms")) {
    if (!d->is_array()) throw InvalidInput("system.detector_atoms: expected an array");
    for (std::size_t i = 0; i < d->size(); ++i) {
      DetectorAtom atom;
      Reader rd(d->at(i), "system.detector_atoms." + std::to_string(i));
      rd.get_vec3("position", atom.position);
      rd.get_vec3("dipole_dir", atom.dipole_dir);
      rd.get("mu_c_scale", atom.mu_c_scale);
      rd.finish();
      s.detector_atoms.push_back(atom);
    }
  }
  if (const json* d = r.child("dos")) {
    Reader rd(*d, "system.dos");
    std::string shape = s.dos.shape == DosShape::Flat ? "flat" : "power_law";
    rd.get("shape", shape);
    if (shape == "flat")
      s.dos.shape = DosShape::Flat;
    else if (shape == "power_law")
      s.dos.shape = DosShape::PowerLaw;
    else
      throw InvalidInput("system.dos.shape: expected 'flat' or 'power_law'");
    rd.get("exponent", s.dos.exponent);
    rd.get("omega_cut_c", s.dos.omega_cut_c);
    rd.get("normalization", s.dos.normalization);
    rd.finish();
  }
  r.finish();
  return s;
}

json system_to(const PhysicalSystem& s) {
  json atoms = json::array();
  for (const auto& a : s.detector_atoms)
    atoms.push_back({{"position", vec3_json(a.position)},
                     {"dipole_dir", vec3_json(a.dipole_dir)},
                     {"mu_c_scale", a.mu_c_scale}});
  return {{"omega0", s.omega0},
          {"gamma", s.gamma},
          {"omega_i", s.omega_i},
          {"beta", s.beta},
          {"atom", {{"dipole_dir", vec3_json(s.atom.dipole_dir)}}},
          {"detector_atoms", atoms},
          {"dos",
           {{"shape", s.dos.shape == DosShape::Flat ? "flat" : "power_law"},
            {"exponent", s.dos.exponent},
            {"omega_cut_c", s.dos.omega_cut_c},
            {"normalization", s.dos.normalization}}}};
}

}  // namespace

RunConfig config_from_json(const json& j) {
  RunConfig c;
  Reader r(j, "");
  int version = kSchemaVersion;
  r.get("schema_version", version);
  if (version != kSchemaVersion)
    throw InvalidInput("schema_version " + std::to_string(version) + " is not supported");

  std::string scenario = to_string(c.scenario);
  r.get("scenario", scenario);
  c.scenario = scenario_from_string(scenario);
  r.get("seed", c.seed);
  r.get("jobs", c.jobs);

  if (const json* s = r.child("system")) c.system = system_from(*s);

  if (const json* g = r.child("grid")) {
    Reader rg(*g, "grid");
    rg.get("n_modes", c.grid.n_modes);
    rg.get("omega_cut", c.grid.omega_cut);
    rg.get("n_theta", c.grid.n_theta);
    rg.get("n_phi", c.grid.n_phi);
    rg.get("n_channels", c.grid.n_channels);
    rg.get("t_max", c.grid.t_max);
    rg.get("rec_window", c.grid.rec_window);
    rg.finish();
  }
  if (const json* t = r.child("toy")) {
    Reader rt(*t, "toy");
    rt.get("n_modes", c.toy.n_modes);
    rt.get("band_lo", c.toy.band_lo);
    rt.get("band_hi", c.toy.band_hi);
    rt.get("gamma", c.toy.gamma);
    rt.get("beta", c.toy.beta);
    rt.get("z", c.toy.z);
    rt.get("n_channels", c.toy.n_channels);
    rt.get("channel_lo", c.toy.channel_lo);
    rt.get("channel_hi", c.toy.channel_hi);
    rt.get("t_max", c.toy.t_max);
    rt.get("rec_window", c.toy.rec_window);
    rt.finish();
  }
  if (const json* s = r.child("solver")) {
    Reader rs(*s, "solver");
    rs.get("rtol", c.solver.rtol);
    rs.get("atol", c.solver.atol);
    rs.get("rotating_frame", c.solver.rotating_frame);
    rs.get("parallel", c.solver.parallel);
    rs.get("n_samples", c.solver.n_samples);
    rs.get("times", c.solver.times);
    rs.finish();
  }
  if (const json* s = r.child("contour")) {
    Reader rc(*s, "contour");
    std::string method = c.contour.method == laplace::Method::Bromwich ? "bromwich" : "talbot";
    rc.get("method", method);
    if (method == "bromwich")
      c.contour.method = laplace::Method::Bromwich;
    else if (method == "talbot")
      c.contour.method = laplace::Method::Talbot;
    else
      throw InvalidInput("contour.method: expected 'bromwich' or 'talbot'");
    rc.get("a", c.contour.a);
    rc.get("bandwidth", c.contour.bandwidth);
    rc.get("tail_factor", c.contour.tail_factor);
    rc.get("min_terms", c.contour.min_terms);
    rc.get("euler_terms", c.contour.euler_terms);
    rc.get("talbot_m", c.contour.talbot_m);
    rc.get("tolerance", c.contour.tolerance);
    rc.get("throw_on_unconverged", c.contour.throw_on_unconverged);
    rc.get("parallel", c.contour.parallel);
    rc.finish();
  }
  if (const json* s = r.child("thresholds")) {
    Reader rt(*s, "thresholds");
    rt.get("far_field_z", c.thresholds.far_field_z);
    rt.get("near_field_z", c.thresholds.near_field_z);
    rt.finish();
  }
  if (const json* s = r.child("fit")) {
    Reader rf(*s, "fit");
    rf.get("t_lo", c.fit.t_lo);
    rf.get("t_hi", c.fit.t_hi);
    rf.finish();
  }
  if (const json* s = r.child("shell")) {
    Reader rs(*s, "shell");
    rs.get("n_atoms", c.shell.n_atoms);
    rs.get("radius_z", c.shell.radius_z);
    rs.get("beta", c.shell.beta);
    rs.get("mc_samples", c.shell.mc_samples);
    rs.get("l2_mc_samples", c.shell.l2_mc_samples);
    rs.get("l2_order", c.shell.l2_order);
    rs.finish();
  }
  if (const json* s = r.child("route")) {
    Reader rr(*s, "route");
    std::string model = to_string(c.route.model);
    rr.get("model", model);
    c.route.model = kind_from_string(model);
    rr.get("n_times", c.route.n_times);
    rr.get("horizon_fraction", c.route.horizon_fraction);
    rr.finish();
  }
  if (const json* s = r.child("sweep")) {
    if (!s->is_null()) {
      SweepSpec sw;
      Reader rs(*s, "sweep");
      rs.get("parameter", sw.parameter);
      rs.get("values", sw.values);
      rs.finish();
      c.sweep = sw;
    }
  }
  if (const json* s = r.child("output")) {
    Reader ro(*s, "output");
    ro.get("dir", c.output.dir);
    ro.get("plot_data", c.output.plot_data);
    ro.get("model_csv", c.output.model_csv);
    ro.finish();
  }
  r.finish();
  return c;
}

json config_to_json(const RunConfig& c) {
  json j;
  j["schema_version"] = kSchemaVersion;
  j["scenario"] = to_string(c.scenario);
  j["seed"] = c.seed;
  j["jobs"] = c.jobs;
  j["system"] = system_to(c.system);
  j["grid"] = {{"n_modes", c.grid.n_modes},       {"omega_cut", c.grid.omega_cut}, {"n_theta", c.grid.n_theta},
               {"n_phi", c.grid.n_phi},           {"n_channels", c.grid.n_channels},
               {"t_max", c.grid.t_max},           {"rec_window", c.grid.rec_window}};
  j["toy"] = {{"n_modes", c.toy.n_modes},       {"band_lo", c.toy.band_lo},       {"band_hi", c.toy.band_hi},
              {"gamma", c.toy.gamma},           {"beta", c.toy.beta},             {"z", c.toy.z},
              {"n_channels", c.toy.n_channels}, {"channel_lo", c.toy.channel_lo}, {"channel_hi", c.toy.channel_hi},
              {"t_max", c.toy.t_max},           {"rec_window", c.toy.rec_window}};
  j["solver"] = {{"rtol", c.solver.rtol},
                 {"atol", c.solver.atol},
                 {"rotating_frame", c.solver.rotating_frame},
                 {"parallel", c.solver.parallel},
                 {"n_samples", c.solver.n_samples},
                 {"times", c.solver.times}};
  j["contour"] = {{"method", c.contour.method == laplace::Method::Bromwich ? "bromwich" : "talbot"},
                  {"a", c.contour.a},
                  {"bandwidth", c.contour.bandwidth},
                  {"tail_factor", c.contour.tail_factor},
                  {"min_terms", c.contour.min_terms},
                  {"euler_terms", c.contour.euler_terms},
                  {"talbot_m", c.contour.talbot_m},
                  {"tolerance", c.contour.tolerance},
                  {"throw_on_unconverged", c.contour.throw_on_unconverged},
                  {"parallel", c.contour.parallel}};
  j["thresholds"] = {{"far_field_z", c.thresholds.far_field_z}, {"near_field_z", c.thresholds.near_field_z}};
  j["fit"] = {{"t_lo", c.fit.t_lo}, {"t_hi", c.fit.t_hi}};
  j["shell"] = {{"n_atoms", c.shell.n_atoms},         {"radius_z", c.shell.radius_z},
                {"beta", c.shell.beta},               {"mc_samples", c.shell.mc_samples},
                {"l2_mc_samples", c.shell.l2_mc_samples}, {"l2_order", c.shell.l2_order}};
  j["route"] = {{"model", to_string(c.route.model)},
                {"n_times", c.route.n_times},
                {"horizon_fraction", c.route.horizon_fraction}};
  if (c.sweep)
    j["sweep"] = {{"parameter", c.sweep->parameter}, {"values", c.sweep->values}};
  else
    j["sweep"] = nullptr;
  j["output"] = {{"dir", c.output.dir}, {"plot_data", c.output.plot_data}, {"model_csv", c.output.model_csv}};
  return j;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidInput("config '" + path + "' is not valid JSON: " + e.what());
  }
  return config_from_json(j);
}

void apply_override(json& j, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidInput("override '" + assignment + "' is not KEY=VALUE");
  const std::string key = assignment.substr(0, eq);
  const std::string text = assignment.substr(eq + 1);

  json value;
  try {
    value = json::parse(text);
  } catch (const json::exception&) {
    value = text;
  }

  json* node = &j;
  std::stringstream parts(key);
  std::string part;
  std::vector<std::string> path;
  while (std::getline(parts, part, '.')) path.push_back(part);
  for (std::size_t i = 0; i < path.size(); ++i) {
    const std::string& p = path[i];
    const bool last = i + 1 == path.size();
    if (node->is_array()) {
      std::size_t idx = 0;
      try {
        idx = std::stoul(p);
      } catch (const std::exception&) {
        throw InvalidInput("override '" + key + "': '" + p + "' is not an array index");
      }
      while (node->size() <= idx) node->push_back(json::object());
      node = &(*node)[idx];
    } else {
      if (node->is_null()) *node = json::object();
      node = &(*node)[p];
    }
    if (last) *node = value;
  }
}

std::vector<std::string> check_config(const RunConfig& c) {
  std::vector<std::string> problems;
  const bool is_sweep = c.scenario == Scenario::Sweep;
  if (is_sweep && !c.sweep) problems.push_back("scenario 'sweep' requires a sweep section");
  if (!is_sweep && c.sweep) problems.push_back("sweep section is only allowed with scenario 'sweep'");
  if (c.sweep) {
    const auto& p = c.sweep->parameter;
    if (p != "beta" && p != "r" && p != "n_atoms" && p != "n_modes")
      problems.push_back("sweep.parameter must be one of beta, r, n_atoms, n_modes");
  }
  const bool needs_detector = c.scenario == Scenario::SingleDetector ||
                              (is_sweep && c.sweep && c.sweep->parameter != "n_modes");
  if (needs_detector && c.system.detector_atoms.empty())
    problems.push_back("scenario '" + std::string(to_string(c.scenario)) + "' requires at least one detector atom");
  if (c.jobs < 1) problems.push_back("jobs >= 1");
  if (c.shell.radius_z <= 0.0) problems.push_back("shell.radius_z > 0");
  if (c.route.horizon_fraction <= 0.0 || c.route.horizon_fraction >= 1.0)
    problems.push_back("route.horizon_fraction in (0, 1)");
  return problems;
}

}  // namespace watched::cli
