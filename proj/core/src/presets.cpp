#include "mdkit/presets.hpp"

#include <cmath>

#include "mdkit/diagnostics.hpp"

namespace mdkit {

namespace {

Config from_pairs(std::initializer_list<std::pair<const char*, const char*>> pairs) {
  Config c;
  for (const auto& [k, v] : pairs) c.set(k, v);
  return c;
}

Complex parse_complex(const std::string& key, const std::string& text) {
  const auto colon = text.find(':');
  try {
    if (colon == std::string::npos) return {parse_number(text), 0.0};
    return {parse_number(text.substr(0, colon)), parse_number(text.substr(colon + 1))};
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

template <class F>
auto with_key(const std::string& key, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::invalid_argument& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

GridSpec grid_from(const Config& c) {
  const auto nv = c.get_doubles("grid.n");
  std::array<int, 3> n{};
  if (nv.size() == 1) {
    n.fill(static_cast<int>(nv[0]));
  } else if (nv.size() == 3) {
    for (int k = 0; k < 3; ++k) n[k] = static_cast<int>(nv[k]);
  } else {
    throw ConfigError("key 'grid.n': expected one or three counts");
  }
  for (int k = 0; k < 3; ++k) {
    if (static_cast<double>(n[k]) != nv[nv.size() == 1 ? 0 : k]) {
      throw ConfigError("key 'grid.n': counts must be integers");
    }
  }
  const auto bv = c.get_doubles("grid.bounds");
  std::array<Interval, 3> b{};
  if (bv.size() == 2) {
    b.fill({bv[0], bv[1]});
  } else if (bv.size() == 6) {
    for (int k = 0; k < 3; ++k) b[k] = {bv[2 * k], bv[2 * k + 1]};
  } else {
    throw ConfigError("key 'grid.bounds': expected 'lower,upper' or six numbers");
  }
  try {
    return make_grid(b, n);
  } catch (const GridError& e) {
    throw ConfigError(std::string("keys 'grid.n'/'grid.bounds': ") + e.what());
  }
}

}  // namespace

SolverKind parse_solver_kind(std::string_view name) {
  if (name == "md") return SolverKind::md;
  if (name == "wkb") return SolverKind::wkb;
  if (name == "sp") return SolverKind::sp;
  throw std::invalid_argument("unknown solver '" + std::string(name) + "'");
}

std::string_view to_string(SolverKind k) {
  switch (k) {
    case SolverKind::md: return "md";
    case SolverKind::wkb: return "wkb";
    default: return "sp";
  }
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = {"exact_plane_wave", "steady_state",
                                                 "self_consistent",  "harmonic",
                                                 "nr_gaussian",      "nr_harmonic",
                                                 "custom"};
  return names;
}

Config base_defaults() {
  return from_pairs({
      {"solver.kind", "md"},
      {"preset.name", "custom"},
      {"grid.n", "32"},
      {"grid.bounds", "-0.5,0.5"},
      {"md.epsilon", "1"},
      {"md.delta", "1"},
      {"md.splitting", "strang"},
      {"md.dealias", "false"},
      {"md.init_v", "zero"},
      {"md.init_a", "zero"},
      {"md.gauge_warn_fraction", "0.05"},
      {"time.dt", "1/128"},
      {"time.t_final", "1"},
      {"init.kind", "gaussian"},
      {"init.mode", "1,2,3"},
      {"init.allow_aliased", "false"},
      {"init.center", "0,0,0"},
      {"init.width", "1/16"},
      {"init.chi", "0,0,0,0"},
      {"init.phase", "zero"},
      {"init.amplitude", "constant"},
      {"external.v", "none"},
      {"external.v_strength", "1"},
      {"external.a", "none"},
      {"wkb.caustic_threshold", "50"},
      {"wkb.cg_tolerance", "1e-14"},
      {"sp.self_potential", "true"},
      {"output.dir", "mdkit_out"},
      {"output.dump_times", ""},
      {"output.csv_stride", "1"},
      {"output.slice_x3", "0"},
      {"runtime.threads", "0"},
  });
}

Config preset_overrides(const std::string& name) {
  if (name == "custom") return {};
  if (name == "exact_plane_wave") {
    return from_pairs({{"md.epsilon", "1"},
                       {"md.delta", "1"},
                       {"init.kind", "plane_wave"},
                       {"init.mode", "1,2,3"},
                       {"external.v", "plane_wave"},
                       {"external.a", "plane_wave"},
                       {"time.dt", "1/128"},
                       {"time.t_final", "1"}});
  }
  if (name == "steady_state") {
    return from_pairs({{"md.epsilon", "0.01"},
                       {"init.chi", "1,0,0,0"},
                       {"time.dt", "1/128"},
                       {"time.t_final", "0.5"}});
  }
  if (name == "self_consistent") {
    return from_pairs({{"md.epsilon", "0.01"},
                       {"init.phase", "example32"},
                       {"init.amplitude", "polarized"},
                       {"init.chi", "1,0,0,0"},
                       {"time.dt", "1/128"},
                       {"time.t_final", "0.625"}});
  }
  if (name == "harmonic") {
    return from_pairs({{"md.epsilon", "0.01"},
                       {"init.chi", "1,0,0,0"},
                       {"init.center", "0.1,-0.1,0"},
                       {"external.v", "harmonic"},
                       {"external.v_strength", "1"},
                       {"time.dt", "1/32"},
                       {"time.t_final", "1"}});
  }
  if (name == "nr_gaussian") {
    return from_pairs({{"md.epsilon", "1"},
                       {"md.delta", "0.01"},
                       {"grid.n", "64"},
                       {"init.chi", "1,1,1,1"},
                       {"md.init_v", "poisson"},
                       {"md.init_a", "poisson"},
                       {"time.dt", "1/128"},
                       {"time.t_final", "1"}});
  }
  if (name == "nr_harmonic") {
    return from_pairs({{"md.epsilon", "1"},
                       {"md.delta", "0.01"},
                       {"grid.n", "64"},
                       {"init.chi", "1,0,1,0"},
                       {"init.center", "0.1,-0.1,0"},
                       {"external.v", "harmonic"},
                       {"external.v_strength", "100"},
                       {"md.init_v", "poisson"},
                       {"md.init_a", "poisson"},
                       {"time.dt", "1/128"},
                       {"time.t_final", "2"}});
  }
  throw ConfigError("key 'preset.name': unknown preset '" + name + "'");
}

Config resolve_config(const Config& user) {
  Config out = base_defaults();
  const std::string name = user.has("preset.name") ? user.get("preset.name") : "custom";
  out.merge(preset_overrides(name));
  out.merge(user);
  return out;
}

Experiment make_experiment(const Config& c) {
  Experiment e;
  e.preset = c.get("preset.name");
  preset_overrides(e.preset);  // validates the name
  e.solver = with_key("solver.kind", [&] { return parse_solver_kind(c.get("solver.kind")); });

  SimConfig& s = e.sim;
  s.grid = grid_from(c);
  s.epsilon = c.get_double("md.epsilon");
  s.delta = c.get_double("md.delta");
  s.dt = c.get_double("time.dt");
  s.t_final = c.get_double("time.t_final");
  s.splitting = with_key("md.splitting", [&] { return parse_splitting(c.get("md.splitting")); });
  s.dealias = c.get_bool("md.dealias");
  e.init_v = with_key("md.init_v", [&] { return parse_potential_init(c.get("md.init_v")); });
  e.init_a = with_key("md.init_a", [&] { return parse_potential_init(c.get("md.init_a")); });
  e.gauge_warn_fraction = c.get_double("md.gauge_warn_fraction");

  e.init_kind = c.get("init.kind");
  if (e.init_kind != "plane_wave" && e.init_kind != "gaussian") {
    throw ConfigError("key 'init.kind': expected plane_wave or gaussian");
  }
  const auto mode = c.get_vec3("init.mode");
  for (int k = 0; k < 3; ++k) {
    e.mode[k] = static_cast<int>(mode[k]);
    if (e.mode[k] != mode[k]) throw ConfigError("key 'init.mode': expected integers");
  }
  e.plane_wave_xi_ = plane_wave_wavenumber(s.grid, e.mode);
  e.allow_aliased = c.get_bool("init.allow_aliased");
  e.center = c.get_vec3("init.center");
  e.width = c.get_double("init.width");
  if (!(e.width > 0.0)) throw ConfigError("key 'init.width': must be positive");
  const auto chi = split_list(c.get("init.chi"));
  if (chi.size() != 4) throw ConfigError("key 'init.chi': expected four components");
  for (int k = 0; k < 4; ++k) e.chi[k] = parse_complex("init.chi", chi[k]);
  e.phase = c.get("init.phase");
  if (e.phase != "zero" && e.phase != "example32") {
    throw ConfigError("key 'init.phase': expected zero or example32");
  }
  e.amplitude = c.get("init.amplitude");
  if (e.amplitude != "constant" && e.amplitude != "polarized") {
    throw ConfigError("key 'init.amplitude': expected constant or polarized");
  }

  const std::string ev = c.get("external.v");
  const double strength = c.get_double("external.v_strength");
  if (ev == "harmonic") {
    s.external.v_ex = [strength](double, const Vec3& x) {
      return strength * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
    };
  } else if (ev == "plane_wave") {
    s.external.v_ex = plane_wave_external(e.plane_wave_xi_).v_ex;
  } else if (ev != "none") {
    throw ConfigError("key 'external.v': expected none, harmonic or plane_wave");
  }
  const std::string ea = c.get("external.a");
  if (ea == "plane_wave") {
    s.external.a_ex = plane_wave_external(e.plane_wave_xi_).a_ex;
  } else if (ea != "none") {
    throw ConfigError("key 'external.a': expected none or plane_wave");
  }

  e.wkb.caustic_threshold = c.get_double("wkb.caustic_threshold");
  e.wkb.cg_tolerance = c.get_double("wkb.cg_tolerance");
  e.wkb.splitting = s.splitting;
  e.sp.self_potential = c.get_bool("sp.self_potential");
  e.sp.splitting = s.splitting;

  e.output_dir = c.get("output.dir");
  e.dump_times = c.get_doubles("output.dump_times");
  e.csv_stride = c.get_int("output.csv_stride");
  if (e.csv_stride < 1) throw ConfigError("key 'output.csv_stride': must be at least 1");
  if (!c.get("output.slice_x3").empty() && c.get("output.slice_x3") != "none") {
    e.slice_x3 = c.get_double("output.slice_x3");
  }
  e.threads = static_cast<int>(c.get_int("runtime.threads"));

  try {
    s.validate();
    s.steps();
  } catch (const std::invalid_argument& err) {
    throw ConfigError(std::string("keys 'md.*'/'time.*': ") + err.what());
  }
  if (e.solver == SolverKind::wkb && (e.init_kind == "plane_wave" || s.external.has_a())) {
    throw ConfigError("key 'solver.kind': the WKB solver needs gaussian data and no external A");
  }
  for (double t : e.dump_times) {
    if (t < 0.0 || t > s.t_final + 1e-12) {
      throw ConfigError("key 'output.dump_times': " + format_double(t) + " outside [0, t_final]");
    }
  }
  return e;
}

double example32_phase(const Vec3& x) {
  return (1.0 + std::cos(2.0 * M_PI * x[0])) * (1.0 + std::cos(2.0 * M_PI * x[1])) / 40.0;
}

RealField initial_phase(const Experiment& e) {
  const GridSpec& g = e.sim.grid;
  RealField phi(g.size(), 0.0);
  if (e.phase == "example32") {
    for (std::size_t i = 0; i < phi.size(); ++i) phi[i] = example32_phase(g.point(i));
  }
  return phi;
}

namespace {

// Amplitude before the phase factor: chi(x) * gaussian.
SpinorField base_amplitude(const Experiment& e, const Fft& fft, const RealField& phi) {
  const GridSpec& g = e.sim.grid;
  SpinorField amp = e.amplitude == "polarized"
                        ? polarized_amplitude(fft, phi, PolarizedExample{})
                        : SpinorField(g);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const Vec3 x = g.point(i);
    double r2 = 0.0;
    for (int k = 0; k < 3; ++k) r2 += (x[k] - e.center[k]) * (x[k] - e.center[k]);
    const double env = std::exp(-r2 / (4.0 * e.width * e.width));
    for (int c = 0; c < 4; ++c) {
      const Complex base = e.amplitude == "polarized" ? amp.at(i, c) : e.chi[c];
      amp.at(i, c) = base * env;
    }
  }
  return amp;
}

}  // namespace

SpinorField initial_spinor(const Experiment& e, const Fft& fft) {
  const GridSpec& g = e.sim.grid;
  if (e.init_kind == "plane_wave") {
    try {
      return exact_plane_wave(0.0, g, e.plane_wave_xi_, e.allow_aliased).psi;
    } catch (const GridError& err) {
      throw ConfigError(std::string("key 'init.mode': ") + err.what());
    }
  }
  const RealField phi = initial_phase(e);
  SpinorField psi = base_amplitude(e, fft, phi);
  if (e.phase != "zero") {
    for (std::size_t i = 0; i < g.size(); ++i) {
      const Complex f = std::polar(1.0, phi[i] / e.sim.epsilon);
      for (int c = 0; c < 4; ++c) psi.at(i, c) *= f;
    }
  }
  return psi;
}

WkbInitial wkb_initial(const Experiment& e, const Fft& fft) {
  const RealField phi = initial_phase(e);
  const SpinorField amp = base_amplitude(e, fft, phi);
  WkbInitial w{phi, phi, SpinorField(e.sim.grid), SpinorField(e.sim.grid)};
  if (e.amplitude == "polarized") {
    w.u_plus = amp;
  } else {
    w.u_plus = polarized_amplitude(fft, phi, PolarizedCustom{amp, Sign::plus});
    w.u_minus = polarized_amplitude(fft, phi, PolarizedCustom{amp, Sign::minus});
  }
  return w;
}

}  // namespace mdkit
