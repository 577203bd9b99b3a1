#include "mdkit/runner.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <limits>

#include "mdkit/dump.hpp"
#include "mdkit/md_solver.hpp"
#include "mdkit/parallel.hpp"
#include "mdkit/sp_solver.hpp"
#include "mdkit/wkb_solver.hpp"

namespace mdkit {

namespace fs = std::filesystem;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string step_name(const std::string& name, long step) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "_%06ld.mdk", step);
  return name + buf;
}

std::vector<long> dump_steps(const Experiment& e) {
  std::vector<long> steps;
  for (double t : e.dump_times) {
    const long s = std::lround(t / e.sim.dt);
    if (std::abs(static_cast<double>(s) * e.sim.dt - t) > 1e-9 * std::max(1.0, t)) {
      throw ConfigError("key 'output.dump_times': " + format_double(t) +
                        " is not a multiple of time.dt");
    }
    steps.push_back(s);
  }
  return steps;
}

bool contains(const std::vector<long>& v, long s) {
  return std::find(v.begin(), v.end(), s) != v.end();
}

class Output {
 public:
  Output(const Experiment& e, const RunOptions& opt, RunResult& result)
      : e_(e), opt_(opt), result_(result), steps_(dump_steps(e)), dir_(e.output_dir) {
    if (!opt_.write_outputs) return;
    std::error_code ec;
    fs::create_directories(dir_, ec);
    if (ec || !fs::is_directory(dir_)) {
      throw ConfigError("key 'output.dir': cannot create '" + dir_.string() + "'");
    }
  }

  bool wants_dump(long step) const { return opt_.write_outputs && contains(steps_, step); }
  bool wants_row(long step, long last) const {
    return step % e_.csv_stride == 0 || step == last;
  }

  void spinor(const std::string& name, long step, const SpinorField& psi) {
    const fs::path p = dir_ / step_name(name, step);
    write_spinor_dump(p, name, psi, e_.sim.epsilon, e_.sim.delta);
    result_.files.push_back(p);
  }

  void real(const std::string& name, long step, double t,
            const std::vector<const RealField*>& comps) {
    const fs::path p = dir_ / step_name(name, step);
    write_real_dump(p, name, e_.sim.grid, comps, t, e_.sim.epsilon, e_.sim.delta);
    result_.files.push_back(p);
  }

  void density_slice(long step, double t, const RealField& density) {
    if (!e_.slice_x3) return;
    const GridSpec& g = e_.sim.grid;
    const auto n = g.n();
    const double h = g.spacing()[2];
    long m3 = std::lround((*e_.slice_x3 - g.bounds()[2].lower) / h);
    m3 = ((m3 % n[2]) + n[2]) % n[2];
    std::vector<double> plane;
    plane.reserve(static_cast<std::size_t>(n[0]) * n[1]);
    for (int m1 = 0; m1 < n[0]; ++m1) {
      for (int m2 = 0; m2 < n[1]; ++m2) plane.push_back(density[g.index(m1, m2, static_cast<int>(m3))]);
    }
    DumpHeader h_ = dump_header("density_slice", g, 1, false, t, e_.sim.epsilon, e_.sim.delta);
    const double x3 = g.coordinate(2, static_cast<int>(m3));
    h_.n = {n[0], n[1], 1};
    h_.bounds[2] = {x3, x3 + h};
    const fs::path p = dir_ / step_name("density_slice", step);
    write_dump(p, h_, plane);
    result_.files.push_back(p);
  }

  void finish(const Config& resolved) {
    if (!opt_.write_outputs) return;
    const fs::path csv = dir_ / "timeseries.csv";
    std::ofstream os(csv);
    result_.series.write_csv(os);
    const fs::path manifest = dir_ / "manifest.cfg";
    std::ofstream ms(manifest);
    ms << resolved.to_text();
    if (!os || !ms) throw ConfigError("key 'output.dir': write failed in '" + dir_.string() + "'");
    result_.files.push_back(csv);
    result_.files.push_back(manifest);
  }

 private:
  const Experiment& e_;
  const RunOptions& opt_;
  RunResult& result_;
  std::vector<long> steps_;
  fs::path dir_;
};

RealField density(const SpinorField& psi) {
  RealField d(psi.points());
  for (std::size_t i = 0; i < d.size(); ++i) {
    double s = 0.0;
    for (int c = 0; c < 4; ++c) s += std::norm(psi.at(i, c));
    d[i] = s;
  }
  return d;
}

void abort_run(RunResult& r, const RunOptions& opt, std::string reason) {
  r.aborted = true;
  r.abort_reason = std::move(reason);
  if (opt.log) *opt.log << "abort: " << r.abort_reason << '\n';
}

void run_md(const Experiment& e, const RunOptions& opt, RunResult& r, Output& out) {
  MdSolver solver(e.sim);
  const SpinorField psi0 = initial_spinor(e, solver.fft());
  MdState state = solver.initial_state(psi0, e.init_v, e.init_a, &r.warnings, e.gauge_warn_fraction);
  const long steps = e.sim.steps();
  const GridSpec& g = e.sim.grid;

  auto record = [&](long step) {
    const double t = state.time();
    TimeSeries::Row row;
    row.t = t;
    row.charge = total_charge(state.psi);
    row.gauge_residual = gauge_residual(solver.fft(), state.pot, e.sim.delta);
    row.l2_error = kNaN;
    row.linf_error = kNaN;
    if (e.has_exact_solution()) {
      const PlaneWave exact = exact_plane_wave(t, g, e.plane_wave_xi(), e.allow_aliased);
      const ErrorNorms err = error_norms(state.psi, exact.psi);
      row.l2_error = err.l2_rel;
      row.linf_error = err.linf_abs;
      if (step == steps) r.final_error = err;
    }
    if (out.wants_row(step, steps) || !std::isfinite(row.charge)) r.series.add(row);
    return std::isfinite(row.charge);
  };
  auto dump = [&](long step) {
    if (!out.wants_dump(step)) return;
    out.spinor("psi", step, state.psi);
    out.real("v", step, state.time(), {&state.pot.v});
    out.real("a", step, state.time(), {&state.pot.a[0], &state.pot.a[1], &state.pot.a[2]});
    out.density_slice(step, state.time(), density(state.psi));
  };

  record(0);
  dump(0);
  for (long s = 1; s <= steps; ++s) {
    solver.advance(state);
    state.psi.time = static_cast<double>(s) * e.sim.dt;
    state.pot.time = state.psi.time;
    const bool finite = record(s);
    dump(s);
    if (!finite) {
      abort_run(r, opt, "non-finite charge at t = " + format_double(state.time()));
      break;
    }
  }
  r.final_time = state.time();
}

void run_wkb(const Experiment& e, const RunOptions& opt, RunResult& r, Output& out) {
  WkbSolver solver(e.sim.grid, e.sim.external, e.wkb);
  WkbInitial init = wkb_initial(e, solver.fft());
  WkbState state = solver.initial_state(init.phi_plus, init.phi_minus, init.u_plus, init.u_minus);
  const long steps = e.sim.steps();

  auto record = [&](long step) {
    const SpinorField psi = wkb_reconstruct(state, e.sim.epsilon);
    TimeSeries::Row row;
    row.t = state.time;
    row.charge = total_charge(psi);
    row.gauge_residual = gauge_residual(solver.fft(), state.fields, 1.0);
    row.l2_error = kNaN;
    row.linf_error = kNaN;
    row.extra = {state.max_div_omega};
    if (out.wants_row(step, steps)) r.series.add(row);
    if (out.wants_dump(step)) {
      out.spinor("psi", step, psi);
      out.spinor("u_plus", step, state.u_plus);
      out.spinor("u_minus", step, state.u_minus);
      out.real("phi_plus", step, state.time, {&state.phi_plus});
      out.real("v", step, state.time, {&state.fields.v});
      out.density_slice(step, state.time, density(psi));
    }
    return std::isfinite(row.charge);
  };

  record(0);
  for (long s = 1; s <= steps; ++s) {
    if (!solver.advance(state, e.sim.dt)) {
      abort_run(r, opt, "caustic at t = " + format_double(state.caustic_time) +
                            " (max |div omega| = " + format_double(state.max_div_omega) + ")");
      break;
    }
    state.time = static_cast<double>(s) * e.sim.dt;
    if (!record(s)) {
      abort_run(r, opt, "non-finite charge at t = " + format_double(state.time));
      break;
    }
  }
  r.final_time = state.time;
}

void run_sp(const Experiment& e, const RunOptions& opt, RunResult& r, Output& out) {
  SpSolver solver(e.sim.grid, e.sim.external, e.sp);
  const SpinorField psi0 = initial_spinor(e, solver.fft());
  SpState state = solver.initial_state(psi0, e.sim.delta);
  const long steps = e.sim.steps();

  auto record = [&](long step) {
    TimeSeries::Row row;
    row.t = state.time;
    row.charge = total_charge(state);
    row.gauge_residual = kNaN;
    row.l2_error = kNaN;
    row.linf_error = kNaN;
    if (out.wants_row(step, steps)) r.series.add(row);
    if (out.wants_dump(step)) {
      out.spinor("phi_e", step, state.phi_e);
      out.spinor("phi_p", step, state.phi_p);
      out.real("v", step, state.time, {&state.v});
      RealField d = density(state.phi_e);
      const RealField dp = density(state.phi_p);
      for (std::size_t i = 0; i < d.size(); ++i) d[i] += dp[i];
      out.density_slice(step, state.time, d);
    }
    return std::isfinite(row.charge);
  };

  record(0);
  for (long s = 1; s <= steps; ++s) {
    solver.advance(state, e.sim.dt);
    state.time = static_cast<double>(s) * e.sim.dt;
    if (!record(s)) {
      abort_run(r, opt, "non-finite charge at t = " + format_double(state.time));
      break;
    }
  }
  r.final_time = state.time;
}

// f(i) for each level index; with `parallel` every level gets its own thread.
template <class T, class F>
std::vector<T> map_levels(std::size_t count, bool parallel, F&& f) {
  std::vector<T> out;
  out.reserve(count);
  if (!parallel) {
    for (std::size_t i = 0; i < count; ++i) out.push_back(f(i));
    return out;
  }
  std::vector<std::future<T>> jobs;
  for (std::size_t i = 0; i < count; ++i) jobs.push_back(std::async(std::launch::async, f, i));
  for (auto& j : jobs) out.push_back(j.get());
  return out;
}

}  // namespace

RunResult run(const Config& resolved, const RunOptions& options) {
  const Experiment e = make_experiment(resolved);
  RunResult r;
  if (e.solver == SolverKind::wkb) r.series = TimeSeries({"max_div_omega"});
  Output out(e, options, r);
  switch (e.solver) {
    case SolverKind::md: run_md(e, options, r, out); break;
    case SolverKind::wkb: run_wkb(e, options, r, out); break;
    case SolverKind::sp: run_sp(e, options, r, out); break;
  }
  if (options.log) {
    for (const auto& w : r.warnings) *options.log << "warning: " << w << '\n';
  }
  out.finish(resolved);
  if (r.aborted && options.throw_on_abort) throw NumericalAbort(r.abort_reason);
  return r;
}

SweepAxis parse_sweep_axis(std::string_view name) {
  if (name == "space") return SweepAxis::space;
  if (name == "time") return SweepAxis::time;
  throw ConfigError("unknown sweep axis '" + std::string(name) + "' (expected space or time)");
}

ComparePair parse_compare_pair(std::string_view name) {
  if (name == "md_vs_wkb") return ComparePair::md_vs_wkb;
  if (name == "md_vs_sp") return ComparePair::md_vs_sp;
  throw ConfigError("unknown comparison '" + std::string(name) +
                    "' (expected md_vs_wkb or md_vs_sp)");
}

std::vector<ConvergenceRow> convergence_sweep(const Config& resolved, SweepAxis axis,
                                              const std::vector<double>& levels,
                                              bool parallel_levels) {
  {
    const Experiment base = make_experiment(resolved);
    if (!base.has_exact_solution() || base.solver != SolverKind::md) {
      throw ConfigError("key 'init.kind': convergence sweeps need the md solver with plane_wave data");
    }
  }
  if (levels.empty()) throw ConfigError("convergence sweep needs at least one level");
  for (double h : levels) {
    if (!(h > 0.0)) throw ConfigError("convergence levels must be positive");
  }

  auto level_config = [&](double h) {
    Config c = resolved;
    if (axis == SweepAxis::time) {
      c.set("time.dt", format_double(h));
    } else {
      const Experiment e = make_experiment(resolved);
      std::string n;
      for (int k = 0; k < 3; ++k) {
        const double count = e.sim.grid.length(k) / h;
        const long m = std::lround(count);
        if (std::abs(count - static_cast<double>(m)) > 1e-9 * count || m < 1) {
          throw ConfigError("spacing " + format_double(h) + " does not divide the box");
        }
        n += (k ? "," : "") + std::to_string(m);
      }
      c.set("grid.n", n);
      c.set("init.allow_aliased", "true");
    }
    return c;
  };
  std::vector<Config> configs;
  for (double h : levels) configs.push_back(level_config(h));

  RunOptions opt;
  opt.write_outputs = false;
  opt.throw_on_abort = false;
  auto rows = map_levels<ConvergenceRow>(levels.size(), parallel_levels, [&](std::size_t k) {
    const RunResult r = run(configs[k], opt);
    ConvergenceRow row;
    row.level = levels[k];
    if (r.final_error && !r.aborted) {
      row.l2_error = r.final_error->l2_rel;
      row.linf_error = r.final_error->linf_abs;
    } else {
      row.l2_error = row.linf_error = kNaN;
    }
    return row;
  });
  std::vector<double> errs;
  for (const auto& row : rows) errs.push_back(row.l2_error);
  const auto orders = convergence_orders(errs);
  for (std::size_t i = 0; i < orders.size(); ++i) rows[i + 1].order = orders[i];
  return rows;
}

namespace {

ComparisonRow md_vs_wkb_level(const Config& resolved, double eps) {
  Config c = resolved;
  c.set("md.epsilon", format_double(eps));
  const Experiment e = make_experiment(c);
  MdSolver md(e.sim);
  WkbSolver wkb(e.sim.grid, e.sim.external, e.wkb);
  const SpinorField psi0 = initial_spinor(e, md.fft());
  MdState ms = md.initial_state(psi0, e.init_v, e.init_a, nullptr, e.gauge_warn_fraction);
  WkbInitial init = wkb_initial(e, wkb.fft());
  WkbState ws = wkb.initial_state(init.phi_plus, init.phi_minus, init.u_plus, init.u_minus);

  ComparisonRow row;
  row.value = eps;
  row.sup_difference = 0.0;
  const double q0 = total_charge(ms.psi);
  auto sample = [&] {
    const ErrorNorms err = error_norms(wkb_reconstruct(ws, e.sim.epsilon), ms.psi);
    row.difference = std::max(row.difference, err.l2_rel);
    row.sup_difference = std::max(row.sup_difference, err.linf_abs);
    if (q0 > 0.0) {
      row.md_charge_drift = std::max(row.md_charge_drift, std::abs(total_charge(ms.psi) - q0) / q0);
    }
  };
  sample();
  const long steps = e.sim.steps();
  for (long s = 1; s <= steps; ++s) {
    md.advance(ms);
    if (!wkb.advance(ws, e.sim.dt)) {
      row.truncated_at = ws.caustic_time;
      break;
    }
    ms.psi.time = ws.time = static_cast<double>(s) * e.sim.dt;
    sample();
  }
  return row;
}

ComparisonRow md_vs_sp_level(const Config& resolved, double delta) {
  Config c = resolved;
  c.set("md.delta", format_double(delta));
  const Experiment e = make_experiment(c);
  MdSolver md(e.sim);
  SpSolver sp(e.sim.grid, e.sim.external, e.sp);
  const SpinorField psi0 = initial_spinor(e, md.fft());
  MdState ms = md.initial_state(psi0, e.init_v, e.init_a, nullptr, e.gauge_warn_fraction);
  SpState ss = sp.initial_state(psi0, delta);

  ComparisonRow row;
  row.value = delta;
  row.sup_difference = kNaN;
  const double q0 = total_charge(ms.psi);
  auto sample = [&](double t) {
    const NrSplit split = nr_projector_split(md.fft(), ms.psi, delta, t);
    row.difference = std::max(
        row.difference, projected_difference(split.electronic, split.positronic, ss.phi_e, ss.phi_p));
    if (q0 > 0.0) {
      row.md_charge_drift = std::max(row.md_charge_drift, std::abs(total_charge(ms.psi) - q0) / q0);
    }
  };
  sample(0.0);
  const long steps = e.sim.steps();
  for (long s = 1; s <= steps; ++s) {
    const double t = static_cast<double>(s) * e.sim.dt;
    md.advance(ms);
    sp.advance(ss, e.sim.dt);
    ms.psi.time = ss.time = t;
    sample(t);
  }
  return row;
}

}  // namespace

std::vector<ComparisonRow> compare_regimes(const Config& resolved, ComparePair pair,
                                           const std::vector<double>& values,
                                           bool parallel_levels) {
  if (values.empty()) throw ConfigError("comparison needs at least one value");
  make_experiment(resolved);
  return map_levels<ComparisonRow>(values.size(), parallel_levels, [&](std::size_t i) {
    const double v = values[i];
    return pair == ComparePair::md_vs_wkb ? md_vs_wkb_level(resolved, v)
                                          : md_vs_sp_level(resolved, v);
  });
}

void write_convergence_table(std::ostream& os, SweepAxis axis,
                             const std::vector<ConvergenceRow>& rows) {
  os << (axis == SweepAxis::space ? "dx" : "dt") << ",l2_error,linf_error";
  if (rows.size() > 1) os << ",order";
  os << '\n';
  for (const auto& r : rows) {
    os << format_double(r.level) << ',' << format_double(r.l2_error) << ','
       << format_double(r.linf_error);
    if (rows.size() > 1) os << ',' << (r.order ? format_double(*r.order) : "");
    os << '\n';
  }
}

void write_comparison_table(std::ostream& os, ComparePair pair,
                            const std::vector<ComparisonRow>& rows) {
  if (pair == ComparePair::md_vs_wkb) {
    os << "epsilon,l2_difference,sup_difference,md_charge_drift,truncated_at\n";
  } else {
    os << "delta,projected_difference,md_charge_drift\n";
  }
  for (const auto& r : rows) {
    os << format_double(r.value) << ',' << format_double(r.difference) << ',';
    if (pair == ComparePair::md_vs_wkb) {
      os << format_double(r.sup_difference) << ',' << format_double(r.md_charge_drift) << ','
         << (r.truncated_at ? format_double(*r.truncated_at) : "");
    } else {
      os << format_double(r.md_charge_drift);
    }
    os << '\n';
  }
}

}  // namespace mdkit
