#include "cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "mdkit/dump.hpp"
#include "mdkit/parallel.hpp"
#include "mdkit/runner.hpp"

namespace mdkit {

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> sets;
  int threads = -1;
  std::string output;
  bool parallel_levels = false;
};

void add_common(CLI::App* sub, Common& c, bool sweeps) {
  sub->add_option("--config", c.config_path, "key = value configuration file");
  sub->add_option("--set", c.sets, "override, key=value (repeatable)");
  sub->add_option("--threads", c.threads, "worker threads (default: all cores)");
  sub->add_option("--output", c.output, "output directory");
  if (sweeps) sub->add_flag("--parallel-levels", c.parallel_levels, "run levels concurrently");
}

Config resolved_config(const Common& c) {
  Config user = c.config_path.empty() ? Config{} : Config::load(c.config_path);
  for (const auto& s : c.sets) user.set_assignment(s);
  if (!c.output.empty()) user.set("output.dir", c.output);
  if (c.threads >= 0) user.set("runtime.threads", std::to_string(c.threads));
  Config resolved = resolve_config(user);
  set_thread_count(static_cast<int>(resolved.get_int("runtime.threads")));
  return resolved;
}

std::vector<double> parse_levels(const std::string& option, const std::string& text) {
  std::vector<double> out;
  try {
    for (const auto& item : split_list(text)) out.push_back(parse_number(item));
  } catch (const std::invalid_argument& e) {
    throw ConfigError("option '" + option + "': " + e.what());
  }
  if (out.empty()) throw ConfigError("option '" + option + "': no values given");
  return out;
}

// Tables go to stdout and, together with the manifest, into output.dir.
void save_table(const Config& resolved, const std::string& file, const std::string& table) {
  const std::filesystem::path dir = resolved.get("output.dir");
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  std::ofstream os(dir / file);
  std::ofstream ms(dir / "manifest.cfg");
  os << table;
  ms << resolved.to_text();
  if (ec || !os || !ms) throw ConfigError("key 'output.dir': cannot write to '" + dir.string() + "'");
}

void print_dump_info(const std::string& path, std::ostream& out) {
  const DumpRecord rec = read_dump(path);
  const DumpHeader& h = rec.header;
  out << "name: " << h.name << '\n'
      << "components: " << h.components << (h.is_complex ? " complex" : " real") << '\n'
      << "n: " << h.n[0] << ' ' << h.n[1] << ' ' << h.n[2] << '\n';
  for (int k = 0; k < 3; ++k) {
    out << "bounds[" << k << "]: " << format_double(h.bounds[k].lower) << ' '
        << format_double(h.bounds[k].upper) << '\n';
  }
  out << "time: " << format_double(h.time) << '\n'
      << "epsilon: " << format_double(h.epsilon) << '\n'
      << "delta: " << format_double(h.delta) << '\n';
  double peak = 0.0;
  for (double v : rec.payload) peak = std::max(peak, std::abs(v));
  out << "values: " << rec.payload.size() << '\n' << "max_abs: " << format_double(peak) << '\n';
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Maxwell-Dirac time-splitting spectral toolkit"};
  app.require_subcommand(1);

  Common run_opts, conv_opts, cmp_opts;
  auto* run_cmd = app.add_subcommand("run", "run one simulation");
  add_common(run_cmd, run_opts, false);

  auto* conv_cmd = app.add_subcommand("converge", "error against the exact plane wave per level");
  add_common(conv_cmd, conv_opts, true);
  std::string axis = "time";
  std::string conv_levels;
  conv_cmd->add_option("--axis", axis, "space or time")->check(CLI::IsMember({"space", "time"}));
  conv_cmd->add_option("--levels", conv_levels, "comma separated dx or dt values")->required();

  auto* cmp_cmd = app.add_subcommand("compare", "asymptotic solver against the full system");
  add_common(cmp_cmd, cmp_opts, true);
  std::string pair = "md_vs_wkb";
  std::string cmp_values;
  cmp_cmd->add_option("--pair", pair, "md_vs_wkb or md_vs_sp")
      ->check(CLI::IsMember({"md_vs_wkb", "md_vs_sp"}));
  cmp_cmd->add_option("--values", cmp_values, "comma separated epsilon or delta values")
      ->required();

  auto* info_cmd = app.add_subcommand("dump-info", "print the header of an MDKIT1 dump");
  std::string dump_path;
  info_cmd->add_option("path", dump_path, "dump file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e, out, err) == 0 ? kExitOk : kExitConfig;
  }

  try {
    if (*run_cmd) {
      const Config resolved = resolved_config(run_opts);
      RunOptions opt;
      opt.log = &err;
      const RunResult r = run(resolved, opt);
      out << "wrote " << r.files.size() << " files to " << resolved.get("output.dir") << '\n';
      if (r.final_error) {
        out << "final l2_error " << format_double(r.final_error->l2_rel) << " linf_error "
            << format_double(r.final_error->linf_abs) << '\n';
      }
    } else if (*conv_cmd) {
      const Config resolved = resolved_config(conv_opts);
      const SweepAxis ax = parse_sweep_axis(axis);
      const auto rows = convergence_sweep(resolved, ax, parse_levels("--levels", conv_levels),
                                          conv_opts.parallel_levels);
      std::ostringstream table;
      write_convergence_table(table, ax, rows);
      out << table.str();
      save_table(resolved, "convergence.csv", table.str());
    } else if (*cmp_cmd) {
      const Config resolved = resolved_config(cmp_opts);
      const ComparePair p = parse_compare_pair(pair);
      const auto rows = compare_regimes(resolved, p, parse_levels("--values", cmp_values),
                                        cmp_opts.parallel_levels);
      std::ostringstream table;
      write_comparison_table(table, p, rows);
      out << table.str();
      for (const auto& r : rows) {
        if (r.truncated_at) {
          out << "note: value " << format_double(r.value) << " truncated at caustic t = "
              << format_double(*r.truncated_at) << '\n';
        }
      }
      save_table(resolved, "comparison.csv", table.str());
    } else if (*info_cmd) {
      print_dump_info(dump_path, out);
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericalAbort& e) {
    err << "numerical abort: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const DumpError& e) {
    err << "dump error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return 1;
  }
  return kExitOk;
}

}  // namespace mdkit
