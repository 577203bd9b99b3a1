#pragma once

#include <optional>
#include <string>
#include <vector>

#include "mdkit/config.hpp"
#include "mdkit/fft.hpp"
#include "mdkit/field_state.hpp"
#include "mdkit/md_solver.hpp"
#include "mdkit/sp_solver.hpp"
#include "mdkit/wkb_solver.hpp"

namespace mdkit {

enum class SolverKind { md, wkb, sp };

SolverKind parse_solver_kind(std::string_view name);
std::string_view to_string(SolverKind k);

/// Everything a run needs, decoded from a resolved Config.
struct Experiment {
  std::string preset;
  SolverKind solver = SolverKind::md;
  SimConfig sim;
  PotentialInit init_v = PotentialInit::zero;
  PotentialInit init_a = PotentialInit::zero;
  double gauge_warn_fraction = 0.05;

  std::string init_kind;  // plane_wave | gaussian
  std::array<int, 3> mode{1, 2, 3};
  bool allow_aliased = false;
  Vec3 center{0.0, 0.0, 0.0};
  double width = 1.0 / 16.0;
  Spinor chi{};
  std::string phase;      // zero | example32
  std::string amplitude;  // constant | polarized

  WkbOptions wkb;
  SpOptions sp;

  std::string output_dir;
  std::vector<double> dump_times;
  long csv_stride = 1;
  std::optional<double> slice_x3;
  int threads = 0;

  bool has_exact_solution() const { return init_kind == "plane_wave"; }
  Vec3 plane_wave_xi() const { return plane_wave_xi_; }

  Vec3 plane_wave_xi_{};
};

const std::vector<std::string>& preset_names();
/// Defaults shared by every preset, with every known key present.
Config base_defaults();
/// Keys a preset sets on top of base_defaults().
Config preset_overrides(const std::string& name);
/// base_defaults <- preset_overrides(user's preset.name) <- user.
Config resolve_config(const Config& user);
/// Throws ConfigError naming the offending key.
Experiment make_experiment(const Config& resolved);

/// (1/40)(1 + cos 2 pi x1)(1 + cos 2 pi x2).
double example32_phase(const Vec3& x);
RealField initial_phase(const Experiment& e);
SpinorField initial_spinor(const Experiment& e, const Fft& fft);

struct WkbInitial {
  RealField phi_plus;
  RealField phi_minus;
  SpinorField u_plus;
  SpinorField u_minus;
};
/// Both phases start at phi_I; u+- = Pi+-(grad phi_I) applied to the amplitude.
WkbInitial wkb_initial(const Experiment& e, const Fft& fft);

}  // namespace mdkit
