#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mdkit/config.hpp"
#include "mdkit/diagnostics.hpp"
#include "mdkit/presets.hpp"

namespace mdkit {

/// Caustic or non-finite values during a run. Outputs up to that point are
/// already on disk when this is thrown.
class NumericalAbort : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumerical = 3;

struct RunOptions {
  /// Write dumps, CSV and manifest. Off for sweeps.
  bool write_outputs = true;
  /// Throw NumericalAbort on caustic / NaN. Off returns with aborted set.
  bool throw_on_abort = true;
  std::ostream* log = nullptr;
};

struct RunResult {
  TimeSeries series;
  std::vector<std::string> warnings;
  std::vector<std::filesystem::path> files;
  bool aborted = false;
  std::string abort_reason;
  double final_time = 0.0;
  /// Final l2_rel / linf_abs against the exact solution when one exists.
  std::optional<ErrorNorms> final_error;
};

/// Runs one resolved configuration. Files land in the experiment's output.dir.
RunResult run(const Config& resolved, const RunOptions& options = {});

enum class SweepAxis { space, time };
SweepAxis parse_sweep_axis(std::string_view name);

struct ConvergenceRow {
  double level = 0.0;
  double l2_error = 0.0;
  double linf_error = 0.0;
  std::optional<double> order;
};

/// Error at t_final against the exact plane wave for each grid spacing
/// (space) or time step (time). Only exact_plane_wave style data qualifies.
std::vector<ConvergenceRow> convergence_sweep(const Config& resolved, SweepAxis axis,
                                              const std::vector<double>& levels,
                                              bool parallel_levels = false);

enum class ComparePair { md_vs_wkb, md_vs_sp };
ComparePair parse_compare_pair(std::string_view name);

struct ComparisonRow {
  double value = 0.0;
  /// md_vs_wkb: sup_t relative l2; md_vs_sp: sup_t projected difference.
  double difference = 0.0;
  /// md_vs_wkb: sup_t max-norm difference; md_vs_sp: unused (NaN).
  double sup_difference = 0.0;
  /// Set when the WKB run hit a caustic before t_final.
  std::optional<double> truncated_at;
  /// Largest relative charge drift of the MD run over the window.
  double md_charge_drift = 0.0;
};

std::vector<ComparisonRow> compare_regimes(const Config& resolved, ComparePair pair,
                                           const std::vector<double>& values,
                                           bool parallel_levels = false);

void write_convergence_table(std::ostream& os, SweepAxis axis,
                             const std::vector<ConvergenceRow>& rows);
void write_comparison_table(std::ostream& os, ComparePair pair,
                            const std::vector<ComparisonRow>& rows);

}  // namespace mdkit
