#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "mdkit/field_state.hpp"

namespace mdkit {

/// Field dump: one text line "MDKIT1 <json>\n" followed by raw little-endian
/// float64 values, (re, im) interleaved for complex data, components fastest,
/// then x3, x2 and x1 slowest.
struct DumpHeader {
  std::string name;
  int components = 1;
  bool is_complex = false;
  std::array<int, 3> n{1, 1, 1};
  std::array<Interval, 3> bounds{};
  double time = 0.0;
  double epsilon = 1.0;
  double delta = 1.0;

  std::size_t value_count() const;
};

struct DumpRecord {
  DumpHeader header;
  std::vector<double> payload;
};

class DumpError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

void write_dump(const std::filesystem::path& path, const DumpHeader& header,
                std::span<const double> payload);
DumpRecord read_dump(const std::filesystem::path& path);

DumpHeader dump_header(const std::string& name, const GridSpec& grid, int components,
                       bool is_complex, double time, double epsilon, double delta);
void write_spinor_dump(const std::filesystem::path& path, const std::string& name,
                       const SpinorField& psi, double epsilon, double delta);
/// Real multi-component field from separate component arrays.
void write_real_dump(const std::filesystem::path& path, const std::string& name,
                     const GridSpec& grid, const std::vector<const RealField*>& components,
                     double time, double epsilon, double delta);

}  // namespace mdkit
