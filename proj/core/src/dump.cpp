#include "mdkit/dump.hpp"

#include <bit>
#include <cstring>
#include <fstream>

#include "json.hpp"

namespace mdkit {

namespace {

constexpr const char* kMagic = "MDKIT1 ";

double to_little(double v) {
  if constexpr (std::endian::native == std::endian::little) {
    return v;
  } else {
    std::uint64_t u;
    std::memcpy(&u, &v, sizeof u);
    u = __builtin_bswap64(u);
    std::memcpy(&v, &u, sizeof v);
    return v;
  }
}

}  // namespace

std::size_t DumpHeader::value_count() const {
  return static_cast<std::size_t>(components) * (is_complex ? 2 : 1) *
         static_cast<std::size_t>(n[0]) * n[1] * static_cast<std::size_t>(n[2]);
}

void write_dump(const std::filesystem::path& path, const DumpHeader& h,
                std::span<const double> payload) {
  if (payload.size() != h.value_count()) {
    throw DumpError("write_dump: payload has " + std::to_string(payload.size()) +
                    " values, header implies " + std::to_string(h.value_count()));
  }
  nlohmann::json j;
  j["name"] = h.name;
  j["components"] = h.components;
  j["complex"] = h.is_complex;
  j["n"] = h.n;
  j["bounds"] = nlohmann::json::array();
  for (const auto& b : h.bounds) j["bounds"].push_back({b.lower, b.upper});
  j["time"] = h.time;
  j["epsilon"] = h.epsilon;
  j["delta"] = h.delta;
  j["endianness"] = "little";

  std::ofstream out(path, std::ios::binary);
  if (!out) throw DumpError("cannot open " + path.string() + " for writing");
  out << kMagic << j.dump() << '\n';
  std::vector<double> buf(payload.begin(), payload.end());
  for (auto& v : buf) v = to_little(v);
  out.write(reinterpret_cast<const char*>(buf.data()),
            static_cast<std::streamsize>(buf.size() * sizeof(double)));
  if (!out) throw DumpError("write failed for " + path.string());
}

DumpRecord read_dump(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DumpError("cannot open " + path.string());
  std::string line;
  if (!std::getline(in, line) || line.rfind(kMagic, 0) != 0) {
    throw DumpError(path.string() + ": missing MDKIT1 header");
  }
  DumpRecord rec;
  try {
    const auto j = nlohmann::json::parse(line.substr(std::strlen(kMagic)));
    if (j.at("endianness").get<std::string>() != "little") {
      throw DumpError(path.string() + ": unsupported endianness");
    }
    auto& h = rec.header;
    h.name = j.at("name").get<std::string>();
    h.components = j.at("components").get<int>();
    h.is_complex = j.at("complex").get<bool>();
    h.n = j.at("n").get<std::array<int, 3>>();
    const auto& b = j.at("bounds");
    if (b.size() != 3) throw DumpError(path.string() + ": bounds must have three entries");
    for (int k = 0; k < 3; ++k) h.bounds[k] = {b[k].at(0).get<double>(), b[k].at(1).get<double>()};
    h.time = j.at("time").get<double>();
    h.epsilon = j.at("epsilon").get<double>();
    h.delta = j.at("delta").get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw DumpError(path.string() + ": bad header: " + e.what());
  }
  const std::size_t count = rec.header.value_count();
  rec.payload.resize(count);
  in.read(reinterpret_cast<char*>(rec.payload.data()),
          static_cast<std::streamsize>(count * sizeof(double)));
  if (static_cast<std::size_t>(in.gcount()) != count * sizeof(double)) {
    throw DumpError(path.string() + ": truncated payload");
  }
  if (in.peek() != std::char_traits<char>::eof()) {
    throw DumpError(path.string() + ": trailing bytes after payload");
  }
  for (auto& v : rec.payload) v = to_little(v);
  return rec;
}

DumpHeader dump_header(const std::string& name, const GridSpec& grid, int components,
                       bool is_complex, double time, double epsilon, double delta) {
  DumpHeader h;
  h.name = name;
  h.components = components;
  h.is_complex = is_complex;
  h.n = grid.n();
  h.bounds = grid.bounds();
  h.time = time;
  h.epsilon = epsilon;
  h.delta = delta;
  return h;
}

void write_spinor_dump(const std::filesystem::path& path, const std::string& name,
                       const SpinorField& psi, double epsilon, double delta) {
  const auto* raw = reinterpret_cast<const double*>(psi.data.data());
  write_dump(path, dump_header(name, psi.grid, 4, true, psi.time, epsilon, delta),
             std::span<const double>(raw, 2 * psi.data.size()));
}

void write_real_dump(const std::filesystem::path& path, const std::string& name,
                     const GridSpec& grid, const std::vector<const RealField*>& components,
                     double time, double epsilon, double delta) {
  const std::size_t n = grid.size();
  const std::size_t c = components.size();
  std::vector<double> buf(c * n);
  for (std::size_t k = 0; k < c; ++k) {
    if (components[k]->size() != n) throw DumpError("write_real_dump: size mismatch");
    for (std::size_t i = 0; i < n; ++i) buf[c * i + k] = (*components[k])[i];
  }
  write_dump(path, dump_header(name, grid, static_cast<int>(c), false, time, epsilon, delta), buf);
}

}  // namespace mdkit
