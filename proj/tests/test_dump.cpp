#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <json.hpp>

#include "mdkit/dump.hpp"
#include "test_support.hpp"

using namespace mdkit;
namespace fs = std::filesystem;

namespace {

fs::path temp_file(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "mdkit_dump_tests";
  fs::create_directories(dir);
  return dir / name;
}

std::string read_all(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

}  // namespace

TEST(Dump, ZeroFieldOnTinyGrid) {
  const GridSpec g = make_cube(-0.5, 0.5, 2);
  const fs::path p = temp_file("zero.mdk");
  write_spinor_dump(p, "psi", SpinorField(g, 0.25), 0.01, 1.0);
  const DumpRecord r = read_dump(p);
  EXPECT_EQ(r.header.name, "psi");
  EXPECT_EQ(r.header.components, 4);
  EXPECT_TRUE(r.header.is_complex);
  EXPECT_EQ(r.header.n, (std::array<int, 3>{2, 2, 2}));
  EXPECT_EQ(r.header.time, 0.25);
  EXPECT_EQ(r.header.epsilon, 0.01);
  ASSERT_EQ(r.payload.size(), 64u);
  for (double v : r.payload) EXPECT_EQ(v, 0.0);
}

TEST(Dump, HeaderLineIsMagicPlusJson) {
  const GridSpec g = make_grid({Interval{0, 1}, Interval{-1, 1}, Interval{0, 2}}, {2, 4, 2});
  const fs::path p = temp_file("header.mdk");
  const RealField v = testutil::random_real_field(g, 1);
  write_real_dump(p, "v", g, {&v}, 0.5, 1.0, 0.1);
  const std::string bytes = read_all(p);
  ASSERT_EQ(bytes.rfind("MDKIT1 ", 0), 0u);
  const auto nl = bytes.find('\n');
  const auto j = nlohmann::json::parse(bytes.substr(7, nl - 7));
  EXPECT_EQ(j["name"], "v");
  EXPECT_EQ(j["components"], 1);
  EXPECT_EQ(j["complex"], false);
  EXPECT_EQ(j["n"], nlohmann::json::array({2, 4, 2}));
  EXPECT_EQ(j["bounds"][1][0], -1.0);
  EXPECT_EQ(j["endianness"], "little");
  EXPECT_EQ(j["delta"], 0.1);
  EXPECT_EQ(bytes.size() - nl - 1, g.size() * sizeof(double));
  double first;
  std::memcpy(&first, bytes.data() + nl + 1, sizeof first);
  EXPECT_EQ(first, v[0]);
}

TEST(Dump, SpinorLayoutIsComponentFastestReImInterleaved) {
  const GridSpec g = make_cube(-0.5, 0.5, 2);
  SpinorField psi(g);
  psi.at(1, 2) = Complex(3.0, -4.0);
  const fs::path p = temp_file("layout.mdk");
  write_spinor_dump(p, "psi", psi, 1.0, 1.0);
  const DumpRecord r = read_dump(p);
  EXPECT_EQ(r.payload[2 * (4 * 1 + 2)], 3.0);
  EXPECT_EQ(r.payload[2 * (4 * 1 + 2) + 1], -4.0);
}

TEST(Dump, RoundTripPreservesEveryBit) {
  const GridSpec g = make_cube(-0.5, 0.5, 4);
  for (unsigned seed = 0; seed < 20; ++seed) {
    SpinorField psi = testutil::random_spinor_field(g, seed, std::pow(10.0, static_cast<int>(seed) - 10));
    psi.time = 0.1 * seed;
    const fs::path p = temp_file("rt" + std::to_string(seed) + ".mdk");
    write_spinor_dump(p, "psi", psi, 0.5, 2.0);
    const DumpRecord r = read_dump(p);
    ASSERT_EQ(r.payload.size(), 2 * psi.data.size());
    ASSERT_EQ(std::memcmp(r.payload.data(), psi.data.data(), r.payload.size() * sizeof(double)), 0);
    EXPECT_EQ(r.header.time, psi.time);
  }
}

TEST(Dump, RejectsCorruptFiles) {
  const GridSpec g = make_cube(-0.5, 0.5, 2);
  const fs::path good = temp_file("good.mdk");
  write_spinor_dump(good, "psi", SpinorField(g), 1.0, 1.0);
  const std::string bytes = read_all(good);

  const fs::path magic = temp_file("magic.mdk");
  std::ofstream(magic, std::ios::binary) << "MDKIT2" << bytes.substr(6);
  EXPECT_THROW(read_dump(magic), DumpError);

  const fs::path truncated = temp_file("trunc.mdk");
  std::ofstream(truncated, std::ios::binary) << bytes.substr(0, bytes.size() - 8);
  EXPECT_THROW(read_dump(truncated), DumpError);

  const fs::path trailing = temp_file("trail.mdk");
  std::ofstream(trailing, std::ios::binary) << bytes << "x";
  EXPECT_THROW(read_dump(trailing), DumpError);

  EXPECT_THROW(read_dump(temp_file("missing.mdk")), DumpError);
  const std::vector<double> few(3);
  EXPECT_THROW(write_dump(temp_file("bad.mdk"), dump_header("x", g, 1, false, 0, 1, 1), few), DumpError);
}
