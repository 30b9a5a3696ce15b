#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "eulspec/diagnostics.hpp"
#include "eulspec/errors.hpp"
#include "eulspec/initial_data.hpp"
#include "test_util.hpp"

using namespace eulspec;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

fs::path temp_path(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "eulspec_test_initial_data";
  fs::create_directories(dir);
  return dir / name;
}

std::vector<char> read_bytes(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

void write_bytes(const fs::path& p, const std::vector<char>& b) {
  std::ofstream os(p, std::ios::binary | std::ios::trunc);
  os.write(b.data(), static_cast<std::streamsize>(b.size()));
}

std::string format_error_field(const fs::path& p) {
  try {
    (void)load_snapshot(p);
  } catch (const FormatError& e) {
    return e.field();
  }
  return "";
}

}  // namespace

TEST_CASE("generators produce solenoidal fields") {
  const Grid g(32);
  CHECK(divergence_ratio(taylor_green(g)) < 1e-12);
  CHECK(divergence_ratio(abc_flow(g, 1, 0.5, 0.2)) < 1e-12);
  CHECK(divergence_ratio(random_solenoidal(g, 7, 4, 4, 1)) < 1e-12);
}

TEST_CASE("generator energies") {
  const Grid g(32);
  CHECK(energy(fft_inverse(taylor_green(g))) == doctest::Approx(kPi * kPi * kPi).epsilon(1e-13));
  CHECK(energy(fft_inverse(abc_flow(g, 1, 0, 0))) == doctest::Approx(4 * kPi * kPi * kPi).epsilon(1e-13));
  for (double amp : {1.0, 0.25, 10.0}) {
    CHECK(std::abs(energy(fft_inverse(random_solenoidal(g, 3, 4, 4, amp))) - amp) < 1e-12 * std::max(1.0, amp));
  }
}

TEST_CASE("ABC flow is Beltrami") {
  const Grid g(16);
  const SpectralVector v = abc_flow(g, 1, 1, 1);
  const PhysicalVector a = fft_inverse(v), w = fft_inverse(curl(v));
  for (int c = 0; c < 3; ++c) CHECK(testutil::max_abs_diff(a[c], w[c]) < 1e-12);
}

TEST_CASE("random generator is deterministic per seed") {
  const Grid g(16);
  const SpectralVector a = random_solenoidal(g, 42, 3, 4, 1);
  const SpectralVector b = random_solenoidal(g, 42, 3, 4, 1);
  const SpectralVector c = random_solenoidal(g, 43, 3, 4, 1);
  bool same = true, differs = false;
  for (int k = 0; k < 3; ++k) {
    same = same && std::memcmp(a[k].modes.data(), b[k].modes.data(), a[k].modes.size() * sizeof(Complex)) == 0;
    differs = differs || std::memcmp(a[k].modes.data(), c[k].modes.data(), a[k].modes.size() * sizeof(Complex)) != 0;
  }
  CHECK(same);
  CHECK(differs);
}

TEST_CASE("random fields are band limited") {
  const Grid g(32);
  const SpectralVector v = random_solenoidal(g, 1, 4, 4, 1);
  double outside = 0.0;
  for (int mz = 0; mz < g.n(); ++mz)
    for (int my = 0; my < g.n(); ++my)
      for (int mx = 0; mx < g.half_n(); ++mx)
        if (is_dealiased_mode(g, mx, my, mz))
          for (int c = 0; c < 3; ++c) outside = std::max(outside, std::abs(v[c][g.spectral_index(mx, my, mz)]));
  CHECK(outside == 0.0);
}

TEST_CASE("snapshot round trip") {
  const Grid g(16);
  const PhysicalVector v = fft_inverse(taylor_green(g));
  const fs::path p = temp_path("tg.bin");
  write_snapshot(p, v, 0.25);
  CHECK(fs::file_size(p) == kSnapshotHeaderBytes + 3 * g.physical_size() * sizeof(double));
  CHECK(peek_magic(p) == "EULSPEC1");
  const Snapshot s = load_snapshot(p);
  CHECK(s.t == 0.25);
  for (int c = 0; c < 3; ++c) {
    CHECK(std::memcmp(s.v[c].values.data(), v[c].values.data(), v[c].values.size() * sizeof(double)) == 0);
  }
}

TEST_CASE("corrupt snapshots name the offending field") {
  const Grid g(8);
  const fs::path good = temp_path("good.bin");
  write_snapshot(good, fft_inverse(taylor_green(g)), 0.0);
  const std::vector<char> bytes = read_bytes(good);
  const fs::path bad = temp_path("bad.bin");

  SUBCASE("truncated payload") {
    write_bytes(bad, std::vector<char>(bytes.begin(), bytes.end() - 8));
    CHECK(format_error_field(bad) == "n");
  }
  SUBCASE("truncated header") {
    write_bytes(bad, std::vector<char>(bytes.begin(), bytes.begin() + 20));
    CHECK(format_error_field(bad) == "header");
  }
  SUBCASE("wrong magic") {
    auto b = bytes;
    b[0] = 'X';
    write_bytes(bad, b);
    CHECK(format_error_field(bad) == "magic");
  }
  SUBCASE("wrong version") {
    auto b = bytes;
    b[8] = 2;
    write_bytes(bad, b);
    CHECK(format_error_field(bad) == "version");
  }
  SUBCASE("header n disagrees with the payload length") {
    auto b = bytes;
    b[12] = 16;
    write_bytes(bad, b);
    CHECK(format_error_field(bad) == "n");
  }
  SUBCASE("flipped payload bit") {
    auto b = bytes;
    b[kSnapshotHeaderBytes + 100] ^= 1;
    write_bytes(bad, b);
    CHECK(format_error_field(bad) == "payload_checksum");
  }
  SUBCASE("missing file") {
    CHECK_THROWS_AS(load_snapshot(temp_path("does_not_exist.bin")), IoError);
  }
}

TEST_CASE("spectra files") {
  const Grid g(8);
  SpectraField s(g);
  for (std::size_t p = 0; p < g.physical_size(); ++p) {
    s.l1[p] = 1.0;
    s.l2[p] = 0.1;
    s.l3[p] = -1.1;
  }
  const fs::path p = temp_path("spectra.bin");
  write_spectra_file(p, s, 0.0);
  CHECK(peek_magic(p) == "EULLAMB1");
  const SpectraField back = load_spectra_file(p);
  CHECK(back.l2.values == s.l2.values);
  CHECK_THROWS_AS(load_snapshot(p), FormatError);
}

TEST_CASE("initial data from a file") {
  const Grid g(16);
  const fs::path p = temp_path("abc.bin");
  write_snapshot(p, fft_inverse(abc_flow(g, 1, 1, 1)), 0.0);
  const SpectralVector v = make_initial(g, FromFileInit{p});
  CHECK(energy(fft_inverse(v)) == doctest::Approx(12 * kPi * kPi * kPi).epsilon(1e-13));
  CHECK_THROWS(make_initial(Grid(32), FromFileInit{p}));
}

TEST_CASE("FNV-1a reference values") {
  const unsigned char empty[1] = {0};
  CHECK(fnv1a64(empty, 0) == 0xcbf29ce484222325ULL);
  const unsigned char a[1] = {'a'};
  CHECK(fnv1a64(a, 1) == 0xaf63dc4c8601ec8cULL);
}
