#include "eulspec/initial_data.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <iterator>
#include <numbers>
#include <random>
#include <sstream>
#include <vector>

#include "eulspec/errors.hpp"

namespace eulspec {
namespace {

template <typename Fn>
PhysicalField sample(const Grid& g, Fn&& fn) {
  PhysicalField f(g);
  const int n = g.n();
  for (int k = 0; k < n; ++k) {
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i < n; ++i) {
        f[g.physical_index(i, j, k)] = fn(g.coordinate(i), g.coordinate(j), g.coordinate(k));
      }
    }
  }
  return f;
}

double energy_of(const SpectralVector& v) {
  const Grid& g = v.grid();
  return 0.5 * g.volume() * (spectral_power(v[0]) + spectral_power(v[1]) + spectral_power(v[2]));
}

// ---- little-endian encoding ----

void put_u32(std::vector<unsigned char>& out, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}
void put_u64(std::vector<unsigned char>& out, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) out.push_back(static_cast<unsigned char>(v >> (8 * b)));
}
void put_f64(std::vector<unsigned char>& out, double v) { put_u64(out, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(const unsigned char* p) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(p[b]) << (8 * b);
  return v;
}
std::uint64_t get_u64(const unsigned char* p) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(p[b]) << (8 * b);
  return v;
}
double get_f64(const unsigned char* p) { return std::bit_cast<double>(get_u64(p)); }

void write_file(const std::filesystem::path& path, const char* magic, const std::array<const PhysicalField*, 3>& arrays,
                double t) {
  const Grid& g = arrays[0]->grid;
  const std::size_t npts = g.physical_size();
  std::vector<unsigned char> payload;
  payload.reserve(3 * npts * 8);
  for (const PhysicalField* f : arrays) {
    for (double x : f->values) put_f64(payload, x);
  }
  std::vector<unsigned char> header(magic, magic + 8);
  put_u32(header, kSnapshotVersion);
  put_u32(header, static_cast<std::uint32_t>(g.n()));
  put_f64(header, t);
  put_f64(header, g.box_length());
  put_u64(header, fnv1a64(payload.data(), payload.size()));

  std::ofstream os(path, std::ios::binary | std::ios::trunc);
  if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
  os.write(reinterpret_cast<const char*>(header.data()), static_cast<std::streamsize>(header.size()));
  os.write(reinterpret_cast<const char*>(payload.data()), static_cast<std::streamsize>(payload.size()));
  os.flush();
  if (!os) throw IoError("short write to '" + path.string() + "'");
}

struct RawFile {
  Grid grid;
  double t;
  std::array<std::vector<double>, 3> arrays;
};

RawFile read_file(const std::filesystem::path& path, const char* magic) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  const std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(is)), std::istreambuf_iterator<char>());
  if (bytes.size() < kSnapshotHeaderBytes) {
    throw FormatError("header", "file has " + std::to_string(bytes.size()) + " bytes, header needs 40");
  }
  if (std::memcmp(bytes.data(), magic, 8) != 0) {
    throw FormatError("magic", std::string("expected ") + magic);
  }
  const std::uint32_t version = get_u32(bytes.data() + 8);
  if (version != kSnapshotVersion) throw FormatError("version", "unsupported version " + std::to_string(version));
  const std::uint32_t n = get_u32(bytes.data() + 12);
  if (n < 8 || n > 1024 || (n & (n - 1)) != 0) throw FormatError("n", "invalid grid size " + std::to_string(n));
  const double t = get_f64(bytes.data() + 16);
  if (!std::isfinite(t)) throw FormatError("time", "non-finite time");
  const double box = get_f64(bytes.data() + 24);
  if (!(box > 0.0) || !std::isfinite(box)) throw FormatError("box_length", "must be positive and finite");
  const std::uint64_t checksum = get_u64(bytes.data() + 32);

  const std::size_t npts = static_cast<std::size_t>(n) * n * n;
  const std::size_t expected = kSnapshotHeaderBytes + 3 * npts * 8;
  if (bytes.size() != expected) {
    throw FormatError("n", "header n=" + std::to_string(n) + " implies " + std::to_string(expected) +
                               " bytes, file has " + std::to_string(bytes.size()));
  }
  const unsigned char* payload = bytes.data() + kSnapshotHeaderBytes;
  if (fnv1a64(payload, 3 * npts * 8) != checksum) throw FormatError("payload_checksum", "checksum mismatch");

  RawFile out{Grid(static_cast<int>(n), box), t, {}};
  for (int c = 0; c < 3; ++c) {
    out.arrays[c].resize(npts);
    for (std::size_t p = 0; p < npts; ++p) out.arrays[c][p] = get_f64(payload + 8 * (c * npts + p));
  }
  return out;
}

}  // namespace

SpectralVector taylor_green(const Grid& grid) {
  PhysicalVector v(sample(grid, [](double x, double y, double z) { return std::sin(x) * std::cos(y) * std::cos(z); }),
                   sample(grid, [](double x, double y, double z) { return -std::cos(x) * std::sin(y) * std::cos(z); }),
                   PhysicalField(grid));
  return fft_forward(v);
}

SpectralVector abc_flow(const Grid& grid, double a, double b, double c) {
  if (!std::isfinite(a) || !std::isfinite(b) || !std::isfinite(c)) {
    throw ConfigError("ABC coefficients must be finite");
  }
  PhysicalVector v(sample(grid, [&](double, double y, double z) { return a * std::sin(z) + c * std::cos(y); }),
                   sample(grid, [&](double x, double, double z) { return b * std::sin(x) + a * std::cos(z); }),
                   sample(grid, [&](double x, double y, double) { return c * std::sin(y) + b * std::cos(x); }));
  return fft_forward(v);
}

SpectralVector random_solenoidal(const Grid& grid, std::uint64_t seed, double peak_k, double slope,
                                 double amplitude) {
  const int n = grid.n();
  if (!(peak_k > 0.0) || !(3.0 * peak_k < n)) {
    throw ConfigError("random_solenoidal: peak_k must lie in (0, n/3)");
  }
  if (!(amplitude > 0.0) || !std::isfinite(amplitude)) throw ConfigError("random_solenoidal: amplitude must be > 0");
  if (!std::isfinite(slope)) throw ConfigError("random_solenoidal: slope must be finite");

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  SpectralVector v(grid);
  for (int mz = 0; mz < n; ++mz) {
    for (int my = 0; my < n; ++my) {
      for (int mx = 0; mx < grid.half_n(); ++mx) {
        const std::size_t idx = grid.spectral_index(mx, my, mz);
        // Draw for every mode so the stream layout is independent of the cutoff.
        std::array<Complex, 3> draw;
        for (auto& d : draw) {
          const double re = normal(rng);
          const double im = normal(rng);
          d = Complex(re, im);
        }
        if (is_dealiased_mode(grid, mx, my, mz)) continue;
        const double fx = grid.frequency(mx), fy = grid.frequency(my), fz = grid.frequency(mz);
        const double k = std::sqrt(fx * fx + fy * fy + fz * fz);
        if (k == 0.0) continue;
        const double shell = std::pow(k, slope) * std::exp(-(k / peak_k) * (k / peak_k));
        const double amp = std::sqrt(shell / (4.0 * std::numbers::pi * k * k));
        for (int c = 0; c < 3; ++c) v[c][idx] = amp * draw[c];
      }
    }
  }
  // A physical round trip makes the kx = 0 and kx = n/2 planes Hermitian.
  v = fft_forward(fft_inverse(v));
  dealias_23_inplace(v);
  leray_project_inplace(v);
  const double e = energy_of(v);
  if (!(e > 0.0)) throw ConfigError("random_solenoidal: generated field has zero energy");
  const double scale = std::sqrt(amplitude / e);
  for (auto& comp : v.comp) {
    for (auto& z : comp.modes) z *= scale;
  }
  return v;
}

SpectralVector make_initial(const Grid& grid, const InitSpec& spec, bool dealias) {
  return std::visit(
      [&](const auto& s) -> SpectralVector {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, TaylorGreenInit>) {
          return taylor_green(grid);
        } else if constexpr (std::is_same_v<T, AbcInit>) {
          return abc_flow(grid, s.a, s.b, s.c);
        } else if constexpr (std::is_same_v<T, RandomSolenoidalInit>) {
          return random_solenoidal(grid, s.seed, s.peak_k, s.slope, s.amplitude);
        } else {
          Snapshot snap = load_snapshot(s.path);
          if (!(snap.v.grid() == grid)) {
            throw ConfigError("snapshot '" + s.path.string() + "' has n=" + std::to_string(snap.v.grid().n()) +
                              ", config expects n=" + std::to_string(grid.n()));
          }
          SpectralVector v = fft_forward(snap.v);
          if (dealias) dealias_23_inplace(v);
          leray_project_inplace(v);
          return v;
        }
      },
      spec);
}

Classification classify_initial(const SpectralVector& v, double tolerance) {
  const SpectraField spectra = eigenvalues_sym3(deformation_tensor(velocity_gradient(v)));
  const double tol = tolerance >= 0.0 ? tolerance : default_class_tolerance(spectra);
  return classify_admissible(spectra, tol);
}

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size) {
  std::uint64_t h = 14695981039346656037ULL;
  for (std::size_t i = 0; i < size; ++i) {
    h ^= data[i];
    h *= 1099511628211ULL;
  }
  return h;
}

void write_snapshot(const std::filesystem::path& path, const PhysicalVector& v, double t) {
  write_file(path, kSnapshotMagic, {&v[0], &v[1], &v[2]}, t);
}

Snapshot load_snapshot(const std::filesystem::path& path) {
  RawFile raw = read_file(path, kSnapshotMagic);
  Snapshot s{PhysicalVector(raw.grid), raw.t};
  for (int c = 0; c < 3; ++c) s.v[c].values = std::move(raw.arrays[c]);
  return s;
}

void write_spectra_file(const std::filesystem::path& path, const SpectraField& spectra, double t) {
  write_file(path, kSpectraMagic, {&spectra.l1, &spectra.l2, &spectra.l3}, t);
}

SpectraField load_spectra_file(const std::filesystem::path& path) {
  RawFile raw = read_file(path, kSpectraMagic);
  SpectraField s(raw.grid);
  s.l1.values = std::move(raw.arrays[0]);
  s.l2.values = std::move(raw.arrays[1]);
  s.l3.values = std::move(raw.arrays[2]);
  return s;
}

std::string peek_magic(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open '" + path.string() + "'");
  char buf[8];
  is.read(buf, 8);
  if (is.gcount() != 8) return {};
  return std::string(buf, 8);
}

}  // namespace eulspec
