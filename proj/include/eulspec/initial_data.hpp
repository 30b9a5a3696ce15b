#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>

#include "eulspec/deformation.hpp"
#include "eulspec/field.hpp"

namespace eulspec {

struct TaylorGreenInit {};

struct AbcInit {
  double a = 1.0;
  double b = 1.0;
  double c = 1.0;
};

struct RandomSolenoidalInit {
  std::uint64_t seed = 0;
  double peak_k = 4.0;
  double slope = 4.0;
  double amplitude = 1.0;
};

struct FromFileInit {
  std::filesystem::path path;
};

using InitSpec = std::variant<TaylorGreenInit, AbcInit, RandomSolenoidalInit, FromFileInit>;

/// v = (sin x cos y cos z, -cos x sin y cos z, 0).
SpectralVector taylor_green(const Grid& grid);

/// v = (A sin z + C cos y, B sin x + A cos z, C sin y + B cos x); curl v = v.
SpectralVector abc_flow(const Grid& grid, double a, double b, double c);

/// Random solenoidal field with shell spectrum ~ k^slope exp(-(k/peak_k)^2),
/// dealiased, projected and rescaled so that its energy equals amplitude.
SpectralVector random_solenoidal(const Grid& grid, std::uint64_t seed, double peak_k, double slope,
                                 double amplitude);

/// Builds the initial field. Loaded fields are Leray projected and, when
/// dealias is set, truncated to the two-thirds cube.
SpectralVector make_initial(const Grid& grid, const InitSpec& spec, bool dealias = true);

/// v -> S -> eigenvalues -> classify. tolerance < 0 selects the default.
Classification classify_initial(const SpectralVector& v, double tolerance = -1.0);

// ---- binary snapshot format -------------------------------------------------
// Little-endian. Header: magic "EULSPEC1", u32 version = 1, u32 n, f64 time,
// f64 box_length, u64 FNV-1a checksum of the payload. Payload: v1, v2, v3 as
// n^3 f64 arrays each, x fastest.

inline constexpr char kSnapshotMagic[9] = "EULSPEC1";
// Spectra files share the layout; the payload holds lambda1, lambda2, lambda3.
inline constexpr char kSpectraMagic[9] = "EULLAMB1";
inline constexpr std::uint32_t kSnapshotVersion = 1;
inline constexpr std::size_t kSnapshotHeaderBytes = 40;

struct Snapshot {
  PhysicalVector v;
  double t = 0.0;
};

std::uint64_t fnv1a64(const unsigned char* data, std::size_t size);

void write_snapshot(const std::filesystem::path& path, const PhysicalVector& v, double t);
Snapshot load_snapshot(const std::filesystem::path& path);

void write_spectra_file(const std::filesystem::path& path, const SpectraField& spectra, double t);
SpectraField load_spectra_file(const std::filesystem::path& path);

/// Reads the 8 magic bytes, or an empty string for short files.
std::string peek_magic(const std::filesystem::path& path);

}  // namespace eulspec
