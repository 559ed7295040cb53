#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

namespace phasesim {

/// Locale-independent decimal formatting with 17 significant digits, enough for
/// bit-faithful double round-trips.
std::string format_double(double value);

/// FNV-1a 64-bit hash of a byte string.
std::uint64_t fnv1a64(std::string_view bytes);

/// Hash rendered as a fixed-width hex string.
std::string hex_digest(std::uint64_t value);

/// Plain PGM (P2) grayscale image of a count grid, row-major, nx columns by nz
/// rows; counts are scaled linearly so the maximum maps to 255.
void write_pgm(std::ostream& out, const std::vector<long>& counts, int nx, int nz);

/// Current time as UTC ISO-8601 (e.g. 2024-05-01T12:00:00Z).
std::string iso8601_utc_now();

}  // namespace phasesim
