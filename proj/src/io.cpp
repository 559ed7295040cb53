#include "phasesim/io.hpp"

#include <algorithm>
#include <cstdio>
#include <ctime>
#include <ostream>
#include <stdexcept>

namespace phasesim {

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ull;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ull;
  }
  return hash;
}

std::string hex_digest(std::uint64_t value) {
  char buffer[20];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(value));
  return buffer;
}

void write_pgm(std::ostream& out, const std::vector<long>& counts, int nx, int nz) {
  if (nx <= 0 || nz <= 0 || counts.size() != static_cast<std::size_t>(nx) * nz) {
    throw std::invalid_argument("write_pgm: grid size mismatch");
  }
  const long max_count = std::max(1L, *std::max_element(counts.begin(), counts.end()));
  out << "P2\n" << nx << ' ' << nz << "\n255\n";
  for (int row = 0; row < nz; ++row) {
    for (int col = 0; col < nx; ++col) {
      const long c = counts[static_cast<std::size_t>(row) * nx + col];
      out << (255L * c) / max_count;
      out << (col + 1 == nx ? '\n' : ' ');
    }
  }
}

std::string iso8601_utc_now() {
  const std::time_t now = std::time(nullptr);
  std::tm utc{};
  gmtime_r(&now, &utc);
  char buffer[32];
  std::strftime(buffer, sizeof buffer, "%Y-%m-%dT%H:%M:%SZ", &utc);
  return buffer;
}

}  // namespace phasesim
