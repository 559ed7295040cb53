#include "phasesim/quadrature.hpp"

#include <stdexcept>

namespace phasesim {

double integrate_2d(const std::function<double(double, double)>& f, const Rect& domain, int nx,
                    int nz) {
  if (nx <= 0 || nz <= 0) throw std::invalid_argument("integrate_2d: grid must be positive");
  const double hx = domain.width() / nx;
  const double hz = domain.height() / nz;
  double sum = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double x = domain.x_min + (i + 0.5) * hx;
    double row = 0.0;
    for (int j = 0; j < nz; ++j) {
      const double z = domain.z_min + (j + 0.5) * hz;
      row += f(x, z);
    }
    sum += row;
  }
  return sum * hx * hz;
}

std::complex<double> integrate_2d_complex(
    const std::function<std::complex<double>(double, double)>& f, const Rect& domain, int nx,
    int nz) {
  if (nx <= 0 || nz <= 0) throw std::invalid_argument("integrate_2d_complex: grid must be positive");
  const double hx = domain.width() / nx;
  const double hz = domain.height() / nz;
  std::complex<double> sum = 0.0;
  for (int i = 0; i < nx; ++i) {
    const double x = domain.x_min + (i + 0.5) * hx;
    std::complex<double> row = 0.0;
    for (int j = 0; j < nz; ++j) {
      const double z = domain.z_min + (j + 0.5) * hz;
      row += f(x, z);
    }
    sum += row;
  }
  return sum * (hx * hz);
}

double integrate_1d(const std::function<double(double)>& f, double lo, double hi, int n) {
  if (n <= 0) throw std::invalid_argument("integrate_1d: grid must be positive");
  const double h = (hi - lo) / n;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) {
    sum += f(lo + (i + 0.5) * h);
  }
  return sum * h;
}

}  // namespace phasesim
