#pragma once

#include <complex>
#include <functional>

#include "phasesim/geometry.hpp"

namespace phasesim {

/// Composite midpoint rule on a fixed nx-by-nz product grid. The step is
/// width/nx by height/nz; all quadrature tolerances in this project are quoted
/// against this rule at the grid sizes used by the callers.
double integrate_2d(const std::function<double(double, double)>& f, const Rect& domain, int nx,
                    int nz);

std::complex<double> integrate_2d_complex(
    const std::function<std::complex<double>(double, double)>& f, const Rect& domain, int nx,
    int nz);

/// Composite midpoint rule in one dimension.
double integrate_1d(const std::function<double(double)>& f, double lo, double hi, int n);

}  // namespace phasesim
