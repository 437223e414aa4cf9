#pragma once

#include <complex>
#include <vector>

#include "lht/calibration.hpp"
#include "lht/mpcore.hpp"

namespace lht {

// Execution policy for the data-parallel kernels.  Serial and Parallel
// produce bit-identical results: work items are independent and the final
// reduction runs in a fixed order either way.
enum class Exec { Serial, Parallel };

} // namespace lht

namespace lht::oracle {

struct QuadPolicy {
    int nodes = 8192;                                      // single integrals
    int nodes_j1 = 1024;                                   // base grid, double integral
    std::vector<double> r_values = {1.02, 1.01, 1.005, 1.0025};
};

enum class Kernel { Log1p, Identity, Ratio };

// integral of f(x) dF^c(x) over the Marchenko-Pastur law via the
// x = 1 + c - 2 sqrt(c) cos(theta) substitution and trapezoid quadrature
// with node-doubling refinement.
double mp_expectation(Kernel kernel, double c, const QuadPolicy& policy = {});

// Resolvent kernel 1/(x - z); combined with the point mass at zero this
// cross-checks the companion Stieltjes transform:
//   m(z) = -(1-c)/z + c * mp_expectation_resolvent(z, c).
std::complex<double> mp_expectation_resolvent(std::complex<double> z, double c,
                                              const QuadPolicy& policy = {});

// The three unit-circle contour integrals behind the log(1+x) constants,
// evaluated on a theta grid at each regularization radius r > 1 and
// extrapolated r -> 1 by polynomial extrapolation in (r - 1).
mp::SeriesConstants contour_series_U(double c, const QuadPolicy& policy = {},
                                     Exec exec = Exec::Parallel);

// Same for the x/(1+x) constants.
mp::SeriesConstants contour_series_V(double c, const QuadPolicy& policy = {},
                                     Exec exec = Exec::Parallel);

// Per-spike centering correction evaluated from the arctan representation
// of Im log m on the support; compares against mp::extra_terms at M = 1.
double extra_term_num(calib::StatKind f_kind, double c, const QuadPolicy& policy = {});

} // namespace lht::oracle
