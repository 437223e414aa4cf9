#pragma once

#include <complex>
#include <stdexcept>

namespace lht {

// Thrown when an iterative evaluation (series truncation, quadrature
// refinement, extrapolation) fails to reach its tolerance.
class convergence_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

} // namespace lht

namespace lht::mp {

// Dimensional regime p/n with M spiked directions removed from the bulk.
struct AspectRatio {
    int p = 0;
    int n = 0;
    int M = 0;

    AspectRatio(int p_, int n_, int M_ = 0);

    double c_n() const { return static_cast<double>(p) / n; }
    double c_nM() const { return static_cast<double>(p - M) / n; }
};

struct SeriesPolicy {
    double tol = 1e-14;
    int k_max = 500;
};

struct SeriesConstants {
    double i1 = 0.0;
    double i2 = 0.0;
    double j1 = 0.0;
};

struct ExtraTerms {
    double u = 0.0;
    double w = 0.0;
    double v = 0.0;
};

struct ThetaNu {
    double theta = 0.0;
    double nu = 0.0;
};

// (c + sqrt(c^2 + 4)) / 2; equals 1 at c = 0
double rho(double c);

// 4c / (2 + c + sqrt(c^2 + 4))^2; satisfies sqrt(ctilde) = sqrt(c)/(1 + rho)
double ctilde(double c);

// Mean of log(1 + x) under the Marchenko-Pastur law with ratio c
double ct_value(double c);

// Mean of x/(1 + x) under the Marchenko-Pastur law with ratio c
double v_center(double c);

// Limit location of the sample eigenvalue spawned by a population spike
// alpha > 1 + sqrt(c); identity bulk gives alpha * (1 + c/(alpha - 1)).
double phi(double alpha, double c);

// Inverse of phi on the supercritical branch: the larger root of
// a^2 - (lambda + 1 - c) a + lambda = 0, valid for lambda > (1 + sqrt(c))^2.
double phi_inverse(double lambda, double c);

// Companion Stieltjes transform of the MP law with ratio c, the branch with
// m(z) ~ -1/z at infinity.  z must stay off the support interval.
std::complex<double> mp_stieltjes(std::complex<double> z, double c);

// theta = phi^2 * m'(phi), nu = phi^2 * m(phi)^2, evaluated analytically at
// the spike location phi(alpha, c); both tend to 1 as alpha -> infinity.
ThetaNu theta_nu(double alpha, double c);

// Mean/variance constants for the log(1+x) statistic at ratio c.
// i2 follows the printed Taylor series; i1 and j1 are assembled from the
// Fourier coefficients of log(1 + |1 + sqrt(c) z|^2) on the unit circle,
// which the contour representations reduce to (see contour oracle).
SeriesConstants series_constants_U(double c, SeriesPolicy policy = {});

// Same constants for the x/(1+x) statistic.
SeriesConstants series_constants_V(double c, SeriesPolicy policy = {});

// Per-model spike-count corrections to the three centering terms:
// (M log(1 - sqrt(ctilde*c)), -M c, -M(c-2)/(2(1+rho)(1-ctilde)) - M/2).
ExtraTerms extra_terms(double c, int M);

} // namespace lht::mp
