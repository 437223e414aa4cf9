#include "lht/mpcore.hpp"

#include <cmath>

namespace lht::mp {

AspectRatio::AspectRatio(int p_, int n_, int M_) : p(p_), n(n_), M(M_) {
    if (p < 2 || n < 2) throw std::domain_error("AspectRatio: need p, n >= 2");
    if (M < 0) throw std::domain_error("AspectRatio: M must be non-negative");
    if (M >= p || M >= n) throw std::domain_error("AspectRatio: need M < p and M < n");
    if (p >= n) throw std::domain_error("AspectRatio: need c_n = p/n < 1");
}

double rho(double c) {
    if (c < 0.0) throw std::domain_error("rho: c must be non-negative");
    return 0.5 * (c + std::sqrt(c * c + 4.0));
}

double ctilde(double c) {
    if (c < 0.0) throw std::domain_error("ctilde: c must be non-negative");
    const double s = 2.0 + c + std::sqrt(c * c + 4.0);
    return 4.0 * c / (s * s);
}

double ct_value(double c) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("ct_value: c must lie in (0,1)");
    const double r = rho(c);
    const double ct = ctilde(c);
    const double sc = std::sqrt(c);
    const double sq = std::sqrt(ct * c);
    const double num = -(sc - 1.0 / sc) * (sc - 1.0 / sc) * (std::log1p(-sq) + sq) -
                       std::sqrt(ct) * (sc - sc * c);
    return std::log1p(r) + num / (1.0 - c);
}

double v_center(double c) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("v_center: c must lie in (0,1)");
    return 1.0 / (1.0 + rho(c));
}

double phi(double alpha, double c) {
    if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("phi: c must lie in [0,1)");
    if (!(alpha > 1.0 + std::sqrt(c)))
        throw std::domain_error("phi: spike alpha must exceed 1 + sqrt(c) (supercritical)");
    return alpha + c * alpha / (alpha - 1.0);
}

double phi_inverse(double lambda, double c) {
    if (!(c >= 0.0 && c < 1.0)) throw std::domain_error("phi_inverse: c must lie in [0,1)");
    const double edge = (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
    if (!(lambda > edge))
        throw std::domain_error("phi_inverse: lambda must exceed the bulk edge (1+sqrt(c))^2");
    const double b = lambda + 1.0 - c;
    const double disc = b * b - 4.0 * lambda;
    return 0.5 * (b + std::sqrt(disc));
}

std::complex<double> mp_stieltjes(std::complex<double> z, double c) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("mp_stieltjes: c must lie in (0,1)");
    const double a_edge = (1.0 - std::sqrt(c)) * (1.0 - std::sqrt(c));
    const double b_edge = (1.0 + std::sqrt(c)) * (1.0 + std::sqrt(c));
    const double tol = 1e-12 * std::max(1.0, std::abs(z));
    if (std::abs(z.imag()) <= tol && z.real() >= a_edge - tol && z.real() <= b_edge + tol)
        throw std::domain_error("mp_stieltjes: z lies on the support interval");

    const std::complex<double> d = z - (1.0 + c);
    std::complex<double> w = std::sqrt(d * d - 4.0 * c);
    // branch with m ~ -1/z at infinity: w must point along d = z - 1 - c
    const double align = (std::conj(d) * w).real();
    if (align < 0.0 || (align == 0.0 && (std::conj(d) * w).imag() < 0.0)) w = -w;
    return (-(z + 1.0 - c) + w) / (2.0 * z);
}

ThetaNu theta_nu(double alpha, double c) {
    const double f = phi(alpha, c); // validates supercriticality
    const double d = f - 1.0 - c;
    const double sd = std::sqrt(d * d - 4.0 * c);
    const double m = (-(f + 1.0 - c) + sd) / (2.0 * f);
    // implicit derivative of z m^2 + (z+1-c) m + 1 = 0, with 2zm + z+1-c = sd
    const double mprime = -m * (m + 1.0) / sd;
    ThetaNu out;
    out.theta = f * f * mprime;
    out.nu = f * f * m * m;
    return out;
}

namespace {

// sum_{j>=1} x^j / j  (= -log(1-x)) by term recurrence
double log_series(double x, const SeriesPolicy& policy) {
    double term = x;
    double sum = 0.0;
    for (int j = 1; j <= policy.k_max; ++j) {
        sum += term;
        if (std::abs(term) < policy.tol) return sum;
        term *= x * static_cast<double>(j) / (j + 1);
    }
    throw convergence_error("series: log-type sum did not reach tolerance");
}

// sum_{j>=1} j x^j  (= x/(1-x)^2) by term recurrence
double jx_series(double x, const SeriesPolicy& policy) {
    double term = x;
    double sum = 0.0;
    for (int j = 1; j <= policy.k_max; ++j) {
        sum += term;
        if (std::abs(term) < policy.tol) return sum;
        term *= x * static_cast<double>(j + 1) / j;
    }
    throw convergence_error("series: j x^j sum did not reach tolerance");
}

} // namespace

SeriesConstants series_constants_U(double c, SeriesPolicy policy) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("series_constants_U: c must lie in (0,1)");
    const double q = c / ((2.0 + c) * (2.0 + c));
    const double ct = ctilde(c);

    // I2: - sum_{k>=1} q^k (2k-1)! / ((k-1)!(k+1)!)
    double term = 0.5 * q;
    double s2 = 0.0;
    int k = 1;
    for (; k <= policy.k_max; ++k) {
        s2 += term;
        if (std::abs(term) < policy.tol) break;
        term *= q * (2.0 * k + 1.0) * (2.0 * k) / (static_cast<double>(k) * (k + 2));
    }
    if (k > policy.k_max)
        throw convergence_error("series_constants_U: I2 sum did not reach tolerance");

    // The unit-circle representations reduce, via the Fourier coefficients
    // a_j = ctilde^{j/2}/j of log(1 + |1 + sqrt(c) z|^2), to
    //   I1 = sum_{j even} (-1)^{j+1} a_j = -(1/2) sum_j ctilde^j / j,
    //   J1 = sum_j j a_j^2       =        sum_j ctilde^j / j.
    const double slog = log_series(ct, policy);
    SeriesConstants out;
    out.i1 = -0.5 * slog;
    out.i2 = -s2;
    out.j1 = slog;
    return out;
}

SeriesConstants series_constants_V(double c, SeriesPolicy policy) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("series_constants_V: c must lie in (0,1)");
    const double q = c / ((2.0 + c) * (2.0 + c));
    const double ct = ctilde(c);
    const double r = rho(c);
    const double sct = std::sqrt(ct);

    // I1 first half: (1/(2+c)) sum_{k>=0} q^k (2k)! / (k!)^2
    double term = 1.0;
    double s1 = 0.0;
    int k = 0;
    for (; k <= policy.k_max; ++k) {
        s1 += term;
        if (std::abs(term) < policy.tol) break;
        term *= q * 2.0 * (2.0 * k + 1.0) / (k + 1.0);
    }
    if (k > policy.k_max)
        throw convergence_error("series_constants_V: I1 sum did not reach tolerance");
    const double bracket = ct / (-(1.0 - ct) * (1.0 - ct)) +
                           1.0 / (2.0 * (sct - 1.0) * (sct - 1.0)) +
                           1.0 / (2.0 * (sct + 1.0) * (sct + 1.0));
    const double i1 = s1 / (2.0 + c) - bracket / (1.0 + r);

    // I2: -(1/(2+c)) sum_{k>=1} q^k (2k)! / ((k-1)!(k+1)!); the k = 0 term
    // vanishes by the 1/(-1)! = 0 convention
    term = q;
    double s2 = 0.0;
    for (k = 1; k <= policy.k_max; ++k) {
        s2 += term;
        if (std::abs(term) < policy.tol) break;
        term *= q * (2.0 * k + 2.0) * (2.0 * k + 1.0) / (static_cast<double>(k) * (k + 2));
    }
    if (k > policy.k_max)
        throw convergence_error("series_constants_V: I2 sum did not reach tolerance");

    // J1 from the Fourier coefficients g_j = A' ctilde^{j/2} of
    // |1+sqrt(c)z|^2/(1+|1+sqrt(c)z|^2):  J1 = sum_j j g_j^2 = A'^2 sum_j j ctilde^j
    const double aprime = 1.0 / ((1.0 + r) * (1.0 - ct));
    const double j1 = aprime * aprime * jx_series(ct, policy);

    SeriesConstants out;
    out.i1 = i1;
    out.i2 = -s2 / (2.0 + c);
    out.j1 = j1;
    return out;
}

ExtraTerms extra_terms(double c, int M) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("extra_terms: c must lie in (0,1)");
    if (M < 0) throw std::domain_error("extra_terms: M must be non-negative");
    const double r = rho(c);
    const double ct = ctilde(c);
    ExtraTerms out;
    out.u = M * std::log1p(-std::sqrt(ct * c));
    out.w = -M * c;
    out.v = -M * (c - 2.0) / (2.0 * (1.0 + r) * (1.0 - ct)) - 0.5 * M;
    return out;
}

} // namespace lht::mp
