#include "lht/oracle.hpp"

#include <cmath>
#include <functional>
#include <numbers>

#include "lht/stats.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lht::oracle {

namespace {

constexpr double kPi = std::numbers::pi;

// trapezoid over [0, pi] of an integrand that extends to an even periodic
// function; spectrally accurate for analytic integrands
double periodic_even_trapezoid(const std::function<double(double)>& g, int nodes) {
    // endpoints carry weight 1/2 relative to interior points
    double sum = 0.5 * (g(0.0) + g(kPi));
    const double h = kPi / nodes;
    for (int i = 1; i < nodes; ++i) sum += g(i * h);
    return sum * h;
}

double refine_until(const std::function<double(int)>& value_at, int start_nodes,
                    double tol, const char* what) {
    double prev = value_at(start_nodes);
    int n = start_nodes;
    for (int round = 0; round < 6; ++round) {
        n *= 2;
        const double cur = value_at(n);
        if (std::abs(cur - prev) <= tol) return cur;
        prev = cur;
    }
    throw convergence_error(std::string(what) + ": node-doubling did not stabilize");
}

// Neville polynomial extrapolation to h = 0; throws when the diagonal fails
// to settle within tol.
template <typename T>
T extrapolate_to_zero(const std::vector<double>& hs, std::vector<T> vals, double tol,
                      const char* what) {
    T prev_diag = vals.back();
    const std::size_t n = hs.size();
    for (std::size_t m = 1; m < n; ++m) {
        for (std::size_t i = 0; i + m < n; ++i)
            vals[i] = (hs[i] * vals[i + 1] - hs[i + m] * vals[i]) / (hs[i] - hs[i + m]);
        vals.resize(n - m);
        const T diag = vals.front();
        if (m == n - 1 && std::abs(diag - prev_diag) > tol)
            throw convergence_error(std::string(what) +
                                    ": r-schedule extrapolation did not converge");
        prev_diag = diag;
    }
    return vals.front();
}

double mp_point(double theta, double c) { return 1.0 + c - 2.0 * std::sqrt(c) * std::cos(theta); }

// log(1 + |1 + sqrt(c) e^{i theta}|^2)
double log_weight(double theta, double c) {
    return std::log(2.0 + c + 2.0 * std::sqrt(c) * std::cos(theta));
}

// |1 + sqrt(c) z|^2 / (1 + |1 + sqrt(c) z|^2)
double ratio_weight(double theta, double c) {
    const double a = 1.0 + c + 2.0 * std::sqrt(c) * std::cos(theta);
    return a / (1.0 + a);
}

using WeightFn = double (*)(double, double);

// single contour integral (1/2 pi i) oint F(z) K(z) dz on |z| = 1
std::complex<double> contour_single(WeightFn weight, double c, int nodes,
                                    const std::function<std::complex<double>(std::complex<double>)>& kernel) {
    std::complex<double> sum = 0.0;
    const double h = 2.0 * kPi / nodes;
    for (int i = 0; i < nodes; ++i) {
        const double theta = i * h;
        const std::complex<double> z = std::polar(1.0, theta);
        sum += weight(theta, c) * z * kernel(z);
    }
    return sum / static_cast<double>(nodes);
}

// double contour integral -(1/4 pi^2) oint oint F(z1) F(z2) / (z1 - r z2)^2,
// reduced by z_j = e^{i theta_j} to a double sum over the theta grid with the
// difference kernel K(t) = e^{it} / (e^{it} - r)^2.
std::complex<double> contour_double(WeightFn weight, double c, double r, int nodes,
                                    Exec exec) {
    std::vector<double> f(nodes);
    std::vector<std::complex<double>> kd(nodes);
    const double h = 2.0 * kPi / nodes;
    for (int i = 0; i < nodes; ++i) {
        f[i] = weight(i * h, c);
        const std::complex<double> e = std::polar(1.0, i * h);
        const std::complex<double> d = e - r;
        kd[i] = e / (d * d);
    }

    std::vector<std::complex<double>> partial(nodes);
    auto row = [&](int i) {
        std::complex<double> acc = 0.0;
        for (int j = 0; j < nodes; ++j) {
            int d = i - j;
            if (d < 0) d += nodes;
            acc += f[j] * kd[d];
        }
        return f[i] * acc;
    };

    if (exec == Exec::Parallel) {
#pragma omp parallel for schedule(static)
        for (int i = 0; i < nodes; ++i) partial[i] = row(i);
    } else {
        for (int i = 0; i < nodes; ++i) partial[i] = row(i);
    }

    // fixed-order tree reduction, independent of the thread schedule
    std::vector<double> re(nodes), im(nodes);
    for (int i = 0; i < nodes; ++i) {
        re[i] = partial[i].real();
        im[i] = partial[i].imag();
    }
    const std::complex<double> total(stats::pairwise_sum(re), stats::pairwise_sum(im));
    return total / (static_cast<double>(nodes) * nodes);
}

// nodes needed to resolve the kernel pole at distance log(r) off the grid
int j1_nodes(const QuadPolicy& policy, double r) {
    const int needed = static_cast<int>(std::ceil(28.0 / (r - 1.0)));
    return std::max(policy.nodes_j1, needed);
}

mp::SeriesConstants contour_series(WeightFn weight, double c, const QuadPolicy& policy,
                                   Exec exec, const char* what) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("contour_series: c must lie in (0,1)");
    std::vector<double> hs;
    for (double r : policy.r_values) hs.push_back(r - 1.0);

    // I1: kernel z/(z^2 - r^-2) - 1/z, extrapolated r -> 1
    std::vector<std::complex<double>> i1_vals;
    for (double r : policy.r_values) {
        const double rm2 = 1.0 / (r * r);
        i1_vals.push_back(contour_single(weight, c, policy.nodes,
                                         [rm2](std::complex<double> z) {
                                             return z / (z * z - rm2) - 1.0 / z;
                                         }));
    }
    const std::complex<double> i1 =
        extrapolate_to_zero(hs, i1_vals, 1e-6, what);

    // I2: kernel 1/z^3, no regularization required
    const std::complex<double> i2 = contour_single(
        weight, c, policy.nodes, [](std::complex<double> z) { return 1.0 / (z * z * z); });

    // J1: double integral per radius, then extrapolated
    std::vector<std::complex<double>> j1_vals;
    for (double r : policy.r_values)
        j1_vals.push_back(contour_double(weight, c, r, j1_nodes(policy, r), exec));
    const std::complex<double> j1 =
        extrapolate_to_zero(hs, j1_vals, 1e-6, what);

    const double imag_max =
        std::max({std::abs(i1.imag()), std::abs(i2.imag()), std::abs(j1.imag())});
    if (imag_max > 1e-9)
        throw convergence_error(std::string(what) + ": contour limits acquired imaginary mass");

    mp::SeriesConstants out;
    out.i1 = i1.real();
    out.i2 = i2.real();
    out.j1 = j1.real();
    return out;
}

} // namespace

double mp_expectation(Kernel kernel, double c, const QuadPolicy& policy) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("mp_expectation: c must lie in (0,1)");
    auto f = [kernel](double x) {
        switch (kernel) {
            case Kernel::Log1p: return std::log1p(x);
            case Kernel::Identity: return x;
            case Kernel::Ratio: return x / (1.0 + x);
        }
        return 0.0;
    };
    auto value_at = [&](int nodes) {
        return periodic_even_trapezoid(
                   [&](double th) {
                       const double x = mp_point(th, c);
                       const double s = std::sin(th);
                       return f(x) * 2.0 * s * s / x;
                   },
                   nodes) /
               kPi;
    };
    return refine_until(value_at, std::max(policy.nodes / 4, 256), 1e-9, "mp_expectation");
}

std::complex<double> mp_expectation_resolvent(std::complex<double> z, double c,
                                              const QuadPolicy& policy) {
    if (!(c > 0.0 && c < 1.0))
        throw std::domain_error("mp_expectation_resolvent: c must lie in (0,1)");
    auto value_at = [&](int nodes) {
        std::complex<double> acc = 0.0;
        const double h = kPi / nodes;
        for (int i = 0; i <= nodes; ++i) {
            const double th = i * h;
            const double x = mp_point(th, c);
            const double s = std::sin(th);
            const double w = (i == 0 || i == nodes) ? 0.5 : 1.0;
            acc += w * (2.0 * s * s / x) / (x - z);
        }
        return acc * (h / kPi);
    };
    std::complex<double> prev = value_at(std::max(policy.nodes / 4, 256));
    int n = std::max(policy.nodes / 4, 256);
    for (int round = 0; round < 6; ++round) {
        n *= 2;
        const std::complex<double> cur = value_at(n);
        if (std::abs(cur - prev) <= 1e-9) return cur;
        prev = cur;
    }
    throw convergence_error("mp_expectation_resolvent: node-doubling did not stabilize");
}

mp::SeriesConstants contour_series_U(double c, const QuadPolicy& policy, Exec exec) {
    return contour_series(&log_weight, c, policy, exec, "contour_series_U");
}

mp::SeriesConstants contour_series_V(double c, const QuadPolicy& policy, Exec exec) {
    return contour_series(&ratio_weight, c, policy, exec, "contour_series_V");
}

double extra_term_num(calib::StatKind f_kind, double c, const QuadPolicy& policy) {
    if (!(c > 0.0 && c < 1.0)) throw std::domain_error("extra_term_num: c must lie in (0,1)");
    auto fprime = [f_kind](double x) {
        switch (f_kind) {
            case calib::StatKind::U: return 1.0 / (1.0 + x);
            case calib::StatKind::W: return 1.0;
            case calib::StatKind::V: return 1.0 / ((1.0 + x) * (1.0 + x));
            default: throw std::domain_error("extra_term_num: kind must be U, W or V");
        }
    };
    const double sc = std::sqrt(c);
    auto value_at = [&](int nodes) {
        return periodic_even_trapezoid(
                   [&](double th) {
                       const double x = mp_point(th, c);
                       const double s = std::sin(th);
                       const double arg = std::atan(2.0 * sc * s / (2.0 * sc * std::cos(th) - 2.0));
                       return fprime(x) * arg * 2.0 * sc * s;
                   },
                   nodes) /
               kPi;
    };
    return refine_until(value_at, std::max(policy.nodes / 4, 256), 1e-9, "extra_term_num");
}

} // namespace lht::oracle
