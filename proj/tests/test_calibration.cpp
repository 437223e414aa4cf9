#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "lht/calibration.hpp"
#include "lht/oracle.hpp"
#include "lht/stats.hpp"

using namespace lht;

namespace {

const spectra::MomentProfile kGauss{1.0, 0.0};
const spectra::MomentProfile kGamma{1.0, 1.5};

spectra::SpikeSpec single_spike(double alpha) {
    spectra::SpikeSpec s;
    s.groups = {{alpha, 1}};
    s.standard_basis = true;
    return s;
}

} // namespace

TEST_CASE("calib_W: null scale and spiked reduction") {
    const mp::AspectRatio ratios(200, 600, 0);
    const auto cal = calib::calib_W(ratios, nullptr, kGauss);
    CHECK(cal.center == 200.0);
    CHECK(cal.mu == 0.0);
    CHECK(cal.sigma == doctest::Approx(0.816496580927726).epsilon(1e-14));

    // an empty spike set makes the spiked calibration collapse onto the null
    spectra::SpikeSpec empty;
    for (auto f : {calib::calib_U, calib::calib_W, calib::calib_V}) {
        const auto h0 = f(ratios, nullptr, kGauss, {});
        const auto h1 = f(ratios, &empty, kGauss, {});
        CHECK(h1.center == h0.center);
        CHECK(h1.mu == h0.mu);
        CHECK(h1.sigma == h0.sigma);
    }
}

TEST_CASE("calib U/W/V: null sigma collapses for beta_x = 0") {
    const mp::AspectRatio ratios(150, 450, 0);
    const auto su = mp::series_constants_U(ratios.c_n());
    const auto cal = calib::calib_U(ratios, nullptr, kGauss);
    CHECK(cal.sigma == doctest::Approx(std::sqrt(2.0 * su.j1)).epsilon(1e-14));
}

TEST_CASE("calibrations recompose from oracle-validated parts (Model 1)") {
    const mp::AspectRatio ratios(200, 600, 1);
    const auto spikes = single_spike(601.0);
    const spectra::MomentProfile moments = kGauss;

    const auto calU = calib::calib_U(ratios, &spikes, moments);
    const auto calW = calib::calib_W(ratios, &spikes, moments);
    const auto calV = calib::calib_V(ratios, &spikes, moments);

    const double cm = ratios.c_nM();
    const double cn = ratios.c_n();

    // center from Marchenko-Pastur quadrature
    const double ct_quad = oracle::mp_expectation(oracle::Kernel::Log1p, cm);
    CHECK(calU.center == doctest::Approx(199.0 * ct_quad).epsilon(1e-8));
    const double vq = oracle::mp_expectation(oracle::Kernel::Ratio, cm);
    CHECK(calV.center == doctest::Approx(199.0 * vq).epsilon(1e-8));
    CHECK(calW.center == 199.0);

    // mean shifts from contour quadrature + arctan quadrature
    const auto su = oracle::contour_series_U(cm);
    const double f = mp::phi(601.0, cn);
    const double extra_u = oracle::extra_term_num(calib::StatKind::U, cm);
    CHECK(calU.mu ==
          doctest::Approx(su.i1 + std::log1p(f) + extra_u).epsilon(1e-6));

    const auto sv = oracle::contour_series_V(cm);
    const double extra_v = oracle::extra_term_num(calib::StatKind::V, cm);
    CHECK(calV.mu == doctest::Approx(sv.i1 + f / (1.0 + f) + extra_v).epsilon(1e-6));

    const double extra_w = oracle::extra_term_num(calib::StatKind::W, cm);
    CHECK(calW.mu == doctest::Approx(f + extra_w).epsilon(1e-8));

    // variances from contour quadrature + exact spike terms
    const double s2 = spectra::s_k_squared(601.0, 1, 1.0, moments, cn);
    const double f1 = 1.0 + f;
    CHECK(calU.sigma * calU.sigma ==
          doctest::Approx(f * f / (600.0 * f1 * f1) * s2 + 2.0 * su.j1).epsilon(1e-6));
    CHECK(calV.sigma * calV.sigma ==
          doctest::Approx(f * f / (600.0 * f1 * f1 * f1 * f1) * s2 + 2.0 * sv.j1)
              .epsilon(1e-6));
    CHECK(calW.sigma * calW.sigma ==
          doctest::Approx(f * f / 600.0 * s2 + 2.0 * cm).epsilon(1e-12));
}

TEST_CASE("rlrt_calibration: frozen values and the n scaling") {
    const mp::AspectRatio ratios(200, 600, 0);
    const auto cal = calib::rlrt_calibration(ratios);
    CHECK(cal.mu_r == doctest::Approx(2.48803387171258).epsilon(1e-12));
    CHECK(cal.sigma_r == doctest::Approx(0.0309972786813875).epsilon(1e-12));

    const auto big = calib::rlrt_calibration(mp::AspectRatio(20000, 60000, 0));
    CHECK(big.mu_r == doctest::Approx(cal.mu_r).epsilon(1e-12));
    CHECK(big.sigma_r < cal.sigma_r / 20.0);
}

TEST_CASE("tw_quantile: ordering, anchors, range") {
    CHECK(calib::tw_quantile(0.01) > calib::tw_quantile(0.05));
    CHECK(calib::tw_quantile(0.05) > calib::tw_quantile(0.10));
    CHECK(calib::tw_quantile(0.05) == doctest::Approx(0.9793).epsilon(1e-3));
    CHECK(calib::tw_quantile(0.01) == doctest::Approx(2.0234).epsilon(1e-3));
    CHECK(calib::tw_quantile(0.10) == doctest::Approx(0.4501).epsilon(1e-3));
    CHECK_THROWS_AS(calib::tw_quantile(0.001), std::domain_error);
    CHECK_THROWS_AS(calib::tw_quantile(0.7), std::domain_error);
}

namespace {

// independent monotone-cubic (Fritsch-Carlson) evaluation used to withhold
// one node at a time from the embedded table
double pchip_eval(const std::vector<double>& x, const std::vector<double>& y, double at) {
    const int n = static_cast<int>(x.size());
    std::vector<double> d(n - 1), m(n);
    for (int i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
    m[0] = d[0];
    m[n - 1] = d[n - 2];
    for (int i = 1; i + 1 < n; ++i) {
        if (d[i - 1] * d[i] <= 0.0) {
            m[i] = 0.0;
        } else {
            const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
            const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
            m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
        }
    }
    int lo = 0, hi = n - 1;
    while (hi - lo > 1) {
        const int mid = (lo + hi) / 2;
        (x[mid] <= at ? lo : hi) = mid;
    }
    const double h = x[lo + 1] - x[lo];
    const double s = (at - x[lo]) / h;
    return (1 + 2 * s) * (1 - s) * (1 - s) * y[lo] + s * (1 - s) * (1 - s) * h * m[lo] +
           s * s * (3 - 2 * s) * y[lo + 1] + s * s * (s - 1) * h * m[lo + 1];
}

} // namespace

TEST_CASE("tw_quantile: leave-one-out interpolation error below 1e-3") {
    const auto table = calib::tw_table();
    const int n = static_cast<int>(table.size());
    std::vector<double> z(n), t(n);
    for (int i = 0; i < n; ++i) {
        z[n - 1 - i] = stats::normal_quantile(1.0 - table[i].first);
        t[n - 1 - i] = table[i].second;
    }
    for (int skip = 1; skip + 1 < n; ++skip) {
        std::vector<double> zs, ts;
        for (int i = 0; i < n; ++i) {
            if (i == skip) continue;
            zs.push_back(z[i]);
            ts.push_back(t[i]);
        }
        CHECK(std::abs(pchip_eval(zs, ts, z[skip]) - t[skip]) <= 1e-3);
    }
}

TEST_CASE("test_statistic: centering, tie rule, scale consistency") {
    calib::TestCalibration cal;
    cal.kind = calib::StatKind::U;
    cal.center = 10.0;
    cal.mu = 0.25;
    cal.sigma = 1.0;
    cal.hypothesis = calib::Hypothesis::Null;

    const auto rep = calib::test_statistic(10.25, cal, 0.05);
    CHECK(rep.z == doctest::Approx(0.0));
    CHECK(rep.p_value == doctest::Approx(0.5).epsilon(1e-12));
    CHECK_FALSE(rep.reject);

    // exactly at the critical value: strict inequality keeps the null
    const double zc = stats::normal_quantile(0.95);
    calib::TestCalibration unit;
    unit.center = 0.0;
    unit.mu = 0.0;
    unit.sigma = 1.0;
    const auto tie = calib::test_statistic(zc, unit, 0.05);
    CHECK(tie.z == zc);
    CHECK_FALSE(tie.reject);
    const auto over = calib::test_statistic(zc + 1e-9, unit, 0.05);
    CHECK(over.reject);

    // shifting raw by delta shifts z by delta / sigma exactly
    cal.sigma = 0.5;
    const auto a = calib::test_statistic(11.0, cal, 0.05);
    const auto b = calib::test_statistic(11.0 + 2.0, cal, 0.05);
    CHECK(b.z - a.z == 4.0);

    calib::TestCalibration spiked = cal;
    spiked.hypothesis = calib::Hypothesis::Spiked;
    CHECK_THROWS_AS(calib::test_statistic(1.0, spiked, 0.05), std::domain_error);
}

TEST_CASE("test_statistic_rlrt: TW reference") {
    const mp::AspectRatio ratios(200, 600, 0);
    const auto rl = calib::rlrt_calibration(ratios);
    const double crit = rl.mu_r + calib::tw_quantile(0.05) * rl.sigma_r;
    CHECK_FALSE(calib::test_statistic_rlrt(crit, rl, 0.05).reject);
    CHECK(calib::test_statistic_rlrt(crit + 1e-6, rl, 0.05).reject);
    const auto rep = calib::test_statistic_rlrt(rl.mu_r + 0.9793 * rl.sigma_r, rl, 0.05);
    CHECK(rep.p_value == doctest::Approx(0.05).epsilon(2e-2));
}

TEST_CASE("power functions: size recovery with no spikes") {
    const mp::AspectRatio ratios(200, 600, 0);
    spectra::SpikeSpec empty;
    for (double xi : {0.01, 0.05, 0.10}) {
        CHECK(calib::power_U(ratios, empty, kGauss, xi).power ==
              doctest::Approx(xi).epsilon(1e-12));
        CHECK(calib::power_W(ratios, empty, kGauss, xi).power ==
              doctest::Approx(xi).epsilon(1e-12));
        CHECK(calib::power_V(ratios, empty, kGauss, xi).power ==
              doctest::Approx(xi).epsilon(1e-12));
    }
}

TEST_CASE("power functions: monotone in the spike, large-spike behavior") {
    const std::vector<double> grid = {3.0, 5.0, 10.0, 20.0, 50.0};
    double pu = 0.0, pw = 0.0, pv = 0.0, pr = 0.0;
    for (double alpha : grid) {
        const mp::AspectRatio ratios(200, 600, 1);
        const auto spikes = single_spike(alpha);
        const double u = calib::power_U(ratios, spikes, kGauss, 0.05).power;
        const double w = calib::power_W(ratios, spikes, kGauss, 0.05).power;
        const double v = calib::power_V(ratios, spikes, kGauss, 0.05).power;
        const double s1sq = spectra::s_k_squared(alpha, 1, 1.0, kGauss, ratios.c_n());
        const double r = calib::power_R(ratios, alpha, 1, s1sq, 0.05).power;
        CHECK(u >= pu);
        CHECK(w >= pw);
        CHECK(v >= pv);
        CHECK(r >= pr);
        pu = u; pw = w; pv = v; pr = r;
    }

    // alpha = 1 + n: U, W, R saturate; V plateaus below 1 (its exponent is
    // bounded in the spike size)
    const mp::AspectRatio ratios(200, 600, 1);
    const auto spikes = single_spike(601.0);
    CHECK(calib::power_U(ratios, spikes, kGauss, 0.05).power >= 0.99);
    CHECK(calib::power_W(ratios, spikes, kGauss, 0.05).power >= 0.99);
    const double s1sq = spectra::s_k_squared(601.0, 1, 1.0, kGauss, ratios.c_n());
    CHECK(calib::power_R(ratios, 601.0, 1, s1sq, 0.05).power >= 0.99);
    const double pv601 = calib::power_V(ratios, spikes, kGauss, 0.05).power;
    const double pv_huge =
        calib::power_V(ratios, single_spike(1e7), kGauss, 0.05).power;
    CHECK(pv601 < 1.0);
    CHECK(std::abs(pv_huge - pv601) < 0.01); // plateau

    CHECK_THROWS_AS(calib::power_R(ratios, 601.0, 2, s1sq, 0.05), std::domain_error);
}

TEST_CASE("kappa_panel: null collapse and the documented orderings") {
    const mp::AspectRatio null_ratios(200, 600, 0);
    spectra::SpikeSpec empty;
    const auto none = calib::kappa_panel(null_ratios, empty, kGauss, 0.05);
    const double z = stats::normal_quantile(0.95);
    CHECK(none.u == doctest::Approx(-z).epsilon(1e-12));
    CHECK(none.w == doctest::Approx(-z).epsilon(1e-12));
    CHECK(none.v == doctest::Approx(-z).epsilon(1e-12));
    CHECK_FALSE(none.has_r);

    const mp::AspectRatio ratios(200, 600, 1);
    const auto small = calib::kappa_panel(ratios, single_spike(5.0), kGauss, 0.05);
    REQUIRE(small.has_r);
    CHECK(small.v < small.u);
    CHECK(small.u < small.w);
    CHECK(small.w < small.r);

    const auto large = calib::kappa_panel(ratios, single_spike(601.0), kGauss, 0.05);
    REQUIRE(large.has_r);
    // both sqrt(n)-scale exponents within a factor of two of each other
    CHECK(large.w > 0.5 * large.r);
    CHECK(large.w < 2.0 * large.r);
    CHECK(large.regime != small.regime);
}

TEST_CASE("power predictions under the gamma moment profile stay proper") {
    const mp::AspectRatio ratios(200, 600, 1);
    const auto spikes = single_spike(20.0);
    for (const auto* m : {&kGauss, &kGamma}) {
        const auto u = calib::power_U(ratios, spikes, *m, 0.05);
        CHECK(u.power == doctest::Approx(stats::normal_cdf(u.kappa)).epsilon(1e-15));
        CHECK(u.power > 0.05);
        CHECK(u.power <= 1.0);
    }
}
