#include "lht/calibration.hpp"

#include <algorithm>
#include <array>
#include <cmath>

#include "lht/stats.hpp"

namespace lht::calib {

std::string to_string(StatKind k) {
    switch (k) {
        case StatKind::U: return "U";
        case StatKind::W: return "W";
        case StatKind::V: return "V";
        case StatKind::R: return "R";
    }
    return "?";
}

namespace {

struct SpikeTerms {
    double mu_u = 0.0, mu_w = 0.0, mu_v = 0.0;       // spike contributions to the mean shifts
    double var_u = 0.0, var_w = 0.0, var_v = 0.0;    // spike contributions to the variances
};

// Spike sums over groups; phi, theta, nu are taken at c_n per their
// finite-n definitions.
SpikeTerms spike_terms(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                       const spectra::MomentProfile& moments) {
    spectra::validate_spike_spec(spikes, ratios);
    const double cn = ratios.c_n();
    SpikeTerms t;
    for (std::size_t k = 0; k < spikes.groups.size(); ++k) {
        const auto& g = spikes.groups[k];
        const double f = mp::phi(g.alpha, cn);
        const double usum = spectra::u_group_sum(spikes, static_cast<int>(k));
        const double s2 = spectra::s_k_squared(g.alpha, g.d, usum, moments, cn);
        const double f1 = 1.0 + f;
        t.mu_u += g.d * std::log1p(f);
        t.mu_w += g.d * f;
        t.mu_v += g.d * f / f1;
        const double base = f * f * s2 / ratios.n;
        t.var_u += base / (f1 * f1);
        t.var_w += base;
        t.var_v += base / (f1 * f1 * f1 * f1);
    }
    return t;
}

} // namespace

TestCalibration calib_U(const mp::AspectRatio& ratios, const spectra::SpikeSpec* spikes,
                        const spectra::MomentProfile& moments, mp::SeriesPolicy policy) {
    TestCalibration cal;
    cal.kind = StatKind::U;
    if (spikes == nullptr) {
        const double cn = ratios.c_n();
        const auto s = mp::series_constants_U(cn, policy);
        cal.hypothesis = Hypothesis::Null;
        cal.center = ratios.p * mp::ct_value(cn);
        cal.mu = moments.alpha_x * s.i1 + moments.beta_x * s.i2;
        cal.sigma = std::sqrt((moments.alpha_x + moments.beta_x + 1.0) * s.j1);
        return cal;
    }
    const double cm = ratios.c_nM();
    const auto s = mp::series_constants_U(cm, policy);
    const auto extra = mp::extra_terms(cm, ratios.M);
    const auto t = spike_terms(ratios, *spikes, moments);
    cal.hypothesis = Hypothesis::Spiked;
    cal.center = (ratios.p - ratios.M) * mp::ct_value(cm);
    cal.mu = moments.alpha_x * s.i1 + moments.beta_x * s.i2 + t.mu_u + extra.u;
    cal.sigma = std::sqrt(t.var_u + (moments.alpha_x + moments.beta_x + 1.0) * s.j1);
    return cal;
}

TestCalibration calib_W(const mp::AspectRatio& ratios, const spectra::SpikeSpec* spikes,
                        const spectra::MomentProfile& moments, mp::SeriesPolicy) {
    TestCalibration cal;
    cal.kind = StatKind::W;
    if (spikes == nullptr) {
        cal.hypothesis = Hypothesis::Null;
        cal.center = ratios.p;
        cal.mu = 0.0;
        cal.sigma = std::sqrt((moments.alpha_x + moments.beta_x + 1.0) * ratios.c_n());
        return cal;
    }
    const double cm = ratios.c_nM();
    const auto t = spike_terms(ratios, *spikes, moments);
    cal.hypothesis = Hypothesis::Spiked;
    cal.center = ratios.p - ratios.M;
    cal.mu = t.mu_w - ratios.M * cm;
    cal.sigma = std::sqrt(t.var_w + (moments.alpha_x + moments.beta_x + 1.0) * cm);
    return cal;
}

TestCalibration calib_V(const mp::AspectRatio& ratios, const spectra::SpikeSpec* spikes,
                        const spectra::MomentProfile& moments, mp::SeriesPolicy policy) {
    TestCalibration cal;
    cal.kind = StatKind::V;
    if (spikes == nullptr) {
        const double cn = ratios.c_n();
        const auto s = mp::series_constants_V(cn, policy);
        cal.hypothesis = Hypothesis::Null;
        cal.center = ratios.p * mp::v_center(cn);
        cal.mu = moments.alpha_x * s.i1 + moments.beta_x * s.i2;
        cal.sigma = std::sqrt((moments.alpha_x + moments.beta_x + 1.0) * s.j1);
        return cal;
    }
    const double cm = ratios.c_nM();
    const auto s = mp::series_constants_V(cm, policy);
    const auto extra = mp::extra_terms(cm, ratios.M);
    const auto t = spike_terms(ratios, *spikes, moments);
    cal.hypothesis = Hypothesis::Spiked;
    cal.center = (ratios.p - ratios.M) * mp::v_center(cm);
    cal.mu = moments.alpha_x * s.i1 + moments.beta_x * s.i2 + t.mu_v + extra.v;
    cal.sigma = std::sqrt(t.var_v + (moments.alpha_x + moments.beta_x + 1.0) * s.j1);
    return cal;
}

RlrtCalibration rlrt_calibration(const mp::AspectRatio& ratios) {
    const double cn = ratios.c_n();
    const double sc = std::sqrt(cn);
    RlrtCalibration cal;
    cal.mu_r = (1.0 + sc) * (1.0 + sc);
    cal.sigma_r = std::pow(ratios.n, -2.0 / 3.0) * (1.0 + sc) *
                  std::cbrt(1.0 + 1.0 / sc);
    return cal;
}

namespace {

// Upper-tail quantiles t_xi of the Tracy-Widom type-1 law, F1(t_xi) = 1 - xi.
// Computed from the Painleve II representation (Hastings-McLeod solution;
// F1^2 = F2 * exp(-int q)) and cross-checked against the published values
// 0.9793 (95%), 2.0234 (99%), 1.4538 (97.5%), 0.4501 (90%) of Johnstone's
// tabulation.  Nodes are uniform in the normal-quantile transform of xi.
struct TwNode {
    double xi;
    double t;
};

constexpr std::array<TwNode, 28> kTwTable = {{
    {0.0040000000, 2.545970},  {0.0053555187, 2.383824},  {0.0071051064, 2.223089},
    {0.0093408370, 2.063771},  {0.0121693405, 1.905880},  {0.0157121475, 1.749421},
    {0.0201054569, 1.594401},  {0.0254991919, 1.440826},  {0.0320552221, 1.288698},
    {0.0399446553, 1.138020},  {0.0493441432, 0.988794},  {0.0604311957, 0.841020},
    {0.0733785650, 0.694697},  {0.0883478307, 0.549821},  {0.1054823917, 0.406388},
    {0.1249001457, 0.264392},  {0.1466861975, 0.123827},  {0.1708859876, -0.015316},
    {0.1974992547, -0.153048}, {0.2264752468, -0.289380}, {0.2577095603, -0.424325},
    {0.2910429241, -0.557896}, {0.3262621536, -0.690110}, {0.3631033807, -0.820981},
    {0.4012575367, -0.950529}, {0.4403779241, -1.078770}, {0.4800895776, -1.205725},
    {0.5200000000, -1.331412},
}};

// Monotone cubic (Fritsch-Carlson) interpolation of t against z = Phi^{-1}(1-xi).
class TwInterpolant {
public:
    TwInterpolant() {
        const int n = static_cast<int>(kTwTable.size());
        x_.resize(n);
        y_.resize(n);
        for (int i = 0; i < n; ++i) {
            // table is ordered by increasing xi -> decreasing z; flip
            x_[n - 1 - i] = stats::normal_quantile(1.0 - kTwTable[i].xi);
            y_[n - 1 - i] = kTwTable[i].t;
        }
        m_ = slopes(x_, y_);
    }

    double eval(double x) const {
        const int n = static_cast<int>(x_.size());
        int lo = 0, hi = n - 1;
        while (hi - lo > 1) {
            const int mid = (lo + hi) / 2;
            (x_[mid] <= x ? lo : hi) = mid;
        }
        const double h = x_[lo + 1] - x_[lo];
        const double s = (x - x_[lo]) / h;
        const double h00 = (1 + 2 * s) * (1 - s) * (1 - s);
        const double h10 = s * (1 - s) * (1 - s);
        const double h01 = s * s * (3 - 2 * s);
        const double h11 = s * s * (s - 1);
        return h00 * y_[lo] + h10 * h * m_[lo] + h01 * y_[lo + 1] + h11 * h * m_[lo + 1];
    }

    double x_min() const { return x_.front(); }
    double x_max() const { return x_.back(); }
    double y_min() const { return y_.front(); }
    double y_max() const { return y_.back(); }

    // inverse by bisection (the interpolant is monotone increasing)
    double inverse(double y) const {
        double lo = x_.front(), hi = x_.back();
        for (int it = 0; it < 200; ++it) {
            const double mid = 0.5 * (lo + hi);
            (eval(mid) < y ? lo : hi) = mid;
        }
        return 0.5 * (lo + hi);
    }

private:
    static std::vector<double> slopes(const std::vector<double>& x,
                                      const std::vector<double>& y) {
        const int n = static_cast<int>(x.size());
        std::vector<double> d(n - 1), m(n);
        for (int i = 0; i + 1 < n; ++i) d[i] = (y[i + 1] - y[i]) / (x[i + 1] - x[i]);
        m[0] = d[0];
        m[n - 1] = d[n - 2];
        for (int i = 1; i + 1 < n; ++i) {
            if (d[i - 1] * d[i] <= 0.0) {
                m[i] = 0.0;
            } else {
                // harmonic mean keeps the interpolant monotone
                const double w1 = 2.0 * (x[i + 1] - x[i]) + (x[i] - x[i - 1]);
                const double w2 = (x[i + 1] - x[i]) + 2.0 * (x[i] - x[i - 1]);
                m[i] = (w1 + w2) / (w1 / d[i - 1] + w2 / d[i]);
            }
        }
        return m;
    }

    std::vector<double> x_, y_, m_;
};

const TwInterpolant& tw_interp() {
    static const TwInterpolant interp;
    return interp;
}

} // namespace

double tw_quantile(double xi) {
    if (!(xi > 0.005 && xi < 0.5))
        throw std::domain_error("tw_quantile: xi must lie in (0.005, 0.5)");
    return tw_interp().eval(stats::normal_quantile(1.0 - xi));
}

std::vector<std::pair<double, double>> tw_table() {
    std::vector<std::pair<double, double>> out;
    out.reserve(kTwTable.size());
    for (const auto& node : kTwTable) out.emplace_back(node.xi, node.t);
    return out;
}

double tw_pvalue(double t) {
    const auto& interp = tw_interp();
    const double tc = std::clamp(t, interp.y_min(), interp.y_max());
    const double z = interp.inverse(tc);
    return 1.0 - stats::normal_cdf(z);
}

TestReport test_statistic(double raw, const TestCalibration& calibration, double level) {
    if (calibration.hypothesis != Hypothesis::Null)
        throw std::domain_error("test_statistic: decision rules use the null calibration");
    if (!(level > 0.0 && level < 1.0))
        throw std::domain_error("test_statistic: level must lie in (0,1)");
    TestReport rep;
    rep.raw = raw;
    rep.level = level;
    rep.z = (raw - calibration.center - calibration.mu) / calibration.sigma;
    rep.p_value = 1.0 - stats::normal_cdf(rep.z);
    rep.reject = rep.z > stats::normal_quantile(1.0 - level);
    return rep;
}

TestReport test_statistic_rlrt(double raw, const RlrtCalibration& calibration, double level) {
    if (!(level > 0.005 && level < 0.5))
        throw std::domain_error("test_statistic_rlrt: level must lie in (0.005, 0.5)");
    TestReport rep;
    rep.raw = raw;
    rep.level = level;
    rep.z = (raw - calibration.mu_r) / calibration.sigma_r;
    rep.p_value = tw_pvalue(rep.z);
    rep.reject = rep.z > tw_quantile(level);
    return rep;
}

PowerPrediction power_U(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                        const spectra::MomentProfile& moments, double xi) {
    if (!(xi > 0.0 && xi < 1.0)) throw std::domain_error("power_U: xi must lie in (0,1)");
    const auto cal0 = calib_U(ratios, nullptr, moments);
    const auto cal1 = calib_U(ratios, &spikes, moments);
    const double z = stats::normal_quantile(1.0 - xi);
    const double cm = ratios.c_nM();
    const double a1 = spike_terms(ratios, spikes, moments).mu_u +
                      mp::extra_terms(cm, ratios.M).u;
    PowerPrediction out;
    out.kind = StatKind::U;
    out.kappa = (cal1.center - cal0.center + a1 - z * cal0.sigma) / cal1.sigma;
    out.power = stats::normal_cdf(out.kappa);
    return out;
}

PowerPrediction power_W(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                        const spectra::MomentProfile& moments, double xi) {
    if (!(xi > 0.0 && xi < 1.0)) throw std::domain_error("power_W: xi must lie in (0,1)");
    const auto cal1 = calib_W(ratios, &spikes, moments);
    const double z = stats::normal_quantile(1.0 - xi);
    const auto t = spike_terms(ratios, spikes, moments);
    const double s0 = std::sqrt((moments.alpha_x + moments.beta_x + 1.0) * ratios.c_n());
    PowerPrediction out;
    out.kind = StatKind::W;
    out.kappa = (t.mu_w - ratios.M * ratios.c_nM() - ratios.M) / cal1.sigma - z * s0 / cal1.sigma;
    out.power = stats::normal_cdf(out.kappa);
    return out;
}

PowerPrediction power_V(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                        const spectra::MomentProfile& moments, double xi) {
    if (!(xi > 0.0 && xi < 1.0)) throw std::domain_error("power_V: xi must lie in (0,1)");
    const auto cal0 = calib_V(ratios, nullptr, moments);
    const auto cal1 = calib_V(ratios, &spikes, moments);
    const double z = stats::normal_quantile(1.0 - xi);
    const double cm = ratios.c_nM();
    const auto t = spike_terms(ratios, spikes, moments);
    const double shift = t.mu_v + cal1.center - cal0.center + mp::extra_terms(cm, ratios.M).v;
    PowerPrediction out;
    out.kind = StatKind::V;
    out.kappa = shift / cal1.sigma - z * cal0.sigma / cal1.sigma;
    out.power = stats::normal_cdf(out.kappa);
    return out;
}

PowerPrediction power_R(const mp::AspectRatio& ratios, double alpha1, int d1,
                        double s1_squared, double xi) {
    if (d1 != 1)
        throw std::domain_error("power_R: leading spike must have multiplicity one");
    if (!(xi > 0.005 && xi < 0.5)) throw std::domain_error("power_R: xi must lie in (0.005, 0.5)");
    const auto cal = rlrt_calibration(ratios);
    const double f = mp::phi(alpha1, ratios.c_n());
    const double t = tw_quantile(xi);
    PowerPrediction out;
    out.kind = StatKind::R;
    out.kappa = -(t * cal.sigma_r + cal.mu_r - f) /
                (std::sqrt(s1_squared) * f / std::sqrt(static_cast<double>(ratios.n)));
    out.power = stats::normal_cdf(out.kappa);
    return out;
}

KappaPanel kappa_panel(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                       const spectra::MomentProfile& moments, double xi) {
    KappaPanel panel;
    if (spikes.empty()) {
        const double z = stats::normal_quantile(1.0 - xi);
        panel.u = panel.w = panel.v = -z;
        panel.has_r = false;
        panel.regime = "no spikes: all exponents collapse to -z_xi";
        return panel;
    }

    panel.u = power_U(ratios, spikes, moments, xi).kappa;

    const double cn = ratios.c_n();
    const double cm = ratios.c_nM();
    const double z = stats::normal_quantile(1.0 - xi);
    const auto t = spike_terms(ratios, spikes, moments);
    const auto cal1w = calib_W(ratios, &spikes, moments);
    // trace exponent with the bare ratio printed as c; c_n at finite n
    panel.w = (t.mu_w - ratios.M * cn - ratios.M -
               z * std::sqrt((moments.alpha_x + moments.beta_x + 1.0) * cn)) /
              cal1w.sigma;

    // bounded-trace exponent mixes the spike-free ratio into the last
    // centering term, unlike its power function which stays at c_nM
    const auto cal0v = calib_V(ratios, nullptr, moments);
    const auto cal1v = calib_V(ratios, &spikes, moments);
    const double ctn = mp::ctilde(cn);
    const double vshift = t.mu_v + cal1v.center - cal0v.center - 0.5 * ratios.M -
                          (cn - 2.0) * ratios.M / (2.0 * (1.0 + mp::rho(cn)) * (1.0 - ctn));
    panel.v = vshift / cal1v.sigma - z * cal0v.sigma / cal1v.sigma;

    panel.has_r = spikes.groups.front().d == 1;
    if (panel.has_r) {
        const double alpha1 = spikes.groups.front().alpha;
        const double usum = spectra::u_group_sum(spikes, 0);
        const double s1sq = spectra::s_k_squared(alpha1, 1, usum, moments, cn);
        panel.r = power_R(ratios, alpha1, 1, s1sq, xi).kappa;
    }

    const double alpha1 = spikes.groups.front().alpha;
    panel.regime = alpha1 < std::sqrt(static_cast<double>(ratios.n))
                       ? "largest-root test dominant (alpha_1 below sqrt(n))"
                       : "trace test competitive with largest root (alpha_1 at or above sqrt(n))";
    return panel;
}

} // namespace lht::calib
