#pragma once

#include <string>
#include <utility>
#include <vector>

#include "lht/mpcore.hpp"
#include "lht/spectra.hpp"

namespace lht::calib {

enum class StatKind { U, W, V, R };

enum class Hypothesis { Null, Spiked };

std::string to_string(StatKind k);

struct TestCalibration {
    StatKind kind = StatKind::U;
    double center = 0.0;
    double mu = 0.0;
    double sigma = 1.0;
    Hypothesis hypothesis = Hypothesis::Null;
};

struct TestReport {
    double raw = 0.0;
    double z = 0.0;
    double p_value = 1.0;
    bool reject = false;
    double level = 0.05;
};

struct PowerPrediction {
    StatKind kind = StatKind::U;
    double power = 0.0;
    double kappa = 0.0;
};

struct RlrtCalibration {
    double mu_r = 0.0;
    double sigma_r = 1.0;
};

// Centering/scale for the log-determinant statistic sum log(1 + lambda_i).
// A null spikes pointer selects the null calibration (constants at c_n);
// otherwise the spiked calibration (constants at c_nM plus spike terms).
TestCalibration calib_U(const mp::AspectRatio& ratios, const spectra::SpikeSpec* spikes,
                        const spectra::MomentProfile& moments, mp::SeriesPolicy policy = {});

// Trace statistic sum lambda_i
TestCalibration calib_W(const mp::AspectRatio& ratios, const spectra::SpikeSpec* spikes,
                        const spectra::MomentProfile& moments, mp::SeriesPolicy policy = {});

// Bounded-trace statistic sum lambda_i / (1 + lambda_i)
TestCalibration calib_V(const mp::AspectRatio& ratios, const spectra::SpikeSpec* spikes,
                        const spectra::MomentProfile& moments, mp::SeriesPolicy policy = {});

// Largest-root calibration: mu_r = (1+sqrt(c_n))^2,
// sigma_r = n^{-2/3} (1+sqrt(c_n)) (1+sqrt(1/c_n))^{1/3}
RlrtCalibration rlrt_calibration(const mp::AspectRatio& ratios);

// Upper-tail Tracy-Widom (type 1) quantile t_xi for xi in (0.005, 0.5),
// monotone-cubic interpolation of an embedded table.
double tw_quantile(double xi);

// The embedded (xi, t_xi) nodes, for auditing and cross-validation.
std::vector<std::pair<double, double>> tw_table();

// Upper-tail probability 1 - F1(t), clamped to the embedded table's range.
double tw_pvalue(double t);

// One-sided upper test against a null calibration: z = (raw - center - mu)/sigma,
// reject iff z > z_level (strict).
TestReport test_statistic(double raw, const TestCalibration& calibration, double level);

// Largest-root variant: z = (raw - mu_r)/sigma_r against the TW law.
TestReport test_statistic_rlrt(double raw, const RlrtCalibration& calibration, double level);

PowerPrediction power_U(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                        const spectra::MomentProfile& moments, double xi);
PowerPrediction power_W(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                        const spectra::MomentProfile& moments, double xi);
PowerPrediction power_V(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                        const spectra::MomentProfile& moments, double xi);

// Largest-root power for a simple leading spike; d1 must be one.
PowerPrediction power_R(const mp::AspectRatio& ratios, double alpha1, int d1,
                        double s1_squared, double xi);

struct KappaPanel {
    double u = 0.0;
    double w = 0.0;
    double v = 0.0;
    double r = 0.0;
    bool has_r = false; // only when the leading spike has multiplicity one
    std::string regime; // which test dominates per the alpha_1 vs sqrt(n) heuristic
};

// The four power exponents evaluated side by side for test comparison.
KappaPanel kappa_panel(const mp::AspectRatio& ratios, const spectra::SpikeSpec& spikes,
                       const spectra::MomentProfile& moments, double xi);

} // namespace lht::calib
