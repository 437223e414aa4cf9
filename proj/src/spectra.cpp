#include "lht/spectra.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <set>

namespace lht::spectra {

void validate_spike_spec(const SpikeSpec& spec, const mp::AspectRatio& ratios) {
    const double edge = 1.0 + std::sqrt(ratios.c_n());
    std::set<double> seen;
    double prev = std::numeric_limits<double>::infinity();
    for (const auto& g : spec.groups) {
        if (g.d < 1) throw std::domain_error("SpikeSpec: multiplicities must be positive");
        if (!(g.alpha > edge))
            throw std::domain_error("SpikeSpec: subcritical spike (alpha <= 1 + sqrt(c_n))");
        if (!(g.alpha < prev))
            throw std::domain_error("SpikeSpec: groups must be sorted by alpha descending");
        prev = g.alpha;
        if (!seen.insert(g.alpha).second)
            throw std::domain_error("SpikeSpec: spike values must be distinct across groups");
    }
    const int M = spec.total_multiplicity();
    if (M != ratios.M)
        throw std::domain_error("SpikeSpec: total multiplicity disagrees with AspectRatio.M");
    if (!spec.standard_basis) {
        if (spec.basis.rows() != ratios.p || spec.basis.cols() != M)
            throw std::domain_error("SpikeSpec: basis must be p x M");
        const Eigen::MatrixXd g = spec.basis.transpose() * spec.basis;
        if ((g - Eigen::MatrixXd::Identity(M, M)).cwiseAbs().maxCoeff() > 1e-10)
            throw std::domain_error("SpikeSpec: basis columns must be orthonormal");
    }
}

Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data) {
    if (data.rows() == 0 || data.cols() == 0)
        throw std::domain_error("sample_covariance: empty data matrix");
    const auto p = data.rows();
    Eigen::MatrixXd B = Eigen::MatrixXd::Zero(p, p);
    B.selfadjointView<Eigen::Lower>().rankUpdate(data, 1.0 / data.cols());
    B.triangularView<Eigen::StrictlyUpper>() = B.transpose();
    return B;
}

std::vector<double> eigen_spectrum(const Eigen::MatrixXd& B) {
    if (B.rows() != B.cols() || B.rows() == 0)
        throw std::domain_error("eigen_spectrum: matrix must be square and non-empty");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(B, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigen_spectrum: eigensolver failed to converge");
    const auto& ev = solver.eigenvalues(); // ascending
    const auto p = ev.size();
    std::vector<double> values(p);
    const double lmax = std::max(ev(p - 1), 0.0);
    const double clamp = 1e-10 * lmax;
    for (Eigen::Index i = 0; i < p; ++i) {
        double v = ev(p - 1 - i);
        if (v < 0.0) {
            if (-v > clamp)
                throw std::domain_error("eigen_spectrum: input is not positive semidefinite");
            v = 0.0;
        }
        values[i] = v;
    }
    return values;
}

RawStatistics raw_statistics(const std::vector<double>& values) {
    RawStatistics s;
    for (double lam : values) {
        s.u += std::log1p(lam);
        s.w += lam;
        s.v += lam / (1.0 + lam);
    }
    s.r = values.empty() ? 0.0 : values.front();
    return s;
}

double u_group_sum(const SpikeSpec& spec, int group_index) {
    if (group_index < 0 || group_index >= static_cast<int>(spec.groups.size()))
        throw std::domain_error("u_group_sum: group index out of range");
    if (spec.standard_basis) return spec.groups[group_index].d;

    int offset = 0;
    for (int g = 0; g < group_index; ++g) offset += spec.groups[g].d;
    const int d = spec.groups[group_index].d;

    // sum_t (sum_{j in group} u_{tj}^2)^2
    double total = 0.0;
    for (Eigen::Index t = 0; t < spec.basis.rows(); ++t) {
        double row = 0.0;
        for (int j = 0; j < d; ++j) {
            const double u = spec.basis(t, offset + j);
            row += u * u;
        }
        total += row * row;
    }
    return total;
}

double s_k_squared(double alpha_k, int d_k, double u_sum,
                   const MomentProfile& moments, double c) {
    if (u_sum < 0.0) throw std::domain_error("s_k_squared: u_sum must be non-negative");
    const auto tn = mp::theta_nu(alpha_k, c);
    return (moments.alpha_x + 1.0) * d_k / tn.theta +
           moments.beta_x * tn.nu * u_sum / (tn.theta * tn.theta);
}

} // namespace lht::spectra
