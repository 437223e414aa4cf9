#pragma once

#include <Eigen/Dense>
#include <vector>

#include "lht/mpcore.hpp"

namespace lht::spectra {

// Entry-distribution parameters: alpha_x = |E x^2|^2 (1 for real data),
// beta_x = E|x|^4 - |E x^2|^2 - 2.
struct MomentProfile {
    double alpha_x = 1.0;
    double beta_x = 0.0;
};

struct SpikeGroup {
    double alpha = 0.0;
    int d = 1;
};

// Spiked eigenvalues with multiplicities, plus the spike eigenbasis.  When
// standard_basis is set the basis is the leading coordinate vectors and
// group sums reduce to the multiplicities exactly.
struct SpikeSpec {
    std::vector<SpikeGroup> groups;
    bool standard_basis = true;
    Eigen::MatrixXd basis; // p x M, orthonormal columns (ignored when standard)

    int total_multiplicity() const {
        int m = 0;
        for (const auto& g : groups) m += g.d;
        return m;
    }
    bool empty() const { return groups.empty(); }
};

void validate_spike_spec(const SpikeSpec& spec, const mp::AspectRatio& ratios);

// (1/n) Y Y^T for a p x n data matrix Y (columns are observations,
// already centered)
Eigen::MatrixXd sample_covariance(const Eigen::MatrixXd& data);

// Eigenvalues sorted descending; negatives within 1e-10 * lambda_max are
// clamped to zero, larger ones raise an error.
std::vector<double> eigen_spectrum(const Eigen::MatrixXd& B);

struct RawStatistics {
    double u = 0.0; // sum log(1 + lambda_i)
    double w = 0.0; // sum lambda_i
    double v = 0.0; // sum lambda_i / (1 + lambda_i)
    double r = 0.0; // lambda_1
};

RawStatistics raw_statistics(const std::vector<double>& values);

// sum_{j1,j2 in group} sum_t u_{t j1}^2 u_{t j2}^2 from the basis columns;
// equals d_k exactly for the standard basis.
double u_group_sum(const SpikeSpec& spec, int group_index);

// (alpha_x + 1) d_k / theta_k + beta_x nu_k u_sum / theta_k^2
double s_k_squared(double alpha_k, int d_k, double u_sum,
                   const MomentProfile& moments, double c);

} // namespace lht::spectra
