#include <doctest.h>

#include <Eigen/QR>
#include <cmath>

#include "lht/rng.hpp"
#include "lht/spectra.hpp"

using namespace lht;

namespace {

Eigen::MatrixXd random_matrix(int rows, int cols, std::uint64_t seed) {
    Eigen::MatrixXd m(rows, cols);
    rng::Stream stream(seed, 0);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; i += 2) {
            double a, b;
            stream.normal_pair(a, b);
            m(i, j) = a;
            if (i + 1 < rows) m(i + 1, j) = b;
        }
    return m;
}

Eigen::MatrixXd random_orthogonal(int p, std::uint64_t seed) {
    const Eigen::MatrixXd g = random_matrix(p, p, seed);
    return Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
}

} // namespace

TEST_CASE("sample_covariance: definition and trace identity") {
    CHECK(spectra::sample_covariance(Eigen::MatrixXd::Zero(4, 7)).isZero(0.0));

    Eigen::MatrixXd y(3, 1);
    y << 1.0, -2.0, 0.5;
    const Eigen::MatrixXd B1 = spectra::sample_covariance(y);
    CHECK((B1 - y * y.transpose()).cwiseAbs().maxCoeff() < 1e-15);

    const auto data = random_matrix(6, 40, 11);
    const auto B = spectra::sample_covariance(data);
    CHECK((B - B.transpose()).cwiseAbs().maxCoeff() < 1e-12 * B.cwiseAbs().maxCoeff());
    CHECK(B.trace() == doctest::Approx(data.squaredNorm() / 40.0).epsilon(1e-12));

    CHECK_THROWS_AS(spectra::sample_covariance(Eigen::MatrixXd()), std::domain_error);
}

TEST_CASE("eigen_spectrum: sorting, clamping, recovery") {
    const auto id = spectra::eigen_spectrum(Eigen::MatrixXd::Identity(3, 3));
    CHECK(id == std::vector<double>{1.0, 1.0, 1.0});

    Eigen::Vector3d d(3.0, 1.0, 2.0);
    const auto sorted = spectra::eigen_spectrum(d.asDiagonal());
    CHECK(sorted == std::vector<double>{3.0, 2.0, 1.0});

    const auto data = random_matrix(8, 30, 5);
    const auto B = spectra::sample_covariance(data);
    const auto values = spectra::eigen_spectrum(B);
    double sum = 0.0;
    for (double v : values) sum += v;
    CHECK(sum == doctest::Approx(B.trace()).epsilon(1e-10));

    // spectrum of Q D Q^T recovers D
    const int p = 12;
    const auto Q = random_orthogonal(p, 3);
    Eigen::VectorXd diag(p);
    for (int i = 0; i < p; ++i) diag(i) = 0.5 + i;
    const Eigen::MatrixXd A = Q * diag.asDiagonal() * Q.transpose();
    const auto rec = spectra::eigen_spectrum(A);
    for (int i = 0; i < p; ++i)
        CHECK(rec[i] == doctest::Approx(diag(p - 1 - i)).epsilon(1e-9));

    Eigen::Matrix2d neg;
    neg << 1.0, 0.0, 0.0, -0.5;
    CHECK_THROWS_AS(spectra::eigen_spectrum(neg), std::domain_error);
}

TEST_CASE("raw_statistics: arithmetic and the V complement identity") {
    const auto zero = spectra::raw_statistics({0.0, 0.0, 0.0});
    CHECK(zero.u == 0.0);
    CHECK(zero.w == 0.0);
    CHECK(zero.v == 0.0);
    CHECK(zero.r == 0.0);

    const auto s = spectra::raw_statistics({3.0, 2.0, 1.0});
    CHECK(s.w == doctest::Approx(6.0));
    CHECK(s.r == doctest::Approx(3.0));
    CHECK(s.v == doctest::Approx(23.0 / 12.0).epsilon(1e-15));

    CHECK(spectra::raw_statistics({1.0}).u == doctest::Approx(std::log(2.0)).epsilon(1e-15));

    const auto data = random_matrix(10, 50, 17);
    const auto values = spectra::eigen_spectrum(spectra::sample_covariance(data));
    const auto r = spectra::raw_statistics(values);
    double complement = 0.0;
    for (double lam : values) complement += 1.0 / (1.0 + lam);
    CHECK(r.v + complement == doctest::Approx(10.0).epsilon(1e-12));
    CHECK(r.u >= 0.0);
    CHECK(r.v >= 0.0);
    CHECK(r.v < 10.0);
    CHECK(r.r == values.front());
}

TEST_CASE("u_group_sum: standard basis, uniform column, bounds") {
    spectra::SpikeSpec std3;
    std3.groups = {{50.0, 3}};
    std3.standard_basis = true;
    CHECK(spectra::u_group_sum(std3, 0) == 3.0);

    const int p = 25;
    spectra::SpikeSpec uniform;
    uniform.groups = {{50.0, 1}};
    uniform.standard_basis = false;
    uniform.basis = Eigen::MatrixXd::Constant(p, 1, 1.0 / std::sqrt(double(p)));
    CHECK(spectra::u_group_sum(uniform, 0) == doctest::Approx(1.0 / p).epsilon(1e-12));

    // Cauchy-Schwarz bounds d^2/p <= sum <= d^2 on random orthonormal columns
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto Q = random_orthogonal(p, seed);
        spectra::SpikeSpec spec;
        spec.groups = {{80.0, 2}};
        spec.standard_basis = false;
        spec.basis = Q.leftCols(2);
        const double sum = spectra::u_group_sum(spec, 0);
        CHECK(sum >= 4.0 / p - 1e-12);
        CHECK(sum <= 4.0 + 1e-12);

        // invariant under column permutation and sign flips
        spectra::SpikeSpec flipped = spec;
        flipped.basis.col(0) = -spec.basis.col(1);
        flipped.basis.col(1) = spec.basis.col(0);
        CHECK(spectra::u_group_sum(flipped, 0) == doctest::Approx(sum).epsilon(1e-14));
    }

    CHECK_THROWS_AS(spectra::u_group_sum(std3, 1), std::domain_error);
}

TEST_CASE("s_k_squared: asymptote and oracle substitution stability") {
    // theta, nu -> 1, so with alpha_x = 1, beta_x = 0 the value approaches 2 d_k
    const double far = spectra::s_k_squared(1e8, 3, 3.0, {1.0, 0.0}, 0.4);
    CHECK(far == doctest::Approx(6.0).epsilon(1e-6));

    const auto tn5 = mp::theta_nu(5.0, 0.5);
    CHECK(spectra::s_k_squared(5.0, 1, 1.0, {1.0, 0.0}, 0.5) ==
          doctest::Approx(2.0 / tn5.theta).epsilon(1e-14));

    // alpha = 20, c = 1/3: substitute finite-difference theta/nu estimates
    const double c = 1.0 / 3.0;
    const double f = mp::phi(20.0, c);
    auto m_at = [&](double x) { return mp::mp_stieltjes({x, 0.0}, c).real(); };
    const double h = 1e-4;
    const double d1 = (m_at(f + h) - m_at(f - h)) / (2.0 * h);
    const double d2 = (m_at(f + h / 2) - m_at(f - h / 2)) / h;
    const double theta_fd = f * f * (4.0 * d2 - d1) / 3.0;
    const double nu_fd = f * f * m_at(f) * m_at(f);
    const spectra::MomentProfile moments{1.0, 1.5};
    const double direct = spectra::s_k_squared(20.0, 1, 1.0, moments, c);
    const double substituted = 2.0 / theta_fd + 1.5 * nu_fd / (theta_fd * theta_fd);
    CHECK(direct == doctest::Approx(substituted).epsilon(1e-6));

    CHECK_THROWS_AS(spectra::s_k_squared(5.0, 1, -1.0, {1.0, 0.0}, 0.5), std::domain_error);
}

TEST_CASE("validate_spike_spec: ordering, criticality, basis checks") {
    const mp::AspectRatio ratios(40, 200, 2);

    spectra::SpikeSpec ok;
    ok.groups = {{9.0, 1}, {5.0, 1}};
    CHECK_NOTHROW(spectra::validate_spike_spec(ok, ratios));

    spectra::SpikeSpec unsorted;
    unsorted.groups = {{5.0, 1}, {9.0, 1}};
    CHECK_THROWS_AS(spectra::validate_spike_spec(unsorted, ratios), std::domain_error);

    spectra::SpikeSpec sub;
    sub.groups = {{9.0, 1}, {1.2, 1}};
    CHECK_THROWS_AS(spectra::validate_spike_spec(sub, ratios), std::domain_error);

    spectra::SpikeSpec wrong_m;
    wrong_m.groups = {{9.0, 1}};
    CHECK_THROWS_AS(spectra::validate_spike_spec(wrong_m, ratios), std::domain_error);

    spectra::SpikeSpec bad_basis = ok;
    bad_basis.standard_basis = false;
    bad_basis.basis = Eigen::MatrixXd::Constant(40, 2, 0.3);
    CHECK_THROWS_AS(spectra::validate_spike_spec(bad_basis, ratios), std::domain_error);
}
