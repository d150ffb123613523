#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "rmimo/numerics.hpp"

#include <random>

using namespace rmimo;

namespace {

MatrixXcd random_hermitian(int n, std::uint64_t seed) {
    ComplexGaussian rng(seed);
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng();
    return (a + a.adjoint()) / 2.0;
}

MatrixXcd random_psd(int n, std::uint64_t seed) {
    ComplexGaussian rng(seed);
    MatrixXcd a(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) a(i, j) = rng();
    return a * a.adjoint();
}

} // namespace

TEST_CASE("hermitian_eig: identity") {
    auto eig = hermitian_eig(MatrixXcd::Identity(2, 2));
    CHECK(eig.eigenvalues(0) == doctest::Approx(1.0));
    CHECK(eig.eigenvalues(1) == doctest::Approx(1.0));
}

TEST_CASE("hermitian_eig: rank-one outer product") {
    VectorXcd s(2);
    s << Complex(1, 0), Complex(0, 1);
    auto eig = hermitian_eig(s * s.adjoint());
    CHECK(eig.eigenvalues(0) == doctest::Approx(2.0));
    CHECK(eig.eigenvalues(1) == doctest::Approx(0.0));
    // top eigenvector parallel to s / sqrt(2)
    const Complex ip = (eig.eigenvectors.col(0).adjoint() * s)(0);
    CHECK(std::abs(ip) == doctest::Approx(std::sqrt(2.0)));
}

TEST_CASE("hermitian_eig: reconstruction on random matrices") {
    for (int trial = 0; trial < 100; ++trial) {
        const int n = 2 + trial % 63;
        const MatrixXcd m = random_hermitian(n, 1000 + trial);
        auto eig = hermitian_eig(m);
        const MatrixXcd rec = eig.eigenvectors *
                              eig.eigenvalues.cast<Complex>().asDiagonal() *
                              eig.eigenvectors.adjoint();
        CHECK((rec - m).norm() <= 1e-10 * m.norm());
        // descending order, orthonormal columns
        for (Eigen::Index i = 0; i + 1 < eig.eigenvalues.size(); ++i)
            CHECK(eig.eigenvalues(i) >= eig.eigenvalues(i + 1));
        CHECK((eig.eigenvectors.adjoint() * eig.eigenvectors -
               MatrixXcd::Identity(n, n))
                  .norm() < 1e-12 * n);
    }
}

TEST_CASE("hermitian_eig: rejects non-Hermitian") {
    MatrixXcd m(2, 2);
    m << 1.0, 2.0, 3.0, 4.0;
    CHECK_THROWS_AS(hermitian_eig(m), std::invalid_argument);
    CHECK_THROWS_AS(hermitian_eig(MatrixXcd::Zero(2, 3)), std::invalid_argument);
}

TEST_CASE("psd_factor: identity and rank-one") {
    const MatrixXcd f = psd_factor(MatrixXcd::Identity(3, 3));
    CHECK((f * f.adjoint() - MatrixXcd::Identity(3, 3)).norm() < 1e-12);

    VectorXcd w(3);
    w << Complex(1, 2), Complex(0, -1), Complex(0.5, 0);
    const MatrixXcd g = psd_factor(w * w.adjoint());
    CHECK((g * g.adjoint() - w * w.adjoint()).norm() < 1e-12 * w.squaredNorm());
    // single nonzero column, parallel to w
    int nonzero_cols = 0;
    for (int j = 0; j < 3; ++j)
        if (g.col(j).norm() > 1e-6 * w.norm()) ++nonzero_cols;
    CHECK(nonzero_cols == 1);
}

TEST_CASE("psd_factor: random PSD reconstruction") {
    for (int trial = 0; trial < 20; ++trial) {
        const MatrixXcd m = random_psd(6, 2000 + trial);
        const MatrixXcd f = psd_factor(m);
        CHECK((f * f.adjoint() - m).norm() < 1e-9 * m.norm());
    }
}

TEST_CASE("psd_factor: rejects indefinite input") {
    MatrixXcd m = MatrixXcd::Identity(2, 2);
    m(1, 1) = -1.0;
    CHECK_THROWS_AS(psd_factor(m), std::invalid_argument);
}

TEST_CASE("psd_sqrt: squares back") {
    const MatrixXcd m = random_psd(5, 77);
    const MatrixXcd q = psd_sqrt(m);
    CHECK((q - q.adjoint()).norm() < 1e-10 * q.norm());
    CHECK((q * q - m).norm() < 1e-9 * m.norm());
}

TEST_CASE("numerical_rank") {
    VectorXcd s(4);
    s << 1.0, Complex(0, 1), -1.0, 0.5;
    CHECK(numerical_rank(s * s.adjoint()) == 1);
    CHECK(numerical_rank(MatrixXcd::Identity(5, 5)) == 5);
    CHECK(numerical_rank(MatrixXcd::Zero(3, 3)) == 0);
    const MatrixXcd m =
        s * s.adjoint() + 1e-9 * MatrixXcd::Identity(4, 4);
    CHECK(numerical_rank(m, 1e-6) == 1);
}

TEST_CASE("sample_complex_gaussian: zero covariance, determinism") {
    auto zero = sample_complex_gaussian(MatrixXcd::Zero(3, 3), 4, 7);
    for (const auto& v : zero) CHECK(v.norm() == 0.0);

    auto a = sample_complex_gaussian(MatrixXcd::Identity(2, 2), 10, 42);
    auto b = sample_complex_gaussian(MatrixXcd::Identity(2, 2), 10, 42);
    for (std::size_t i = 0; i < a.size(); ++i)
        CHECK((a[i] - b[i]).norm() == 0.0); // bit-exact
    auto c = sample_complex_gaussian(MatrixXcd::Identity(2, 2), 10, 43);
    CHECK((a[0] - c[0]).norm() > 0.0);
}

TEST_CASE("sample_complex_gaussian: sample covariance converges") {
    const int n = 2;
    const int draws = 10000;
    auto samples = sample_complex_gaussian(MatrixXcd::Identity(n, n), draws, 5);
    MatrixXcd cov = MatrixXcd::Zero(n, n);
    for (const auto& v : samples) cov += v * v.adjoint();
    cov /= static_cast<double>(draws);
    CHECK((cov - MatrixXcd::Identity(n, n)).norm() <
          0.05 * MatrixXcd::Identity(n, n).norm());
}
