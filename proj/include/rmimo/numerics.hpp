#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <cstdint>
#include <random>
#include <vector>

namespace rmimo {

using Complex = std::complex<double>;
using MatrixXcd = Eigen::MatrixXcd;
using VectorXcd = Eigen::VectorXcd;
using MatrixXd = Eigen::MatrixXd;
using VectorXd = Eigen::VectorXd;

/// Eigen-decomposition of a Hermitian matrix with eigenvalues sorted
/// descending and orthonormal eigenvector columns.
struct HermitianEig {
    VectorXd eigenvalues;   // descending
    MatrixXcd eigenvectors; // column i pairs with eigenvalues[i]
};

/// Decomposes a Hermitian matrix. Throws std::invalid_argument if the input
/// is not square or not Hermitian to 1e-12 * ||m||_F.
HermitianEig hermitian_eig(const MatrixXcd& m);

/// Factor a Hermitian PSD matrix as F F^H = m. Eigenvalues in
/// [-tol*lambda_max, 0) are clamped to zero; anything below -tol*lambda_max
/// throws std::invalid_argument.
MatrixXcd psd_factor(const MatrixXcd& m, double tol = 1e-10);

/// Hermitian PSD square root: returns Q with Q = Q^H and Q Q = m.
MatrixXcd psd_sqrt(const MatrixXcd& m, double tol = 1e-10);

/// Number of eigenvalues exceeding rel_tol * lambda_max (0 for the zero
/// matrix). Input must be Hermitian PSD to tolerance.
int numerical_rank(const MatrixXcd& m, double rel_tol = 1e-6);

/// Deterministic stream of standard circularly-symmetric complex Gaussians,
/// E|z|^2 = 1. Built on mt19937_64 with an explicit Box-Muller map so the
/// byte stream depends only on the seed.
class ComplexGaussian {
  public:
    explicit ComplexGaussian(std::uint64_t seed) : engine_(seed) {}

    Complex operator()();
    VectorXcd vector(Eigen::Index n);

  private:
    std::mt19937_64 engine_;
};

/// Draw `count` samples from CN(0, cov). Deterministic under a fixed seed.
std::vector<VectorXcd> sample_complex_gaussian(const MatrixXcd& cov, int count,
                                               std::uint64_t seed);

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

} // namespace rmimo
