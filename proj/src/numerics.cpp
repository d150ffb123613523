#include "rmimo/numerics.hpp"

#include <numbers>
#include <stdexcept>

namespace rmimo {

namespace {

void check_hermitian(const MatrixXcd& m, double rel_tol) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("hermitian_eig: matrix is not square");
    const double scale = m.norm();
    if ((m - m.adjoint()).norm() > rel_tol * std::max(scale, 1e-300))
        throw std::invalid_argument("hermitian_eig: matrix is not Hermitian");
}

} // namespace

HermitianEig hermitian_eig(const MatrixXcd& m) {
    check_hermitian(m, 1e-12);
    Eigen::SelfAdjointEigenSolver<MatrixXcd> es((m + m.adjoint()) / 2.0);
    if (es.info() != Eigen::Success)
        throw std::runtime_error("hermitian_eig: eigensolver failed");
    const Eigen::Index n = m.rows();
    HermitianEig out;
    out.eigenvalues = es.eigenvalues().reverse();
    out.eigenvectors = es.eigenvectors().rowwise().reverse();
    (void)n;
    return out;
}

MatrixXcd psd_factor(const MatrixXcd& m, double tol) {
    HermitianEig eig = hermitian_eig(m);
    const double lmax = eig.eigenvalues.size() > 0 ? eig.eigenvalues(0) : 0.0;
    if (lmax < 0.0 && lmax < -tol)
        throw std::invalid_argument("psd_factor: matrix is not PSD");
    VectorXd lam = eig.eigenvalues;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -tol * std::max(lmax, 0.0))
            throw std::invalid_argument("psd_factor: matrix is not PSD");
        lam(i) = std::max(lam(i), 0.0);
    }
    return eig.eigenvectors * lam.cwiseSqrt().asDiagonal();
}

MatrixXcd psd_sqrt(const MatrixXcd& m, double tol) {
    HermitianEig eig = hermitian_eig(m);
    const double lmax = eig.eigenvalues.size() > 0 ? eig.eigenvalues(0) : 0.0;
    VectorXd lam = eig.eigenvalues;
    for (Eigen::Index i = 0; i < lam.size(); ++i) {
        if (lam(i) < -tol * std::max(lmax, 0.0))
            throw std::invalid_argument("psd_sqrt: matrix is not PSD");
        lam(i) = std::max(lam(i), 0.0);
    }
    return eig.eigenvectors * lam.cwiseSqrt().asDiagonal() *
           eig.eigenvectors.adjoint();
}

int numerical_rank(const MatrixXcd& m, double rel_tol) {
    HermitianEig eig = hermitian_eig(m);
    const double lmax = eig.eigenvalues.size() > 0 ? eig.eigenvalues(0) : 0.0;
    if (lmax <= 0.0) return 0;
    int r = 0;
    for (Eigen::Index i = 0; i < eig.eigenvalues.size(); ++i)
        if (eig.eigenvalues(i) > rel_tol * lmax) ++r;
    return r;
}

Complex ComplexGaussian::operator()() {
    // Box-Muller on explicitly mapped uniforms; mt19937_64 output is
    // specified bit-exactly by the standard.
    const double u1 =
        (static_cast<double>(engine_() >> 11) + 1.0) / 9007199254740993.0;
    const double u2 = static_cast<double>(engine_() >> 11) / 9007199254740992.0;
    const double r = std::sqrt(-std::log(u1));
    const double phi = 2.0 * std::numbers::pi * u2;
    return {r * std::cos(phi), r * std::sin(phi)};
}

VectorXcd ComplexGaussian::vector(Eigen::Index n) {
    VectorXcd v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = (*this)();
    return v;
}

std::vector<VectorXcd> sample_complex_gaussian(const MatrixXcd& cov, int count,
                                               std::uint64_t seed) {
    const MatrixXcd f = psd_factor(cov);
    ComplexGaussian rng(seed);
    std::vector<VectorXcd> out;
    out.reserve(static_cast<std::size_t>(count));
    for (int i = 0; i < count; ++i) out.push_back(f * rng.vector(cov.cols()));
    return out;
}

} // namespace rmimo
