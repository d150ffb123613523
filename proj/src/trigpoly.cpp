#include "rmimo/trigpoly.hpp"

#include <limits>
#include <numbers>
#include <stdexcept>

namespace rmimo {

namespace {
constexpr double kPi = std::numbers::pi;
}

VectorXcd NonnegConstraintRows::apply(const MatrixXcd& z1,
                                      const MatrixXcd& z2) const {
    const std::size_t len = z1_re.size();
    VectorXcd h(static_cast<Eigen::Index>(len));
    for (std::size_t l = 0; l < len; ++l) {
        const double re = std::real((z1_re[l] * z1).trace()) +
                          std::real((z2_re[l] * z2).trace());
        const double im = std::real((z1_im[l] * z1).trace()) +
                          std::real((z2_im[l] * z2).trace());
        h(static_cast<Eigen::Index>(l)) = Complex(re, im);
    }
    return h;
}

DftFrames build_frames(int poly_len, const NuInterval& interval, int q_points) {
    if (poly_len < 1)
        throw std::invalid_argument("build_frames: poly_len must be >= 1");
    if (q_points < 2 * poly_len - 1)
        throw std::invalid_argument("build_frames: Q must be >= 2L-1");
    if (!(interval.beta > 0.0 && interval.beta < kPi))
        throw std::invalid_argument("build_frames: beta must be in (0, pi)");
    DftFrames fr;
    fr.interval = interval;
    fr.f1.resize(q_points, poly_len);
    fr.f2.resize(q_points, poly_len - 1);
    fr.d.resize(q_points);
    for (int q = 0; q < q_points; ++q) {
        const double base = 2.0 * kPi * q / q_points;
        for (int l = 0; l < poly_len; ++l)
            fr.f1(q, l) = std::polar(1.0, -base * l);
        for (int l = 0; l + 1 < poly_len; ++l) fr.f2(q, l) = fr.f1(q, l);
        fr.d(q) = std::cos(base - interval.alpha) - std::cos(interval.beta);
    }
    return fr;
}

VectorXcd coeffs_from_certificate(const ArcNonnegCert& cert,
                                  const DftFrames& frames) {
    if (cert.z1.rows() != frames.f1.cols() || cert.z2.rows() != frames.f2.cols())
        throw std::invalid_argument("coeffs_from_certificate: shape mismatch");
    const VectorXd diag1 = (frames.f1 * cert.z1 * frames.f1.adjoint())
                               .diagonal()
                               .real();
    const VectorXd diag2 = (frames.f2 * cert.z2 * frames.f2.adjoint())
                               .diagonal()
                               .real();
    const VectorXd combined = diag1 + frames.d.cwiseProduct(diag2);
    return frames.f1.adjoint() * combined.cast<Complex>();
}

NonnegConstraintRows nonneg_constraint_rows(const DftFrames& frames) {
    const int len = frames.poly_len();
    const int q_points = static_cast<int>(frames.f1.rows());
    NonnegConstraintRows rows;
    rows.z1_re.assign(len, MatrixXcd::Zero(len, len));
    rows.z1_im.assign(len, MatrixXcd::Zero(len, len));
    rows.z2_re.assign(len, MatrixXcd::Zero(len - 1, len - 1));
    rows.z2_im.assign(len, MatrixXcd::Zero(len - 1, len - 1));
    for (int q = 0; q < q_points; ++q) {
        // h_l = sum_q conj(F1(q,l)) [tr(Z1 c_q c_q^H) + d_q tr(Z2 b_q b_q^H)]
        const VectorXcd cq = frames.f1.row(q).adjoint();
        const VectorXcd bq = frames.f2.row(q).adjoint();
        const MatrixXcd c_outer = cq * cq.adjoint();
        const MatrixXcd b_outer = bq * bq.adjoint();
        for (int l = 0; l < len; ++l) {
            const double phase = 2.0 * kPi * l * q / q_points;
            rows.z1_re[static_cast<std::size_t>(l)] += std::cos(phase) * c_outer;
            rows.z1_im[static_cast<std::size_t>(l)] += std::sin(phase) * c_outer;
            rows.z2_re[static_cast<std::size_t>(l)] +=
                frames.d(q) * std::cos(phase) * b_outer;
            rows.z2_im[static_cast<std::size_t>(l)] +=
                frames.d(q) * std::sin(phase) * b_outer;
        }
    }
    return rows;
}

double verify_nonneg(const VectorXcd& h, const NuInterval& interval,
                     int grid_size) {
    if (grid_size < 2)
        throw std::invalid_argument("verify_nonneg: grid too small");
    TrigCoeffs coeffs{h};
    double lo = interval.alpha - interval.beta;
    double hi = interval.alpha + interval.beta;
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_size; ++i) {
        const double nu = lo + (hi - lo) * i / (grid_size - 1);
        best = std::min(best, coeffs.evaluate(nu));
    }
    return best;
}

} // namespace rmimo
