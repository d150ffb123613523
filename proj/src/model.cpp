#include "rmimo/model.hpp"

#include <numbers>
#include <stdexcept>

namespace rmimo {

namespace {
constexpr double kPi = std::numbers::pi;

VectorXcd steering(double theta_deg, int n) {
    if (std::abs(theta_deg) >= 90.0)
        throw std::invalid_argument("steering: |theta| must be < 90 deg");
    if (n < 1) throw std::invalid_argument("steering: element count < 1");
    const double s = std::sin(theta_deg * kPi / 180.0);
    VectorXcd a(n);
    for (int m = 0; m < n; ++m)
        a(m) = std::polar(1.0, kPi * static_cast<double>(m) * s);
    return a;
}

MatrixXcd kron(const MatrixXcd& a, const MatrixXcd& b) {
    MatrixXcd out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) =
                a(i, j) * b;
    return out;
}
} // namespace

void Scenario::validate() const {
    if (n_tx < 1 || n_rx < 1 || n_samples < 1)
        throw std::invalid_argument("scenario: array/waveform sizes must be >= 1");
    if (!(energy > 0.0))
        throw std::invalid_argument("scenario: energy must be positive");
    for (const Interferer& k : interferers) {
        if (std::abs(k.range_offset) >= n_samples)
            throw std::invalid_argument("scenario: interferer range offset out of range");
        if (std::abs(k.doa_deg) >= 90.0)
            throw std::invalid_argument("scenario: interferer DOA out of (-90, 90)");
    }
    if (sector.half_width_deg < 0.0)
        throw std::invalid_argument("scenario: sector half-width must be >= 0");
    if (sector.center_deg - sector.half_width_deg <= -90.0 ||
        sector.center_deg + sector.half_width_deg >= 90.0)
        throw std::invalid_argument("scenario: sector must lie inside (-90, 90)");
}

VectorXcd transmit_steering(double theta_deg, int n_tx) {
    return steering(theta_deg, n_tx);
}

VectorXcd receive_steering(double theta_deg, int n_rx) {
    return steering(theta_deg, n_rx);
}

MatrixXd shift_matrix(int r, int n) {
    if (std::abs(r) >= n)
        throw std::out_of_range("shift_matrix: |r| must be < n");
    MatrixXd j = MatrixXd::Zero(n, n);
    for (int l1 = 0; l1 < n; ++l1) {
        const int l2 = l1 - r;
        if (l2 >= 0 && l2 < n) j(l1, l2) = 1.0;
    }
    return j;
}

MatrixXcd target_operator(double theta_deg, const Scenario& sc) {
    const VectorXcd ar = receive_steering(theta_deg, sc.n_rx);
    const VectorXcd at = transmit_steering(theta_deg, sc.n_tx);
    return kron(MatrixXcd::Identity(sc.n_samples, sc.n_samples),
                ar * at.transpose());
}

MatrixXcd interferer_operator(const Interferer& intf, const Scenario& sc) {
    const VectorXcd ar = receive_steering(intf.doa_deg, sc.n_rx);
    const VectorXcd at = transmit_steering(intf.doa_deg, sc.n_tx);
    const MatrixXd jt = shift_matrix(intf.range_offset, sc.n_samples).transpose();
    return kron(jt.cast<Complex>(), ar * at.transpose());
}

MatrixXcd interference_cov_from_s(const VectorXcd& s, const Scenario& sc) {
    MatrixXcd cov = MatrixXcd::Zero(sc.rx_dim(), sc.rx_dim());
    for (const Interferer& k : sc.interferers) {
        const VectorXcd bs = interferer_operator(k, sc) * s;
        cov += db_to_linear(k.inr_db) * (bs * bs.adjoint());
    }
    return cov;
}

MatrixXcd interference_cov_from_V(const MatrixXcd& v, const Scenario& sc) {
    if (v.rows() != sc.rx_dim() || v.cols() != sc.rx_dim())
        throw std::invalid_argument("interference_cov_from_V: dimension mismatch");
    MatrixXcd cov = MatrixXcd::Zero(sc.tx_dim(), sc.tx_dim());
    for (const Interferer& k : sc.interferers) {
        const MatrixXcd b = interferer_operator(k, sc);
        cov += db_to_linear(k.inr_db) * (b.adjoint() * v * b);
    }
    return cov;
}

MatrixXcd interference_cov_from_X(const MatrixXcd& x, const Scenario& sc) {
    if (x.rows() != sc.tx_dim() || x.cols() != sc.tx_dim())
        throw std::invalid_argument("interference_cov_from_X: dimension mismatch");
    MatrixXcd cov = MatrixXcd::Zero(sc.rx_dim(), sc.rx_dim());
    for (const Interferer& k : sc.interferers) {
        const MatrixXcd b = interferer_operator(k, sc);
        cov += db_to_linear(k.inr_db) * (b * x * b.adjoint());
    }
    return cov;
}

double sinr_vectors(const VectorXcd& s, const VectorXcd& w, double theta0_deg,
                    const Scenario& sc) {
    if (s.size() != sc.tx_dim() || w.size() != sc.rx_dim())
        throw std::invalid_argument("sinr_vectors: dimension mismatch");
    if (std::abs(s.squaredNorm() - sc.energy) > 1e-9 * sc.energy)
        throw std::invalid_argument("sinr_vectors: ||s||^2 must equal E");
    const double wn = w.squaredNorm();
    if (wn == 0.0) throw std::invalid_argument("sinr_vectors: zero filter");
    const MatrixXcd a = target_operator(theta0_deg, sc);
    const Complex num = w.adjoint() * a * s;
    const MatrixXcd sig = interference_cov_from_s(s, sc);
    const double den = std::real(Complex(w.adjoint() * sig * w)) + wn;
    return linear_to_db(sc.snr_linear() * std::norm(num) / den);
}

std::vector<double> beampattern(const VectorXcd& s, const VectorXcd& w,
                                const std::vector<double>& theta_grid_deg,
                                const Scenario& sc) {
    const double sn = s.squaredNorm();
    const double wn = w.squaredNorm();
    if (sn == 0.0 || wn == 0.0)
        throw std::invalid_argument("beampattern: zero waveform or filter");
    const double norm = sc.n_rx * sc.n_tx * sn * wn;
    std::vector<double> out;
    out.reserve(theta_grid_deg.size());
    for (double th : theta_grid_deg) {
        const Complex g = w.adjoint() * target_operator(th, sc) * s;
        out.push_back(linear_to_db(std::norm(g) / norm));
    }
    return out;
}

} // namespace rmimo
