#include "rmimo/lifting.hpp"

#include <numbers>
#include <stdexcept>

namespace rmimo {

namespace {
constexpr double kPi = std::numbers::pi;
}

double TrigCoeffs::evaluate(double nu) const {
    Complex acc = g(0);
    for (Eigen::Index l = 1; l < g.size(); ++l)
        acc += 2.0 * g(l) * std::polar(1.0, -static_cast<double>(l) * nu);
    return std::real(acc);
}

SteeringLift build_lift(int n_tx, int n_rx) {
    if (n_tx < 1 || n_rx < 1)
        throw std::invalid_argument("build_lift: counts must be >= 1");
    const int len = n_rx + n_tx - 1;
    SteeringLift lift;
    lift.n_tx = n_tx;
    lift.n_rx = n_rx;
    lift.h = MatrixXd::Zero(n_rx * n_tx, len);
    // Block k selects p_{m+k}: (a_r kron a_t)_{k N_T + m} = e^{j nu (k+m)}.
    for (int k = 0; k < n_rx; ++k)
        for (int m = 0; m < n_tx; ++m) lift.h(k * n_tx + m, m + k) = 1.0;
    return lift;
}

VectorXcd nu_vector(double nu, int len) {
    VectorXcd p(len);
    for (int l = 0; l < len; ++l)
        p(l) = std::polar(1.0, nu * static_cast<double>(l));
    return p;
}

NuInterval sector_to_nu(const TargetSector& sector) {
    if (sector.half_width_deg < 0.0)
        throw std::invalid_argument("sector_to_nu: negative half-width");
    const double lo_deg = sector.center_deg - sector.half_width_deg;
    const double hi_deg = sector.center_deg + sector.half_width_deg;
    if (lo_deg <= -90.0 || hi_deg >= 90.0)
        throw std::invalid_argument("sector_to_nu: sector outside (-90, 90)");
    const double nu_lo = kPi * std::sin(lo_deg * kPi / 180.0);
    const double nu_hi = kPi * std::sin(hi_deg * kPi / 180.0);
    return {(nu_lo + nu_hi) / 2.0, (nu_hi - nu_lo) / 2.0};
}

MatrixXcd g_matrix(const MatrixXcd& x, const MatrixXcd& v,
                   const SteeringLift& lift) {
    const int nt = lift.n_tx;
    const int nr = lift.n_rx;
    if (x.rows() != x.cols() || v.rows() != v.cols() || x.rows() % nt != 0 ||
        v.rows() % nr != 0 || x.rows() / nt != v.rows() / nr)
        throw std::invalid_argument("g_matrix: dimension mismatch");
    const Eigen::Index n = x.rows() / nt;
    MatrixXcd mid = MatrixXcd::Zero(nr * nt, nr * nt);
    for (Eigen::Index n1 = 0; n1 < n; ++n1)
        for (Eigen::Index n2 = 0; n2 < n; ++n2) {
            const auto xb = x.block(n1 * nt, n2 * nt, nt, nt).conjugate();
            const auto vb = v.block(n1 * nr, n2 * nr, nr, nr);
            for (int i = 0; i < nr; ++i)
                for (int j = 0; j < nr; ++j)
                    mid.block(i * nt, j * nt, nt, nt) += vb(i, j) * xb;
        }
    return lift.h.transpose() * mid * lift.h;
}

TrigCoeffs poly_coeffs(const MatrixXcd& g) {
    if (g.rows() != g.cols())
        throw std::invalid_argument("poly_coeffs: matrix not square");
    const Eigen::Index len = g.rows();
    TrigCoeffs c;
    c.g = VectorXcd::Zero(len);
    for (Eigen::Index l = 0; l < len; ++l)
        for (Eigen::Index k = 0; k + l < len; ++k) c.g(l) += g(l + k, k);
    c.g(0) = std::real(c.g(0));
    return c;
}

double denominator(const MatrixXcd& x, const MatrixXcd& v, const Scenario& sc) {
    const double trx = std::real(x.trace());
    const double trv = std::real(v.trace());
    if (!(trx > 0.0) || !(trv > 0.0))
        throw std::invalid_argument("denominator: traces must be positive");
    const MatrixXcd sig = interference_cov_from_V(v, sc);
    return std::real(((sig + (trv / sc.energy) *
                                 MatrixXcd::Identity(x.rows(), x.cols())) *
                      x)
                         .trace());
}

} // namespace rmimo
