#include "rmimo/synthesis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace rmimo {

namespace {

std::vector<double> sector_grid(const Scenario& sc, int grid_size) {
    const double lo = sc.sector.center_deg - sc.sector.half_width_deg;
    const double hi = sc.sector.center_deg + sc.sector.half_width_deg;
    std::vector<double> grid;
    if (grid_size == 1 || lo == hi) {
        grid.push_back(sc.sector.center_deg);
        return grid;
    }
    grid.reserve(static_cast<std::size_t>(grid_size));
    for (int i = 0; i < grid_size; ++i)
        grid.push_back(lo + (hi - lo) * i / (grid_size - 1));
    return grid;
}

// min over z of z^H P z - 2 Re(d^H z) subject to ||z||^2 <= radius2, with
// P Hermitian PSD: exact solution through the secular equation of the
// Lagrangian (lambda_i + mu) z_i = b_i in the eigenbasis of P.
VectorXcd constrained_quadratic_min(const MatrixXcd& p, const VectorXcd& d,
                                    double radius2) {
    const HermitianEig eig = hermitian_eig(p);
    const VectorXd lam = eig.eigenvalues.cwiseMax(0.0);
    const VectorXcd b = eig.eigenvectors.adjoint() * d;
    const Eigen::Index n = lam.size();
    const double lam_max = n > 0 ? lam(0) : 0.0;
    const double null_tol = 1e-12 * std::max(1.0, lam_max);

    // interior candidate: pseudo-inverse solution, valid when d has no
    // component on the null space of P
    bool null_component = false;
    VectorXcd z = VectorXcd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (lam(i) > null_tol)
            z(i) = b(i) / lam(i);
        else if (std::abs(b(i)) > 1e-12 * std::max(1.0, d.norm()))
            null_component = true;
    }
    if (!null_component && z.squaredNorm() <= radius2)
        return eig.eigenvectors * z;

    auto norm2_at = [&](double mu) {
        double v = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            v += std::norm(b(i)) / ((lam(i) + mu) * (lam(i) + mu));
        return v;
    };
    double lo_mu = 0.0;
    double hi_mu = 1.0;
    while (norm2_at(hi_mu) > radius2 && hi_mu < 1e300) hi_mu *= 2.0;
    for (int it = 0; it < 300; ++it) {
        const double mid = 0.5 * (lo_mu + hi_mu);
        (norm2_at(mid) > radius2 ? lo_mu : hi_mu) = mid;
    }
    const double mu = 0.5 * (lo_mu + hi_mu);
    for (Eigen::Index i = 0; i < n; ++i) z(i) = b(i) / (lam(i) + mu);
    return eig.eigenvectors * z;
}

// Cyclic minimization shared by both QCQP syntheses. `shapes` are the
// Hermitian factors Q_m, `constraint` the PD quadratic-form matrix, and
// `budget` its right-hand side.
VectorXcd cyclic_shape_match(const std::vector<MatrixXcd>& shapes,
                             const VectorXd& c, const MatrixXcd& constraint,
                             double budget, VectorXcd init, int iterations,
                             std::vector<double>* history) {
    const std::size_t m_count = shapes.size();
    const Eigen::Index n = init.size();

    MatrixXcd p = MatrixXcd::Zero(n, n);
    for (const MatrixXcd& q : shapes) p += q * q;

    // whiten the constraint so the trust-region ball is Euclidean
    const MatrixXcd half = psd_sqrt(constraint);
    const MatrixXcd half_inv = [&] {
        const HermitianEig eig = hermitian_eig(half);
        if (eig.eigenvalues.minCoeff() <= 0.0)
            throw std::invalid_argument(
                "synthesis: constraint matrix is singular");
        return MatrixXcd(eig.eigenvectors *
                         eig.eigenvalues.cwiseInverse().asDiagonal() *
                         eig.eigenvectors.adjoint());
    }();
    const MatrixXcd p_w = half_inv * p * half_inv;

    std::vector<VectorXcd> q_dir(m_count, VectorXcd::Unit(n, 0));
    VectorXcd sbar = std::move(init);
    double prev_obj = std::numeric_limits<double>::infinity();
    for (int it = 0; it < iterations; ++it) {
        for (std::size_t m = 0; m < m_count; ++m) {
            const VectorXcd qs = shapes[m] * sbar;
            const double nrm = qs.norm();
            if (nrm > 0.0) q_dir[m] = qs / nrm;
        }
        VectorXcd d = VectorXcd::Zero(n);
        for (std::size_t m = 0; m < m_count; ++m)
            d += std::sqrt(std::max(c(static_cast<Eigen::Index>(m)), 0.0)) *
                 (shapes[m] * q_dir[m]);
        const VectorXcd z =
            constrained_quadratic_min(p_w, half_inv * d, budget);
        sbar = half_inv * z;

        double obj = std::real(Complex(sbar.adjoint() * p * sbar)) + c.sum() -
                     2.0 * std::real(d.dot(sbar));
        if (history) history->push_back(obj);
        if (prev_obj - obj < 1e-12 * std::max(1.0, std::abs(prev_obj))) break;
        prev_obj = obj;
    }
    return sbar;
}

} // namespace

VectorXcd canonical_phase(VectorXcd v) {
    Eigen::Index imax = 0;
    double best = -1.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const double a = std::abs(v(i));
        if (a > best) {
            best = a;
            imax = i;
        }
    }
    if (best > 0.0) v *= std::conj(v(imax)) / best;
    return v;
}

std::optional<std::pair<VectorXcd, VectorXcd>> extract_rank_one(
    const DesignPair& pair, const Scenario& sc, double rel_tol) {
    if (numerical_rank(pair.x, rel_tol) != 1 ||
        numerical_rank(pair.v, rel_tol) != 1)
        return std::nullopt;
    const HermitianEig ex = hermitian_eig(pair.x);
    const HermitianEig ev = hermitian_eig(pair.v);
    VectorXcd s = std::sqrt(sc.energy) * ex.eigenvectors.col(0);
    VectorXcd w = std::sqrt(ev.eigenvalues(0)) * ev.eigenvectors.col(0);
    return std::make_pair(canonical_phase(std::move(s)),
                          canonical_phase(std::move(w)));
}

ShapeTargets shape_targets(const DesignPair& pair, const Scenario& sc,
                           int m_count) {
    if (m_count < 2) throw std::invalid_argument("shape_targets: M < 2");
    ShapeTargets t;
    t.doas_deg = sector_grid(sc, m_count);
    const std::size_t m = t.doas_deg.size();
    t.c.resize(static_cast<Eigen::Index>(m));
    t.tx_factors.reserve(m);
    t.rx_factors.reserve(m);
    for (std::size_t i = 0; i < m; ++i) {
        const MatrixXcd a = target_operator(t.doas_deg[i], sc);
        const MatrixXcd t_tx = a.adjoint() * pair.v * a;
        const MatrixXcd t_rx = a * pair.x * a.adjoint();
        const double cm = std::real((pair.x * t_tx).trace());
        const double scale = std::max(1.0, std::abs(cm));
        if (cm < -1e-10 * scale)
            throw std::invalid_argument("shape_targets: negative c_m");
        t.c(static_cast<Eigen::Index>(i)) = std::max(cm, 0.0);
        t.tx_factors.push_back(psd_sqrt(t_tx, 1e-8));
        t.rx_factors.push_back(psd_sqrt(t_rx, 1e-8));
    }
    return t;
}

VectorXcd synthesize_waveform_qcqp(const DesignPair& pair, const Scenario& sc,
                                   int m_count, int iterations,
                                   std::vector<double>* objective_history) {
    const ShapeTargets targets = shape_targets(pair, sc, m_count);
    const int n = sc.tx_dim();
    const double trv = std::real(pair.v.trace());
    const MatrixXcd constraint =
        interference_cov_from_V(pair.v, sc) +
        (trv / sc.energy) * MatrixXcd::Identity(n, n);
    const double zeta = std::real((constraint * pair.x).trace());

    const HermitianEig ex = hermitian_eig(pair.x);
    const VectorXcd init =
        std::sqrt(std::max(ex.eigenvalues(0), 0.0)) * ex.eigenvectors.col(0);

    VectorXcd sbar =
        cyclic_shape_match(targets.tx_factors, targets.c, constraint, zeta,
                           init, iterations, objective_history);
    if (sbar.norm() == 0.0)
        throw std::runtime_error("synthesize_waveform_qcqp: zero solution");
    return canonical_phase(std::sqrt(sc.energy) / sbar.norm() * sbar);
}

VectorXcd synthesize_filter_qcqp(const DesignPair& pair, const Scenario& sc,
                                 int m_count, int iterations,
                                 std::vector<double>* objective_history) {
    const ShapeTargets targets = shape_targets(pair, sc, m_count);
    const int n = sc.rx_dim();
    const MatrixXcd constraint =
        interference_cov_from_X(pair.x, sc) + MatrixXcd::Identity(n, n);
    const double eta = std::real((constraint * pair.v).trace());

    const HermitianEig ev = hermitian_eig(pair.v);
    const VectorXcd init =
        std::sqrt(std::max(ev.eigenvalues(0), 0.0)) * ev.eigenvectors.col(0);

    const VectorXcd w =
        cyclic_shape_match(targets.rx_factors, targets.c, constraint, eta,
                           init, iterations, objective_history);
    return canonical_phase(w);
}

std::pair<VectorXcd, VectorXcd> randomized_synthesis(const DesignPair& pair,
                                                     const Scenario& sc,
                                                     int r_samples,
                                                     std::uint64_t seed,
                                                     int grid_size) {
    if (r_samples < 1)
        throw std::invalid_argument("randomized_synthesis: R < 1");
    const std::vector<double> grid = sector_grid(sc, grid_size);
    std::vector<MatrixXcd> a_grid;
    a_grid.reserve(grid.size());
    for (double th : grid) a_grid.push_back(target_operator(th, sc));

    VectorXcd w_star;
    if (numerical_rank(pair.v) == 1) {
        const HermitianEig ev = hermitian_eig(pair.v);
        w_star = std::sqrt(ev.eigenvalues(0)) * ev.eigenvectors.col(0);
    } else {
        const MatrixXcd sig_x = interference_cov_from_X(pair.x, sc);
        const std::vector<VectorXcd> draws =
            sample_complex_gaussian(pair.v, r_samples, seed);
        double best = -std::numeric_limits<double>::infinity();
        for (const VectorXcd& w : draws) {
            if (w.norm() == 0.0) continue;
            const double den =
                std::real(Complex(w.adjoint() * sig_x * w)) + w.squaredNorm();
            double xi = std::numeric_limits<double>::infinity();
            for (const MatrixXcd& a : a_grid) {
                const VectorXcd aw = a.adjoint() * w;
                xi = std::min(
                    xi, std::real(Complex(aw.adjoint() * pair.x * aw)) / den);
            }
            if (xi > best) {
                best = xi;
                w_star = w;
            }
        }
    }

    VectorXcd s_star;
    if (numerical_rank(pair.x) == 1) {
        const HermitianEig ex = hermitian_eig(pair.x);
        s_star = std::sqrt(sc.energy) * ex.eigenvectors.col(0);
    } else {
        const std::vector<VectorXcd> draws =
            sample_complex_gaussian(pair.x, r_samples, seed + 1);
        double best = -std::numeric_limits<double>::infinity();
        for (const VectorXcd& s : draws) {
            if (s.norm() == 0.0) continue;
            const VectorXcd sbar = std::sqrt(sc.energy) / s.norm() * s;
            const MatrixXcd sig =
                interference_cov_from_s(sbar, sc);
            const double den =
                std::real(Complex(w_star.adjoint() * sig * w_star)) +
                w_star.squaredNorm();
            double zeta = std::numeric_limits<double>::infinity();
            for (const MatrixXcd& a : a_grid) {
                const Complex num = w_star.adjoint() * a * sbar;
                zeta = std::min(zeta, std::norm(num) / den);
            }
            if (zeta > best) {
                best = zeta;
                s_star = sbar;
            }
        }
    }
    return {canonical_phase(std::move(s_star)),
            canonical_phase(std::move(w_star))};
}

SynthesisEvaluation evaluate_result(const VectorXcd& s, const VectorXcd& w,
                                    const DesignPair& pair, const Scenario& sc,
                                    int grid_size) {
    SynthesisEvaluation ev;
    ev.theta_deg = sector_grid(sc, grid_size);
    const MatrixXcd sig_x = interference_cov_from_X(pair.x, sc);
    const double relax_den =
        std::real(((sig_x + MatrixXcd::Identity(sc.rx_dim(), sc.rx_dim())) *
                   pair.v)
                      .trace());
    ev.achieved_db.reserve(ev.theta_deg.size());
    ev.relaxed_db.reserve(ev.theta_deg.size());
    double worst_a = std::numeric_limits<double>::infinity();
    double worst_r = std::numeric_limits<double>::infinity();
    for (double th : ev.theta_deg) {
        const double a_db = sinr_vectors(s, w, th, sc);
        const MatrixXcd amat = target_operator(th, sc);
        const double relax_num = std::real(
            (pair.x * (amat.adjoint() * pair.v * amat)).trace());
        const double r_db =
            linear_to_db(sc.snr_linear() * relax_num / relax_den);
        ev.achieved_db.push_back(a_db);
        ev.relaxed_db.push_back(r_db);
        worst_a = std::min(worst_a, a_db);
        worst_r = std::min(worst_r, r_db);
    }
    ev.achieved_worst_case_db = worst_a;
    ev.relaxed_bound_db = worst_r;
    return ev;
}

} // namespace rmimo
