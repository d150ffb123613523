#include "rmimo/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace rmimo {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

// Orthonormal basis of the real vector space of n x n Hermitian matrices
// under <A, B> = tr(A B).
std::vector<MatrixXcd> hermitian_basis(int n) {
    std::vector<MatrixXcd> basis;
    basis.reserve(static_cast<std::size_t>(n) * n);
    const double inv_sqrt2 = 1.0 / std::sqrt(2.0);
    for (int i = 0; i < n; ++i) {
        MatrixXcd e = MatrixXcd::Zero(n, n);
        e(i, i) = 1.0;
        basis.push_back(e);
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            MatrixXcd re = MatrixXcd::Zero(n, n);
            re(i, j) = inv_sqrt2;
            re(j, i) = inv_sqrt2;
            basis.push_back(re);
            MatrixXcd im = MatrixXcd::Zero(n, n);
            im(i, j) = Complex(0.0, -inv_sqrt2);
            im(j, i) = Complex(0.0, inv_sqrt2);
            basis.push_back(im);
        }
    }
    return basis;
}

struct StepGeometry {
    SteeringLift lift;
    NuInterval arc;
    DftFrames frames;
    NonnegConstraintRows rows;
};

StepGeometry make_geometry(const Scenario& sc) {
    StepGeometry geo;
    geo.lift = build_lift(sc.n_tx, sc.n_rx);
    geo.arc = sector_to_nu(sc.sector);
    const int len = geo.lift.poly_len();
    geo.frames = build_frames(len, geo.arc, 2 * len);
    geo.rows = nonneg_constraint_rows(geo.frames);
    return geo;
}

// Hermitian representers of the real-linear coefficient maps
// M -> Re g_l(M), M -> Im g_l(M), built by evaluating on a basis.
template <typename Eval>
void build_representers(int n, int len, Eval eval, std::vector<MatrixXcd>& a_re,
                        std::vector<MatrixXcd>& a_im) {
    a_re.assign(static_cast<std::size_t>(len), MatrixXcd::Zero(n, n));
    a_im.assign(static_cast<std::size_t>(len), MatrixXcd::Zero(n, n));
    for (const MatrixXcd& b : hermitian_basis(n)) {
        const VectorXcd g = eval(b);
        for (int l = 0; l < len; ++l) {
            a_re[static_cast<std::size_t>(l)] += std::real(g(l)) * b;
            a_im[static_cast<std::size_t>(l)] += std::imag(g(l)) * b;
        }
    }
}

MatrixXcd clamp_psd(const MatrixXcd& m) {
    const HermitianEig eig = hermitian_eig((m + m.adjoint()) / 2.0);
    const VectorXd lam = eig.eigenvalues.cwiseMax(0.0);
    return eig.eigenvectors * lam.asDiagonal() * eig.eigenvectors.adjoint();
}

// Shared worst-case ascent step: maximize g0(M) - h0(Z1, Z2) subject to
// g_l(M) = h_l(Z1, Z2) for l >= 1 and tr(norm_coeff M) = 1, with the
// certificate (Z1, Z2) forcing f_M - t >= 0 on the arc.
MatrixXcd solve_step(const StepGeometry& geo, int n,
                     const std::vector<MatrixXcd>& a_re,
                     const std::vector<MatrixXcd>& a_im,
                     const MatrixXcd& norm_coeff, const SolverSettings& solver,
                     const char* label, double* objective) {
    const int len = geo.lift.poly_len();
    ConicProgram p;
    p.add_psd_block("m", n, VarField::complex_hermitian);
    p.add_psd_block("z1", len, VarField::complex_hermitian);
    if (len > 1) p.add_psd_block("z2", len - 1, VarField::complex_hermitian);

    p.set_objective_block("m", a_re[0]);
    p.set_objective_block("z1", -geo.rows.z1_re[0]);
    if (len > 1) p.set_objective_block("z2", -geo.rows.z2_re[0]);

    for (int l = 1; l < len; ++l) {
        const auto sl = static_cast<std::size_t>(l);
        ConicProgram::Row re;
        re.block_coeffs["m"] = a_re[sl];
        re.block_coeffs["z1"] = -geo.rows.z1_re[sl];
        re.block_coeffs["z2"] = -geo.rows.z2_re[sl];
        p.add_equality(re);
        ConicProgram::Row im;
        im.block_coeffs["m"] = a_im[sl];
        im.block_coeffs["z1"] = -geo.rows.z1_im[sl];
        im.block_coeffs["z2"] = -geo.rows.z2_im[sl];
        p.add_equality(im);
    }
    ConicProgram::Row norm;
    norm.block_coeffs["m"] = (norm_coeff + norm_coeff.adjoint()) / 2.0;
    norm.rhs = 1.0;
    p.add_equality(norm);

    const ConicSolution sol = solve(p, solver);
    // Near-degenerate instances (e.g. rank-one partners, very narrow arcs)
    // may stop short of full tolerance; accept reduced accuracy when it is
    // still far below the 1e-4 verification closure, the residuals stay
    // reported in the solution.
    const bool reduced_ok =
        sol.status == SolveStatus::numerical_failure &&
        sol.rel_gap <= 1e-4 &&
        std::max(sol.primal_residual, sol.dual_residual) <= 1e-5;
    if (sol.status != SolveStatus::optimal && !reduced_ok) {
        std::ostringstream msg;
        msg << label << ": solver status "
            << (sol.status == SolveStatus::infeasible ? "infeasible"
                                                      : "numerical_failure")
            << " after " << sol.iterations
            << " iterations (primal residual " << sol.primal_residual
            << ", dual residual " << sol.dual_residual << ")";
        throw SolverFailure(msg.str());
    }
    if (objective) *objective = sol.objective_value;
    return clamp_psd(sol.matrices.at("m"));
}

} // namespace

std::pair<MatrixXcd, double> u_step(const MatrixXcd& v, const Scenario& sc,
                                    const OptimizerSettings& settings) {
    sc.validate();
    if (v.rows() != sc.rx_dim() || v.cols() != sc.rx_dim())
        throw std::invalid_argument("u_step: V has wrong dimensions");
    const StepGeometry geo = make_geometry(sc);
    const int n = sc.tx_dim();

    std::vector<MatrixXcd> a_re, a_im;
    build_representers(n, geo.lift.poly_len(),
                       [&](const MatrixXcd& b) {
                           return poly_coeffs(g_matrix(b, v, geo.lift)).g;
                       },
                       a_re, a_im);

    const double trv = std::real(v.trace());
    if (!(trv > 0.0)) throw std::invalid_argument("u_step: tr(V) <= 0");
    const MatrixXcd norm_coeff =
        interference_cov_from_V(v, sc) +
        (trv / sc.energy) * MatrixXcd::Identity(n, n);

    double obj = 0.0;
    MatrixXcd u =
        solve_step(geo, n, a_re, a_im, norm_coeff, settings.solver, "u_step",
                   &obj);
    const double tru = std::real(u.trace());
    if (!(tru > 0.0)) throw SolverFailure("u_step: solution has zero trace");
    return {MatrixXcd(sc.energy / tru * u), sc.snr_linear() * obj};
}

std::pair<MatrixXcd, double> v_step(const MatrixXcd& x, const Scenario& sc,
                                    const OptimizerSettings& settings) {
    sc.validate();
    if (x.rows() != sc.tx_dim() || x.cols() != sc.tx_dim())
        throw std::invalid_argument("v_step: X has wrong dimensions");
    if (std::abs(std::real(x.trace()) - sc.energy) >
        1e-6 * std::max(1.0, sc.energy))
        throw std::invalid_argument("v_step: tr(X) != E");
    const StepGeometry geo = make_geometry(sc);
    const int n = sc.rx_dim();

    std::vector<MatrixXcd> a_re, a_im;
    build_representers(n, geo.lift.poly_len(),
                       [&](const MatrixXcd& b) {
                           return poly_coeffs(g_matrix(x, b, geo.lift)).g;
                       },
                       a_re, a_im);

    const MatrixXcd norm_coeff =
        interference_cov_from_X(x, sc) + MatrixXcd::Identity(n, n);

    double obj = 0.0;
    MatrixXcd v =
        solve_step(geo, n, a_re, a_im, norm_coeff, settings.solver, "v_step",
                   &obj);
    return {v, sc.snr_linear() * obj};
}

std::pair<DesignPair, CycleReport> cyclic_design(
    const Scenario& sc, const MatrixXcd& init_v,
    const OptimizerSettings& settings) {
    sc.validate();
    if (sc.sector.half_width_deg <= 0.0)
        throw std::invalid_argument(
            "cyclic_design: requires an uncertain sector (half_width > 0)");

    DesignPair pair;
    pair.v = init_v;
    CycleReport rep;
    double prev_cycle = -std::numeric_limits<double>::infinity();
    try {
        for (int it = 1; it <= settings.max_iterations; ++it) {
            auto [x, t_x] = u_step(pair.v, sc, settings);
            pair.x = x;
            rep.t_history.push_back(t_x);
            auto [v, t_v] = v_step(pair.x, sc, settings);
            pair.v = v;
            rep.t_history.push_back(t_v);
            rep.iterations = it;
            if (t_v - prev_cycle < settings.stop_increment) {
                rep.converged = true;
                rep.terminal_status = TerminalStatus::converged;
                break;
            }
            prev_cycle = t_v;
        }
    } catch (const SolverFailure&) {
        rep.terminal_status = TerminalStatus::solver_failure;
        return {pair, rep};
    }
    if (!rep.converged) rep.terminal_status = TerminalStatus::max_iter;
    return {pair, rep};
}

double spread_metric(const std::vector<double>& values) {
    if (values.empty())
        throw std::invalid_argument("spread_metric: empty sample");
    const auto [lo, hi] = std::minmax_element(values.begin(), values.end());
    const double mean =
        std::accumulate(values.begin(), values.end(), 0.0) /
        static_cast<double>(values.size());
    if (mean == 0.0) return 0.0;
    return (*hi - *lo) / mean;
}

MultiStartResult multi_start(const Scenario& sc, int gamma, std::uint64_t seed,
                             const OptimizerSettings& settings) {
    if (gamma < 1) throw std::invalid_argument("multi_start: gamma < 1");
    MultiStartResult res;
    double best = -std::numeric_limits<double>::infinity();
    for (int g = 0; g < gamma; ++g) {
        ComplexGaussian rng(splitmix64(seed + static_cast<std::uint64_t>(g)));
        VectorXcd w0 = rng.vector(sc.rx_dim());
        w0.normalize();
        const MatrixXcd v0 = w0 * w0.adjoint();
        auto [pair, rep] = cyclic_design(sc, v0, settings);
        res.reports.push_back(rep);
        if (rep.terminal_status == TerminalStatus::solver_failure ||
            rep.t_history.empty())
            continue;
        const double t = rep.t_history.back();
        res.all_t.push_back(t);
        if (t > best) {
            best = t;
            res.best = pair;
        }
    }
    if (res.all_t.empty())
        throw SolverFailure("multi_start: every start failed");
    res.best_worst_case = best;
    res.variation = spread_metric(res.all_t);
    return res;
}

double worst_case_sinr(const DesignPair& pair, const Scenario& sc,
                       int grid_size) {
    sc.validate();
    if (grid_size < 1) throw std::invalid_argument("worst_case_sinr: grid < 1");
    const SteeringLift lift = build_lift(sc.n_tx, sc.n_rx);
    const TrigCoeffs coeffs = poly_coeffs(g_matrix(pair.x, pair.v, lift));
    const double den = denominator(pair.x, pair.v, sc);
    const NuInterval arc = sector_to_nu(sc.sector);
    if (arc.beta == 0.0 || grid_size == 1)
        return sc.snr_linear() * coeffs.evaluate(arc.alpha) / den;
    double worst = std::numeric_limits<double>::infinity();
    for (int i = 0; i < grid_size; ++i) {
        const double nu =
            arc.alpha - arc.beta + 2.0 * arc.beta * i / (grid_size - 1);
        worst = std::min(worst, coeffs.evaluate(nu));
    }
    return sc.snr_linear() * worst / den;
}

NonrobustResult nonrobust_design(const Scenario& sc, double rel_tol,
                                 int max_iterations) {
    sc.validate();
    const double theta = sc.sector.center_deg;
    const MatrixXcd a = target_operator(theta, sc);
    const MatrixXcd i_rx = MatrixXcd::Identity(sc.rx_dim(), sc.rx_dim());
    const MatrixXcd i_tx = MatrixXcd::Identity(sc.tx_dim(), sc.tx_dim());

    NonrobustResult res;
    // start from the dominant right singular direction of A
    VectorXcd s = hermitian_eig(a.adjoint() * a).eigenvectors.col(0);
    s *= std::sqrt(sc.energy);
    VectorXcd w;
    double prev = -std::numeric_limits<double>::infinity();
    for (int it = 1; it <= max_iterations; ++it) {
        const MatrixXcd r = interference_cov_from_s(s, sc) + i_rx;
        w = r.ldlt().solve(a * s);
        const MatrixXcd q =
            interference_cov_from_V(w * w.adjoint(), sc) +
            (w.squaredNorm() / sc.energy) * i_tx;
        const VectorXcd u = q.ldlt().solve(a.adjoint() * w);
        s = std::sqrt(sc.energy) / u.norm() * u;
        const double lin = db_to_linear(sinr_vectors(s, w, theta, sc));
        res.sinr_history.push_back(lin);
        res.iterations = it;
        if (lin - prev <= rel_tol * std::abs(lin) && it > 1) break;
        prev = lin;
    }
    w.normalize();
    res.s = s;
    res.w = w;
    res.sinr_db = sinr_vectors(s, w, theta, sc);
    return res;
}

} // namespace rmimo
