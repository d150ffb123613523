#include "rmimo/conic.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <cstdio>
#include <cstdlib>
#include <stdexcept>

namespace rmimo {

namespace {

double max_abs(const MatrixXcd& m) {
    double v = 0.0;
    for (Eigen::Index j = 0; j < m.cols(); ++j)
        for (Eigen::Index i = 0; i < m.rows(); ++i)
            v = std::max(v, std::abs(m(i, j)));
    return v;
}

} // namespace

MatrixXd hermitian_embedding(const MatrixXcd& m) {
    if (m.rows() != m.cols())
        throw std::invalid_argument("hermitian_embedding: matrix not square");
    const Eigen::Index n = m.rows();
    MatrixXd t(2 * n, 2 * n);
    t.topLeftCorner(n, n) = m.real();
    t.topRightCorner(n, n) = -m.imag();
    t.bottomLeftCorner(n, n) = m.imag();
    t.bottomRightCorner(n, n) = m.real();
    return t;
}

void ConicProgram::add_psd_block(const std::string& name, int side,
                                 VarField field) {
    if (side < 0) throw std::invalid_argument("add_psd_block: negative side");
    for (const Block& b : blocks_)
        if (b.name == name)
            throw std::invalid_argument("add_psd_block: duplicate name " + name);
    blocks_.push_back({name, side, field});
}

void ConicProgram::add_scalar(const std::string& name, ScalarSign sign) {
    for (const Scalar& s : scalars_)
        if (s.name == name)
            throw std::invalid_argument("add_scalar: duplicate name " + name);
    scalars_.push_back({name, sign});
}

const ConicProgram::Block& ConicProgram::find_block(
    const std::string& name) const {
    for (const Block& b : blocks_)
        if (b.name == name) return b;
    throw std::invalid_argument("conic: unknown block " + name);
}

void ConicProgram::check_coeff(const std::string& name,
                               const MatrixXcd& coeff) const {
    const Block& b = find_block(name);
    if (coeff.rows() != b.side || coeff.cols() != b.side)
        throw std::invalid_argument("conic: coefficient shape mismatch for " +
                                    name);
    if ((coeff - coeff.adjoint()).norm() > 1e-10 * std::max(1.0, coeff.norm()))
        throw std::invalid_argument("conic: coefficient for " + name +
                                    " is not Hermitian");
    if (b.field == VarField::real_symmetric &&
        coeff.imag().norm() > 1e-12 * std::max(1.0, coeff.norm()))
        throw std::invalid_argument("conic: complex coefficient on real block " +
                                    name);
}

void ConicProgram::set_objective_block(const std::string& name,
                                       const MatrixXcd& coeff) {
    check_coeff(name, coeff);
    objective_.block_coeffs[name] = coeff;
}

void ConicProgram::set_objective_scalar(const std::string& name, double coeff) {
    objective_.scalar_coeffs[name] = coeff;
}

void ConicProgram::add_equality(Row row) {
    for (const auto& [name, coeff] : row.block_coeffs) check_coeff(name, coeff);
    for (const auto& [name, coeff] : row.scalar_coeffs) {
        bool found = false;
        for (const Scalar& s : scalars_) found = found || s.name == name;
        if (!found)
            throw std::invalid_argument("add_equality: unknown scalar " + name);
    }
    equalities_.push_back(std::move(row));
}

void ConicProgram::dump(std::ostream& os) const {
    os << "conic-program v1\n";
    for (const Block& b : blocks_)
        os << "block " << b.name << " " << b.side << " "
           << (b.field == VarField::complex_hermitian ? "hermitian" : "symmetric")
           << "\n";
    for (const Scalar& s : scalars_)
        os << "scalar " << s.name << " "
           << (s.sign == ScalarSign::nonneg ? "nonneg" : "free") << "\n";
    auto dump_row = [&os](const Row& row, const std::string& tag, int idx) {
        for (const auto& [name, coeff] : row.block_coeffs)
            for (Eigen::Index i = 0; i < coeff.rows(); ++i)
                for (Eigen::Index j = 0; j < coeff.cols(); ++j)
                    if (coeff(i, j) != Complex(0.0, 0.0))
                        os << tag << " " << idx << " " << name << " " << i << " "
                           << j << " " << std::real(coeff(i, j)) << " "
                           << std::imag(coeff(i, j)) << "\n";
        for (const auto& [name, c] : row.scalar_coeffs)
            if (c != 0.0)
                os << tag << " " << idx << " " << name << " 0 0 " << c << " 0\n";
    };
    dump_row(objective_, "obj", 0);
    int idx = 0;
    for (const Row& row : equalities_) {
        dump_row(row, "eq", idx);
        os << "rhs " << idx << " " << row.rhs << "\n";
        ++idx;
    }
}

namespace {

// Internal real standard form: min sum <C_j, X_j> s.t. sum_j <A_ij, X_j> = b_i,
// X_j in the real symmetric PSD cone.
struct Lowered {
    std::vector<int> dims;
    std::vector<MatrixXd> c;
    std::vector<std::vector<MatrixXd>> a; // [constraint][block]
    VectorXd b;
    double obj_scale = 1.0; // multiply internal objective by -obj_scale
    // recovery map
    struct BlockMap {
        std::string name;
        VarField field;
        int lowered_index;
    };
    struct ScalarMap {
        std::string name;
        int plus_index;
        int minus_index; // -1 when nonneg
    };
    std::vector<BlockMap> block_maps;
    std::vector<ScalarMap> scalar_maps;
};

Lowered lower(const ConicProgram& p) {
    Lowered lw;
    auto add_block = [&lw](int dim) {
        lw.dims.push_back(dim);
        return static_cast<int>(lw.dims.size()) - 1;
    };
    std::map<std::string, int> block_index;
    for (const auto& b : p.blocks()) {
        const int dim =
            b.field == VarField::complex_hermitian ? 2 * b.side : b.side;
        const int idx = add_block(dim);
        block_index[b.name] = idx;
        lw.block_maps.push_back({b.name, b.field, idx});
    }
    std::map<std::string, Lowered::ScalarMap> scalar_index;
    for (const auto& s : p.scalars()) {
        Lowered::ScalarMap sm{s.name, add_block(1), -1};
        if (s.sign == ScalarSign::free_sign) sm.minus_index = add_block(1);
        scalar_index[s.name] = sm;
        lw.scalar_maps.push_back(sm);
    }

    const std::size_t nb = lw.dims.size();
    auto zero_blocks = [&lw, nb]() {
        std::vector<MatrixXd> v(nb);
        for (std::size_t j = 0; j < nb; ++j)
            v[j] = MatrixXd::Zero(lw.dims[j], lw.dims[j]);
        return v;
    };

    auto lower_row = [&](const ConicProgram::Row& row,
                         std::vector<MatrixXd>& out) {
        double scale = 0.0;
        for (const auto& [name, coeff] : row.block_coeffs) {
            scale = std::max(scale, max_abs(coeff));
            const auto& b = p.blocks()[static_cast<std::size_t>(0)];
            (void)b;
            const int idx = block_index.at(name);
            bool complex_block = false;
            for (const auto& blk : p.blocks())
                if (blk.name == name)
                    complex_block = blk.field == VarField::complex_hermitian;
            if (complex_block)
                out[static_cast<std::size_t>(idx)] =
                    0.5 * hermitian_embedding(coeff);
            else
                out[static_cast<std::size_t>(idx)] = coeff.real();
        }
        for (const auto& [name, c] : row.scalar_coeffs) {
            scale = std::max(scale, std::abs(c));
            const auto& sm = scalar_index.at(name);
            out[static_cast<std::size_t>(sm.plus_index)](0, 0) = c;
            if (sm.minus_index >= 0)
                out[static_cast<std::size_t>(sm.minus_index)](0, 0) = -c;
        }
        return scale;
    };

    // objective: interface maximizes, internal minimizes
    lw.c = zero_blocks();
    double cs = lower_row(p.objective(), lw.c);
    if (cs <= 0.0) cs = 1.0;
    for (auto& cj : lw.c) cj = -cj / cs;
    lw.obj_scale = cs;

    const std::size_t m = p.equalities().size();
    lw.b.resize(static_cast<Eigen::Index>(m));
    lw.a.resize(m);
    for (std::size_t i = 0; i < m; ++i) {
        lw.a[i] = zero_blocks();
        double s = lower_row(p.equalities()[i], lw.a[i]);
        if (s <= 0.0) s = 1.0;
        for (auto& aj : lw.a[i]) aj /= s;
        lw.b(static_cast<Eigen::Index>(i)) = p.equalities()[i].rhs / s;
    }
    return lw;
}

double inner(const std::vector<MatrixXd>& a, const std::vector<MatrixXd>& b) {
    double v = 0.0;
    for (std::size_t j = 0; j < a.size(); ++j)
        v += a[j].cwiseProduct(b[j]).sum();
    return v;
}

// Largest step alpha (capped) keeping X + alpha * D positive definite.
double step_length(const MatrixXd& x, const MatrixXd& d) {
    if (x.rows() == 0) return std::numeric_limits<double>::infinity();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(x);
    const VectorXd lam = es.eigenvalues();
    const double lmax = lam.maxCoeff();
    VectorXd inv_sqrt = lam;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        inv_sqrt(i) = 1.0 / std::sqrt(std::max(lam(i), 1e-300 * std::max(lmax, 1.0)));
    const MatrixXd xm = es.eigenvectors() * inv_sqrt.asDiagonal() *
                        es.eigenvectors().transpose();
    MatrixXd g = xm * d * xm;
    g = 0.5 * (g + g.transpose());
    const double lmin =
        Eigen::SelfAdjointEigenSolver<MatrixXd>(g).eigenvalues().minCoeff();
    if (lmin >= 0.0) return std::numeric_limits<double>::infinity();
    return -1.0 / lmin;
}

MatrixXd sym_inv(const MatrixXd& x) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(x);
    const VectorXd lam = es.eigenvalues();
    const double lmax = std::max(lam.maxCoeff(), 1e-300);
    VectorXd inv = lam;
    for (Eigen::Index i = 0; i < lam.size(); ++i)
        inv(i) = 1.0 / std::max(lam(i), 1e-300 * lmax);
    return es.eigenvectors() * inv.asDiagonal() * es.eigenvectors().transpose();
}

// NT scaling point: W = X^{1/2} (X^{1/2} S X^{1/2})^{-1/2} X^{1/2}.
MatrixXd nt_scaling(const MatrixXd& x, const MatrixXd& s) {
    Eigen::SelfAdjointEigenSolver<MatrixXd> ex(x);
    VectorXd lam = ex.eigenvalues().cwiseMax(1e-300);
    const MatrixXd xh = ex.eigenvectors() * lam.cwiseSqrt().asDiagonal() *
                        ex.eigenvectors().transpose();
    MatrixXd mid = xh * s * xh;
    mid = 0.5 * (mid + mid.transpose());
    Eigen::SelfAdjointEigenSolver<MatrixXd> em(mid);
    VectorXd ml = em.eigenvalues().cwiseMax(1e-300);
    const MatrixXd mih = em.eigenvectors() *
                         ml.cwiseSqrt().cwiseInverse().asDiagonal() *
                         em.eigenvectors().transpose();
    MatrixXd w = xh * mih * xh;
    return 0.5 * (w + w.transpose());
}

struct IpmState {
    std::vector<MatrixXd> x, s;
    VectorXd y;
};

struct IpmOutcome {
    SolveStatus status = SolveStatus::numerical_failure;
    std::vector<MatrixXd> x;
    int iterations = 0;
    double rel_gap = 0.0;
    double primal_residual = 0.0;
    double dual_residual = 0.0;
    double internal_obj = 0.0;
};

IpmOutcome ipm_solve(const Lowered& lw, const SolverSettings& settings) {
    const std::size_t nb = lw.dims.size();
    const std::size_t m = lw.a.size();
    Eigen::Index n_tot = 0;
    for (int d : lw.dims) n_tot += d;

    IpmOutcome sol;
    if (n_tot == 0) {
        sol.status = SolveStatus::optimal;
        return sol;
    }

    double c_norm = 0.0;
    for (const auto& cj : lw.c) c_norm += cj.squaredNorm();
    c_norm = std::sqrt(c_norm);
    const double b_norm = m > 0 ? lw.b.norm() : 0.0;

    IpmState st;
    st.x.resize(nb);
    st.s.resize(nb);
    // A generous start keeps degenerate instances (near-singular dual faces
    // with large multipliers) out of the slow-step regime.
    const double init_scale = 100.0;
    const double xi = init_scale * std::max(1.0, b_norm);
    const double eta = init_scale * std::max(1.0, c_norm);
    for (std::size_t j = 0; j < nb; ++j) {
        st.x[j] = xi * MatrixXd::Identity(lw.dims[j], lw.dims[j]);
        st.s[j] = eta * MatrixXd::Identity(lw.dims[j], lw.dims[j]);
    }
    st.y = VectorXd::Zero(static_cast<Eigen::Index>(m));

    auto apply_a = [&](const std::vector<MatrixXd>& x) {
        VectorXd r(static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i)
            r(static_cast<Eigen::Index>(i)) = inner(lw.a[i], x);
        return r;
    };
    auto apply_at = [&](const VectorXd& y) {
        std::vector<MatrixXd> out(nb);
        for (std::size_t j = 0; j < nb; ++j)
            out[j] = MatrixXd::Zero(lw.dims[j], lw.dims[j]);
        for (std::size_t i = 0; i < m; ++i) {
            const double yi = y(static_cast<Eigen::Index>(i));
            if (yi == 0.0) continue;
            for (std::size_t j = 0; j < nb; ++j) out[j] += yi * lw.a[i][j];
        }
        return out;
    };

    const double step_frac = 0.98;
    // best iterate seen so far, by worst-of-three merit; returned when the
    // iteration degrades instead of converging
    std::vector<MatrixXd> best_x = st.x;
    double best_merit = std::numeric_limits<double>::infinity();
    double best_gap = 0.0, best_rp = 0.0, best_rd = 0.0, best_obj = 0.0;
    int iter = 0;
    for (; iter < settings.max_iterations; ++iter) {
        double gap = 0.0;
        for (std::size_t j = 0; j < nb; ++j)
            gap += st.x[j].cwiseProduct(st.s[j]).sum();
        const double mu = gap / static_cast<double>(n_tot);
        if (!std::isfinite(mu)) break;

        const VectorXd rp = lw.b - apply_a(st.x);
        std::vector<MatrixXd> aty = apply_at(st.y);
        std::vector<MatrixXd> rd(nb);
        double rd_norm2 = 0.0;
        for (std::size_t j = 0; j < nb; ++j) {
            rd[j] = lw.c[j] - st.s[j] - aty[j];
            rd_norm2 += rd[j].squaredNorm();
        }
        const double pobj = inner(lw.c, st.x);
        const double dobj = m > 0 ? lw.b.dot(st.y) : 0.0;
        sol.rel_gap = std::abs(pobj - dobj) / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
        sol.primal_residual = (m > 0 ? rp.norm() : 0.0) / (1.0 + b_norm);
        sol.dual_residual = std::sqrt(rd_norm2) / (1.0 + c_norm);

        const double gap_meas = gap / (1.0 + std::max(std::abs(pobj), std::abs(dobj)));
        const double merit =
            std::max({sol.rel_gap / settings.duality_gap_tol,
                      gap_meas / settings.duality_gap_tol,
                      sol.primal_residual / settings.eq_tol,
                      sol.dual_residual / settings.eq_tol});
        if (std::isfinite(merit) && merit < best_merit) {
            best_merit = merit;
            best_x = st.x;
            best_gap = sol.rel_gap;
            best_rp = sol.primal_residual;
            best_rd = sol.dual_residual;
            best_obj = pobj;
        }
        if (merit <= 1.0) {
            sol.status = SolveStatus::optimal;
            break;
        }

        // Farkas-style primal infeasibility certificate: A*y <= 0, b.y > 0.
        if (m > 0) {
            const double yn = st.y.norm();
            if (yn > 1.0) {
                const VectorXd yh = st.y / yn;
                const double bty = lw.b.dot(yh);
                if (bty > 1e-6) {
                    std::vector<MatrixXd> ay = apply_at(yh);
                    double viol = 0.0;
                    for (std::size_t j = 0; j < nb; ++j) {
                        if (lw.dims[j] == 0) continue;
                        const double lmax =
                            Eigen::SelfAdjointEigenSolver<MatrixXd>(ay[j])
                                .eigenvalues()
                                .maxCoeff();
                        viol = std::max(viol, lmax);
                    }
                    if (viol < 1e-9 * bty && yn > 1e6) {
                        sol.status = SolveStatus::infeasible;
                        sol.iterations = iter;
                        sol.x = std::move(st.x);
                        return sol;
                    }
                }
            }
        }

        // NT scaling and S^{-1} per block
        std::vector<MatrixXd> w(nb), sinv(nb);
        for (std::size_t j = 0; j < nb; ++j) {
            w[j] = nt_scaling(st.x[j], st.s[j]);
            sinv[j] = sym_inv(st.s[j]);
        }

        // Schur complement M_ik = sum_j <W A_i W, A_k>
        std::vector<std::vector<MatrixXd>> wa(m);
        for (std::size_t i = 0; i < m; ++i) {
            wa[i].resize(nb);
            for (std::size_t j = 0; j < nb; ++j)
                wa[i][j] = w[j] * lw.a[i][j] * w[j];
        }
        MatrixXd schur(static_cast<Eigen::Index>(m), static_cast<Eigen::Index>(m));
        for (std::size_t i = 0; i < m; ++i)
            for (std::size_t k = i; k < m; ++k) {
                const double v = inner(wa[i], lw.a[k]);
                schur(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(k)) = v;
                schur(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(i)) = v;
            }
        // Rank-revealing factorization: the Schur complement turns singular
        // as the iterates approach a degenerate optimum.
        Eigen::CompleteOrthogonalDecomposition<MatrixXd> schur_fact;
        if (m > 0) schur_fact.compute(schur);

        // W Rd W per block, reused by both solves
        std::vector<MatrixXd> wrdw(nb);
        for (std::size_t j = 0; j < nb; ++j) wrdw[j] = w[j] * rd[j] * w[j];

        auto newton = [&](double sigma_mu, VectorXd& dy, std::vector<MatrixXd>& dx,
                          std::vector<MatrixXd>& ds) {
            // dX = sigma_mu S^{-1} - X - W dS W, dS = Rd - A* dy
            std::vector<MatrixXd> base(nb);
            for (std::size_t j = 0; j < nb; ++j)
                base[j] = sigma_mu * sinv[j] - st.x[j] - wrdw[j];
            if (m > 0) {
                VectorXd rhs = rp - apply_a(base);
                dy = schur_fact.solve(rhs);
                // two rounds of iterative refinement; the Schur complement is
                // severely ill-conditioned near degenerate optima
                for (int r = 0; r < 2; ++r)
                    dy += schur_fact.solve(rhs - schur * dy);
            } else {
                dy.resize(0);
            }
            std::vector<MatrixXd> atdy = apply_at(dy);
            dx.resize(nb);
            ds.resize(nb);
            for (std::size_t j = 0; j < nb; ++j) {
                ds[j] = rd[j] - atdy[j];
                // sigma_mu sinv - x - w ds w, with the w rd w part in base
                MatrixXd d = base[j] + w[j] * atdy[j] * w[j];
                dx[j] = 0.5 * (d + d.transpose());
                ds[j] = 0.5 * (ds[j] + ds[j].transpose());
            }
        };

        // predictor
        VectorXd dy_a;
        std::vector<MatrixXd> dx_a, ds_a;
        newton(0.0, dy_a, dx_a, ds_a);
        double ap = 1.0, ad = 1.0;
        for (std::size_t j = 0; j < nb; ++j) {
            ap = std::min(ap, step_frac * step_length(st.x[j], dx_a[j]));
            ad = std::min(ad, step_frac * step_length(st.s[j], ds_a[j]));
        }
        double gap_aff = 0.0;
        for (std::size_t j = 0; j < nb; ++j)
            gap_aff += (st.x[j] + ap * dx_a[j])
                           .cwiseProduct(st.s[j] + ad * ds_a[j])
                           .sum();
        gap_aff = std::max(gap_aff, 0.0);
        double sigma = std::pow(gap_aff / std::max(gap, 1e-300), 3.0);
        sigma = std::clamp(sigma, 1e-8, 1.0);

        // corrector (re-uses the Schur factorization)
        VectorXd dy;
        std::vector<MatrixXd> dx, ds;
        newton(sigma * mu, dy, dx, ds);
        ap = 1.0;
        ad = 1.0;
        for (std::size_t j = 0; j < nb; ++j) {
            ap = std::min(ap, step_frac * step_length(st.x[j], dx[j]));
            ad = std::min(ad, step_frac * step_length(st.s[j], ds[j]));
        }
        // Safeguard: a direction computed from a numerically singular Schur
        // system can inject error into the primal equalities faster than the
        // step drains it; shrink the primal step until the residual after
        // the step stays commensurate with the current one.
        if (m > 0) {
            const double rp_now = rp.norm();
            const double allowed = std::max(
                2.0 * rp_now, 10.0 * settings.eq_tol * (1.0 + b_norm));
            for (int tries = 0; tries < 40; ++tries) {
                std::vector<MatrixXd> xc(nb);
                for (std::size_t j = 0; j < nb; ++j)
                    xc[j] = st.x[j] + ap * dx[j];
                if ((lw.b - apply_a(xc)).norm() <= allowed) break;
                ap *= 0.5;
            }
        }
        for (std::size_t j = 0; j < nb; ++j) {
            st.x[j] += ap * dx[j];
            st.s[j] += ad * ds[j];
        }
        if (m > 0) st.y += ad * dy;
        if (std::getenv("RMIMO_IPM_TRACE"))
            std::fprintf(stderr,
                         "it %3d mu %.3e rp %.3e rd %.3e gap %.3e sig %.2e ap %.2e ad %.2e yn %.2e\n",
                         iter, mu, sol.primal_residual, sol.dual_residual,
                         sol.rel_gap, sigma, ap, ad, st.y.norm());

        if (ap < 1e-10 && ad < 1e-10) {
            // no progress possible
            ++iter;
            break;
        }
    }
    sol.iterations = iter;
    if (sol.status != SolveStatus::optimal) {
        sol.status = SolveStatus::numerical_failure;
        // fall back to the most balanced iterate seen; the last steps of a
        // degenerate run can destroy an essentially converged solution
        if (best_merit < std::numeric_limits<double>::infinity()) {
            st.x = std::move(best_x);
            sol.rel_gap = best_gap;
            sol.primal_residual = best_rp;
            sol.dual_residual = best_rd;
        }
        (void)best_obj;
        if (m > 0 && sol.primal_residual > 100.0 * settings.eq_tol) {
            const double yn = st.y.norm();
            if (yn > 1e-8) {
                const VectorXd yh = st.y / yn;
                const double bty = lw.b.dot(yh);
                if (bty > 1e-6) {
                    std::vector<MatrixXd> ay = apply_at(yh);
                    double viol = 0.0;
                    for (std::size_t j = 0; j < nb; ++j) {
                        if (lw.dims[j] == 0) continue;
                        viol = std::max(
                            viol, Eigen::SelfAdjointEigenSolver<MatrixXd>(ay[j])
                                      .eigenvalues()
                                      .maxCoeff());
                    }
                    if (viol < 1e-7 * bty) sol.status = SolveStatus::infeasible;
                }
            }
        }
    }

    sol.x = std::move(st.x);
    sol.internal_obj = inner(lw.c, sol.x);
    return sol;
}

} // namespace

ConicSolution solve(const ConicProgram& program, const SolverSettings& settings) {
    Lowered lw = lower(program);
    IpmOutcome out = ipm_solve(lw, settings);

    if (out.status == SolveStatus::numerical_failure &&
        out.primal_residual > 100.0 * settings.eq_tol && !lw.a.empty()) {
        // Phase-1 fallback: min u s.t. A(X) + u (b - A(I)) = b, X >= 0, u >= 0.
        // (X, u) = (I, 1) is strictly feasible; the optimum is 0 iff the
        // original equalities are attainable over the cone.
        Lowered ph = lw;
        ph.dims.push_back(1);
        for (auto& cj : ph.c) cj.setZero();
        ph.c.push_back(MatrixXd::Constant(1, 1, 1.0));
        for (std::size_t i = 0; i < ph.a.size(); ++i) {
            double a_of_identity = 0.0;
            for (const auto& aij : ph.a[i]) a_of_identity += aij.trace();
            ph.a[i].push_back(MatrixXd::Constant(
                1, 1, ph.b(static_cast<Eigen::Index>(i)) - a_of_identity));
        }
        const IpmOutcome feas = ipm_solve(ph, settings);
        const double u_min = feas.x.empty() ? 0.0 : feas.x.back()(0, 0);
        if (feas.status == SolveStatus::optimal &&
            u_min > 1e-6 * std::max(1.0, lw.b.lpNorm<Eigen::Infinity>()))
            out.status = SolveStatus::infeasible;
    }

    ConicSolution sol;
    sol.status = out.status;
    sol.iterations = out.iterations;
    sol.rel_gap = out.rel_gap;
    sol.primal_residual = out.primal_residual;
    sol.dual_residual = out.dual_residual;
    if (out.x.empty() && sol.status == SolveStatus::optimal) return sol;

    // Recover variables in the caller's coordinates (best iterate on failure).
    for (const auto& bm : lw.block_maps) {
        const MatrixXd& yblk = out.x[static_cast<std::size_t>(bm.lowered_index)];
        if (bm.field == VarField::complex_hermitian) {
            const Eigen::Index n = yblk.rows() / 2;
            MatrixXcd mval =
                0.5 * (yblk.topLeftCorner(n, n) + yblk.bottomRightCorner(n, n))
                          .cast<Complex>() +
                Complex(0.0, 0.5) * (yblk.bottomLeftCorner(n, n) -
                                     yblk.topRightCorner(n, n))
                                        .cast<Complex>();
            sol.matrices[bm.name] = 0.5 * (mval + mval.adjoint());
        } else {
            sol.matrices[bm.name] = yblk.cast<Complex>();
        }
    }
    for (const auto& sm : lw.scalar_maps) {
        double v = out.x[static_cast<std::size_t>(sm.plus_index)](0, 0);
        if (sm.minus_index >= 0)
            v -= out.x[static_cast<std::size_t>(sm.minus_index)](0, 0);
        sol.scalars[sm.name] = v;
    }
    sol.objective_value = -lw.obj_scale * out.internal_obj;
    return sol;
}

} // namespace rmimo
