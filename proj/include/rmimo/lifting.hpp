#pragma once

#include "rmimo/model.hpp"

namespace rmimo {

/// 0/1 selection matrix H with a_r(theta) kron a_t(theta) = H p(pi sin theta)
/// for every theta; L = n_rx + n_tx - 1.
struct SteeringLift {
    int n_tx = 1;
    int n_rx = 1;
    MatrixXd h; // (n_rx * n_tx) x L
    int poly_len() const { return n_rx + n_tx - 1; }
};

/// Arc [alpha - beta, alpha + beta] in the nu = pi sin(theta) domain.
struct NuInterval {
    double alpha = 0.0;
    double beta = 0.0;
};

/// One-sided coefficients of the real trigonometric polynomial
/// f(nu) = g[0] + 2 Re sum_{l>=1} g[l] e^{-j l nu}.
struct TrigCoeffs {
    VectorXcd g;
    double evaluate(double nu) const;
};

SteeringLift build_lift(int n_tx, int n_rx);

/// p(nu) = [1, e^{j nu}, ..., e^{j nu (len-1)}]^T.
VectorXcd nu_vector(double nu, int len);

/// Exact sine-endpoint mapping of an angular sector into the nu domain.
NuInterval sector_to_nu(const TargetSector& sector);

/// G(X, V) = H^T (sum_{n1,n2} V_[n1,n2] kron conj(X_[n1,n2])) H, the L x L
/// Hermitian PSD matrix with p^H G p = |w^H A s|^2 for rank-one X, V.
MatrixXcd g_matrix(const MatrixXcd& x, const MatrixXcd& v,
                   const SteeringLift& lift);

/// Subdiagonal sums of G: g_l = sum_k G(l+k, k).
TrigCoeffs poly_coeffs(const MatrixXcd& g);

/// tr((Sigma_I(V) + tr(V)/E I) X); throws if either trace is nonpositive.
double denominator(const MatrixXcd& x, const MatrixXcd& v, const Scenario& sc);

} // namespace rmimo
