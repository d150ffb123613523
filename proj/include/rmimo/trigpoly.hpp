#pragma once

#include "rmimo/lifting.hpp"

#include <vector>

namespace rmimo {

/// DFT-sample frames of the arc-nonnegativity representation:
/// F1(q,l) = e^{-j 2 pi l q / Q}, d_q = cos(2 pi q/Q - alpha) - cos(beta).
struct DftFrames {
    MatrixXcd f1; // Q x L
    MatrixXcd f2; // Q x (L-1)
    VectorXd d;   // length Q
    NuInterval interval;
    int poly_len() const { return static_cast<int>(f1.cols()); }
};

/// Gram pair certifying nonnegativity of a trigonometric polynomial on the
/// arc: any Z1, Z2 >= 0 maps to coefficients of a polynomial that is
/// nonnegative on [alpha - beta, alpha + beta].
struct ArcNonnegCert {
    MatrixXcd z1; // L x L Hermitian PSD
    MatrixXcd z2; // (L-1) x (L-1) Hermitian PSD
    NuInterval interval;
};

/// Real-linear map from (Z1, Z2) to the L complex coefficients h:
/// h_l = tr(Z1 z1_re[l]) + j tr(Z1 z1_im[l]) + tr(Z2 z2_re[l]) + j tr(Z2 z2_im[l]).
/// Used verbatim as the equality rows g - t e1 = h(Z1, Z2).
struct NonnegConstraintRows {
    std::vector<MatrixXcd> z1_re, z1_im; // L Hermitian L x L matrices
    std::vector<MatrixXcd> z2_re, z2_im; // L Hermitian (L-1) x (L-1) matrices

    VectorXcd apply(const MatrixXcd& z1, const MatrixXcd& z2) const;
};

/// Throws unless Q >= 2L-1 and 0 < beta < pi.
DftFrames build_frames(int poly_len, const NuInterval& interval, int q_points);

/// Coefficients h of the certified polynomial.
VectorXcd coeffs_from_certificate(const ArcNonnegCert& cert,
                                  const DftFrames& frames);

NonnegConstraintRows nonneg_constraint_rows(const DftFrames& frames);

/// Minimum of the polynomial with one-sided coefficients h over a uniform
/// grid of the arc, endpoints inclusive.
double verify_nonneg(const VectorXcd& h, const NuInterval& interval,
                     int grid_size = 4096);

} // namespace rmimo
