#pragma once

#include "rmimo/numerics.hpp"

#include <vector>

namespace rmimo {

/// Signal-dependent interference source at a relative range cell.
struct Interferer {
    int range_offset = 0; // r_k in {-N+1, ..., N-1}
    double doa_deg = 0.0;
    double inr_db = 0.0;
};

/// Uncertain target angular sector [center - half_width, center + half_width].
/// half_width == 0 is the known-angle case.
struct TargetSector {
    double center_deg = 0.0;
    double half_width_deg = 0.0;
};

/// Colocated MIMO radar scene: half-wavelength ULAs at both ends, unit noise
/// variance, amplitudes represented only through SNR/INR ratios.
struct Scenario {
    int n_tx = 1;
    int n_rx = 1;
    int n_samples = 1;
    double energy = 1.0;
    double snr_db = 0.0;
    std::vector<Interferer> interferers;
    TargetSector sector;

    int tx_dim() const { return n_tx * n_samples; } // length of s
    int rx_dim() const { return n_rx * n_samples; } // length of w
    double snr_linear() const { return db_to_linear(snr_db); }

    /// Throws std::invalid_argument on any violated invariant.
    void validate() const;
};

VectorXcd transmit_steering(double theta_deg, int n_tx);
VectorXcd receive_steering(double theta_deg, int n_rx);

/// N x N matrix with (l1,l2) entry 1 iff l1 - l2 = r. Throws on |r| >= n.
MatrixXd shift_matrix(int r, int n);

/// A(theta) = I_N kron (a_r a_t^T), shape (N_R N) x (N_T N).
MatrixXcd target_operator(double theta_deg, const Scenario& sc);

/// B(theta_k) = J_{r_k}^T kron (a_r a_t^T).
MatrixXcd interferer_operator(const Interferer& intf, const Scenario& sc);

/// Sigma_I(s) = sum_k INR_k B_k s s^H B_k^H, shape (N_R N) square.
MatrixXcd interference_cov_from_s(const VectorXcd& s, const Scenario& sc);

/// Sigma_I(V) = sum_k INR_k B_k^H V B_k, shape (N_T N) square.
MatrixXcd interference_cov_from_V(const MatrixXcd& v, const Scenario& sc);

/// Sigma_I(X) = sum_k INR_k B_k X B_k^H, shape (N_R N) square.
MatrixXcd interference_cov_from_X(const MatrixXcd& x, const Scenario& sc);

/// Output SINR in dB of the waveform/filter pair at target angle theta0.
/// Requires ||s||^2 = E (1e-9 relative) and nonzero w.
double sinr_vectors(const VectorXcd& s, const VectorXcd& w, double theta0_deg,
                    const Scenario& sc);

/// Normalized joint transmit-receive pattern P(theta) in dB (<= 0 dB).
std::vector<double> beampattern(const VectorXcd& s, const VectorXcd& w,
                                const std::vector<double>& theta_grid_deg,
                                const Scenario& sc);

} // namespace rmimo
