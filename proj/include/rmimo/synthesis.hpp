#pragma once

#include "rmimo/optimizer.hpp"

#include <optional>

namespace rmimo {

enum class SynthesisMethod { rank_one, qcqp, randomized };

struct SynthesisResult {
    VectorXcd s; // ||s||^2 = E
    VectorXcd w;
    SynthesisMethod method = SynthesisMethod::rank_one;
    double achieved_worst_case_db = 0.0;
    double relaxed_bound_db = 0.0;
};

/// DOA samples on the uncertainty sector with the quality weights
/// c_m = tr(X A(v_m)^H V A(v_m)) and Hermitian square-root factors of the
/// per-angle shape operators on both sides.
struct ShapeTargets {
    std::vector<double> doas_deg;
    VectorXd c;
    std::vector<MatrixXcd> tx_factors; // Q_m, Q_m Q_m = A^H V A
    std::vector<MatrixXcd> rx_factors; // Q~_m, Q~_m Q~_m = A X A^H
};

/// Rotates the global phase so the largest-magnitude entry is real positive.
VectorXcd canonical_phase(VectorXcd v);

/// Exact recovery when both covariances are (numerically) rank-one:
/// s = sqrt(E) u1(X), w = sqrt(lambda1) u1(V). Empty otherwise.
std::optional<std::pair<VectorXcd, VectorXcd>> extract_rank_one(
    const DesignPair& pair, const Scenario& sc, double rel_tol = 1e-6);

ShapeTargets shape_targets(const DesignPair& pair, const Scenario& sc,
                           int m_count = 41);

/// Cyclic shape-matching synthesis of the waveform: minimize
/// sum_m ||Q_m sbar - sqrt(c_m) q_m||^2 over unit q_m and sbar with
/// sbar^H (Sigma_I(V) + tr(V)/E I) sbar <= zeta = tr((..) X). Returns
/// sqrt(E) sbar / ||sbar||.
VectorXcd synthesize_waveform_qcqp(const DesignPair& pair, const Scenario& sc,
                                   int m_count = 41, int iterations = 50,
                                   std::vector<double>* objective_history =
                                       nullptr);

/// Mirror image for the filter with A X A^H shapes and the constraint
/// w^H (Sigma_I(X) + I) w <= eta = tr((..) V); no renormalization.
VectorXcd synthesize_filter_qcqp(const DesignPair& pair, const Scenario& sc,
                                 int m_count = 41, int iterations = 50,
                                 std::vector<double>* objective_history =
                                     nullptr);

/// Randomized recovery: rank-one branches use the eigen-decompositions;
/// otherwise the best of r_samples Gaussian draws per side, judged by the
/// worst quotient over a uniform angle grid on the sector.
std::pair<VectorXcd, VectorXcd> randomized_synthesis(const DesignPair& pair,
                                                     const Scenario& sc,
                                                     int r_samples = 1000,
                                                     std::uint64_t seed = 0,
                                                     int grid_size = 181);

/// Worst-case evaluation of a synthesized pair against the relaxed benchmark
/// SINR_relax(theta) on the same angle grid.
struct SynthesisEvaluation {
    std::vector<double> theta_deg;
    std::vector<double> achieved_db;
    std::vector<double> relaxed_db;
    double achieved_worst_case_db = 0.0;
    double relaxed_bound_db = 0.0;
};

SynthesisEvaluation evaluate_result(const VectorXcd& s, const VectorXcd& w,
                                    const DesignPair& pair, const Scenario& sc,
                                    int grid_size = 181);

} // namespace rmimo
