#pragma once

#include "rmimo/conic.hpp"
#include "rmimo/lifting.hpp"
#include "rmimo/trigpoly.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>
#include <vector>

namespace rmimo {

/// Lifted design covariances: X (transmit, tr X = E) and V (receive).
struct DesignPair {
    MatrixXcd x;
    MatrixXcd v;
};

enum class TerminalStatus { converged, max_iter, solver_failure };

struct OptimizerSettings {
    SolverSettings solver;
    /// Stopping threshold on the worst-case SINR increment per full cycle,
    /// in linear SINR units.
    double stop_increment = 5e-3;
    int max_iterations = 150;
    /// Grid density for the independent worst-case certification.
    int nu_grid = 2001;
};

struct CycleReport {
    std::vector<double> t_history; // worst-case SINR (linear), per half-step
    int iterations = 0;
    bool converged = false;
    TerminalStatus terminal_status = TerminalStatus::max_iter;
};

struct MultiStartResult {
    DesignPair best;
    double best_worst_case = 0.0; // linear
    std::vector<double> all_t;    // per successful start
    double variation = 0.0;       // (max - min) / mean
    std::vector<CycleReport> reports;
};

struct NonrobustResult {
    VectorXcd s;
    VectorXcd w;
    double sinr_db = 0.0;
    std::vector<double> sinr_history; // linear, per full iteration
    int iterations = 0;
};

struct SolverFailure : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// One SDP ascent step in the transmit covariance for fixed V. Returns the
/// trace-normalized X and the achieved worst-case SINR (linear, SNR applied).
std::pair<MatrixXcd, double> u_step(const MatrixXcd& v, const Scenario& sc,
                                    const OptimizerSettings& settings = {});

/// Mirror step in the receive covariance for fixed X (tr X = E required).
std::pair<MatrixXcd, double> v_step(const MatrixXcd& x, const Scenario& sc,
                                    const OptimizerSettings& settings = {});

/// Alternates u_step / v_step from V0 until the worst-case SINR increment per
/// cycle drops below settings.stop_increment. Requires an uncertain sector
/// (half_width > 0).
std::pair<DesignPair, CycleReport> cyclic_design(
    const Scenario& sc, const MatrixXcd& init_v,
    const OptimizerSettings& settings = {});

/// (max - min) / mean of a nonempty sample; 0 when the mean is 0.
double spread_metric(const std::vector<double>& values);

/// Random rank-one initializations V0 = w0 w0^H, w0 ~ CN(0, I) normalized.
MultiStartResult multi_start(const Scenario& sc, int gamma, std::uint64_t seed,
                             const OptimizerSettings& settings = {});

/// Independent certification: min over a nu-grid of the lifted SINR ratio
/// (linear scale).
double worst_case_sinr(const DesignPair& pair, const Scenario& sc,
                       int grid_size = 2001);

/// Known-angle baseline: exact alternation between the MVDR filter and the
/// generalized-Rayleigh waveform at the sector center.
NonrobustResult nonrobust_design(const Scenario& sc, double rel_tol = 1e-6,
                                 int max_iterations = 500);

} // namespace rmimo
