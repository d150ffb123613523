#pragma once

#include "rmimo/synthesis.hpp"

#include <string>
#include <vector>

namespace rmimo {

/// Run-level knobs for the experiment commands.
struct RunOptions {
    int gamma = 10;                  // multistart count
    int r_samples = 1000;            // randomized-synthesis draws
    int m_count = 41;                // QCQP DOA samples
    int synthesis_iterations = 50;
    int angle_grid = 361;            // figure curves
    int nu_grid = 2001;              // worst-case certification
    double stop_increment = 5e-3;
    int max_iterations = 150;
    std::vector<double> delta_list = {2.0, 6.0, 10.0, 14.0};
};

struct ExperimentConfig {
    int version = 1;
    Scenario scenario;
    RunOptions run;
    std::string out_dir = "out";

    OptimizerSettings optimizer_settings() const;
};

/// Desk-scale default: 2x2 arrays, 4 samples, two interferers.
ExperimentConfig desk_config();
/// Paper-scale: 4x4 arrays, 20 samples, 30 interferers (5 ranges x 6 DOAs).
ExperimentConfig paper_config();

/// Strict parse: unknown keys are errors reported with their field path.
ExperimentConfig config_from_json(const std::string& text);
std::string config_to_json(const ExperimentConfig& config);

/// FNV-1a over the canonical serialization.
std::string config_hash(const ExperimentConfig& config);

struct CommandResult {
    std::vector<std::string> files_written;
    std::string summary_json;
};

/// Robust (cyclic SDP + synthesis) and non-robust designs; writes
/// sinr_vs_angle.csv, design.json, design_summary.json.
CommandResult cmd_design(const ExperimentConfig& config, std::uint64_t seed);

/// Joint transmit-receive pattern of both designs from design.json;
/// writes beampattern.csv, beampattern_summary.json.
CommandResult cmd_beampattern(const ExperimentConfig& config);

/// Worst-case SINR as a function of the sector half-width; writes
/// worst_case_vs_delta.csv, sweep_summary.json.
CommandResult cmd_sweep_uncertainty(const ExperimentConfig& config,
                                    std::uint64_t seed);

/// Per-start worst-case SINR and the variation metric; writes
/// multistart.csv, multistart_summary.json.
CommandResult cmd_multistart(const ExperimentConfig& config,
                             std::uint64_t seed);

/// Both synthesis methods against the relaxed benchmark for the pair stored
/// in design.json; writes synthesis.csv, synthesis_summary.json.
CommandResult cmd_synthesize(const ExperimentConfig& config,
                             std::uint64_t seed);

} // namespace rmimo
