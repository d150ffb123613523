#include "rmimo/experiments.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>

namespace {

struct Options {
    std::string config_path;
    std::string out_dir;
    std::string scale = "desk";
    std::uint64_t seed = 0;
};

rmimo::ExperimentConfig resolve_config(const Options& opt) {
    rmimo::ExperimentConfig config;
    if (!opt.config_path.empty()) {
        std::ifstream is(opt.config_path);
        if (!is)
            throw std::runtime_error("cannot read config file '" +
                                     opt.config_path + "'");
        std::ostringstream buf;
        buf << is.rdbuf();
        config = rmimo::config_from_json(buf.str());
    } else if (opt.scale == "desk") {
        config = rmimo::desk_config();
    } else if (opt.scale == "paper") {
        config = rmimo::paper_config();
    } else {
        throw std::runtime_error("unknown scale '" + opt.scale +
                                 "' (expected desk or paper)");
    }
    if (!opt.out_dir.empty()) config.out_dir = opt.out_dir;
    return config;
}

void add_common(CLI::App* sub, Options& opt, bool with_seed = true) {
    sub->add_option("--config", opt.config_path,
                    "JSON experiment configuration");
    sub->add_option("--out", opt.out_dir, "output directory");
    sub->add_option("--scale", opt.scale, "built-in preset: desk or paper")
        ->check(CLI::IsMember({"desk", "paper"}));
    if (with_seed) sub->add_option("--seed", opt.seed, "RNG seed");
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Robust joint waveform/filter design for colocated MIMO "
                 "radar under target-angle uncertainty"};
    app.require_subcommand(1);

    Options opt;
    CLI::App* design = app.add_subcommand(
        "design", "Robust and non-robust designs with SINR-vs-angle curves");
    CLI::App* beampattern = app.add_subcommand(
        "beampattern", "Joint transmit-receive pattern of a stored design");
    CLI::App* sweep = app.add_subcommand(
        "sweep-uncertainty", "Worst-case SINR versus sector half-width");
    CLI::App* multistart = app.add_subcommand(
        "multistart", "Sensitivity of the cyclic optimizer to its start");
    CLI::App* synthesize = app.add_subcommand(
        "synthesize", "Waveform/filter recovery from a stored design");
    add_common(design, opt);
    add_common(beampattern, opt, /*with_seed=*/false);
    add_common(sweep, opt);
    add_common(multistart, opt);
    add_common(synthesize, opt);

    CLI11_PARSE(app, argc, argv);

    const std::string command = app.get_subcommands().front()->get_name();
    try {
        const rmimo::ExperimentConfig config = resolve_config(opt);
        rmimo::CommandResult result;
        if (command == "design")
            result = rmimo::cmd_design(config, opt.seed);
        else if (command == "beampattern")
            result = rmimo::cmd_beampattern(config);
        else if (command == "sweep-uncertainty")
            result = rmimo::cmd_sweep_uncertainty(config, opt.seed);
        else if (command == "multistart")
            result = rmimo::cmd_multistart(config, opt.seed);
        else
            result = rmimo::cmd_synthesize(config, opt.seed);
        std::cout << result.summary_json;
        return 0;
    } catch (const std::exception& e) {
        const nlohmann::json err = {{"error", true},
                                    {"command", command},
                                    {"message", e.what()}};
        std::cerr << err.dump(2) << '\n';
        return 1;
    }
}
