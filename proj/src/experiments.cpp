#include "rmimo/experiments.hpp"

#include "json.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace rmimo {

namespace {

using nlohmann::json;

constexpr const char* kCodeVersion = "rmimo 1.0.0";

std::string utc_timestamp() {
    const auto now = std::chrono::system_clock::now();
    const std::time_t t = std::chrono::system_clock::to_time_t(now);
    std::tm tm{};
    gmtime_r(&t, &tm);
    char buf[32];
    std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void require_keys(const json& obj, const std::string& path,
                  std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : obj.items()) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || key == a;
        if (!ok)
            throw std::invalid_argument("config: unknown key '" + path + key +
                                        "'");
    }
}

std::filesystem::path ensure_out_dir(const ExperimentConfig& config) {
    std::filesystem::path dir(config.out_dir);
    std::filesystem::create_directories(dir);
    return dir;
}

void write_file(const std::filesystem::path& path, const std::string& body) {
    std::ofstream os(path, std::ios::binary);
    if (!os) throw std::runtime_error("cannot write " + path.string());
    os << body;
}

json vector_to_json(const VectorXcd& v) {
    json arr = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i)
        arr.push_back({std::real(v(i)), std::imag(v(i))});
    return arr;
}

VectorXcd vector_from_json(const json& arr) {
    VectorXcd v(static_cast<Eigen::Index>(arr.size()));
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        const auto& e = arr.at(static_cast<std::size_t>(i));
        v(i) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
    }
    return v;
}

json matrix_to_json(const MatrixXcd& m) {
    json rows = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j)
            row.push_back({std::real(m(i, j)), std::imag(m(i, j))});
        rows.push_back(std::move(row));
    }
    return rows;
}

MatrixXcd matrix_from_json(const json& rows) {
    const auto nr = static_cast<Eigen::Index>(rows.size());
    const auto nc =
        nr > 0 ? static_cast<Eigen::Index>(rows.at(0).size()) : Eigen::Index(0);
    MatrixXcd m(nr, nc);
    for (Eigen::Index i = 0; i < nr; ++i)
        for (Eigen::Index j = 0; j < nc; ++j) {
            const auto& e =
                rows.at(static_cast<std::size_t>(i)).at(static_cast<std::size_t>(j));
            m(i, j) = Complex(e.at(0).get<double>(), e.at(1).get<double>());
        }
    return m;
}

json scenario_to_json(const Scenario& sc) {
    json j;
    j["n_tx"] = sc.n_tx;
    j["n_rx"] = sc.n_rx;
    j["n_samples"] = sc.n_samples;
    j["energy"] = sc.energy;
    j["snr_db"] = sc.snr_db;
    json intf = json::array();
    for (const Interferer& k : sc.interferers)
        intf.push_back({{"range_offset", k.range_offset},
                        {"doa_deg", k.doa_deg},
                        {"inr_db", k.inr_db}});
    j["interferers"] = std::move(intf);
    j["sector"] = {{"center_deg", sc.sector.center_deg},
                   {"half_width_deg", sc.sector.half_width_deg}};
    return j;
}

Scenario scenario_from_json(const json& j) {
    require_keys(j, "scenario.",
                 {"n_tx", "n_rx", "n_samples", "energy", "snr_db",
                  "interferers", "sector"});
    Scenario sc = desk_config().scenario;
    if (j.contains("n_tx")) sc.n_tx = j["n_tx"].get<int>();
    if (j.contains("n_rx")) sc.n_rx = j["n_rx"].get<int>();
    if (j.contains("n_samples")) sc.n_samples = j["n_samples"].get<int>();
    if (j.contains("energy")) sc.energy = j["energy"].get<double>();
    if (j.contains("snr_db")) sc.snr_db = j["snr_db"].get<double>();
    if (j.contains("interferers")) {
        sc.interferers.clear();
        std::size_t idx = 0;
        for (const json& e : j["interferers"]) {
            require_keys(e,
                         "scenario.interferers[" + std::to_string(idx) + "].",
                         {"range_offset", "doa_deg", "inr_db"});
            Interferer k;
            if (e.contains("range_offset"))
                k.range_offset = e["range_offset"].get<int>();
            if (e.contains("doa_deg")) k.doa_deg = e["doa_deg"].get<double>();
            if (e.contains("inr_db")) k.inr_db = e["inr_db"].get<double>();
            sc.interferers.push_back(k);
            ++idx;
        }
    }
    if (j.contains("sector")) {
        require_keys(j["sector"], "scenario.sector.",
                     {"center_deg", "half_width_deg"});
        if (j["sector"].contains("center_deg"))
            sc.sector.center_deg = j["sector"]["center_deg"].get<double>();
        if (j["sector"].contains("half_width_deg"))
            sc.sector.half_width_deg =
                j["sector"]["half_width_deg"].get<double>();
    }
    return sc;
}

// angle grid over the uncertainty sector, endpoints inclusive
std::vector<double> omega_grid(const Scenario& sc, int points) {
    const double lo = sc.sector.center_deg - sc.sector.half_width_deg;
    const double hi = sc.sector.center_deg + sc.sector.half_width_deg;
    if (points == 1 || lo == hi) return {sc.sector.center_deg};
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g.push_back(lo + (hi - lo) * i / (points - 1));
    return g;
}

// steering is defined on the open interval (-90, 90), so the full pattern
// grid stops half a degree short of endfire
std::vector<double> full_grid(int points) {
    std::vector<double> g;
    g.reserve(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i)
        g.push_back(-89.5 + 179.0 * i / (points - 1));
    return g;
}

double worst_over(const std::vector<double>& values) {
    double worst = std::numeric_limits<double>::infinity();
    for (double v : values) worst = std::min(worst, v);
    return worst;
}

json base_summary(const ExperimentConfig& config, std::uint64_t seed) {
    json s;
    s["code_version"] = kCodeVersion;
    s["config_hash"] = config_hash(config);
    s["seed"] = seed;
    s["generated_utc"] = utc_timestamp();
    return s;
}

struct DesignRecord {
    bool robust_present = false;
    DesignPair pair;
    VectorXcd s_robust, w_robust;
    std::string robust_synthesis;
    VectorXcd s_nonrobust, w_nonrobust;
};

DesignRecord load_design(const ExperimentConfig& config) {
    const std::filesystem::path path =
        std::filesystem::path(config.out_dir) / "design.json";
    std::ifstream is(path);
    if (!is)
        throw std::runtime_error("missing design file " + path.string() +
                                 " (run the design command first)");
    json j = json::parse(is);
    DesignRecord rec;
    rec.s_nonrobust = vector_from_json(j.at("nonrobust").at("s"));
    rec.w_nonrobust = vector_from_json(j.at("nonrobust").at("w"));
    if (!j.at("robust").is_null()) {
        rec.robust_present = true;
        rec.pair.x = matrix_from_json(j["robust"].at("x"));
        rec.pair.v = matrix_from_json(j["robust"].at("v"));
        rec.s_robust = vector_from_json(j["robust"].at("s"));
        rec.w_robust = vector_from_json(j["robust"].at("w"));
        rec.robust_synthesis = j["robust"].at("synthesis").get<std::string>();
    }
    return rec;
}

} // namespace

OptimizerSettings ExperimentConfig::optimizer_settings() const {
    OptimizerSettings st;
    st.stop_increment = run.stop_increment;
    st.max_iterations = run.max_iterations;
    st.nu_grid = run.nu_grid;
    return st;
}

ExperimentConfig desk_config() {
    ExperimentConfig c;
    c.scenario.n_tx = 2;
    c.scenario.n_rx = 2;
    c.scenario.n_samples = 4;
    c.scenario.energy = 8.0;
    c.scenario.snr_db = -15.0;
    c.scenario.interferers = {{0, -40.0, 30.0}, {0, 50.0, 30.0}};
    c.scenario.sector = {0.0, 10.0};
    // The absolute stopping increment must be calibrated to the worst-case
    // SINR level; at desk scale (t ~ 0.45 linear) the library default 5e-3
    // halts the alternation mid-transient.
    c.run.stop_increment = 1e-6;
    c.run.max_iterations = 5000;
    return c;
}

ExperimentConfig paper_config() {
    ExperimentConfig c;
    c.scenario.n_tx = 4;
    c.scenario.n_rx = 4;
    c.scenario.n_samples = 20;
    c.scenario.energy = 20.0;
    c.scenario.snr_db = -15.0;
    c.scenario.interferers.clear();
    for (int r = -2; r <= 2; ++r)
        for (double doa : {-60.0, -50.0, -40.0, 40.0, 60.0, 70.0})
            c.scenario.interferers.push_back({r, doa, 30.0});
    c.scenario.sector = {0.0, 10.0};
    c.run.gamma = 50;
    return c;
}

ExperimentConfig config_from_json(const std::string& text) {
    json j = json::parse(text);
    require_keys(j, "", {"version", "scenario", "run", "output"});
    ExperimentConfig c = desk_config();
    if (j.contains("version")) {
        c.version = j["version"].get<int>();
        if (c.version != 1)
            throw std::invalid_argument("config: unsupported version " +
                                        std::to_string(c.version));
    }
    if (j.contains("scenario")) c.scenario = scenario_from_json(j["scenario"]);
    if (j.contains("run")) {
        const json& r = j["run"];
        require_keys(r, "run.",
                     {"gamma", "r_samples", "m_count", "synthesis_iterations",
                      "angle_grid", "nu_grid", "stop_increment",
                      "max_iterations", "delta_list"});
        if (r.contains("gamma")) c.run.gamma = r["gamma"].get<int>();
        if (r.contains("r_samples"))
            c.run.r_samples = r["r_samples"].get<int>();
        if (r.contains("m_count")) c.run.m_count = r["m_count"].get<int>();
        if (r.contains("synthesis_iterations"))
            c.run.synthesis_iterations = r["synthesis_iterations"].get<int>();
        if (r.contains("angle_grid"))
            c.run.angle_grid = r["angle_grid"].get<int>();
        if (r.contains("nu_grid")) c.run.nu_grid = r["nu_grid"].get<int>();
        if (r.contains("stop_increment"))
            c.run.stop_increment = r["stop_increment"].get<double>();
        if (r.contains("max_iterations"))
            c.run.max_iterations = r["max_iterations"].get<int>();
        if (r.contains("delta_list"))
            c.run.delta_list = r["delta_list"].get<std::vector<double>>();
    }
    if (j.contains("output")) {
        require_keys(j["output"], "output.", {"directory"});
        if (j["output"].contains("directory"))
            c.out_dir = j["output"]["directory"].get<std::string>();
    }
    c.scenario.validate();
    return c;
}

std::string config_to_json(const ExperimentConfig& config) {
    json j;
    j["version"] = config.version;
    j["scenario"] = scenario_to_json(config.scenario);
    j["run"] = {{"gamma", config.run.gamma},
                {"r_samples", config.run.r_samples},
                {"m_count", config.run.m_count},
                {"synthesis_iterations", config.run.synthesis_iterations},
                {"angle_grid", config.run.angle_grid},
                {"nu_grid", config.run.nu_grid},
                {"stop_increment", config.run.stop_increment},
                {"max_iterations", config.run.max_iterations},
                {"delta_list", config.run.delta_list}};
    j["output"] = {{"directory", config.out_dir}};
    return j.dump(2);
}

std::string config_hash(const ExperimentConfig& config) {
    // FNV-1a 64-bit over the canonical serialization, output directory
    // excluded so relocated runs hash identically
    ExperimentConfig canon = config;
    canon.out_dir = "";
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char ch : config_to_json(canon)) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[20];
    std::snprintf(buf, sizeof(buf), "%016llx",
                  static_cast<unsigned long long>(h));
    return buf;
}

CommandResult cmd_design(const ExperimentConfig& config, std::uint64_t seed) {
    const Scenario& sc = config.scenario;
    sc.validate();
    const auto dir = ensure_out_dir(config);
    const bool robust_possible = sc.sector.half_width_deg > 0.0;

    const NonrobustResult nr = nonrobust_design(sc);

    json design;
    design["version"] = 1;
    design["config_hash"] = config_hash(config);
    design["seed"] = seed;
    design["scenario"] = scenario_to_json(sc);
    design["nonrobust"] = {{"s", vector_to_json(nr.s)},
                           {"w", vector_to_json(nr.w)},
                           {"sinr_db", nr.sinr_db},
                           {"iterations", nr.iterations}};

    json summary = base_summary(config, seed);
    summary["command"] = "design";
    summary["nonrobust_center_sinr_db"] = nr.sinr_db;

    DesignPair pair;
    VectorXcd s_r, w_r;
    std::string synthesis_kind;
    CycleReport rep;
    if (robust_possible) {
        // deterministic warm start from the known-angle filter direction;
        // random starts are the multistart command's job
        const VectorXcd w0 = nr.w.normalized();
        std::tie(pair, rep) =
            cyclic_design(sc, w0 * w0.adjoint(), config.optimizer_settings());
        if (rep.terminal_status == TerminalStatus::solver_failure)
            throw std::runtime_error(
                "design: cyclic optimization failed (solver failure)");
        if (const auto rec = extract_rank_one(pair, sc)) {
            std::tie(s_r, w_r) = *rec;
            synthesis_kind = "rank_one";
        } else {
            std::tie(s_r, w_r) = randomized_synthesis(
                pair, sc, config.run.r_samples, seed, config.run.angle_grid);
            synthesis_kind = "randomized";
        }
        design["robust"] = {
            {"x", matrix_to_json(pair.x)},
            {"v", matrix_to_json(pair.v)},
            {"s", vector_to_json(s_r)},
            {"w", vector_to_json(w_r)},
            {"synthesis", synthesis_kind},
            {"relaxed_worst_case_db",
             linear_to_db(rep.t_history.back())},
            {"iterations", rep.iterations},
            {"converged", rep.converged}};
        summary["robust_relaxed_worst_case_db"] =
            linear_to_db(rep.t_history.back());
        summary["robust_certified_worst_case_db"] = linear_to_db(
            worst_case_sinr(pair, sc, config.run.nu_grid));
        summary["robust_synthesis"] = synthesis_kind;
    } else {
        design["robust"] = nullptr;
        summary["robust_skipped"] =
            "sector half-width is zero: the robust path requires an "
            "uncertain sector, non-robust design only";
    }

    // SINR-vs-angle curves over the sector
    const std::vector<double> grid =
        omega_grid(sc, robust_possible ? config.run.angle_grid : 1);
    std::ostringstream csv;
    csv << (robust_possible
                ? "theta_deg,sinr_robust_db,sinr_nonrobust_db\n"
                : "theta_deg,sinr_nonrobust_db\n");
    std::vector<double> rob_curve, non_curve;
    for (double th : grid) {
        const double non_db = sinr_vectors(nr.s, nr.w, th, sc);
        non_curve.push_back(non_db);
        if (robust_possible) {
            const double rob_db = sinr_vectors(s_r, w_r, th, sc);
            rob_curve.push_back(rob_db);
            csv << fmt(th) << ',' << fmt(rob_db) << ',' << fmt(non_db)
                << '\n';
        } else {
            csv << fmt(th) << ',' << fmt(non_db) << '\n';
        }
    }
    summary["nonrobust_worst_case_db"] = worst_over(non_curve);
    if (robust_possible)
        summary["robust_worst_case_db"] = worst_over(rob_curve);

    CommandResult res;
    write_file(dir / "sinr_vs_angle.csv", csv.str());
    res.files_written.push_back((dir / "sinr_vs_angle.csv").string());
    write_file(dir / "design.json", design.dump(2) + "\n");
    res.files_written.push_back((dir / "design.json").string());
    res.summary_json = summary.dump(2) + "\n";
    write_file(dir / "design_summary.json", res.summary_json);
    res.files_written.push_back((dir / "design_summary.json").string());
    return res;
}

CommandResult cmd_beampattern(const ExperimentConfig& config) {
    const Scenario& sc = config.scenario;
    sc.validate();
    const auto dir = ensure_out_dir(config);
    const DesignRecord rec = load_design(config);

    const std::vector<double> grid = full_grid(config.run.angle_grid);
    const std::vector<double> non =
        beampattern(rec.s_nonrobust, rec.w_nonrobust, grid, sc);
    std::vector<double> rob;
    if (rec.robust_present)
        rob = beampattern(rec.s_robust, rec.w_robust, grid, sc);

    std::ostringstream csv;
    csv << (rec.robust_present ? "theta_deg,pattern_robust_db,pattern_nonrobust_db\n"
                               : "theta_deg,pattern_nonrobust_db\n");
    for (std::size_t i = 0; i < grid.size(); ++i) {
        csv << fmt(grid[i]);
        if (rec.robust_present) csv << ',' << fmt(rob[i]);
        csv << ',' << fmt(non[i]) << '\n';
    }

    json summary = base_summary(config, 0);
    summary["command"] = "beampattern";
    summary["grid_points"] = grid.size();

    CommandResult res;
    write_file(dir / "beampattern.csv", csv.str());
    res.files_written.push_back((dir / "beampattern.csv").string());
    res.summary_json = summary.dump(2) + "\n";
    write_file(dir / "beampattern_summary.json", res.summary_json);
    res.files_written.push_back((dir / "beampattern_summary.json").string());
    return res;
}

CommandResult cmd_sweep_uncertainty(const ExperimentConfig& config,
                                    std::uint64_t seed) {
    Scenario sc = config.scenario;
    sc.validate();
    if (config.run.delta_list.empty())
        throw std::invalid_argument("sweep: empty delta list");
    for (std::size_t i = 1; i < config.run.delta_list.size(); ++i)
        if (config.run.delta_list[i] <= config.run.delta_list[i - 1])
            throw std::invalid_argument("sweep: delta list must be ascending");
    const auto dir = ensure_out_dir(config);

    std::ostringstream csv;
    csv << "delta_deg,worst_robust_db,worst_nonrobust_db\n";
    json rows = json::array();
    for (double delta : config.run.delta_list) {
        if (delta <= 0.0)
            throw std::invalid_argument("sweep: delta values must be > 0");
        sc.sector.half_width_deg = delta;
        const NonrobustResult nr = nonrobust_design(sc);
        const VectorXcd w0 = nr.w.normalized();
        auto [pair, rep] =
            cyclic_design(sc, w0 * w0.adjoint(), config.optimizer_settings());
        if (rep.terminal_status == TerminalStatus::solver_failure)
            throw std::runtime_error("sweep: solver failure at delta " +
                                     std::to_string(delta));
        const double robust_db =
            linear_to_db(worst_case_sinr(pair, sc, config.run.nu_grid));

        double non_worst = std::numeric_limits<double>::infinity();
        for (double th : omega_grid(sc, config.run.angle_grid))
            non_worst = std::min(non_worst, sinr_vectors(nr.s, nr.w, th, sc));

        csv << fmt(delta) << ',' << fmt(robust_db) << ',' << fmt(non_worst)
            << '\n';
        rows.push_back({{"delta_deg", delta},
                        {"worst_robust_db", robust_db},
                        {"worst_nonrobust_db", non_worst}});
    }

    json summary = base_summary(config, seed);
    summary["command"] = "sweep-uncertainty";
    summary["rows"] = std::move(rows);

    CommandResult res;
    write_file(dir / "worst_case_vs_delta.csv", csv.str());
    res.files_written.push_back((dir / "worst_case_vs_delta.csv").string());
    res.summary_json = summary.dump(2) + "\n";
    write_file(dir / "sweep_summary.json", res.summary_json);
    res.files_written.push_back((dir / "sweep_summary.json").string());
    return res;
}

CommandResult cmd_multistart(const ExperimentConfig& config,
                             std::uint64_t seed) {
    const Scenario& sc = config.scenario;
    sc.validate();
    const auto dir = ensure_out_dir(config);

    const MultiStartResult ms =
        multi_start(sc, config.run.gamma, seed, config.optimizer_settings());

    std::ostringstream csv;
    csv << "start_index,worst_case_db,iterations,converged\n";
    std::size_t ti = 0;
    for (std::size_t g = 0; g < ms.reports.size(); ++g) {
        const CycleReport& rep = ms.reports[g];
        if (rep.terminal_status == TerminalStatus::solver_failure ||
            rep.t_history.empty())
            continue;
        csv << g << ',' << fmt(linear_to_db(ms.all_t[ti])) << ','
            << rep.iterations << ',' << (rep.converged ? 1 : 0) << '\n';
        ++ti;
    }

    json summary = base_summary(config, seed);
    summary["command"] = "multistart";
    summary["gamma"] = config.run.gamma;
    summary["variation"] = ms.variation;
    summary["best_worst_case_db"] = linear_to_db(ms.best_worst_case);
    summary["successful_starts"] = ms.all_t.size();

    CommandResult res;
    write_file(dir / "multistart.csv", csv.str());
    res.files_written.push_back((dir / "multistart.csv").string());
    res.summary_json = summary.dump(2) + "\n";
    write_file(dir / "multistart_summary.json", res.summary_json);
    res.files_written.push_back((dir / "multistart_summary.json").string());
    return res;
}

CommandResult cmd_synthesize(const ExperimentConfig& config,
                             std::uint64_t seed) {
    const Scenario& sc = config.scenario;
    sc.validate();
    const auto dir = ensure_out_dir(config);
    const DesignRecord rec = load_design(config);
    if (!rec.robust_present)
        throw std::runtime_error(
            "synthesize: design.json has no robust pair (known-angle run)");

    const VectorXcd s1 = synthesize_waveform_qcqp(
        rec.pair, sc, config.run.m_count, config.run.synthesis_iterations);
    const VectorXcd w1 = synthesize_filter_qcqp(
        rec.pair, sc, config.run.m_count, config.run.synthesis_iterations);
    const auto [s2, w2] = randomized_synthesis(
        rec.pair, sc, config.run.r_samples, seed, config.run.angle_grid);

    const SynthesisEvaluation ev1 =
        evaluate_result(s1, w1, rec.pair, sc, config.run.angle_grid);
    const SynthesisEvaluation ev2 =
        evaluate_result(s2, w2, rec.pair, sc, config.run.angle_grid);

    std::ostringstream csv;
    csv << "theta_deg,sinr_method1_db,sinr_method2_db,sinr_relax_db\n";
    for (std::size_t i = 0; i < ev1.theta_deg.size(); ++i)
        csv << fmt(ev1.theta_deg[i]) << ',' << fmt(ev1.achieved_db[i]) << ','
            << fmt(ev2.achieved_db[i]) << ',' << fmt(ev1.relaxed_db[i])
            << '\n';

    json summary = base_summary(config, seed);
    summary["command"] = "synthesize";
    summary["method1_worst_case_db"] = ev1.achieved_worst_case_db;
    summary["method2_worst_case_db"] = ev2.achieved_worst_case_db;
    summary["relaxed_worst_case_db"] = ev1.relaxed_bound_db;

    CommandResult res;
    write_file(dir / "synthesis.csv", csv.str());
    res.files_written.push_back((dir / "synthesis.csv").string());
    res.summary_json = summary.dump(2) + "\n";
    write_file(dir / "synthesis_summary.json", res.summary_json);
    res.files_written.push_back((dir / "synthesis_summary.json").string());
    return res;
}

} // namespace rmimo
