// Command line front end for the scenario library.

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <thread>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "legfunnel/errors.hpp"
#include "legfunnel/scenario_config.hpp"
#include "legfunnel/simulation.hpp"
#include "legfunnel/trajectory_io.hpp"

namespace fs = std::filesystem;
using namespace legfunnel;

namespace {

enum ExitCode : int {
    kOk = 0,
    kValidationFailed = 1,
    kConfigError = 2,
    kFunnelViolation = 3,
    kIoError = 4,
    kSimulationError = 5,
};

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::string read_text(const fs::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot read '" + path.string() + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_text(const fs::path& path, const std::string& text)
{
    std::ofstream out(path, std::ios::binary);
    out << text;
    out.close();
    if (!out) {
        throw IoError("cannot write '" + path.string() + "'");
    }
}

struct CommonOverrides {
    std::optional<double> dt;
    std::optional<double> duration;
    std::optional<std::string> sensor_mode;

    void attach(CLI::App* cmd)
    {
        cmd->add_option("--dt", dt, "Override the integration step (s)");
        cmd->add_option("--duration", duration, "Override the simulated horizon (s)");
        cmd->add_option("--sensor-mode", sensor_mode, "Override posture feedback: truth or sampled_20hz");
    }

    ScenarioConfig::Overrides list() const
    {
        ScenarioConfig::Overrides out;
        auto num = [](double v) {
            std::ostringstream os;
            os << std::setprecision(17) << v;
            return os.str();
        };
        if (dt) {
            out.emplace_back("scenario.dt", num(*dt));
        }
        if (duration) {
            out.emplace_back("scenario.duration", num(*duration));
        }
        if (sensor_mode) {
            out.emplace_back("scenario.sensor_mode", *sensor_mode);
        }
        return out;
    }
};

/// Text the config hash is computed over: raw file bytes plus the applied overrides.
std::string hashed_text(const std::string& text, const ScenarioConfig::Overrides& overrides)
{
    std::string out = text;
    for (const auto& [k, v] : overrides) {
        out += "\n#override " + k + "=" + v;
    }
    return out;
}

int cmd_validate(const fs::path& path, const CommonOverrides& ov)
{
    const ScenarioConfig cfg = ScenarioConfig::parse(read_text(path), ov.list());
    if (cfg.controller != ControllerKind::Funnel) {
        std::cout << "scenario '" << cfg.name << "': impedance baseline, no funnel hypotheses to check\n";
        return kOk;
    }
    const ScenarioValidation v = validate_scenario(cfg);
    const auto& r = v.report;
    std::cout << "scenario '" << cfg.name << "': omega=" << r.omega.omega << " (force-rate bound "
              << r.omega.omega_force_rate << " N/s)\n";
    for (const auto& c : r.conditions) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  (slack " << c.slack << ")\n";
    }
    std::cout << "varpi=" << r.varpi << " N, delta=" << r.delta << " s\n";
    bool ok = r.all_passed();
    if (cfg.enforce_dwell_resolution) {
        std::cout << (v.resolution_ok ? "PASS " : "FAIL ") << "dt <= delta/10  (dt " << cfg.dt << " s, limit "
                  << v.resolution_limit << " s)\n";
        ok = ok && v.resolution_ok;
    }
    return ok ? kOk : kValidationFailed;
}

struct RunOutcome {
    int code = kOk;
    std::string message;
    std::optional<Metrics> metrics;
};

RunOutcome run_to_dir(const ScenarioConfig& cfg, const std::string& hash_source, const fs::path& config_path,
                      const fs::path& out_dir, const RunOptions& opts)
{
    RunOutcome outcome;
    const SimTrajectory traj = run_scenario(cfg, opts);
    const Metrics m = extract_metrics(traj);
    outcome.metrics = m;

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
    }
    {
        std::ofstream csv(out_dir / "trajectory.csv", std::ios::binary);
        write_csv(csv, traj);
        csv.close();
        if (!csv) {
            throw IoError("cannot write '" + (out_dir / "trajectory.csv").string() + "'");
        }
    }
    nlohmann::json metrics = metrics_to_json(m);
    metrics["scenario"] = cfg.name;
    metrics["controller"] = to_string(cfg.controller);
    metrics["mode"] = to_string(cfg.mode);
    metrics["aborted"] = traj.aborted;
    metrics["abort_reason"] = traj.abort_reason;
    metrics["omega_estimate"] = traj.omega_estimate;
    metrics["observed_ref_rate_sup"] = traj.observed_ref_rate_sup;
    metrics["allocation_warnings"] = traj.allocation_warnings;
    metrics["clamp_warnings"] = traj.clamp_warnings;
    write_text(out_dir / "metrics.json", metrics.dump(2) + "\n");

    RunManifest manifest;
    manifest.config_path = config_path.string();
    manifest.output_dir = out_dir.string();
    manifest.config_hash = config_hash(hash_source);
    manifest.run_id = cfg.name + "-" + manifest.config_hash.substr(0, 8);
    write_text(out_dir / "manifest.json", manifest.to_json().dump(2) + "\n");

    if (traj.funnel_violation) {
        outcome.code = kFunnelViolation;
        outcome.message = traj.abort_reason;
    } else if (traj.aborted) {
        outcome.code = kSimulationError;
        outcome.message = traj.abort_reason;
    }
    return outcome;
}

void print_summary(const ScenarioConfig& cfg, const Metrics& m)
{
    std::cout << std::fixed << std::setprecision(3);
    std::cout << "scenario " << cfg.name << " (" << to_string(cfg.controller) << ", " << to_string(cfg.mode) << ")\n";
    std::cout << "  leg  E-Force (N)                 Range (N)   events\n";
    for (std::size_t i = 0; i < m.legs.size(); ++i) {
        const LegMetrics& lm = m.legs[i];
        std::cout << "  " << std::setw(3) << i + 1 << "  " << std::setw(10) << lm.e_min << " ~ " << std::left
                  << std::setw(12) << lm.e_max << std::right << std::setw(10) << lm.e_range << std::setw(9)
                  << lm.events << "\n";
    }
    if (cfg.mode == ScenarioMode::Posture) {
        std::cout << "  Angle (deg) " << m.angle_min << " ~ " << m.angle_max << ", Angle Range (deg) "
                  << m.angle_range << " (roll " << m.roll_range << ", pitch " << m.pitch_range << ")\n";
    }
    std::cout << "  contained " << (m.contained ? "yes" : "no");
    if (cfg.controller == ControllerKind::Funnel) {
        std::cout << std::defaultfloat << ", varpi_measured " << m.varpi_measured << " N";
    }
    std::cout << "\n" << std::defaultfloat;
}

int cmd_run(const fs::path& path, const fs::path& out_dir, const CommonOverrides& ov, bool unchecked)
{
    const std::string text = read_text(path);
    const auto overrides = ov.list();
    const ScenarioConfig cfg = ScenarioConfig::parse(text, overrides);
    const RunOutcome r = run_to_dir(cfg, hashed_text(text, overrides), path, out_dir, RunOptions{!unchecked});
    if (r.metrics) {
        print_summary(cfg, *r.metrics);
    }
    if (r.code != kOk) {
        std::cerr << "error: " << r.message << "\n";
    }
    return r.code;
}

/// Grid file: [sweep] base = <config relative to the grid file>, optional psi0 = <N>;
/// [grid] section.key = v1 | v2 | ...
struct Grid {
    fs::path base;
    std::optional<double> psi0; // keep only cells with a + xi == psi0
    std::vector<std::pair<std::string, std::vector<std::string>>> axes;
};

Grid load_grid(const fs::path& path)
{
    namespace pt = boost::property_tree;
    pt::ptree tree;
    std::istringstream is(read_text(path));
    try {
        pt::read_ini(is, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("malformed grid file: ") + e.what());
    }
    Grid grid;
    const auto base = tree.get_optional<std::string>("sweep.base");
    if (!base) {
        throw ConfigError("grid file needs [sweep] base = <config>");
    }
    grid.base = path.parent_path() / *base;
    for (const auto& [section, body] : tree) {
        if (section == "sweep") {
            for (const auto& [key, node] : body) {
                if (key == "psi0") {
                    try {
                        grid.psi0 = std::stod(node.get_value<std::string>());
                    } catch (const std::exception&) {
                        throw ConfigError("sweep.psi0 must be a number");
                    }
                } else if (key != "base") {
                    throw ConfigError("unknown grid key 'sweep." + key + "'");
                }
            }
            continue;
        }
        if (section != "grid") {
            throw ConfigError("unknown grid section '" + section + "'");
        }
        for (const auto& [key, node] : body) {
            std::vector<std::string> values;
            std::stringstream ss(node.get_value<std::string>());
            std::string item;
            while (std::getline(ss, item, '|')) {
                const auto a = item.find_first_not_of(" \t");
                const auto b = item.find_last_not_of(" \t");
                if (a != std::string::npos) {
                    values.push_back(item.substr(a, b - a + 1));
                }
            }
            if (values.empty()) {
                throw ConfigError("grid axis '" + key + "' has no values");
            }
            grid.axes.emplace_back(key, values);
        }
    }
    return grid;
}

int cmd_sweep(const fs::path& grid_path, const fs::path& out_dir, const CommonOverrides& ov, unsigned jobs)
{
    const Grid grid = load_grid(grid_path);
    const std::string base_text = read_text(grid.base);

    // cartesian product, last axis fastest
    std::vector<ScenarioConfig::Overrides> points(1);
    for (const auto& [key, values] : grid.axes) {
        std::vector<ScenarioConfig::Overrides> next;
        for (const auto& p : points) {
            for (const auto& v : values) {
                auto q = p;
                q.emplace_back(key, v);
                next.push_back(std::move(q));
            }
        }
        points = std::move(next);
    }
    if (grid.axes.empty()) {
        throw ConfigError("grid file has no [grid] axes");
    }
    for (auto& p : points) {
        const auto common = ov.list();
        p.insert(p.end(), common.begin(), common.end());
    }
    if (grid.psi0) {
        std::vector<ScenarioConfig::Overrides> kept;
        for (auto& p : points) {
            const ScenarioConfig cfg = ScenarioConfig::parse(base_text, p);
            if (std::abs(cfg.funnel.psi0() - *grid.psi0) <= 1e-9 * *grid.psi0) {
                kept.push_back(std::move(p));
            }
        }
        points = std::move(kept);
        if (points.empty()) {
            throw ConfigError("no grid cell satisfies a + xi = psi0");
        }
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw IoError("cannot create '" + out_dir.string() + "': " + ec.message());
    }

    auto run_point = [&](std::size_t idx) {
        std::ostringstream name;
        name << "run_" << std::setw(3) << std::setfill('0') << idx;
        RunOutcome r;
        try {
            const ScenarioConfig cfg = ScenarioConfig::parse(base_text, points[idx]);
            r = run_to_dir(cfg, hashed_text(base_text, points[idx]), grid.base, out_dir / name.str(), RunOptions{});
        } catch (const ConfigError& e) {
            r.code = kConfigError;
            r.message = e.what();
        } catch (const IoError& e) {
            r.code = kIoError;
            r.message = e.what();
        } catch (const std::exception& e) {
            r.code = kSimulationError;
            r.message = e.what();
        }
        return std::make_pair(name.str(), r);
    };

    std::vector<std::pair<std::string, RunOutcome>> results(points.size());
    const std::size_t width = std::max(1u, jobs);
    for (std::size_t start = 0; start < points.size(); start += width) {
        std::vector<std::future<std::pair<std::string, RunOutcome>>> batch;
        for (std::size_t i = start; i < std::min(points.size(), start + width); ++i) {
            batch.push_back(std::async(std::launch::async, run_point, i));
        }
        for (std::size_t i = 0; i < batch.size(); ++i) {
            results[start + i] = batch[i].get();
        }
    }

    std::ostringstream summary;
    summary << "run";
    for (const auto& axis : grid.axes) {
        summary << "," << axis.first;
    }
    summary << ",status,e_range_max,angle_range_deg,event_count,min_gap,varpi_measured,contained\n";
    int worst = kOk;
    for (std::size_t i = 0; i < results.size(); ++i) {
        const auto& [name, r] = results[i];
        summary << name;
        for (std::size_t a = 0; a < grid.axes.size(); ++a) {
            summary << ",\"" << points[i][a].second << "\"";
        }
        summary << "," << r.code;
        if (r.metrics) {
            const Metrics& m = *r.metrics;
            // non-finite entries (no events, impedance runs) are left empty
            auto cell = [](double v) { return std::isfinite(v) ? std::to_string(v) : std::string(); };
            summary << "," << m.e_range_max << "," << m.angle_range << "," << m.event_count << ","
                    << cell(m.min_gap) << "," << cell(m.varpi_measured) << "," << (m.contained ? 1 : 0);
        } else {
            summary << ",,,,,,";
        }
        summary << "\n";
        if (r.code != kOk) {
            std::cerr << name << ": " << r.message << "\n";
            worst = worst == kOk ? r.code : std::min(worst, r.code);
        }
    }
    write_text(out_dir / "summary.csv", summary.str());
    std::cout << "swept " << results.size() << " configurations into " << out_dir.string() << "\n";
    return worst;
}

}  // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Event-triggered funnel force control for a six-wheel-legged robot"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);

    std::string config;
    std::string out_dir;
    std::string grid;
    bool unchecked = false;
    unsigned jobs = std::max(1u, std::thread::hardware_concurrency());

    CommonOverrides validate_ov;
    CLI::App* validate = app.add_subcommand("validate", "Check the containment hypotheses of a scenario");
    validate->add_option("config", config, "Scenario config file")->required();
    validate_ov.attach(validate);

    CommonOverrides run_ov;
    CLI::App* run = app.add_subcommand("run", "Simulate a scenario and write trajectory, metrics and manifest");
    run->add_option("config", config, "Scenario config file")->required();
    run->add_option("-o,--output", out_dir, "Output directory")->required();
    run->add_flag("--unchecked", unchecked, "Run even when the containment hypotheses fail");
    run_ov.attach(run);

    CommonOverrides sweep_ov;
    CLI::App* sweep = app.add_subcommand("sweep", "Run every point of a parameter grid");
    sweep->add_option("grid", grid, "Grid file")->required();
    sweep->add_option("-o,--output", out_dir, "Output directory")->required();
    sweep->add_option("-j,--jobs", jobs, "Parallel runs");
    sweep_ov.attach(sweep);

    CLI11_PARSE(app, argc, argv);

    try {
        if (*validate) {
            return cmd_validate(config, validate_ov);
        }
        if (*run) {
            return cmd_run(config, out_dir, run_ov, unchecked);
        }
        return cmd_sweep(grid, out_dir, sweep_ov, jobs);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << "\n";
        return kConfigError;
    } catch (const IoError& e) {
        std::cerr << "i/o error: " << e.what() << "\n";
        return kIoError;
    } catch (const FunnelViolation& e) {
        std::cerr << "funnel violation: " << e.what() << "\n";
        return kFunnelViolation;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kSimulationError;
    }
}
