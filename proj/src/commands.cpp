#include "qrenew/commands.hpp"

#include "qrenew/analytic.hpp"
#include "qrenew/errors.hpp"
#include "qrenew/io.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <iostream>
#include <numbers>
#include <sstream>

namespace qrenew {

using nlohmann::json;

namespace {

struct Output {
    const ExperimentConfig& config;
    const CommandOptions& options;
    WrittenFiles files;

    std::filesystem::path path(const std::string& suffix) const { return options.out_dir / (config.name + suffix); }

    std::string csv_banner() const {
        return "# " + std::string(kToolVersion) + " config_hash=" + config.hash() +
               " seed=" + std::to_string(config.run.seed) + "\n";
    }

    json metadata() const {
        return json{{"tool", kToolVersion},
                    {"config_hash", config.hash()},
                    {"seed", config.run.seed},
                    {"N", config.run.trajectories},
                    {"name", config.name}};
    }

    void write(const std::string& suffix, const std::string& contents) {
        const auto p = path(suffix);
        write_text_file(p, contents);
        files.push_back(p);
    }

    void write_json(const std::string& suffix, const json& body) { write(suffix, body.dump(2) + "\n"); }
};

RunSettings run_settings(const ExperimentConfig& config, const CommandOptions& options) {
    RunSettings run = config.run;
    run.workers = options.workers;
    return run;
}

json vector_json(const Eigen::Vector3d& v) { return json::array({v.x(), v.y(), v.z()}); }

json pair_json(const StatePair& pair) {
    return json{{"plus", vector_json(pair.plus.vec())}, {"minus", vector_json(pair.minus.vec())}};
}

json revivals_json(const std::vector<Revival>& revivals) {
    json out = json::array();
    for (const auto& r : revivals) {
        out.push_back(json{{"t_onset", r.t_onset},
                           {"t_peak", r.t_peak},
                           {"height", r.height},
                           {"onset_value", r.onset_value},
                           {"onset_stderr", r.onset_std_error},
                           {"peak_stderr", r.peak_std_error}});
    }
    return out;
}

json report_json(const NmReport& report) {
    json out{{"revivals", revivals_json(report.revivals)},
             {"revival_count", report.revivals.size()},
             {"measure", report.measure},
             {"measure_stderr", report.measure_std_error},
             {"delta", report.delta}};
    if (report.optimal_pair) out["optimal_pair"] = pair_json(*report.optimal_pair);
    return out;
}

std::string curve_csv(const DistanceCurve& curve) {
    std::string out = "t,D,stderr\n";
    for (std::size_t j = 0; j < curve.distance.size(); ++j) {
        out += format_double(curve.grid.at(j)) + ',' + format_double(curve.distance[j]) + ',' +
               format_double(curve.std_error[j]) + '\n';
    }
    return out;
}

std::string means_csv(const MeanBlochCurves& means) {
    std::string out = "t,x_plus,y_plus,z_plus,x_minus,y_minus,z_minus\n";
    for (std::size_t j = 0; j < means.plus.size(); ++j) {
        const auto& p = means.plus[j];
        const auto& m = means.minus[j];
        out += format_double(means.grid.at(j)) + ',' + format_double(p.x()) + ',' + format_double(p.y()) + ',' +
               format_double(p.z()) + ',' + format_double(m.x()) + ',' + format_double(m.y()) + ',' +
               format_double(m.z()) + '\n';
    }
    return out;
}

// Single realizations of the `plus` state, using the same streams as the ensemble.
std::string trajectories_csv(const ExperimentConfig& config, const StatePair& pair, std::size_t count) {
    std::string out = "trajectory,t,x,y,z\n";
    const TimeGrid grid = config.run.grid();
    for (std::size_t n = 0; n < count; ++n) {
        Rng rng = Rng::for_stream(config.run.seed, n);
        const JumpTimes jumps = draw_jump_times(config.model.wtds, grid.horizon(), config.run.max_jumps, rng);
        const TrajectoryCurve curve = evolve(pair.plus, jumps, config.model.generator, config.model.jump, grid);
        for (std::size_t j = 0; j < curve.states.size(); ++j) {
            const auto& s = curve.states[j];
            out += std::to_string(n) + ',' + format_double(grid.at(j)) + ',' + format_double(s.x()) + ',' +
                   format_double(s.y()) + ',' + format_double(s.z()) + '\n';
        }
    }
    return out;
}

StatePair resolve_pair(const ExperimentConfig& config, const RunSettings& run) {
    if (config.pair) return *config.pair;
    return *optimize_pair(config.model, run, config.optimize).optimal_pair;
}

// Runs one simulate pass and returns its summary.
json simulate_one(Output& out, const ExperimentConfig& config, const CommandOptions& options,
                  const std::string& tag) {
    const RunSettings run = run_settings(config, options);
    const StatePair pair = resolve_pair(config, run);
    const EnsembleResult result = run_ensemble(pair, config.model, run);
    const NmReport report = analyze_curve(result.curve, config.delta);

    out.write(tag + "_curve.csv", out.csv_banner() + curve_csv(result.curve));
    out.write(tag + "_means.csv", out.csv_banner() + means_csv(result.means));
    if (config.dump_trajectories > 0) {
        out.write(tag + "_trajectories.csv", out.csv_banner() + trajectories_csv(config, pair, config.dump_trajectories));
    }
    json body = out.metadata();
    body["pair"] = pair_json(pair);
    body["channel"] = config.model.jump.label();
    body["truncated_trajectories"] = result.truncated;
    body["report"] = report_json(report);
    out.write_json(tag + "_report.json", body);
    return json{{"measure", report.measure},
                {"measure_stderr", report.measure_std_error},
                {"revival_count", report.revivals.size()}};
}

std::string value_tag(const std::string& param, double value) { return "_" + param + "=" + format_double(value); }

}  // namespace

std::vector<double> zero_crossings(const TimeGrid& grid, const std::vector<double>& q) {
    std::vector<double> out;
    for (std::size_t j = 1; j < q.size(); ++j) {
        if ((q[j - 1] > 0.0 && q[j] <= 0.0) || (q[j - 1] < 0.0 && q[j] >= 0.0)) {
            const double t0 = grid.at(j - 1);
            const double t1 = grid.at(j);
            out.push_back(t0 + (t1 - t0) * q[j - 1] / (q[j - 1] - q[j]));
        }
    }
    return out;
}

std::optional<std::vector<double>> closed_form_q(const WtdSequence& seq, const TimeGrid& grid) {
    const WtdSpec& f = seq.stationary;
    std::function<double(double)> q;
    if (seq.k() == 0 && f.shape() == 1) {
        q = [&](double t) { return q_markov(f.mu, t); };
    } else if (seq.k() == 0 && f.shape() == 2) {
        q = [&](double t) { return std::exp(-f.mu * t) * (std::sin(f.mu * t) + std::cos(f.mu * t)); };
    } else if (seq.k() == 1 && f.shape() == 1 && seq.modified[0].shape() == 1) {
        q = [&](double t) { return q_exp_2wtd(f.mu, seq.modified[0].mu, t); };
    } else if (seq.k() == 1 && f.shape() == 2 && seq.modified[0].shape() == 2) {
        q = [&](double t) { return q_erlang_modified_22(f.mu, seq.modified[0].mu, t); };
    } else {
        return std::nullopt;
    }
    std::vector<double> values(grid.size());
    for (std::size_t j = 0; j < values.size(); ++j) values[j] = q(grid.at(j));
    return values;
}

WrittenFiles cmd_simulate(const ExperimentConfig& config, const CommandOptions& options) {
    Output out{config, options, {}};
    if (!config.variants) {
        simulate_one(out, config, options, "");
        return out.files;
    }
    json summary = out.metadata();
    summary["param"] = config.variants->param;
    summary["variants"] = json::array();
    for (double value : config.variants->values) {
        const ExperimentConfig variant = with_parameter(config, config.variants->param, value);
        json entry = simulate_one(out, variant, options, value_tag(config.variants->param, value));
        entry["value"] = value;
        summary["variants"].push_back(entry);
    }
    out.write_json("_variants.json", summary);
    return out.files;
}

WrittenFiles cmd_sweep(const ExperimentConfig& config, const CommandOptions& options) {
    if (config.axes.empty()) throw ConfigError("sweep needs a \"sweep\" section with axes");
    Output out{config, options, {}};
    const SweepAxis& first = config.axes[0];
    const bool two_axes = config.axes.size() == 2;
    std::string header = out.csv_banner() + "# param1=" + first.param;
    if (two_axes) header += " param2=" + config.axes[1].param;
    header += '\n';

    json summary = out.metadata();
    summary["param1"] = first.param;
    if (two_axes) summary["param2"] = config.axes[1].param;

    if (two_axes && config.axes[1].param == "t") {
        // Sign map of q over (parameter, time).
        std::string csv = header + "param1,param2,q,sign\n";
        const std::vector<double>& times = config.axes[1].values;
        json rows = json::array();
        for (double p1 : first.values) {
            const ExperimentConfig cell = with_parameter(config, first.param, p1);
            if (!is_pure_x_jump(cell.model)) throw ConfigError("a time axis needs a pure x-jump model");
            const std::vector<double> q = q_phase_type(cell.model.wtds, std::span<const double>(times));
            for (std::size_t j = 0; j < times.size(); ++j) {
                const int sign = (q[j] > 0.0) - (q[j] < 0.0);
                csv += format_double(p1) + ',' + format_double(times[j]) + ',' + format_double(q[j]) + ',' +
                       std::to_string(sign) + '\n';
            }
            rows.push_back(json{{"param1", p1}, {"sign_changes", count_sign_changes(q)}});
        }
        summary["rows"] = rows;
        out.write("_heatmap.csv", csv);
        out.write_json("_sweep.json", summary);
        return out.files;
    }

    const std::vector<double> axis2 = two_axes ? config.axes[1].values : std::vector<double>{0.0};
    auto model_at = [&](double p1, double p2) {
        ExperimentConfig cell = with_parameter(config, first.param, p1);
        if (two_axes) cell = with_parameter(cell, config.axes[1].param, p2);
        return cell.model;
    };
    const RunSettings run = run_settings(config, options);
    const StatePair pair = config.pair.value_or(StatePair::antipodal(Eigen::Vector3d::UnitY()));
    const auto cells = count_revivals_sweep(first.values, axis2, model_at, pair, run, config.sweep_method, config.delta);

    std::string csv = header + "param1,param2,revival_count,measure\n";
    json rows = json::array();
    for (const auto& c : cells) {
        csv += format_double(c.param1) + ',' + (two_axes ? format_double(c.param2) : std::string()) + ',' +
               std::to_string(c.revival_count) + ',' + format_double(c.measure) + '\n';
        rows.push_back(json{{"param1", c.param1},
                            {"revival_count", c.revival_count},
                            {"measure", c.measure},
                            {"analytic", c.analytic}});
        if (two_axes) rows.back()["param2"] = c.param2;
    }
    summary["cells"] = rows;
    out.write("_heatmap.csv", csv);
    out.write_json("_sweep.json", summary);
    return out.files;
}

WrittenFiles cmd_optimize(const ExperimentConfig& config, const CommandOptions& options) {
    Output out{config, options, {}};
    const RunSettings run = run_settings(config, options);
    const NmReport report = optimize_pair(config.model, run, config.optimize);

    std::string csv = out.csv_banner() + "x,y,z,theta,phi,measure,stderr,revival_count,refined\n";
    for (const auto& s : report.optimizer_trace) {
        const Eigen::Vector3d& d = s.direction;
        const double theta = std::acos(std::clamp(d.z(), -1.0, 1.0));
        const double phi = std::atan2(d.y(), d.x());
        csv += format_double(d.x()) + ',' + format_double(d.y()) + ',' + format_double(d.z()) + ',' +
               format_double(theta) + ',' + format_double(phi) + ',' + format_double(s.measure) + ',' +
               format_double(s.std_error) + ',' + std::to_string(s.revival_count) + ',' + (s.refined ? "1" : "0") +
               '\n';
    }
    out.write("_optimizer.csv", csv);

    json body = out.metadata();
    body["report"] = report_json(report);
    body["directions_evaluated"] = report.optimizer_trace.size();
    out.write_json("_optimize.json", body);
    return out.files;
}

WrittenFiles cmd_analytic(const ExperimentConfig& config, const CommandOptions& options) {
    if (!is_pure_x_jump(config.model)) {
        throw ConfigError("analytic oracles apply to pure x-jump models (channel x, no generator)");
    }
    Output out{config, options, {}};
    const TimeGrid grid = config.run.grid();
    const ParityCurve parity = parity_series(config.model.wtds, grid, config.series_tol);

    std::string csv = out.csv_banner() + "t,p_even,p_odd,q\n";
    for (std::size_t j = 0; j < grid.size(); ++j) {
        csv += format_double(grid.at(j)) + ',' + format_double(parity.p_even[j]) + ',' +
               format_double(parity.p_odd[j]) + ',' + format_double(parity.q[j]) + '\n';
    }
    out.write("_parity.csv", csv);

    json body = out.metadata();
    body["series_tol"] = config.series_tol;
    body["zero_crossings"] = zero_crossings(grid, parity.q);
    body["sign_changes"] = count_sign_changes(parity.q);

    auto max_abs_diff = [](const std::vector<double>& a, const std::vector<double>& b) {
        double m = 0.0;
        for (std::size_t j = 0; j < a.size(); ++j) m = std::max(m, std::abs(a[j] - b[j]));
        return m;
    };
    if (const auto closed = closed_form_q(config.model.wtds, grid)) {
        body["closed_form_max_residual"] = max_abs_diff(*closed, parity.q);
    }
    body["phase_type_max_residual"] = max_abs_diff(q_phase_type(config.model.wtds, grid), parity.q);

    const StatePair pair = config.pair.value_or(StatePair::antipodal(Eigen::Vector3d::UnitY()));
    const NmReport oracle_report =
        analyze_curve(pure_jump_distance_curve(pair, grid, parity.q), kAnalyticDelta);
    body["oracle_revivals"] = revivals_json(oracle_report.revivals);

    if (config.compare_mc) {
        const DistanceCurve mc = estimate_distance_curve(pair, config.model, run_settings(config, options));
        const DistanceCurve oracle = pure_jump_distance_curve(pair, grid, parity.q);
        double max_residual = 0.0;
        double max_ratio = 0.0;
        for (std::size_t j = 1; j < grid.size(); ++j) {
            const double residual = std::abs(mc.distance[j] - oracle.distance[j]);
            max_residual = std::max(max_residual, residual);
            if (mc.std_error[j] > 0.0) max_ratio = std::max(max_ratio, residual / mc.std_error[j]);
        }
        body["mc"] = json{{"max_residual", max_residual},
                          {"max_residual_over_stderr", max_ratio},
                          {"within_3_stderr", max_ratio <= 3.0},
                          {"report", report_json(analyze_curve(mc, config.delta))}};
        out.write("_mc_curve.csv", out.csv_banner() + curve_csv(mc));
    }
    out.write_json("_analytic.json", body);
    return out.files;
}

int run_cli(int argc, char** argv) {
    CLI::App app{"Quantum renewal process simulator: trace-distance Monte Carlo and non-Markovianity analysis"};
    app.require_subcommand(1);

    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::size_t workers = 1;
    std::string out_dir = ".";
    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "experiment JSON")->required()->check(CLI::ExistingFile);
        sub->add_option("--seed", seed, "override the master seed");
        sub->add_option("--workers", workers, "worker threads (results do not depend on it)")
            ->check(CLI::PositiveNumber);
        sub->add_option("--out-dir", out_dir, "output directory");
    };
    auto* simulate = app.add_subcommand("simulate", "trace-distance curve and revival report for one pair");
    auto* sweep = app.add_subcommand("sweep", "revival-count heatmap over one or two parameters");
    auto* optimize = app.add_subcommand("optimize", "maximize the measure over antipodal pure pairs");
    auto* analytic = app.add_subcommand("analytic", "pure-jump parity oracles and Monte Carlo residuals");
    for (auto* sub : {simulate, sweep, optimize, analytic}) add_common(sub);

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        ExperimentConfig config = load_config(config_path);
        if (seed) {
            json doc = config.document;
            doc["seed"] = *seed;
            config = parse_config(doc);
        }
        const CommandOptions options{out_dir, workers};
        WrittenFiles files;
        if (*simulate) files = cmd_simulate(config, options);
        if (*sweep) files = cmd_sweep(config, options);
        if (*optimize) files = cmd_optimize(config, options);
        if (*analytic) files = cmd_analytic(config, options);
        for (const auto& f : files) std::cout << f.string() << '\n';
        return 0;
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const ParameterError& e) {
        std::cerr << "invalid parameter: " << e.what() << '\n';
        return 2;
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 2;
    } catch (const NumericalError& e) {
        std::cerr << "numerical quality check failed: " << e.what() << '\n';
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
}

}  // namespace qrenew
