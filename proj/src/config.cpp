#include "qrenew/config.hpp"

#include "qrenew/errors.hpp"
#include "qrenew/io.hpp"

#include <cmath>
#include <fstream>

namespace qrenew {

using nlohmann::json;

namespace {

double number(const json& j, std::string_view key) {
    const auto it = j.find(key);
    if (it == j.end()) throw ConfigError("missing field \"" + std::string(key) + "\"");
    if (!it->is_number()) throw ConfigError("field \"" + std::string(key) + "\" must be a number");
    return it->get<double>();
}

double number_or(const json& j, std::string_view key, double fallback) {
    return j.contains(key) ? number(j, key) : fallback;
}

Eigen::Vector3d vector3(const json& j, std::string_view what) {
    if (!j.is_array() || j.size() != 3) throw ConfigError(std::string(what) + " must be an array of 3 numbers");
    Eigen::Vector3d v;
    for (int i = 0; i < 3; ++i) {
        if (!j[i].is_number()) throw ConfigError(std::string(what) + " entries must be numbers");
        v[i] = j[i].get<double>();
    }
    return v;
}

std::array<double, 3> triple(const json& j, std::string_view what) {
    const Eigen::Vector3d v = vector3(j, what);
    return {v[0], v[1], v[2]};
}

std::vector<double> axis_values(const json& axis) {
    if (axis.contains("values")) {
        if (!axis["values"].is_array() || axis["values"].empty()) throw ConfigError("axis values must be a non-empty array");
        return axis["values"].get<std::vector<double>>();
    }
    const double lo = number(axis, "min");
    const double hi = number(axis, "max");
    const double steps = number(axis, "steps");
    if (steps < 1 || steps != std::floor(steps)) throw ConfigError("axis steps must be a positive integer");
    std::vector<double> values;
    const auto n = static_cast<std::size_t>(steps);
    if (n == 1) return {lo};
    for (std::size_t i = 0; i < n; ++i) values.push_back(lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1));
    return values;
}

SweepAxis parse_axis(const json& axis) {
    if (!axis.is_object() || !axis.contains("param") || !axis["param"].is_string()) {
        throw ConfigError("sweep axis needs a string \"param\"");
    }
    return SweepAxis{axis["param"].get<std::string>(), axis_values(axis)};
}

}  // namespace

AffineChannel parse_channel(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
        throw ConfigError("channel needs a string \"kind\"");
    }
    const auto kind = spec["kind"].get<std::string>();
    auto gamma = [&] { return number(spec, "gamma"); };
    if (kind == "id" || kind == "identity") return AffineChannel::identity();
    if (kind == "x") return pauli_x();
    if (kind == "ad") return amplitude_damping(gamma());
    if (kind == "x-ad") return compose(pauli_x(), amplitude_damping(gamma()));
    if (kind == "ad-x") return compose(amplitude_damping(gamma()), pauli_x());
    if (kind == "custom") {
        if (!spec.contains("matrix")) throw ConfigError("custom channel needs \"matrix\"");
        const json& m = spec["matrix"];
        Eigen::Matrix3d matrix;
        if (m.is_array() && m.size() == 9) {
            for (int i = 0; i < 9; ++i) matrix(i / 3, i % 3) = m[i].get<double>();
        } else if (m.is_array() && m.size() == 3) {
            for (int i = 0; i < 3; ++i) matrix.row(i) = vector3(m[i], "matrix row").transpose();
        } else {
            throw ConfigError("custom channel matrix must be 3x3 (nested or flat row-major)");
        }
        const Eigen::Vector3d c =
            spec.contains("translation") ? vector3(spec["translation"], "translation") : Eigen::Vector3d::Zero();
        return custom_channel(matrix, c);
    }
    throw ConfigError("unknown channel kind \"" + kind + "\" (expected ad, x, x-ad, ad-x, custom)");
}

DephasingGenerator parse_generator(const json& spec) {
    if (spec.is_null()) return {};
    if (!spec.is_object()) throw ConfigError("generator must be an object");
    const bool has_l = spec.contains("lambdas");
    const bool has_g = spec.contains("gammas");
    if (has_l && has_g) warn("generator gives both gammas and lambdas; using lambdas");
    if (has_l) return DephasingGenerator::from_lambdas(triple(spec["lambdas"], "lambdas"));
    if (has_g) return DephasingGenerator::from_gammas(triple(spec["gammas"], "gammas"));
    return {};
}

WtdSpec parse_wtd(const json& spec) {
    if (!spec.is_object() || !spec.contains("kind") || !spec["kind"].is_string()) {
        throw ConfigError("WTD needs a string \"kind\"");
    }
    const auto kind = spec["kind"].get<std::string>();
    if (kind == "exp" || kind == "exponential") return WtdSpec::exponential(number(spec, "mu"));
    if (kind == "erlang") {
        const double r = number(spec, "r");
        if (r != std::floor(r)) throw ConfigError("Erlang shape r must be an integer");
        return WtdSpec::erlang(static_cast<int>(r), number(spec, "mu"));
    }
    throw ConfigError("unknown WTD kind \"" + kind + "\" (expected exp or erlang)");
}

WtdSequence parse_wtd_sequence(const json& spec) {
    if (!spec.is_object() || !spec.contains("stationary")) throw ConfigError("wtds needs a \"stationary\" entry");
    WtdSequence seq;
    seq.stationary = parse_wtd(spec["stationary"]);
    if (spec.contains("modified")) {
        if (!spec["modified"].is_array()) throw ConfigError("wtds.modified must be an array");
        for (const auto& w : spec["modified"]) seq.modified.push_back(parse_wtd(w));
    }
    return seq;
}

ExperimentConfig parse_config(const json& document) {
    if (!document.is_object()) throw ConfigError("config must be a JSON object");
    ExperimentConfig c;
    c.document = document;
    if (document.contains("name")) c.name = document["name"].get<std::string>();

    c.model.jump = parse_channel(document.value("channel", json{{"kind", "x"}}));
    c.model.generator = parse_generator(document.value("generator", json()));
    if (!document.contains("wtds")) throw ConfigError("config needs \"wtds\"");
    c.model.wtds = parse_wtd_sequence(document["wtds"]);

    const json pair = document.value("pair", json{{"direction", {0, 1, 0}}});
    if (pair.is_string()) {
        if (pair.get<std::string>() != "optimize") throw ConfigError("pair must be \"optimize\" or an object");
    } else if (pair.contains("direction")) {
        c.pair = StatePair::antipodal(vector3(pair["direction"], "pair.direction"));
    } else if (pair.contains("plus")) {
        const BlochVector plus(vector3(pair["plus"], "pair.plus"));
        const BlochVector minus = pair.contains("minus") ? BlochVector(vector3(pair["minus"], "pair.minus"))
                                                         : BlochVector(-plus.vec());
        if (!plus.is_physical() || !minus.is_physical()) throw ConfigError("pair states must lie in the Bloch ball");
        c.pair = StatePair{plus, minus};
    } else {
        throw ConfigError("pair needs \"direction\" or \"plus\"");
    }

    c.run.horizon = number(document, "T");
    if (!(c.run.horizon > 0.0)) throw ConfigError("T must be positive");
    c.run.dt_out = number_or(document, "dt_out", c.run.horizon / 1000.0);
    const double n = number_or(document, "N", static_cast<double>(kDefaultTrajectories));
    if (n < 1 || n != std::floor(n)) throw ConfigError("N must be a positive integer");
    c.run.trajectories = static_cast<std::size_t>(n);
    if (document.contains("seed")) {
        const json& seed = document["seed"];
        if (!seed.is_number_unsigned() && !(seed.is_number_integer() && seed.get<std::int64_t>() >= 0)) {
            throw ConfigError("seed must be a nonnegative integer");
        }
        c.run.seed = document["seed"].get<std::uint64_t>();
    }
    c.run.max_jumps = static_cast<std::size_t>(number_or(document, "max_jumps", static_cast<double>(kDefaultMaxJumps)));
    c.run.grid();  // validates dt_out against T

    if (document.contains("delta") && !document["delta"].is_null()) {
        c.delta = number(document, "delta");
        if (!(*c.delta > 0.0)) throw ConfigError("delta must be positive");
    }
    if (document.contains("optimize")) {
        const json& o = document["optimize"];
        c.optimize.subdivisions = static_cast<int>(number_or(o, "subdivisions", c.optimize.subdivisions));
        c.optimize.refine_factor = static_cast<int>(number_or(o, "refine_factor", c.optimize.refine_factor));
    }
    c.optimize.delta = c.delta;
    if (document.contains("sweep")) {
        const json& s = document["sweep"];
        if (!s.contains("axes") || !s["axes"].is_array() || s["axes"].empty() || s["axes"].size() > 2) {
            throw ConfigError("sweep.axes must list one or two axes");
        }
        for (const auto& axis : s["axes"]) c.axes.push_back(parse_axis(axis));
        const std::string method = s.value("method", "auto");
        if (method == "auto") {
            c.sweep_method = SweepMethod::Auto;
        } else if (method == "mc") {
            c.sweep_method = SweepMethod::MonteCarlo;
        } else if (method == "analytic") {
            c.sweep_method = SweepMethod::Analytic;
        } else {
            throw ConfigError("sweep.method must be auto, mc or analytic");
        }
    }
    if (document.contains("variants")) c.variants = parse_axis(document["variants"]);
    c.series_tol = number_or(document, "series_tol", kDefaultSeriesTolerance);
    c.dump_trajectories = static_cast<std::size_t>(number_or(document, "dump_trajectories", 0.0));
    c.compare_mc = document.value("compare_mc", true);
    return c;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config file " + path.string());
    json document;
    try {
        document = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
    }
    return parse_config(document);
}

std::string ExperimentConfig::hash() const { return fnv1a_hex(document.dump()); }

ExperimentConfig with_parameter(const ExperimentConfig& config, std::string_view param, double value) {
    json doc = config.document;
    const std::string p(param);
    auto wtd_slot = [&](std::size_t index) -> json& {
        json& mods = doc["wtds"]["modified"];
        if (!mods.is_array() || index >= mods.size()) {
            throw ConfigError("parameter " + p + " refers to a modified WTD that the config does not define");
        }
        return mods[index];
    };
    if (p == "mu") {
        doc["wtds"]["stationary"]["mu"] = value;
    } else if (p == "r") {
        doc["wtds"]["stationary"]["r"] = value;
    } else if (p.size() > 2 && p.starts_with("mu") && std::isdigit(static_cast<unsigned char>(p[2]))) {
        wtd_slot(std::stoul(p.substr(2)) - 1)["mu"] = value;
    } else if (p.size() > 1 && p[0] == 'r' && std::isdigit(static_cast<unsigned char>(p[1]))) {
        wtd_slot(std::stoul(p.substr(1)) - 1)["r"] = value;
    } else if (p == "gamma") {
        doc["channel"]["gamma"] = value;
    } else if (p.size() == 7 && p.starts_with("lambda") && p[6] >= '1' && p[6] <= '3') {
        json& gen = doc["generator"];
        if (!gen.contains("lambdas")) throw ConfigError("sweeping " + p + " needs generator.lambdas in the config");
        gen["lambdas"][p[6] - '1'] = value;
    } else if (p == "T") {
        doc["T"] = value;
    } else if (p == "N") {
        doc["N"] = value;
    } else {
        throw ConfigError("unknown sweep parameter \"" + p + "\"");
    }
    return parse_config(doc);
}

}  // namespace qrenew
