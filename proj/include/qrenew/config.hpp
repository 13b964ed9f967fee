#pragma once

#include "qrenew/analytic.hpp"
#include "qrenew/ensemble.hpp"
#include "qrenew/nonmarkov.hpp"

#include <json.hpp>

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace qrenew {

struct SweepAxis {
    std::string param;
    std::vector<double> values;
};

/// Parsed experiment document. `document` keeps the normalized JSON so sweeps can
/// re-derive a model after overriding one parameter.
struct ExperimentConfig {
    std::string name = "run";
    nlohmann::json document;
    ProcessModel model;
    std::optional<StatePair> pair;  // empty: optimize over antipodal pure pairs
    RunSettings run;
    std::optional<double> delta;
    OptimizeSettings optimize;
    std::vector<SweepAxis> axes;
    SweepMethod sweep_method = SweepMethod::Auto;
    std::optional<SweepAxis> variants;
    double series_tol = kDefaultSeriesTolerance;
    std::size_t dump_trajectories = 0;
    bool compare_mc = true;

    /// FNV-1a of the canonical JSON, after command-line overrides; `workers` is excluded.
    std::string hash() const;
};

AffineChannel parse_channel(const nlohmann::json& spec);
DephasingGenerator parse_generator(const nlohmann::json& spec);
WtdSpec parse_wtd(const nlohmann::json& spec);
WtdSequence parse_wtd_sequence(const nlohmann::json& spec);

ExperimentConfig parse_config(const nlohmann::json& document);
ExperimentConfig load_config(const std::filesystem::path& path);

/// Writes `value` into the document slot named by `param` and re-parses. Recognized names:
/// mu, r (stationary WTD), muK, rK (K-th modified WTD), gamma (channel), lambda1..3, T, N.
ExperimentConfig with_parameter(const ExperimentConfig& config, std::string_view param, double value);

}  // namespace qrenew
