#pragma once

#include "qrenew/config.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace qrenew {

struct CommandOptions {
    std::filesystem::path out_dir = ".";
    std::size_t workers = 1;
};

/// Files written by a command, in write order.
using WrittenFiles = std::vector<std::filesystem::path>;

/// Distance curve CSV (t,D,stderr), averaged Bloch curves, and a report JSON with revivals
/// and the measure. With `variants`, one set per value of the varied parameter.
WrittenFiles cmd_simulate(const ExperimentConfig& config, const CommandOptions& options);

/// Heatmap CSV (param1,param2,revival_count,measure). When the second axis is `t`, writes the
/// sign map of the analytic q instead (param1,param2,q,sign).
WrittenFiles cmd_sweep(const ExperimentConfig& config, const CommandOptions& options);

/// Optimizer trace CSV for landscape plots plus the report JSON of the best pair.
WrittenFiles cmd_optimize(const ExperimentConfig& config, const CommandOptions& options);

/// Parity curve CSV (t,p_even,p_odd,q), zero crossings, closed-form and phase-type residuals,
/// and (unless compare_mc is false) the Monte Carlo bridge residuals.
WrittenFiles cmd_analytic(const ExperimentConfig& config, const CommandOptions& options);

/// Entry point of the `qrenew` tool. Returns the process exit code:
/// 0 success, 2 validation error, 3 numerical-quality failure.
int run_cli(int argc, char** argv);

/// Zero crossings of q, linearly interpolated between grid points.
std::vector<double> zero_crossings(const TimeGrid& grid, const std::vector<double>& q);

/// Closed-form q for the sequences that have one: unmodified exponential, unmodified
/// Erlang(2), exponential -> exponential, Erlang(2) -> Erlang(2).
std::optional<std::vector<double>> closed_form_q(const WtdSequence& seq, const TimeGrid& grid);

}  // namespace qrenew
