#pragma once

#include "qrenew/bloch.hpp"
#include "qrenew/ensemble.hpp"

#include <functional>
#include <optional>
#include <vector>

namespace qrenew {

/// A stretch on which the trace distance grows: from a local minimum (onset) to the following
/// local maximum (peak).
struct Revival {
    double t_onset = 0.0;
    double t_peak = 0.0;
    double height = 0.0;  // D(t_peak) - D(t_onset)
    double onset_value = 0.0;
    std::size_t onset_index = 0;
    std::size_t peak_index = 0;
    double onset_std_error = 0.0;
    double peak_std_error = 0.0;
};

/// Scans for minimum -> maximum rises larger than delta. A candidate peak only closes once
/// the curve has fallen delta below it (or the curve ends), so MC noise smaller than delta
/// neither opens nor splits a revival.
std::vector<Revival> detect_revivals(const DistanceCurve& curve, double delta);

/// Sum of revival heights: the integral of the positive part of dD/dt for the filtered curve.
double blp_measure(const DistanceCurve& curve, double delta);

/// max(3 * max std_error, 1e-3).
double default_delta(const DistanceCurve& curve);

struct MeasureEstimate {
    double value = 0.0;
    double std_error = 0.0;  // onset and peak errors of every revival added in quadrature
    std::vector<Revival> revivals;
};
MeasureEstimate estimate_measure(const DistanceCurve& curve, double delta);

struct DirectionScore {
    Eigen::Vector3d direction;
    double measure = 0.0;
    double std_error = 0.0;
    int revival_count = 0;
    bool refined = false;  // produced by the local refinement pass
};

struct NmReport {
    std::vector<Revival> revivals;
    double measure = 0.0;
    double measure_std_error = 0.0;
    double delta = 0.0;
    std::optional<StatePair> optimal_pair;
    std::vector<DirectionScore> optimizer_trace;
};

/// Revivals and measure of a single curve.
NmReport analyze_curve(const DistanceCurve& curve, std::optional<double> delta = std::nullopt);

/// Vertices of an icosahedron subdivided `subdivisions` times (2 -> 162 directions).
std::vector<Eigen::Vector3d> icosphere_directions(int subdivisions);

/// Keeps one direction out of each antipodal pair.
std::vector<Eigen::Vector3d> hemisphere(const std::vector<Eigen::Vector3d>& directions);

struct OptimizeSettings {
    int subdivisions = 2;
    int refine_factor = 5;
    std::optional<double> delta;  // default_delta per direction when unset
};

/// Maximizes the measure over antipodal pure pairs: a coarse icosphere pass followed by a
/// local grid, refine_factor times finer than the coarse spacing, around the best direction.
/// All directions share the same trajectories (see PropagatorMoments).
NmReport optimize_pair(const ProcessModel& model, const RunSettings& run, const OptimizeSettings& settings = {});

/// Score of a single direction from precomputed moments.
DirectionScore score_direction(const PropagatorMoments& moments, const Eigen::Vector3d& direction,
                               std::optional<double> delta);

// Pure-jump oracle: with no dephasing and jump = sigma_x conjugation,
// Delta(t) = (Delta_x, q Delta_y, q Delta_z).
bool is_pure_x_jump(const ProcessModel& model);
DistanceCurve pure_jump_distance_curve(const StatePair& pair, const TimeGrid& grid, const std::vector<double>& q);

enum class SweepMethod { Auto, MonteCarlo, Analytic };

struct SweepCell {
    double param1 = 0.0;
    double param2 = 0.0;
    int revival_count = 0;
    double measure = 0.0;
    bool analytic = false;
};

/// Noise-free detection threshold used for analytic curves.
inline constexpr double kAnalyticDelta = 1e-6;

/// Revival count and measure per grid cell. Analytic cells (Auto on pure x-jump models, or
/// Analytic) use the exact phase-type q(t); the rest run the Monte Carlo ensemble.
std::vector<SweepCell> count_revivals_sweep(const std::vector<double>& axis1, const std::vector<double>& axis2,
                                            const std::function<ProcessModel(double, double)>& model_at,
                                            const StatePair& pair, const RunSettings& run, SweepMethod method,
                                            std::optional<double> delta = std::nullopt);

}  // namespace qrenew
