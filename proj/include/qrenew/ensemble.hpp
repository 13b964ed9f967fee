#pragma once

#include "qrenew/bloch.hpp"
#include "qrenew/dephasing.hpp"
#include "qrenew/grid.hpp"
#include "qrenew/trajectory.hpp"
#include "qrenew/wtd.hpp"

#include <cstddef>
#include <cstdint>
#include <vector>

namespace qrenew {

inline constexpr std::size_t kDefaultTrajectories = 100000;
inline constexpr double kMaxTruncatedFraction = 1e-6;

/// Everything that defines the quantum renewal process itself.
struct ProcessModel {
    DephasingGenerator generator;
    AffineChannel jump = AffineChannel::identity();
    WtdSequence wtds;
};

/// Monte Carlo controls. Trajectory n always uses Rng::for_stream(seed, n) and trajectories
/// are reduced in fixed blocks in index order, so `workers` never changes the result.
struct RunSettings {
    double horizon = 1.0;
    double dt_out = 1e-3;
    std::size_t trajectories = kDefaultTrajectories;
    std::uint64_t seed = 1;
    std::size_t workers = 1;
    std::size_t max_jumps = kDefaultMaxJumps;
    double max_truncated_fraction = kMaxTruncatedFraction;

    TimeGrid grid() const { return TimeGrid::with_step(horizon, dt_out); }
};

struct DistanceCurve {
    TimeGrid grid;
    std::vector<double> distance;
    std::vector<double> std_error;
    std::size_t trajectories = 0;
    std::uint64_t seed = 0;

    double max_std_error() const;
};

struct MeanBlochCurves {
    TimeGrid grid;
    std::vector<BlochVector> plus;
    std::vector<BlochVector> minus;
};

struct EnsembleResult {
    DistanceCurve curve;
    MeanBlochCurves means;
    std::size_t truncated = 0;
};

/// One realization of jump times per trajectory, shared by both initial states. Coordinate
/// differences are averaged over trajectories first; the distance is half the norm of that mean.
EnsembleResult run_ensemble(const StatePair& pair, const ProcessModel& model, const RunSettings& run);

DistanceCurve estimate_distance_curve(const StatePair& pair, const ProcessModel& model, const RunSettings& run);
MeanBlochCurves mean_bloch_curves(const StatePair& pair, const ProcessModel& model, const RunSettings& run);

/// D = |m|/2 from the mean coordinate difference m, with delta-method standard error from the
/// sample covariance of the differences over n trajectories. The error is floored at the
/// largest single-coordinate error, which also covers the degenerate m = 0 case.
struct PointEstimate {
    double distance;
    double std_error;
};
PointEstimate estimate_point(const Eigen::Vector3d& mean_delta, const Eigen::Matrix3d& cov_delta, std::size_t n);

/// First and second moments of the trajectory-wise linear propagator L_n(t). Because every map
/// in the process is affine, the difference of two evolved states is L_n(t) (r1 - r2): the
/// translations cancel. One pass therefore yields the distance curve of every antipodal pair.
class PropagatorMoments {
public:
    PropagatorMoments(TimeGrid grid, std::size_t trajectories, std::uint64_t seed);

    const TimeGrid& grid() const { return grid_; }
    std::size_t trajectories() const { return trajectories_; }

    /// Curve for the pair (+n, -n) with n = direction / |direction|.
    DistanceCurve distance_curve(const Eigen::Vector3d& direction) const;

    // Accumulation interface used by run_propagator_moments.
    static constexpr int kEntries = 9 + 45;
    std::vector<double>& sums() { return sums_; }
    const std::vector<double>& sums() const { return sums_; }

private:
    TimeGrid grid_;
    std::size_t trajectories_;
    std::uint64_t seed_;
    std::vector<double> sums_;  // per grid point: sum of vec(L) (9), sum of upper-triangular vec(L)vec(L)^T (45)
};

PropagatorMoments run_propagator_moments(const ProcessModel& model, const RunSettings& run);

}  // namespace qrenew
