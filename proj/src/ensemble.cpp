#include "qrenew/ensemble.hpp"

#include "parallel.hpp"
#include "qrenew/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <string>

namespace qrenew {

namespace {

// Per grid point: sum r1 (3), sum r2 (3), sum delta (3), sum delta_a delta_b for a <= b (6).
constexpr int kPairEntries = 15;
constexpr std::array<std::array<int, 2>, 6> kPairProducts{{{0, 0}, {0, 1}, {0, 2}, {1, 1}, {1, 2}, {2, 2}}};

struct Block {
    std::vector<double> sums;
    std::size_t truncated = 0;
};

void check_inputs(const RunSettings& run) {
    if (run.trajectories < 1) throw ParameterError("trajectory count N must be >= 1");
}

void check_truncation(std::size_t truncated, std::size_t n, double max_fraction) {
    if (static_cast<double>(truncated) > max_fraction * static_cast<double>(n)) {
        throw NumericalError(std::to_string(truncated) + " of " + std::to_string(n) +
                             " trajectories hit max_jumps; raise max_jumps or shorten T");
    }
}

// Index of E[v_a v_b] (a <= b) in the packed upper triangle of a 9x9 symmetric matrix.
constexpr int packed(int a, int b) { return a * 9 - a * (a - 1) / 2 + (b - a); }

}  // namespace

double DistanceCurve::max_std_error() const {
    return std_error.empty() ? 0.0 : *std::max_element(std_error.begin(), std_error.end());
}

PointEstimate estimate_point(const Eigen::Vector3d& mean_delta, const Eigen::Matrix3d& cov_delta, std::size_t n) {
    const double norm = mean_delta.norm();
    const Eigen::Matrix3d cov_mean = cov_delta / static_cast<double>(n);
    double floor = 0.0;
    for (int i = 0; i < 3; ++i) floor = std::max(floor, 0.5 * std::sqrt(std::max(cov_mean(i, i), 0.0)));
    double delta_method = 0.0;
    if (norm > 0.0) {
        const Eigen::Vector3d gradient = mean_delta / (2.0 * norm);
        delta_method = std::sqrt(std::max(gradient.dot(cov_mean * gradient), 0.0));
    }
    return {0.5 * norm, std::max(delta_method, floor)};
}

EnsembleResult run_ensemble(const StatePair& pair, const ProcessModel& model, const RunSettings& run) {
    check_inputs(run);
    const TimeGrid grid = run.grid();
    const std::size_t points = grid.size();
    const std::size_t n = run.trajectories;

    Eigen::Matrix<double, 3, 2> initial;
    initial << pair.plus.vec(), pair.minus.vec();
    const Eigen::Matrix3d& jump_matrix = model.jump.matrix();
    const Eigen::Vector3d& jump_translation = model.jump.translation();

    auto make_block = [&](std::size_t b) {
        Block block;
        block.sums.assign(points * kPairEntries, 0.0);
        JumpTimes jumps;
        const std::size_t begin = b * detail::kBlockSize;
        const std::size_t end = std::min(n, begin + detail::kBlockSize);
        for (std::size_t traj = begin; traj < end; ++traj) {
            Rng rng = Rng::for_stream(run.seed, traj);
            draw_jump_times(model.wtds, grid.horizon(), run.max_jumps, rng, jumps);
            if (jumps.truncated) ++block.truncated;
            walk_realization<2>(initial, jumps.times, model.generator, jump_matrix, jump_translation, grid,
                                [&](std::size_t j, const Eigen::Matrix<double, 3, 2>& s) {
                                    double* acc = block.sums.data() + j * kPairEntries;
                                    const Eigen::Vector3d d = s.col(0) - s.col(1);
                                    for (int i = 0; i < 3; ++i) {
                                        acc[i] += s(i, 0);
                                        acc[3 + i] += s(i, 1);
                                        acc[6 + i] += d[i];
                                    }
                                    for (int p = 0; p < 6; ++p) {
                                        acc[9 + p] += d[kPairProducts[p][0]] * d[kPairProducts[p][1]];
                                    }
                                });
        }
        return block;
    };

    std::vector<double> total(points * kPairEntries, 0.0);
    std::size_t truncated = 0;
    detail::ordered_block_reduce<Block>(detail::block_count(n), run.workers, make_block, [&](const Block& block) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += block.sums[i];
        truncated += block.truncated;
    });
    check_truncation(truncated, n, run.max_truncated_fraction);

    EnsembleResult result{DistanceCurve{grid, {}, {}, n, run.seed}, MeanBlochCurves{grid, {}, {}}, truncated};
    auto& curve = result.curve;
    curve.distance.resize(points);
    curve.std_error.resize(points);
    result.means.plus.resize(points);
    result.means.minus.resize(points);

    const double inv_n = 1.0 / static_cast<double>(n);
    const double bessel = n > 1 ? static_cast<double>(n) / static_cast<double>(n - 1) : 0.0;
    for (std::size_t j = 0; j < points; ++j) {
        const double* acc = total.data() + j * kPairEntries;
        const Eigen::Vector3d mean_plus(acc[0] * inv_n, acc[1] * inv_n, acc[2] * inv_n);
        const Eigen::Vector3d mean_minus(acc[3] * inv_n, acc[4] * inv_n, acc[5] * inv_n);
        const Eigen::Vector3d mean_delta(acc[6] * inv_n, acc[7] * inv_n, acc[8] * inv_n);
        Eigen::Matrix3d cov;
        for (int p = 0; p < 6; ++p) {
            const int a = kPairProducts[p][0];
            const int c = kPairProducts[p][1];
            cov(a, c) = cov(c, a) = (acc[9 + p] * inv_n - mean_delta[a] * mean_delta[c]) * bessel;
        }
        const PointEstimate est = estimate_point(mean_delta, cov, n);
        curve.distance[j] = est.distance;
        curve.std_error[j] = est.std_error;
        result.means.plus[j] = BlochVector(mean_plus);
        result.means.minus[j] = BlochVector(mean_minus);
    }
    // Every realization starts from the same pair.
    curve.distance[0] = trace_distance(pair.plus, pair.minus);
    curve.std_error[0] = 0.0;
    result.means.plus[0] = pair.plus;
    result.means.minus[0] = pair.minus;
    return result;
}

DistanceCurve estimate_distance_curve(const StatePair& pair, const ProcessModel& model, const RunSettings& run) {
    return run_ensemble(pair, model, run).curve;
}

MeanBlochCurves mean_bloch_curves(const StatePair& pair, const ProcessModel& model, const RunSettings& run) {
    return run_ensemble(pair, model, run).means;
}

PropagatorMoments::PropagatorMoments(TimeGrid grid, std::size_t trajectories, std::uint64_t seed)
    : grid_(grid), trajectories_(trajectories), seed_(seed), sums_(grid.size() * kEntries, 0.0) {}

DistanceCurve PropagatorMoments::distance_curve(const Eigen::Vector3d& direction) const {
    const double len = direction.norm();
    if (!(len > 0.0)) throw ParameterError("pair direction must be nonzero");
    const Eigen::Vector3d u = direction / len;
    const std::size_t points = grid_.size();
    const std::size_t n = trajectories_;
    const double inv_n = 1.0 / static_cast<double>(n);
    const double bessel = n > 1 ? static_cast<double>(n) / static_cast<double>(n - 1) : 0.0;

    DistanceCurve curve{grid_, std::vector<double>(points), std::vector<double>(points), n, seed_};
    for (std::size_t j = 0; j < points; ++j) {
        const double* acc = sums_.data() + j * kEntries;
        Eigen::Matrix3d mean_l;
        for (int v = 0; v < 9; ++v) mean_l(v % 3, v / 3) = acc[v] * inv_n;
        const Eigen::Vector3d mean_delta = 2.0 * mean_l * u;
        Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
        for (int a = 0; a < 3; ++a) {
            for (int b = a; b < 3; ++b) {
                double s = 0.0;
                for (int c = 0; c < 3; ++c) {
                    for (int d = 0; d < 3; ++d) {
                        const int va = a + 3 * c;
                        const int vb = b + 3 * d;
                        const double second = acc[9 + packed(std::min(va, vb), std::max(va, vb))] * inv_n;
                        s += u[c] * u[d] * (second - mean_l(a, c) * mean_l(b, d));
                    }
                }
                cov(a, b) = cov(b, a) = 4.0 * s * bessel;
            }
        }
        const PointEstimate est = estimate_point(mean_delta, cov, n);
        curve.distance[j] = est.distance;
        curve.std_error[j] = est.std_error;
    }
    curve.distance[0] = 1.0;
    curve.std_error[0] = 0.0;
    return curve;
}

PropagatorMoments run_propagator_moments(const ProcessModel& model, const RunSettings& run) {
    check_inputs(run);
    const TimeGrid grid = run.grid();
    const std::size_t points = grid.size();
    const std::size_t n = run.trajectories;
    constexpr int kEntries = PropagatorMoments::kEntries;

    // Diagonal maps keep L_n(t) diagonal; only those entries and their products are nonzero.
    const bool diagonal = model.jump.is_diagonal();
    std::vector<int> active;
    if (diagonal) {
        active = {0, 4, 8};
    } else {
        for (int v = 0; v < 9; ++v) active.push_back(v);
    }
    const Eigen::Vector3d no_translation = Eigen::Vector3d::Zero();

    auto make_block = [&](std::size_t b) {
        Block block;
        block.sums.assign(points * kEntries, 0.0);
        JumpTimes jumps;
        const std::size_t begin = b * detail::kBlockSize;
        const std::size_t end = std::min(n, begin + detail::kBlockSize);
        for (std::size_t traj = begin; traj < end; ++traj) {
            Rng rng = Rng::for_stream(run.seed, traj);
            draw_jump_times(model.wtds, grid.horizon(), run.max_jumps, rng, jumps);
            if (jumps.truncated) ++block.truncated;
            walk_realization<3>(Eigen::Matrix3d::Identity(), jumps.times, model.generator, model.jump.matrix(),
                                no_translation, grid, [&](std::size_t j, const Eigen::Matrix3d& l) {
                                    double* acc = block.sums.data() + j * kEntries;
                                    const double* v = l.data();
                                    for (std::size_t x = 0; x < active.size(); ++x) {
                                        const int a = active[x];
                                        acc[a] += v[a];
                                        for (std::size_t y = x; y < active.size(); ++y) {
                                            const int c = active[y];
                                            acc[9 + packed(a, c)] += v[a] * v[c];
                                        }
                                    }
                                });
        }
        return block;
    };

    PropagatorMoments moments(grid, n, run.seed);
    auto& total = moments.sums();
    std::size_t truncated = 0;
    detail::ordered_block_reduce<Block>(detail::block_count(n), run.workers, make_block, [&](const Block& block) {
        for (std::size_t i = 0; i < total.size(); ++i) total[i] += block.sums[i];
        truncated += block.truncated;
    });
    check_truncation(truncated, n, run.max_truncated_fraction);
    return moments;
}

}  // namespace qrenew
