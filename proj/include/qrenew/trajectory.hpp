#pragma once

#include "qrenew/bloch.hpp"
#include "qrenew/dephasing.hpp"
#include "qrenew/grid.hpp"
#include "qrenew/wtd.hpp"

#include <cstddef>
#include <iosfwd>
#include <vector>

namespace qrenew {

inline constexpr std::size_t kDefaultMaxJumps = 10000;

/// Jump times 0 < t_1 < t_2 < ... <= T of one realization.
struct JumpTimes {
    std::vector<double> times;
    bool truncated = false;  // max_jumps reached before the waiting times summed past T
};

/// Draws waiting times from nth_wtd(seq, 1), nth_wtd(seq, 2), ... until their running sum exceeds T.
JumpTimes draw_jump_times(const WtdSequence& seq, double horizon, std::size_t max_jumps, Rng& rng);

/// Overload reusing `out`'s storage; the hot loop of the ensemble uses this.
void draw_jump_times(const WtdSequence& seq, double horizon, std::size_t max_jumps, Rng& rng, JumpTimes& out);

struct TrajectoryCurve {
    TimeGrid grid;
    std::vector<BlochVector> states;
};

/// Piecewise-deterministic evolution of the columns of `state` along one realization:
/// dephasing between events, r -> M r + c at each jump. Every grid value is propagated
/// exactly from the last event, so there is no time-stepping error. A jump that falls
/// exactly on a grid point is applied before that point is visited.
///
/// `visit(j, columns)` is called once per grid index in increasing order.
template <int Cols, typename Visitor>
void walk_realization(Eigen::Matrix<double, 3, Cols> state, const std::vector<double>& jumps,
                      const DephasingGenerator& gen, const Eigen::Matrix3d& jump_matrix,
                      const Eigen::Vector3d& jump_translation, const TimeGrid& grid, Visitor&& visit) {
    const bool frozen = gen.is_zero();
    double last_event = 0.0;
    std::size_t next = 0;
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        while (next < jumps.size() && jumps[next] <= t) {
            const double tj = jumps[next];
            if (!frozen) state = gen.decay(tj - last_event).asDiagonal() * state;
            state = jump_matrix * state;
            state.colwise() += jump_translation;
            last_event = tj;
            ++next;
        }
        if (frozen) {
            visit(j, state);
        } else {
            const Eigen::Matrix<double, 3, Cols> at_t = gen.decay(t - last_event).asDiagonal() * state;
            visit(j, at_t);
        }
    }
}

TrajectoryCurve evolve(const BlochVector& initial, const JumpTimes& jumps, const DephasingGenerator& gen,
                       const AffineChannel& jump_channel, const TimeGrid& grid);

/// CSV with header `t,x,y,z`.
void write_trajectory_csv(std::ostream& os, const TrajectoryCurve& curve);

}  // namespace qrenew
