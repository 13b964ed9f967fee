#include "qrenew/trajectory.hpp"

#include "qrenew/errors.hpp"
#include "qrenew/io.hpp"

#include <ostream>

namespace qrenew {

void draw_jump_times(const WtdSequence& seq, double horizon, std::size_t max_jumps, Rng& rng, JumpTimes& out) {
    if (!(horizon > 0.0)) throw ParameterError("trajectory horizon T must be positive");
    if (max_jumps < 1) throw ParameterError("max_jumps must be >= 1");
    out.times.clear();
    out.truncated = false;
    double t = 0.0;
    for (std::size_t n = 1;; ++n) {
        t += sample(nth_wtd(seq, n), rng);
        if (t > horizon) return;
        if (out.times.size() == max_jumps) {
            out.truncated = true;
            return;
        }
        out.times.push_back(t);
    }
}

JumpTimes draw_jump_times(const WtdSequence& seq, double horizon, std::size_t max_jumps, Rng& rng) {
    JumpTimes out;
    draw_jump_times(seq, horizon, max_jumps, rng, out);
    return out;
}

TrajectoryCurve evolve(const BlochVector& initial, const JumpTimes& jumps, const DephasingGenerator& gen,
                       const AffineChannel& jump_channel, const TimeGrid& grid) {
    TrajectoryCurve curve{grid, {}};
    curve.states.reserve(grid.size());
    walk_realization<1>(initial.vec(), jumps.times, gen, jump_channel.matrix(), jump_channel.translation(), grid,
                        [&](std::size_t, const Eigen::Vector3d& r) {
                            BlochVector v(r);
                            if (!v.is_physical(kBallTolerance)) {
                                throw InvariantError("trajectory left the Bloch ball");
                            }
                            curve.states.push_back(v);
                        });
    return curve;
}

void write_trajectory_csv(std::ostream& os, const TrajectoryCurve& curve) {
    os << "t,x,y,z\n";
    for (std::size_t j = 0; j < curve.states.size(); ++j) {
        const auto& s = curve.states[j];
        os << format_double(curve.grid.at(j)) << ',' << format_double(s.x()) << ',' << format_double(s.y()) << ','
           << format_double(s.z()) << '\n';
    }
}

}  // namespace qrenew
