#pragma once

#include <cstddef>
#include <vector>

namespace qrenew {

/// Uniform grid t_j = T * j / n, j = 0..n. Points are computed from the integer index,
/// so a grid refined by a factor of two reproduces the coarse points bit for bit.
class TimeGrid {
public:
    TimeGrid(double horizon, std::size_t intervals);
    /// n = round(T / dt).
    static TimeGrid with_step(double horizon, double step);

    double horizon() const { return horizon_; }
    std::size_t intervals() const { return intervals_; }
    std::size_t size() const { return intervals_ + 1; }
    double step() const { return horizon_ / static_cast<double>(intervals_); }
    double at(std::size_t j) const { return horizon_ * static_cast<double>(j) / static_cast<double>(intervals_); }
    std::vector<double> points() const;
    /// Same horizon, `factor` times as many intervals.
    TimeGrid refined(std::size_t factor) const { return TimeGrid(horizon_, intervals_ * factor); }

private:
    double horizon_;
    std::size_t intervals_;
};

}  // namespace qrenew
