#include "qrenew/nonmarkov.hpp"

#include "qrenew/analytic.hpp"
#include "qrenew/errors.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <map>
#include <numbers>

namespace qrenew {

std::vector<Revival> detect_revivals(const DistanceCurve& curve, double delta) {
    if (!(delta > 0.0)) throw ParameterError("revival threshold delta must be positive");
    const auto& d = curve.distance;
    if (d.empty()) throw ParameterError("cannot detect revivals on an empty curve");

    std::vector<Revival> out;
    auto close = [&](std::size_t onset, std::size_t peak) {
        Revival r;
        r.onset_index = onset;
        r.peak_index = peak;
        r.t_onset = curve.grid.at(onset);
        r.t_peak = curve.grid.at(peak);
        r.onset_value = d[onset];
        r.height = d[peak] - d[onset];
        if (!curve.std_error.empty()) {
            r.onset_std_error = curve.std_error[onset];
            r.peak_std_error = curve.std_error[peak];
        }
        out.push_back(r);
    };

    bool rising = false;
    std::size_t low = 0;
    std::size_t high = 0;
    for (std::size_t j = 1; j < d.size(); ++j) {
        if (!rising) {
            if (d[j] < d[low]) {
                low = j;
            } else if (d[j] - d[low] > delta) {
                rising = true;
                high = j;
            }
        } else if (d[j] > d[high]) {
            high = j;
        } else if (d[high] - d[j] > delta) {
            close(low, high);
            rising = false;
            low = j;
        }
    }
    if (rising) close(low, high);
    return out;
}

double blp_measure(const DistanceCurve& curve, double delta) { return estimate_measure(curve, delta).value; }

double default_delta(const DistanceCurve& curve) { return std::max(3.0 * curve.max_std_error(), 1e-3); }

MeasureEstimate estimate_measure(const DistanceCurve& curve, double delta) {
    MeasureEstimate m;
    m.revivals = detect_revivals(curve, delta);
    double variance = 0.0;
    for (const auto& r : m.revivals) {
        m.value += r.height;
        variance += r.onset_std_error * r.onset_std_error + r.peak_std_error * r.peak_std_error;
    }
    m.std_error = std::sqrt(variance);
    return m;
}

NmReport analyze_curve(const DistanceCurve& curve, std::optional<double> delta) {
    NmReport report;
    report.delta = delta.value_or(default_delta(curve));
    const MeasureEstimate m = estimate_measure(curve, report.delta);
    report.revivals = m.revivals;
    report.measure = m.value;
    report.measure_std_error = m.std_error;
    return report;
}

std::vector<Eigen::Vector3d> icosphere_directions(int subdivisions) {
    if (subdivisions < 0) throw ParameterError("icosphere subdivisions must be >= 0");
    const double phi = 0.5 * (1.0 + std::sqrt(5.0));
    std::vector<Eigen::Vector3d> vertices = {
        {-1, phi, 0}, {1, phi, 0}, {-1, -phi, 0}, {1, -phi, 0}, {0, -1, phi}, {0, 1, phi},
        {0, -1, -phi}, {0, 1, -phi}, {phi, 0, -1}, {phi, 0, 1}, {-phi, 0, -1}, {-phi, 0, 1}};
    for (auto& v : vertices) v.normalize();
    std::vector<std::array<int, 3>> faces = {
        {0, 11, 5}, {0, 5, 1}, {0, 1, 7}, {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
        {11, 10, 2}, {10, 7, 6}, {7, 1, 8}, {3, 9, 4}, {3, 4, 2}, {3, 2, 6}, {3, 6, 8},
        {3, 8, 9}, {4, 9, 5}, {2, 4, 11}, {6, 2, 10}, {8, 6, 7}, {9, 8, 1}};

    for (int level = 0; level < subdivisions; ++level) {
        std::map<std::pair<int, int>, int> midpoints;
        auto midpoint = [&](int a, int b) {
            const auto key = std::minmax(a, b);
            auto it = midpoints.find(key);
            if (it != midpoints.end()) return it->second;
            vertices.push_back((vertices[a] + vertices[b]).normalized());
            const int index = static_cast<int>(vertices.size()) - 1;
            midpoints.emplace(key, index);
            return index;
        };
        std::vector<std::array<int, 3>> next;
        next.reserve(faces.size() * 4);
        for (const auto& f : faces) {
            const int ab = midpoint(f[0], f[1]);
            const int bc = midpoint(f[1], f[2]);
            const int ca = midpoint(f[2], f[0]);
            next.push_back({f[0], ab, ca});
            next.push_back({f[1], bc, ab});
            next.push_back({f[2], ca, bc});
            next.push_back({ab, bc, ca});
        }
        faces = std::move(next);
    }
    return vertices;
}

std::vector<Eigen::Vector3d> hemisphere(const std::vector<Eigen::Vector3d>& directions) {
    constexpr double tie = 1e-9;
    std::vector<Eigen::Vector3d> out;
    for (const auto& v : directions) {
        const bool keep = v.z() > tie || (std::abs(v.z()) <= tie && (v.y() > tie || (std::abs(v.y()) <= tie && v.x() > 0)));
        if (keep) out.push_back(v);
    }
    return out;
}

DirectionScore score_direction(const PropagatorMoments& moments, const Eigen::Vector3d& direction,
                               std::optional<double> delta) {
    const DistanceCurve curve = moments.distance_curve(direction);
    const MeasureEstimate m = estimate_measure(curve, delta.value_or(default_delta(curve)));
    return DirectionScore{direction.normalized(), m.value, m.std_error, static_cast<int>(m.revivals.size()), false};
}

NmReport optimize_pair(const ProcessModel& model, const RunSettings& run, const OptimizeSettings& settings) {
    if (settings.refine_factor < 1) throw ParameterError("refine_factor must be >= 1");
    const PropagatorMoments moments = run_propagator_moments(model, run);

    const auto mesh = icosphere_directions(settings.subdivisions);
    NmReport report;
    std::size_t best = 0;
    for (const auto& dir : hemisphere(mesh)) {
        report.optimizer_trace.push_back(score_direction(moments, dir, settings.delta));
        if (report.optimizer_trace.back().measure > report.optimizer_trace[best].measure) {
            best = report.optimizer_trace.size() - 1;
        }
    }

    // Angular spacing of the coarse mesh: smallest angle between distinct vertices.
    double spacing = std::numbers::pi;
    for (std::size_t a = 0; a < mesh.size(); ++a) {
        for (std::size_t b = a + 1; b < mesh.size(); ++b) {
            spacing = std::min(spacing, std::acos(std::clamp(mesh[a].dot(mesh[b]), -1.0, 1.0)));
        }
    }

    const Eigen::Vector3d center = report.optimizer_trace[best].direction;
    Eigen::Index axis = 0;
    center.cwiseAbs().minCoeff(&axis);
    const Eigen::Vector3d e1 = center.cross(Eigen::Vector3d::Unit(axis)).normalized();
    const Eigen::Vector3d e2 = center.cross(e1);
    const int steps = settings.refine_factor;
    const double step = spacing / steps;
    for (int a = -steps; a <= steps; ++a) {
        for (int b = -steps; b <= steps; ++b) {
            if (a == 0 && b == 0) continue;
            const Eigen::Vector3d tangent = a * e1 + b * e2;
            const double angle = step * tangent.norm();
            const Eigen::Vector3d dir = std::cos(angle) * center + std::sin(angle) * tangent.normalized();
            DirectionScore score = score_direction(moments, dir, settings.delta);
            score.refined = true;
            report.optimizer_trace.push_back(score);
            if (score.measure > report.optimizer_trace[best].measure) best = report.optimizer_trace.size() - 1;
        }
    }

    const DirectionScore& winner = report.optimizer_trace[best];
    const DistanceCurve curve = moments.distance_curve(winner.direction);
    report.delta = settings.delta.value_or(default_delta(curve));
    const MeasureEstimate m = estimate_measure(curve, report.delta);
    report.revivals = m.revivals;
    report.measure = m.value;
    report.measure_std_error = m.std_error;
    report.optimal_pair = StatePair::antipodal(winner.direction);
    return report;
}

bool is_pure_x_jump(const ProcessModel& model) {
    const AffineChannel x = pauli_x();
    return model.generator.is_zero() && model.jump.matrix() == x.matrix() && model.jump.translation().isZero(0.0);
}

DistanceCurve pure_jump_distance_curve(const StatePair& pair, const TimeGrid& grid, const std::vector<double>& q) {
    if (q.size() != grid.size()) throw ParameterError("q samples do not match the grid");
    const Eigen::Vector3d d0 = pair.plus.vec() - pair.minus.vec();
    DistanceCurve curve{grid, std::vector<double>(q.size()), std::vector<double>(q.size(), 0.0), 0, 0};
    for (std::size_t j = 0; j < q.size(); ++j) {
        curve.distance[j] = 0.5 * Eigen::Vector3d(d0.x(), q[j] * d0.y(), q[j] * d0.z()).norm();
    }
    return curve;
}

std::vector<SweepCell> count_revivals_sweep(const std::vector<double>& axis1, const std::vector<double>& axis2,
                                            const std::function<ProcessModel(double, double)>& model_at,
                                            const StatePair& pair, const RunSettings& run, SweepMethod method,
                                            std::optional<double> delta) {
    std::vector<SweepCell> cells;
    cells.reserve(axis1.size() * axis2.size());
    const TimeGrid grid = run.grid();
    for (double p1 : axis1) {
        for (double p2 : axis2) {
            const ProcessModel model = model_at(p1, p2);
            const bool pure = is_pure_x_jump(model);
            if (method == SweepMethod::Analytic && !pure) {
                throw ConfigError("analytic sweep needs a pure x-jump model (no dephasing, jump = x)");
            }
            SweepCell cell{p1, p2, 0, 0.0, false};
            if (method == SweepMethod::Analytic || (method == SweepMethod::Auto && pure)) {
                const DistanceCurve curve = pure_jump_distance_curve(pair, grid, q_phase_type(model.wtds, grid));
                const MeasureEstimate m = estimate_measure(curve, delta.value_or(kAnalyticDelta));
                cell.revival_count = static_cast<int>(m.revivals.size());
                cell.measure = m.value;
                cell.analytic = true;
            } else {
                const DistanceCurve curve = estimate_distance_curve(pair, model, run);
                const MeasureEstimate m = estimate_measure(curve, delta.value_or(default_delta(curve)));
                cell.revival_count = static_cast<int>(m.revivals.size());
                cell.measure = m.value;
            }
            cells.push_back(cell);
        }
    }
    return cells;
}

}  // namespace qrenew
