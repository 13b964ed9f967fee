#include "qrenew/analytic.hpp"

#include "qrenew/errors.hpp"

#include <unsupported/Eigen/MatrixFunctions>

#include <algorithm>
#include <cmath>
#include <map>

namespace qrenew {

namespace {

void require_rates(double mu, double mu1) {
    if (!(mu > 0.0) || !(mu1 > 0.0)) throw ParameterError("rates mu and mu1 must be positive");
}

void require_time(double t) {
    if (!(t >= 0.0)) throw ParameterError("time must be nonnegative");
}

// Removable singularity of q_exp_2wtd is expanded to first order inside this band.
constexpr double kSingularBand = 1e-6;

// Finest internal grid the convolution series may use before giving up.
constexpr std::size_t kMaxSeriesIntervals = 16384;
constexpr std::size_t kMaxSeriesTerms = 100000;
// Uncaptured probability mass allowed at T, relative to the series tolerance.
constexpr double kTailFraction = 1e-3;

// Trapezoid convolution c(t_i) = int_0^{t_i} a(s) b(t_i - s) ds on a uniform grid.
std::vector<double> convolve(const std::vector<double>& a, const std::vector<double>& b, double h) {
    const std::size_t size = a.size();
    std::vector<double> c(size, 0.0);
    for (std::size_t i = 1; i < size; ++i) {
        double s = 0.5 * (a[0] * b[i] + a[i] * b[0]);
        for (std::size_t k = 1; k < i; ++k) s += a[k] * b[i - k];
        c[i] = h * s;
    }
    return c;
}

struct Parity {
    std::vector<double> even;
    std::vector<double> odd;
};

// Sums the series up to `terms` jumps. With terms == 0 the count is chosen on the fly: stop once
// P(more jumps than summed by T) is below `tail`; the count used is written back.
Parity trapezoid_parity(const WtdSequence& seq, const TimeGrid& grid, double tail, std::size_t& terms) {
    const std::size_t size = grid.size();
    const double h = grid.step();
    const std::vector<double> t = grid.points();

    std::map<std::pair<int, double>, std::pair<std::vector<double>, std::vector<double>>> cache;
    auto samples = [&](const WtdSpec& w) -> const auto& {
        auto [it, inserted] = cache.try_emplace({w.shape(), w.mu});
        if (inserted) {
            auto& [f, g] = it->second;
            f.resize(size);
            g.resize(size);
            for (std::size_t i = 0; i < size; ++i) {
                f[i] = pdf(w, t[i]);
                g[i] = survival(w, t[i]);
            }
        }
        return it->second;
    };

    // P(S_n <= T) from the density of S_n. Its discretization error is relative, unlike
    // 1 - sum_n p_n(T), so it stays a reliable stopping rule on coarse grids.
    auto mass = [&](const std::vector<double>& d) {
        double s = 0.5 * (d.front() + d.back());
        for (std::size_t i = 1; i + 1 < size; ++i) s += d[i];
        return h * s;
    };

    Parity out{samples(nth_wtd(seq, 1)).second, std::vector<double>(size, 0.0)};
    // density of the n-th jump time S_n
    std::vector<double> density = samples(nth_wtd(seq, 1)).first;
    const bool fixed = terms > 0;
    std::size_t n = 1;
    for (; fixed ? n <= terms : mass(density) >= tail; ++n) {
        if (n > kMaxSeriesTerms) throw NumericalError("parity series did not converge");
        const auto& next = samples(nth_wtd(seq, n + 1));
        const std::vector<double> p_n = convolve(density, next.second, h);
        auto& target = (n % 2 == 0) ? out.even : out.odd;
        for (std::size_t i = 0; i < size; ++i) target[i] += p_n[i];
        density = convolve(density, next.first, h);
    }
    if (!fixed) terms = n - 1;
    return out;
}

// Values of `fine` at the points of a grid `factor` times coarser.
std::vector<double> subsample(const std::vector<double>& fine, std::size_t factor, std::size_t coarse_size) {
    std::vector<double> out(coarse_size);
    for (std::size_t j = 0; j < coarse_size; ++j) out[j] = fine[j * factor];
    return out;
}

}  // namespace

double q_markov(double mu, double t) {
    if (!(mu > 0.0)) throw ParameterError("rate mu must be positive");
    require_time(t);
    return std::exp(-2.0 * mu * t);
}

double q_exp_2wtd(double mu, double mu1, double t) {
    require_rates(mu, mu1);
    require_time(t);
    const double eps = 2.0 * mu - mu1;
    if (std::abs(eps) < kSingularBand * mu) {
        return std::exp(-2.0 * mu * t) * (1.0 - 2.0 * mu * t + eps * (2.0 * t - mu * t * t));
    }
    return (2.0 * (mu - mu1) * std::exp(-mu1 * t) + mu1 * std::exp(-2.0 * mu * t)) / eps;
}

std::optional<double> revival_time_exp_2wtd(double mu, double mu1) {
    require_rates(mu, mu1);
    if (!(mu1 > mu)) return std::nullopt;
    const double eps = 2.0 * mu - mu1;
    if (eps == 0.0) return 1.0 / (2.0 * mu);
    // -ln(2(mu1 - mu)/mu1) / (2mu - mu1), written with log1p so it stays accurate near mu1 = 2mu.
    return -std::log1p(-eps / mu1) / eps;
}

ParityCurve q_erlang_unmodified(double mu, int r, const TimeGrid& grid, double tol) {
    if (!(mu > 0.0)) throw ParameterError("rate mu must be positive");
    if (r < 1) throw ParameterError("Erlang shape r must be >= 1");
    if (r > 2) return parity_series(WtdSequence{{}, WtdSpec::erlang(r, mu)}, grid, tol);

    ParityCurve curve{grid, {}, {}, {}};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        const double q = r == 1 ? q_markov(mu, t) : std::exp(-mu * t) * (std::sin(mu * t) + std::cos(mu * t));
        curve.q.push_back(q);
        curve.p_even.push_back(0.5 * (1.0 + q));
        curve.p_odd.push_back(0.5 * (1.0 - q));
    }
    return curve;
}

double q_erlang_modified_22(double mu, double mu1, double t) {
    require_rates(mu, mu1);
    require_time(t);
    const double m = mu;
    const double m1 = mu1;
    const double denom = std::pow(2 * m * m - 2 * m1 * m + m1 * m1, 2);
    const double polynomial = m1 * m1 * m1 - 3 * m1 * m1 * m + 2 * m1 * m * m - 2 * m * m * m +
                              t * m1 * (m1 * m1 * m1 - 3 * m1 * m1 * m + 4 * m1 * m * m - 2 * m * m * m);
    const double oscillation = (std::pow(2 * m - m1, 2) - 2 * m * m) * std::cos(m * t) -
                               (2 * m * m - m1 * m1) * std::sin(m * t);
    return (2 * (m1 - m) * std::exp(-m1 * t) * polynomial - m1 * m1 * std::exp(-m * t) * oscillation) / denom;
}

ParityCurve parity_series(const WtdSequence& seq, const TimeGrid& grid, double tol) {
    if (!(tol > 0.0)) throw ParameterError("series tolerance must be positive");
    const std::size_t size = grid.size();

    for (std::size_t factor = 1; 4 * factor * grid.intervals() <= kMaxSeriesIntervals; factor *= 2) {
        // Three trapezoid levels h, h/2, h/4 combined by Richardson extrapolation (errors in h^2, h^4).
        // All levels sum the same number of terms, otherwise the truncation error differs
        // between them and is not removed by the extrapolation.
        std::vector<Parity> levels;
        std::size_t terms = 0;
        for (std::size_t level = 0; level < 3; ++level) {
            const std::size_t f = factor << level;
            Parity p = trapezoid_parity(seq, grid.refined(f), kTailFraction * tol, terms);
            levels.push_back({subsample(p.even, f, size), subsample(p.odd, f, size)});
        }
        ParityCurve curve{grid, std::vector<double>(size), std::vector<double>(size), std::vector<double>(size)};
        double error = 0.0;
        auto extrapolate = [&](auto member, std::vector<double>& out) {
            for (std::size_t j = 0; j < size; ++j) {
                const double a0 = (levels[0].*member)[j];
                const double a1 = (levels[1].*member)[j];
                const double a2 = (levels[2].*member)[j];
                const double r1 = (4.0 * a1 - a0) / 3.0;
                const double r2 = (4.0 * a2 - a1) / 3.0;
                out[j] = (16.0 * r2 - r1) / 15.0;
                error = std::max(error, std::abs(out[j] - r2));
            }
        };
        extrapolate(&Parity::even, curve.p_even);
        extrapolate(&Parity::odd, curve.p_odd);
        if (error > 0.5 * tol) continue;

        double mass_error = 0.0;
        for (std::size_t j = 0; j < size; ++j) {
            curve.q[j] = curve.p_even[j] - curve.p_odd[j];
            mass_error = std::max(mass_error, std::abs(curve.p_even[j] + curve.p_odd[j] - 1.0));
        }
        if (mass_error > tol) {
            throw NumericalError("parity series lost normalization: |p_even + p_odd - 1| = " +
                                 std::to_string(mass_error));
        }
        return curve;
    }
    throw NumericalError("time grid too coarse for the requested parity-series tolerance");
}

std::vector<double> q_phase_type(const WtdSequence& seq, const TimeGrid& grid) {
    const std::vector<double> times = grid.points();
    return q_phase_type(seq, std::span<const double>(times));
}

std::vector<double> q_phase_type(const WtdSequence& seq, std::span<const double> times) {
    struct Phase {
        double rate;
        bool completes_wtd;
    };
    std::vector<Phase> phases;
    for (const auto& w : seq.modified) {
        for (int j = 0; j < w.shape(); ++j) phases.push_back({w.mu, j == w.shape() - 1});
    }
    const int transient = static_cast<int>(phases.size());
    const int shape = seq.stationary.shape();
    const int dim = transient + shape;

    // Entries are signed occupations: a completed waiting time is a jump and flips the sign.
    Eigen::MatrixXd generator = Eigen::MatrixXd::Zero(dim, dim);
    for (int i = 0; i < transient; ++i) {
        const auto& p = phases[static_cast<std::size_t>(i)];
        generator(i, i) -= p.rate;
        generator(i + 1, i) += p.completes_wtd ? -p.rate : p.rate;
    }
    const double mu = seq.stationary.mu;
    for (int j = 0; j < shape; ++j) {
        const int i = transient + j;
        generator(i, i) -= mu;
        if (j == shape - 1) {
            generator(transient, i) -= mu;
        } else {
            generator(i + 1, i) += mu;
        }
    }

    std::vector<double> q(times.size());
    Eigen::VectorXd start = Eigen::VectorXd::Zero(dim);
    start[0] = 1.0;
    for (std::size_t j = 0; j < times.size(); ++j) {
        require_time(times[j]);
        const Eigen::MatrixXd propagator = (generator * times[j]).exp();
        q[j] = (propagator * start).sum();
    }
    return q;
}

int count_sign_changes(std::span<const double> values) {
    int changes = 0;
    int last_sign = 0;
    for (double v : values) {
        const int sign = (v > 0.0) - (v < 0.0);
        if (sign == 0) continue;
        if (last_sign != 0 && sign != last_sign) ++changes;
        last_sign = sign;
    }
    return changes;
}

}  // namespace qrenew
