#include "oracles.hpp"
#include "qrenew/analytic.hpp"
#include "qrenew/errors.hpp"
#include "qrenew/nonmarkov.hpp"

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace qrenew;

namespace {

DistanceCurve sampled(const TimeGrid& grid, const std::function<double(double)>& f) {
    DistanceCurve c{grid, {}, {}, 0, 0};
    for (std::size_t j = 0; j < grid.size(); ++j) {
        c.distance.push_back(f(grid.at(j)));
        c.std_error.push_back(0.0);
    }
    return c;
}

RunSettings settings(double horizon, double dt, std::size_t n, std::uint64_t seed) {
    RunSettings run;
    run.horizon = horizon;
    run.dt_out = dt;
    run.trajectories = n;
    run.seed = seed;
    return run;
}

ProcessModel pure_x(WtdSequence wtds) { return {DephasingGenerator{}, pauli_x(), std::move(wtds)}; }

double angle_deg(const Eigen::Vector3d& a, const Eigen::Vector3d& b) {
    return std::acos(std::min(1.0, std::abs(a.normalized().dot(b.normalized())))) * 180.0 / std::numbers::pi;
}

}  // namespace

TEST_CASE("monotone curves have no revivals") {
    const auto c = sampled(TimeGrid(3.0, 300), [](double t) { return std::exp(-2.0 * t); });
    CHECK(detect_revivals(c, 1e-6).empty());
    CHECK(blp_measure(c, 1e-6) == 0.0);
}

TEST_CASE("detect_revivals on the Erlang r = 2 curve") {
    const TimeGrid grid(10.0, 10000);
    const auto c = sampled(grid, [](double t) { return std::abs(std::exp(-t) * (std::sin(t) + std::cos(t))); });
    const auto revivals = detect_revivals(c, 1e-3);
    // Heights e^{-pi}(...), e^{-2pi}(...) clear 1e-3; the third is about 1e-4.
    REQUIRE(revivals.size() == 2);
    for (std::size_t n = 0; n < revivals.size(); ++n) {
        const double zero = 0.75 * std::numbers::pi + n * std::numbers::pi;
        CHECK(std::abs(revivals[n].t_onset - zero) <= grid.step());
        CHECK(revivals[n].onset_value < 1e-3);
        CHECK(revivals[n].t_onset < revivals[n].t_peak);
        CHECK(revivals[n].height > 1e-3);
    }
    CHECK(detect_revivals(c, 1e-5).size() == 3);
}

TEST_CASE("detect_revivals argument checks") {
    const auto c = sampled(TimeGrid(1.0, 10), [](double) { return 1.0; });
    CHECK_THROWS_AS(detect_revivals(c, 0.0), ParameterError);
    CHECK_THROWS_AS(detect_revivals(DistanceCurve{TimeGrid(1.0, 1), {}, {}, 0, 0}, 0.1), ParameterError);
}

TEST_CASE("hysteresis does not split a revival on small wiggles") {
    const TimeGrid grid(1.0, 6);
    DistanceCurve c{grid, {1.0, 0.2, 0.5, 0.48, 0.7, 0.3, 0.1}, std::vector<double>(7, 0.0), 0, 0};
    const auto r = detect_revivals(c, 0.05);
    REQUIRE(r.size() == 1);
    CHECK(r[0].onset_index == 1);
    CHECK(r[0].peak_index == 4);
    CHECK(r[0].height == doctest::Approx(0.5));
}

TEST_CASE("blp_measure matches the maximum of |q| after its zero") {
    const TimeGrid grid(5.0, 50000);
    const auto c = sampled(grid, [](double t) { return std::abs(q_exp_2wtd(1.0, 3.0, t)); });
    const double t_min = oracle::golden_max([](double t) { return -q_exp_2wtd(1.0, 3.0, t); }, std::log(4.0 / 3.0), 5.0);
    const double expected = -q_exp_2wtd(1.0, 3.0, t_min);
    CHECK(expected > 0.05);
    CHECK(blp_measure(c, 1e-6) == doctest::Approx(expected).epsilon(1e-3));
}

TEST_CASE("raising delta never increases the measure") {
    std::mt19937_64 gen(12);
    std::normal_distribution<double> noise(0.0, 0.01);
    const TimeGrid grid(5.0, 500);
    for (int trial = 0; trial < 200; ++trial) {
        auto c = sampled(grid, [](double t) { return std::abs(q_exp_2wtd(1.0, 6.0, t)); });
        for (auto& d : c.distance) d += noise(gen);
        double previous = blp_measure(c, 1e-4);
        for (double delta = 2e-4; delta < 1.0; delta *= 2.0) {
            const double m = blp_measure(c, delta);
            REQUIRE(m <= previous + 1e-15);
            previous = m;
        }
    }
}

TEST_CASE("Markov Monte Carlo curves show no revivals at the default threshold") {
    const auto model = pure_x({{}, WtdSpec::exponential(1.0)});
    int with_revivals = 0;
    const int seeds = 100;
    for (int seed = 1; seed <= seeds; ++seed) {
        const auto curve = estimate_distance_curve(StatePair::antipodal({0, 1, 0}), model, settings(3.0, 0.01, 5000, seed));
        with_revivals += !detect_revivals(curve, default_delta(curve)).empty();
    }
    CHECK(with_revivals <= 1);
}

TEST_CASE("default_delta") {
    auto c = sampled(TimeGrid(1.0, 2), [](double) { return 0.5; });
    CHECK(default_delta(c) == 1e-3);
    c.std_error = {0.0, 0.01, 0.002};
    CHECK(default_delta(c) == doctest::Approx(0.03));
}

TEST_CASE("estimate_measure adds onset and peak errors in quadrature") {
    const TimeGrid grid(1.0, 4);
    DistanceCurve c{grid, {1.0, 0.1, 0.4, 0.0, 0.3}, {0.0, 0.03, 0.04, 0.0, 0.0}, 0, 0};
    const auto m = estimate_measure(c, 0.05);
    REQUIRE(m.revivals.size() == 2);
    CHECK(m.value == doctest::Approx(0.6));
    CHECK(m.std_error == doctest::Approx(0.05));
}

TEST_CASE("analytic revival counts") {
    const StatePair pair = StatePair::antipodal({0, 1, 0});
    auto run = settings(10.0, 0.001, 1, 1);
    auto model_at = [](double mu1, double mu2) {
        return pure_x({{WtdSpec::exponential(mu1), WtdSpec::exponential(mu2)}, WtdSpec::exponential(1.0)});
    };
    const auto two = count_revivals_sweep({20.0}, {5.0}, model_at, pair, run, SweepMethod::Auto);
    REQUIRE(two.size() == 1);
    CHECK(two[0].analytic);
    CHECK(two[0].revival_count == 2);

    auto k2 = [](double mu1, double) { return pure_x({{WtdSpec::exponential(mu1)}, WtdSpec::exponential(1.0)}); };
    CHECK(count_revivals_sweep({0.5}, {0.0}, k2, pair, run, SweepMethod::Analytic)[0].revival_count == 0);
    CHECK(count_revivals_sweep({3.0}, {0.0}, k2, pair, run, SweepMethod::Analytic)[0].revival_count == 1);

    SUBCASE("never more than k - 1 on a rate grid") {
        const std::vector<double> axis = {0.5, 1.0, 2.0, 5.0, 10.0, 20.0, 40.0};
        run.horizon = 8.0;
        run.dt_out = 0.002;
        for (const auto& cell : count_revivals_sweep(axis, axis, model_at, pair, run, SweepMethod::Auto)) {
            REQUIRE(cell.revival_count >= 0);
            REQUIRE(cell.revival_count <= 2);
        }
    }
    SUBCASE("analytic method refuses non pure-jump models") {
        auto damped = [](double, double) {
            return ProcessModel{DephasingGenerator::from_gammas({0.1, 0.1, 0.1}), pauli_x(), {{}, WtdSpec::exponential(1.0)}};
        };
        CHECK_THROWS_AS(count_revivals_sweep({1.0}, {1.0}, damped, pair, run, SweepMethod::Analytic), ConfigError);
    }
}

TEST_CASE("pure-jump distance for general pairs") {
    const TimeGrid grid(1.0, 2);
    const auto pair = StatePair::antipodal({0.6, 0.8, 0.0});
    const auto c = pure_jump_distance_curve(pair, grid, {1.0, 0.5, -0.25});
    CHECK(c.distance[0] == doctest::Approx(1.0));
    CHECK(c.distance[1] == doctest::Approx(0.5 * std::sqrt(1.2 * 1.2 + 0.8 * 0.8)));
    CHECK(c.distance[2] == doctest::Approx(0.5 * std::sqrt(1.2 * 1.2 + 0.4 * 0.4)));
    CHECK(is_pure_x_jump(pure_x({{}, WtdSpec::exponential(1.0)})));
    CHECK_FALSE(is_pure_x_jump({DephasingGenerator{}, amplitude_damping(0.2), {{}, WtdSpec::exponential(1.0)}}));
}

TEST_CASE("icosphere directions") {
    const auto mesh = icosphere_directions(2);
    CHECK(mesh.size() == 162);
    for (const auto& v : mesh) REQUIRE(v.norm() == doctest::Approx(1.0).epsilon(1e-14));
    const auto half = hemisphere(mesh);
    CHECK(half.size() == 81);
    for (const auto& v : half) {
        int antipodes = 0;
        for (const auto& w : half) antipodes += (v + w).norm() < 1e-9;
        REQUIRE(antipodes == 0);
    }
    for (int axis = 0; axis < 3; ++axis) {
        int hits = 0;
        for (const auto& v : half) hits += angle_deg(v, Eigen::Vector3d::Unit(axis)) < 1e-6;
        CHECK(hits == 1);
    }
    CHECK(icosphere_directions(0).size() == 12);
}

TEST_CASE("optimizer on a Markov model is flat") {
    const auto report = optimize_pair(pure_x({{}, WtdSpec::exponential(1.0)}), settings(2.0, 0.02, 3000, 4));
    CHECK(report.optimizer_trace.size() == 81 + 120);
    for (const auto& s : report.optimizer_trace) REQUIRE(s.measure == 0.0);
    CHECK(report.measure == 0.0);
    CHECK(report.revivals.empty());
}

TEST_CASE("refinement never returns a worse direction") {
    const ProcessModel model{DephasingGenerator::from_lambdas({0.9, 0.9, 0.9}), compose(pauli_x(), amplitude_damping(0.3)),
                             {{WtdSpec::exponential(10.0)}, WtdSpec::exponential(1.0)}};
    const auto report = optimize_pair(model, settings(3.0, 0.01, 4000, 21));
    double coarse_best = 0.0;
    for (const auto& s : report.optimizer_trace) {
        if (!s.refined) coarse_best = std::max(coarse_best, s.measure);
    }
    CHECK(report.measure >= coarse_best);
    REQUIRE(report.optimal_pair.has_value());
    CHECK(report.optimal_pair->is_antipodal_pure());
    CHECK(angle_deg(report.optimal_pair->plus.vec(), Eigen::Vector3d::UnitY()) < 20.0);
}

TEST_CASE("stronger damping reduces the measure") {
    const StatePair pair = StatePair::antipodal({0, 1, 0});
    std::vector<MeasureEstimate> measures;
    for (double gamma : {0.0, 0.3, 0.6}) {
        const ProcessModel model{DephasingGenerator::from_lambdas({0.9, 0.9, 0.9}), compose(pauli_x(), amplitude_damping(gamma)),
                                 {{WtdSpec::exponential(13.0)}, WtdSpec::exponential(3.0)}};
        const auto curve = estimate_distance_curve(pair, model, settings(2.0, 0.01, 20000, 8));
        measures.push_back(estimate_measure(curve, default_delta(curve)));
    }
    CHECK(measures[0].value > 0.0);
    for (std::size_t i = 0; i + 1 < measures.size(); ++i) {
        const double slack = 3.0 * std::hypot(measures[i].std_error, measures[i + 1].std_error);
        CHECK(measures[i].value + slack >= measures[i + 1].value);
    }
}
