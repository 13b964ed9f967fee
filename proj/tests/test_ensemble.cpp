#include "qrenew/ensemble.hpp"
#include "qrenew/errors.hpp"

#include <doctest.h>

#include <cmath>

using namespace qrenew;

namespace {

ProcessModel markov_x(double mu) {
    return {DephasingGenerator{}, pauli_x(), {{}, WtdSpec::exponential(mu)}};
}

RunSettings settings(double horizon, double dt, std::size_t n, std::uint64_t seed) {
    RunSettings run;
    run.horizon = horizon;
    run.dt_out = dt;
    run.trajectories = n;
    run.seed = seed;
    return run;
}

}  // namespace

TEST_CASE("D(0) is the initial distance") {
    const auto result = run_ensemble(StatePair::antipodal({0, 1, 0}), markov_x(1.0), settings(1.0, 0.1, 2000, 1));
    CHECK(result.curve.distance[0] == 1.0);
    CHECK(result.curve.std_error[0] == 0.0);
    CHECK(result.curve.grid.size() == 11);
}

TEST_CASE("the distance is half the norm of the difference of the mean states") {
    const ProcessModel model{DephasingGenerator::from_lambdas({0.9, 0.9, 0.9}), compose(pauli_x(), amplitude_damping(0.3)),
                             {{WtdSpec::exponential(15.0)}, WtdSpec::erlang(2, 1.0)}};
    const auto result = run_ensemble(StatePair::antipodal({0.3, 0.8, -0.2}), model, settings(2.0, 0.02, 5000, 3));
    for (std::size_t j = 0; j < result.curve.grid.size(); ++j) {
        const double d = trace_distance(result.means.plus[j], result.means.minus[j]);
        REQUIRE(std::abs(result.curve.distance[j] - d) < 1e-12);
        REQUIRE(result.means.plus[j].is_physical());
        REQUIRE(result.means.minus[j].is_physical());
    }
}

TEST_CASE("results do not depend on the number of workers") {
    const ProcessModel model{DephasingGenerator::from_gammas({0.1, 0.0, 0.2}), compose(pauli_x(), amplitude_damping(0.4)),
                             {{WtdSpec::exponential(5.0)}, WtdSpec::exponential(1.0)}};
    auto run = settings(3.0, 0.05, 5000, 11);
    run.workers = 1;
    const auto a = run_ensemble(StatePair::antipodal({0, 1, 0}), model, run);
    run.workers = 4;
    const auto b = run_ensemble(StatePair::antipodal({0, 1, 0}), model, run);
    CHECK(a.curve.distance == b.curve.distance);
    CHECK(a.curve.std_error == b.curve.std_error);
}

TEST_CASE("unital antipodal pairs have opposite mean states") {
    const ProcessModel model{DephasingGenerator::from_gammas({0.2, 0.2, 0.2}), pauli_x(),
                             {{}, WtdSpec::erlang(3, 2.0)}};
    const auto means = mean_bloch_curves(StatePair::antipodal({0.5, 0.5, 0.7}), model, settings(2.0, 0.05, 3000, 5));
    for (std::size_t j = 0; j < means.grid.size(); ++j) {
        REQUIRE((means.plus[j].vec() + means.minus[j].vec()).norm() < 1e-12);
    }
}

TEST_CASE("no jumps inside the horizon gives the pure dephasing curve") {
    const auto gen = DephasingGenerator::from_lambdas({0.9, 0.9, 0.9});
    const ProcessModel model{gen, pauli_x(), {{}, WtdSpec::exponential(1e-9)}};
    const auto curve = estimate_distance_curve(StatePair::antipodal({0, 1, 0}), model, settings(2.0, 0.1, 1000, 2));
    for (std::size_t j = 0; j < curve.grid.size(); ++j) {
        REQUIRE(curve.distance[j] == doctest::Approx(std::exp(-0.9 * curve.grid.at(j))).epsilon(1e-12));
    }
}

TEST_CASE("amplitude damping drives z towards the fixed point") {
    const ProcessModel model{DephasingGenerator{}, amplitude_damping(0.5), {{}, WtdSpec::exponential(4.0)}};
    const auto means = mean_bloch_curves(StatePair::antipodal({0, 0, 1}), model, settings(1.0, 0.25, 40000, 6));
    CHECK(means.plus.back().z() == doctest::Approx(1.0).epsilon(1e-12));
    // 1 - z = 2 E[(1 - gamma)^N] with N ~ Poisson(mu t), i.e. 2 exp(-gamma mu t).
    CHECK(std::abs(means.minus.back().z() - (1.0 - 2.0 * std::exp(-0.5 * 4.0 * 1.0))) < 0.01);
}

TEST_CASE("standard errors scale like one over root N") {
    const auto model = markov_x(1.0);
    const auto small = estimate_distance_curve(StatePair::antipodal({0, 1, 0}), model, settings(2.0, 0.1, 4000, 9));
    const auto large = estimate_distance_curve(StatePair::antipodal({0, 1, 0}), model, settings(2.0, 0.1, 64000, 9));
    const double ratio = small.max_std_error() / large.max_std_error();
    CHECK(ratio > 3.5);
    CHECK(ratio < 4.5);
    for (std::size_t j = 0; j < large.grid.size(); ++j) {
        REQUIRE(std::abs(large.distance[j] - std::exp(-2.0 * large.grid.at(j))) < 4.0 * large.std_error[j] + 1e-12);
    }
}

TEST_CASE("estimate_point") {
    const auto zero = estimate_point(Eigen::Vector3d::Zero(), Eigen::Matrix3d::Identity(), 100);
    CHECK(zero.distance == 0.0);
    CHECK(zero.std_error == doctest::Approx(0.05));
    Eigen::Matrix3d cov = Eigen::Matrix3d::Zero();
    cov(1, 1) = 4.0;
    const auto along_y = estimate_point(Eigen::Vector3d(0, 0.6, 0), cov, 400);
    CHECK(along_y.distance == doctest::Approx(0.3));
    CHECK(along_y.std_error == doctest::Approx(0.05));
}

TEST_CASE("propagator moments reproduce the direct estimator") {
    const ProcessModel model{DephasingGenerator::from_gammas({0.3, 0.1, 0.0}), compose(pauli_x(), amplitude_damping(0.3)),
                             {{WtdSpec::exponential(12.0)}, WtdSpec::erlang(2, 1.0)}};
    const auto run = settings(2.0, 0.05, 3000, 13);
    const auto moments = run_propagator_moments(model, run);
    for (const Eigen::Vector3d dir : {Eigen::Vector3d(0, 1, 0), Eigen::Vector3d(1, 0, 0), Eigen::Vector3d(0.3, -0.4, 0.8)}) {
        const auto direct = estimate_distance_curve(StatePair::antipodal(dir), model, run);
        const auto via = moments.distance_curve(dir);
        for (std::size_t j = 0; j < direct.grid.size(); ++j) {
            REQUIRE(std::abs(direct.distance[j] - via.distance[j]) < 1e-10);
            REQUIRE(std::abs(direct.std_error[j] - via.std_error[j]) < 1e-8);
        }
    }
}

TEST_CASE("too many truncated trajectories is an error") {
    auto run = settings(1.0, 0.1, 1000, 1);
    run.max_jumps = 2;
    CHECK_THROWS_AS(estimate_distance_curve(StatePair::antipodal({0, 1, 0}), markov_x(50.0), run), NumericalError);
}

TEST_CASE("invalid run settings") {
    CHECK_THROWS_AS(estimate_distance_curve(StatePair::antipodal({0, 1, 0}), markov_x(1.0), settings(1.0, 0.1, 0, 1)),
                    ParameterError);
}
