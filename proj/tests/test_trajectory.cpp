#include "qrenew/errors.hpp"
#include "qrenew/trajectory.hpp"

#include <doctest.h>

#include <cmath>
#include <sstream>

using namespace qrenew;

TEST_CASE("draw_jump_times basics") {
    SUBCASE("first waiting time beyond T gives no jumps") {
        Rng rng(3);
        const auto jumps = draw_jump_times({{}, WtdSpec::exponential(1e-6)}, 1.0, 100, rng);
        CHECK(jumps.times.empty());
        CHECK_FALSE(jumps.truncated);
    }
    SUBCASE("times are strictly increasing inside (0, T]") {
        Rng rng(4);
        for (int i = 0; i < 1000; ++i) {
            const auto jumps = draw_jump_times({{WtdSpec::exponential(8.0)}, WtdSpec::erlang(2, 3.0)}, 4.0, 1000, rng);
            double last = 0.0;
            for (double t : jumps.times) {
                REQUIRE(t > last);
                REQUIRE(t <= 4.0);
                last = t;
            }
        }
    }
    SUBCASE("truncation is flagged") {
        Rng rng(5);
        const auto jumps = draw_jump_times({{}, WtdSpec::exponential(100.0)}, 1.0, 3, rng);
        CHECK(jumps.truncated);
        CHECK(jumps.times.size() == 3);
    }
    SUBCASE("invalid arguments") {
        Rng rng(1);
        CHECK_THROWS_AS(draw_jump_times({{}, WtdSpec::exponential(1.0)}, 0.0, 10, rng), ParameterError);
        CHECK_THROWS_AS(draw_jump_times({{}, WtdSpec::exponential(1.0)}, 1.0, 0, rng), ParameterError);
    }
}

TEST_CASE("Poisson jump counts") {
    const double mu = 2.0;
    const double horizon = 1.5;
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::for_stream(42, i);
        sum += static_cast<double>(draw_jump_times({{}, WtdSpec::exponential(mu)}, horizon, 10000, rng).times.size());
    }
    const double expected = mu * horizon;
    CHECK(std::abs(sum / n - expected) < 3.0 * std::sqrt(expected / n));
}

TEST_CASE("first waiting time of a modified process") {
    const double mu1 = 50.0;
    const int n = 100000;
    double sum = 0.0;
    for (int i = 0; i < n; ++i) {
        Rng rng = Rng::for_stream(8, i);
        const auto jumps = draw_jump_times({{WtdSpec::exponential(mu1)}, WtdSpec::exponential(1.0)}, 10.0, 10000, rng);
        REQUIRE(!jumps.times.empty());
        sum += jumps.times.front();
    }
    CHECK(std::abs(sum / n - 1.0 / mu1) < 3.0 * (1.0 / mu1) / std::sqrt(n));
}

TEST_CASE("evolve without jumps") {
    const TimeGrid grid(2.0, 200);
    const BlochVector start(0.3, 0.5, -0.6);
    const JumpTimes none;

    const auto frozen = evolve(start, none, DephasingGenerator{}, pauli_x(), grid);
    for (const auto& s : frozen.states) REQUIRE(s == start);

    const auto gen = DephasingGenerator::from_gammas({0.1, 0.3, 0.2});
    const auto curve = evolve(start, none, gen, pauli_x(), grid);
    REQUIRE(curve.states.size() == grid.size());
    CHECK(curve.states[0] == start);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const auto expected = propagate(gen, start, grid.at(j));
        REQUIRE((curve.states[j].vec() - expected.vec()).norm() < 1e-15);
    }
}

TEST_CASE("two x jumps return to the initial state") {
    const TimeGrid grid(1.0, 100);
    const BlochVector start(0.1, 0.7, -0.2);
    const JumpTimes jumps{{0.123, 0.456}, false};
    const auto curve = evolve(start, jumps, DephasingGenerator{}, pauli_x(), grid);
    for (std::size_t j = 0; j < grid.size(); ++j) {
        const double t = grid.at(j);
        const BlochVector expected = (t >= 0.123 && t < 0.456) ? pauli_x().apply(start) : start;
        REQUIRE(curve.states[j] == expected);
    }
}

TEST_CASE("a jump on a grid point is applied before that point is recorded") {
    const TimeGrid grid(1.0, 4);  // 0, 0.25, 0.5, ...
    const JumpTimes jumps{{grid.at(2)}, false};
    const auto curve = evolve({0, 1, 0}, jumps, DephasingGenerator{}, pauli_x(), grid);
    CHECK(curve.states[1].y() == 1.0);
    CHECK(curve.states[2].y() == -1.0);
}

TEST_CASE("refining the output grid does not change shared points") {
    const auto gen = DephasingGenerator::from_lambdas({0.9, 0.9, 0.9});
    const auto jump = compose(pauli_x(), amplitude_damping(0.3));
    const WtdSequence seq{{WtdSpec::exponential(10.0)}, WtdSpec::exponential(1.0)};
    const TimeGrid coarse(3.0, 300);
    const TimeGrid fine = coarse.refined(2);
    for (int i = 0; i < 50; ++i) {
        Rng rng = Rng::for_stream(77, i);
        const auto jumps = draw_jump_times(seq, 3.0, 1000, rng);
        const auto a = evolve({0, 1, 0}, jumps, gen, jump, coarse);
        const auto b = evolve({0, 1, 0}, jumps, gen, jump, fine);
        for (std::size_t j = 0; j < coarse.size(); ++j) {
            REQUIRE(coarse.at(j) == fine.at(2 * j));
            REQUIRE(a.states[j] == b.states[2 * j]);
        }
    }
}

TEST_CASE("y flips sign at every jump for x-containing channels") {
    const auto gen = DephasingGenerator::from_lambdas({0.9, 0.9, 0.9});
    const auto jump = compose(pauli_x(), amplitude_damping(0.3));
    const WtdSequence seq{{WtdSpec::exponential(10.0)}, WtdSpec::exponential(1.0)};
    for (int i = 0; i < 100; ++i) {
        Rng rng = Rng::for_stream(9, i);
        const auto jumps = draw_jump_times(seq, 5.0, 1000, rng);
        std::vector<double> probe{0.5 * (jumps.times.empty() ? 5.0 : jumps.times[0])};
        for (std::size_t k = 0; k < jumps.times.size(); ++k) {
            const double next = k + 1 < jumps.times.size() ? jumps.times[k + 1] : 5.0;
            probe.push_back(0.5 * (jumps.times[k] + next));
        }
        // Evaluate exactly at the probe times with a one-interval grid each.
        for (std::size_t k = 0; k < probe.size(); ++k) {
            const auto curve = evolve({0, 1, 0}, jumps, gen, jump, TimeGrid(probe[k], 1));
            const double y = curve.states.back().y();
            REQUIRE((k % 2 == 0 ? y > 0.0 : y < 0.0));
        }
    }
}

TEST_CASE("non-physical states are an invariant failure") {
    const auto inflating = custom_channel(2.0 * Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero());
    const JumpTimes jumps{{0.5}, false};
    CHECK_THROWS_AS(evolve({0, 0.9, 0}, jumps, DephasingGenerator{}, inflating, TimeGrid(1.0, 10)), InvariantError);
}

TEST_CASE("trajectory CSV") {
    const JumpTimes jumps{{0.5}, false};
    const auto curve = evolve({0, 1, 0}, jumps, DephasingGenerator{}, pauli_x(), TimeGrid(1.0, 2));
    std::ostringstream os;
    write_trajectory_csv(os, curve);
    CHECK(os.str() == "t,x,y,z\n0,0,1,0\n0.5,0,-1,0\n1,0,-1,0\n");
}
