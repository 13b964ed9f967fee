#include "qrenew/dephasing.hpp"

#include "qrenew/errors.hpp"

#include <cmath>

namespace qrenew {

namespace {

void require_nonnegative_dt(double dt) {
    if (!(dt >= 0.0)) throw ParameterError("propagation time must be nonnegative");
}

}  // namespace

DephasingGenerator DephasingGenerator::from_gammas(const std::array<double, 3>& gammas) {
    for (double g : gammas) {
        if (!(g >= 0.0) || !std::isfinite(g)) throw ParameterError("dephasing rates gamma_k must be finite and >= 0");
    }
    DephasingGenerator gen;
    gen.gammas_ = gammas;
    gen.lambdas_ = {gammas[1] + gammas[2], gammas[0] + gammas[2], gammas[0] + gammas[1]};
    return gen;
}

DephasingGenerator DephasingGenerator::from_lambdas(const std::array<double, 3>& lambdas) {
    const auto& l = lambdas;
    const std::array<double, 3> gammas{0.5 * (l[1] + l[2] - l[0]), 0.5 * (l[0] + l[2] - l[1]),
                                       0.5 * (l[0] + l[1] - l[2])};
    for (double g : gammas) {
        if (g < -1e-12 || !std::isfinite(g)) {
            throw ParameterError("lambdas do not correspond to nonnegative dephasing rates gamma_k");
        }
    }
    DephasingGenerator gen;
    gen.gammas_ = {std::max(gammas[0], 0.0), std::max(gammas[1], 0.0), std::max(gammas[2], 0.0)};
    // Keep the lambdas exactly as given; they are what the propagator uses.
    gen.lambdas_ = lambdas;
    return gen;
}

Eigen::Vector3d DephasingGenerator::decay(double dt) const {
    return {std::exp(-lambdas_[0] * dt), std::exp(-lambdas_[1] * dt), std::exp(-lambdas_[2] * dt)};
}

BlochVector propagate(const DephasingGenerator& g, const BlochVector& v, double dt) {
    require_nonnegative_dt(dt);
    return BlochVector(g.decay(dt).cwiseProduct(v.vec()));
}

AffineChannel as_channel(const DephasingGenerator& g, double dt) {
    require_nonnegative_dt(dt);
    return AffineChannel(g.decay(dt).asDiagonal(), Eigen::Vector3d::Zero(), "dephasing");
}

}  // namespace qrenew
