#pragma once

#include "qrenew/bloch.hpp"

#include <array>

namespace qrenew {

/// Unital Pauli-dephasing generator L[rho] = sum_k gamma_k/2 (sigma_k rho sigma_k - rho).
/// Its semigroup contracts each Bloch axis independently, e^{Lt} sigma_i = e^{-lambda_i t} sigma_i,
/// with lambda_i = gamma_j + gamma_k.
class DephasingGenerator {
public:
    DephasingGenerator() = default;

    static DephasingGenerator from_gammas(const std::array<double, 3>& gammas);
    /// Inverts lambda_i = gamma_j + gamma_k; throws if any implied gamma is negative.
    static DephasingGenerator from_lambdas(const std::array<double, 3>& lambdas);

    const std::array<double, 3>& gammas() const { return gammas_; }
    const std::array<double, 3>& lambdas() const { return lambdas_; }
    bool is_zero() const { return lambdas_[0] == 0.0 && lambdas_[1] == 0.0 && lambdas_[2] == 0.0; }

    /// Per-axis contraction factors e^{-lambda_i dt}.
    Eigen::Vector3d decay(double dt) const;

private:
    std::array<double, 3> gammas_{0.0, 0.0, 0.0};
    std::array<double, 3> lambdas_{0.0, 0.0, 0.0};
};

BlochVector propagate(const DephasingGenerator& g, const BlochVector& v, double dt);

AffineChannel as_channel(const DephasingGenerator& g, double dt);

}  // namespace qrenew
