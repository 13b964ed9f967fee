#include "qrenew/bloch.hpp"

#include "qrenew/errors.hpp"

#include <cmath>
#include <iostream>
#include <numbers>

namespace qrenew {

void warn(const std::string& message) { std::cerr << "warning: " << message << '\n'; }

double trace_distance(const BlochVector& a, const BlochVector& b) { return 0.5 * (a.vec() - b.vec()).norm(); }

StatePair StatePair::antipodal(const Eigen::Vector3d& direction) {
    const double n = direction.norm();
    if (!(n > 0.0)) throw ParameterError("antipodal pair needs a nonzero direction");
    const Eigen::Vector3d u = direction / n;
    return StatePair{BlochVector(u), BlochVector(-u)};
}

bool StatePair::is_antipodal_pure(double tol) const {
    return std::abs(plus.norm() - 1.0) <= tol && (plus.vec() + minus.vec()).norm() <= tol;
}

AffineChannel::AffineChannel(const Eigen::Matrix3d& matrix, const Eigen::Vector3d& translation, std::string label)
    : matrix_(matrix), translation_(translation), label_(std::move(label)) {}

AffineChannel AffineChannel::identity() {
    return AffineChannel(Eigen::Matrix3d::Identity(), Eigen::Vector3d::Zero(), "id");
}

bool AffineChannel::is_diagonal() const { return matrix_.isDiagonal(0.0); }

bool AffineChannel::maps_ball_into_itself(double tol) const {
    const Eigen::Matrix3Xd mesh = fibonacci_sphere(2000);
    for (Eigen::Index i = 0; i < mesh.cols(); ++i) {
        if ((matrix_ * mesh.col(i) + translation_).norm() > 1.0 + tol) return false;
    }
    return true;
}

AffineChannel amplitude_damping(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw ParameterError("amplitude damping gamma must lie in [0, 1]");
    const double s = std::sqrt(1.0 - gamma);
    return AffineChannel(Eigen::Vector3d(s, s, 1.0 - gamma).asDiagonal(), Eigen::Vector3d(0.0, 0.0, gamma), "ad");
}

AffineChannel pauli_x() {
    return AffineChannel(Eigen::Vector3d(1.0, -1.0, -1.0).asDiagonal(), Eigen::Vector3d::Zero(), "x");
}

AffineChannel compose(const AffineChannel& outer, const AffineChannel& inner) {
    return AffineChannel(outer.matrix() * inner.matrix(), outer.matrix() * inner.translation() + outer.translation(),
                         outer.label() + "-" + inner.label());
}

AffineChannel custom_channel(const Eigen::Matrix3d& matrix, const Eigen::Vector3d& translation) {
    if (!matrix.allFinite() || !translation.allFinite()) throw ParameterError("custom channel entries must be finite");
    AffineChannel channel(matrix, translation, "custom");
    if (!channel.maps_ball_into_itself()) warn("custom channel maps part of the Bloch ball outside the ball");
    return channel;
}

Eigen::Matrix3Xd fibonacci_sphere(int count) {
    Eigen::Matrix3Xd points(3, count);
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < count; ++i) {
        const double z = 1.0 - 2.0 * (i + 0.5) / count;
        const double rho = std::sqrt(1.0 - z * z);
        const double phi = golden * i;
        points.col(i) << rho * std::cos(phi), rho * std::sin(phi), z;
    }
    return points;
}

}  // namespace qrenew
