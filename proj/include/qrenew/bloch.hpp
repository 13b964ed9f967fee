#pragma once

#include <Eigen/Dense>

#include <string>

namespace qrenew {

inline constexpr double kBallTolerance = 1e-9;
inline constexpr double kAlgebraTolerance = 1e-12;

/// Qubit state rho = (1 + r.sigma)/2 stored as its Bloch vector r.
/// The default-constructed vector is the maximally mixed state.
class BlochVector {
public:
    BlochVector() : r_(Eigen::Vector3d::Zero()) {}
    BlochVector(double x, double y, double z) : r_(x, y, z) {}
    explicit BlochVector(const Eigen::Vector3d& r) : r_(r) {}

    double x() const { return r_.x(); }
    double y() const { return r_.y(); }
    double z() const { return r_.z(); }
    const Eigen::Vector3d& vec() const { return r_; }

    double norm() const { return r_.norm(); }
    bool is_physical(double tol = kAlgebraTolerance) const { return r_.squaredNorm() <= 1.0 + tol; }

    friend bool operator==(const BlochVector& a, const BlochVector& b) { return a.r_ == b.r_; }

private:
    Eigen::Vector3d r_;
};

/// Trace distance of two qubit states: half the Euclidean distance of their Bloch vectors.
double trace_distance(const BlochVector& a, const BlochVector& b);

/// Pair of initial states whose distinguishability is tracked in time.
struct StatePair {
    BlochVector plus;
    BlochVector minus;

    /// Orthogonal pure pair (+n, -n); `direction` need not be normalized.
    static StatePair antipodal(const Eigen::Vector3d& direction);

    bool is_antipodal_pure(double tol = kAlgebraTolerance) const;
};

/// Qubit CPTP map in Bloch form, r -> M r + c.
class AffineChannel {
public:
    AffineChannel(const Eigen::Matrix3d& matrix, const Eigen::Vector3d& translation, std::string label);

    static AffineChannel identity();

    const Eigen::Matrix3d& matrix() const { return matrix_; }
    const Eigen::Vector3d& translation() const { return translation_; }
    const std::string& label() const { return label_; }

    BlochVector apply(const BlochVector& v) const { return BlochVector(matrix_ * v.vec() + translation_); }

    bool is_diagonal() const;
    bool is_unital() const { return translation_.isZero(0.0); }

    /// Checks |M n + c| <= 1 + tol over a sampled mesh of unit vectors n.
    /// Sampling on the sphere suffices because the image of the ball is an ellipsoid.
    bool maps_ball_into_itself(double tol = kBallTolerance) const;

private:
    Eigen::Matrix3d matrix_;
    Eigen::Vector3d translation_;
    std::string label_;
};

/// Amplitude damping with Kraus pair K0 = diag(1, sqrt(1-g)), K1 = sqrt(g)|0><1|.
AffineChannel amplitude_damping(double gamma);

/// rho -> sigma_x rho sigma_x, a pi rotation about x.
AffineChannel pauli_x();

/// outer after inner.
AffineChannel compose(const AffineChannel& outer, const AffineChannel& inner);

/// User-supplied map; accepted with a warning when ball containment sampling fails.
AffineChannel custom_channel(const Eigen::Matrix3d& matrix, const Eigen::Vector3d& translation);

/// Unit vectors on a Fibonacci sphere, used for containment sampling.
Eigen::Matrix3Xd fibonacci_sphere(int count);

}  // namespace qrenew
