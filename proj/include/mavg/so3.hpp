#ifndef MAVG_SO3_HPP
#define MAVG_SO3_HPP

#include <vector>

#include <Eigen/Core>

#include "mavg/errors.hpp"

namespace mavg {

class Rotation3;

/// Unit quaternion with a canonical sign: w >= 0, and if w == 0 the first
/// nonzero of (x, y, z) is positive. The canonical representative makes the
/// q / -q double cover invisible to serialization and comparison.
class UnitQuaternion {
public:
    UnitQuaternion() : w_(1.0), x_(0.0), y_(0.0), z_(0.0) {}

    /// Normalizes and canonicalizes. Throws DegenerateMatrix on a
    /// near-zero quaternion.
    UnitQuaternion(double w, double x, double y, double z);

    double w() const { return w_; }
    double x() const { return x_; }
    double y() const { return y_; }
    double z() const { return z_; }

    double norm() const;

    Rotation3 to_rotation() const;
    static UnitQuaternion from_rotation(const Rotation3& r);

    bool approx_equal(const UnitQuaternion& other, double tol) const;

private:
    double w_, x_, y_, z_;
};

/// Element of SO(3). Construction checks orthonormality and det = +1, so a
/// Rotation3 value is always a valid rotation.
class Rotation3 {
public:
    Rotation3() : m_(Eigen::Matrix3d::Identity()) {}

    /// Throws std::invalid_argument unless R^T R = I and det R = 1
    /// within 1e-9.
    explicit Rotation3(const Eigen::Matrix3d& m);

    static Rotation3 identity() { return Rotation3(); }

    const Eigen::Matrix3d& matrix() const { return m_; }

    Rotation3 transpose() const;
    Rotation3 operator*(const Rotation3& rhs) const;
    Eigen::Vector3d operator*(const Eigen::Vector3d& v) const { return m_ * v; }

    bool is_valid(double tol) const;

private:
    struct Unchecked {};
    Rotation3(const Eigen::Matrix3d& m, Unchecked) : m_(m) {}

    Eigen::Matrix3d m_;

    friend Rotation3 nearest_rotation(const Eigen::Matrix3d&);
    friend class UnitQuaternion;
};

/// Unit-length direction vector.
class UnitVector3 {
public:
    UnitVector3() : v_(1.0, 0.0, 0.0) {}

    /// Normalizes; throws DegenerateMatrix on a near-zero input.
    explicit UnitVector3(const Eigen::Vector3d& v);
    UnitVector3(double x, double y, double z) : UnitVector3(Eigen::Vector3d(x, y, z)) {}

    const Eigen::Vector3d& vec() const { return v_; }
    double x() const { return v_.x(); }
    double y() const { return v_.y(); }
    double z() const { return v_.z(); }

    UnitVector3 negated() const;

private:
    Eigen::Vector3d v_;
};

/// Geodesic distance on SO(3): arccos(clamp((trace(a^T b) - 1) / 2)),
/// in [0, pi]. Bi-invariant and symmetric.
double geodesic_angle(const Rotation3& a, const Rotation3& b);

/// Angle between two unit directions: arccos(clamp(<u, v>)).
double angular_distance(const UnitVector3& u, const UnitVector3& v);
double angular_distance(const Eigen::Vector3d& u, const Eigen::Vector3d& v);

/// Frobenius (chordal) distance ||a - b||_F, in [0, 2*sqrt(2)].
double chordal_distance(const Rotation3& a, const Rotation3& b);

/// Orthogonal polar factor of M with det corrected to +1 by negating the
/// direction of the smallest singular value. Throws DegenerateMatrix when
/// two or more singular values fall below 1e-12.
Rotation3 nearest_rotation(const Eigen::Matrix3d& m);

/// Weighted L2-chordal mean: nearest_rotation(sum_i w_i R_i). Requires at
/// least one strictly positive weight; DegenerateMatrix propagates from the
/// projection (e.g. two equally weighted antipodal rotations).
Rotation3 chordal_mean(const std::vector<Rotation3>& rotations,
                       const std::vector<double>& weights);

/// Rodrigues rotation about a unit axis. The angle = pi case reduces to
/// 2*a*a^T - I up to one ulp of sin(pi).
Rotation3 rot_about_axis(const UnitVector3& axis, double angle);

/// Rotation halfway along the geodesic from a to b.
Rotation3 geodesic_midpoint(const Rotation3& a, const Rotation3& b);

inline double deg2rad(double d) { return d * M_PI / 180.0; }
inline double rad2deg(double r) { return r * 180.0 / M_PI; }

} // namespace mavg

#endif // MAVG_SO3_HPP
