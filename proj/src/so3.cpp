#include "mavg/so3.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Dense>

namespace mavg {

namespace {

constexpr double kRenormSkip = 4e-15; // |n^2 - 1| below this: division is a no-op

double clamp_unit(double x) { return std::clamp(x, -1.0, 1.0); }

} // namespace

UnitQuaternion::UnitQuaternion(double w, double x, double y, double z)
    : w_(w), x_(x), y_(y), z_(z) {
    const double n2 = w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_;
    if (n2 < 1e-24) {
        throw DegenerateMatrix("cannot normalize a near-zero quaternion");
    }
    // Skip the division when already unit so that parse(serialize(q))
    // reproduces q bit for bit.
    if (std::abs(n2 - 1.0) > kRenormSkip) {
        const double inv = 1.0 / std::sqrt(n2);
        w_ *= inv;
        x_ *= inv;
        y_ *= inv;
        z_ *= inv;
    }
    const bool flip = (w_ < 0.0) ||
                      (w_ == 0.0 && (x_ < 0.0 || (x_ == 0.0 && (y_ < 0.0 || (y_ == 0.0 && z_ < 0.0)))));
    if (flip) {
        w_ = -w_;
        x_ = -x_;
        y_ = -y_;
        z_ = -z_;
    }
}

double UnitQuaternion::norm() const {
    return std::sqrt(w_ * w_ + x_ * x_ + y_ * y_ + z_ * z_);
}

Rotation3 UnitQuaternion::to_rotation() const {
    const double w = w_, x = x_, y = y_, z = z_;
    Eigen::Matrix3d m;
    m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
         2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
         2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
    return Rotation3(m, Rotation3::Unchecked{});
}

UnitQuaternion UnitQuaternion::from_rotation(const Rotation3& r) {
    // Shepperd's method: pick the largest of the four squared components.
    const Eigen::Matrix3d& m = r.matrix();
    const double t = m.trace();
    double w, x, y, z;
    if (t > 0.0) {
        double s = std::sqrt(t + 1.0) * 2.0;
        w = 0.25 * s;
        x = (m(2, 1) - m(1, 2)) / s;
        y = (m(0, 2) - m(2, 0)) / s;
        z = (m(1, 0) - m(0, 1)) / s;
    } else if (m(0, 0) > m(1, 1) && m(0, 0) > m(2, 2)) {
        double s = std::sqrt(1.0 + m(0, 0) - m(1, 1) - m(2, 2)) * 2.0;
        w = (m(2, 1) - m(1, 2)) / s;
        x = 0.25 * s;
        y = (m(0, 1) + m(1, 0)) / s;
        z = (m(0, 2) + m(2, 0)) / s;
    } else if (m(1, 1) > m(2, 2)) {
        double s = std::sqrt(1.0 + m(1, 1) - m(0, 0) - m(2, 2)) * 2.0;
        w = (m(0, 2) - m(2, 0)) / s;
        x = (m(0, 1) + m(1, 0)) / s;
        y = 0.25 * s;
        z = (m(1, 2) + m(2, 1)) / s;
    } else {
        double s = std::sqrt(1.0 + m(2, 2) - m(0, 0) - m(1, 1)) * 2.0;
        w = (m(1, 0) - m(0, 1)) / s;
        x = (m(0, 2) + m(2, 0)) / s;
        y = (m(1, 2) + m(2, 1)) / s;
        z = 0.25 * s;
    }
    return UnitQuaternion(w, x, y, z);
}

bool UnitQuaternion::approx_equal(const UnitQuaternion& other, double tol) const {
    return std::abs(w_ - other.w_) <= tol && std::abs(x_ - other.x_) <= tol &&
           std::abs(y_ - other.y_) <= tol && std::abs(z_ - other.z_) <= tol;
}

Rotation3::Rotation3(const Eigen::Matrix3d& m) : m_(m) {
    if (!is_valid(1e-9)) {
        throw std::invalid_argument("matrix is not a rotation (orthonormality or det check failed)");
    }
}

bool Rotation3::is_valid(double tol) const {
    const Eigen::Matrix3d gram = m_.transpose() * m_;
    if (((gram - Eigen::Matrix3d::Identity()).array().abs() > tol).any()) return false;
    return std::abs(m_.determinant() - 1.0) <= tol;
}

Rotation3 Rotation3::transpose() const {
    return Rotation3(m_.transpose(), Unchecked{});
}

Rotation3 Rotation3::operator*(const Rotation3& rhs) const {
    return Rotation3(m_ * rhs.m_, Unchecked{});
}

UnitVector3::UnitVector3(const Eigen::Vector3d& v) : v_(v) {
    const double n2 = v_.squaredNorm();
    if (n2 < 1e-24) {
        throw DegenerateMatrix("cannot normalize a near-zero vector");
    }
    if (std::abs(n2 - 1.0) > kRenormSkip) {
        v_ /= std::sqrt(n2);
    }
}

UnitVector3 UnitVector3::negated() const {
    UnitVector3 out;
    out.v_ = -v_;
    return out;
}

double geodesic_angle(const Rotation3& a, const Rotation3& b) {
    const double t = (a.matrix().transpose() * b.matrix()).trace();
    return std::acos(clamp_unit((t - 1.0) / 2.0));
}

double angular_distance(const UnitVector3& u, const UnitVector3& v) {
    return std::acos(clamp_unit(u.vec().dot(v.vec())));
}

double angular_distance(const Eigen::Vector3d& u, const Eigen::Vector3d& v) {
    const double nn = u.norm() * v.norm();
    if (nn < 1e-24) throw DegenerateMatrix("angular_distance of near-zero vector");
    return std::acos(clamp_unit(u.dot(v) / nn));
}

double chordal_distance(const Rotation3& a, const Rotation3& b) {
    return (a.matrix() - b.matrix()).norm();
}

Rotation3 nearest_rotation(const Eigen::Matrix3d& m) {
    Eigen::JacobiSVD<Eigen::Matrix3d> svd(m, Eigen::ComputeFullU | Eigen::ComputeFullV);
    const Eigen::Vector3d sv = svd.singularValues();
    if (sv(1) < 1e-12) {
        throw DegenerateMatrix("SO(3) projection is ambiguous: rank deficit");
    }
    Eigen::Matrix3d u = svd.matrixU();
    const Eigen::Matrix3d v = svd.matrixV();
    Eigen::Vector3d d(1.0, 1.0, (u * v.transpose()).determinant() < 0.0 ? -1.0 : 1.0);
    return Rotation3(u * d.asDiagonal() * v.transpose(), Rotation3::Unchecked{});
}

Rotation3 chordal_mean(const std::vector<Rotation3>& rotations,
                       const std::vector<double>& weights) {
    if (rotations.empty() || rotations.size() != weights.size()) {
        throw std::invalid_argument("chordal_mean needs matching non-empty inputs");
    }
    Eigen::Matrix3d acc = Eigen::Matrix3d::Zero();
    bool any_positive = false;
    for (std::size_t i = 0; i < rotations.size(); ++i) {
        if (weights[i] < 0.0) throw std::invalid_argument("chordal_mean weight < 0");
        if (weights[i] > 0.0) any_positive = true;
        acc += weights[i] * rotations[i].matrix();
    }
    if (!any_positive) throw std::invalid_argument("chordal_mean needs a positive weight");
    return nearest_rotation(acc);
}

Rotation3 rot_about_axis(const UnitVector3& axis, double angle) {
    const Eigen::Vector3d& a = axis.vec();
    Eigen::Matrix3d k;
    k << 0.0, -a.z(), a.y(),
         a.z(), 0.0, -a.x(),
         -a.y(), a.x(), 0.0;
    const Eigen::Matrix3d m = Eigen::Matrix3d::Identity() + std::sin(angle) * k +
                              (1.0 - std::cos(angle)) * (k * k);
    return Rotation3(m);
}

Rotation3 geodesic_midpoint(const Rotation3& a, const Rotation3& b) {
    const Rotation3 rel = a.transpose() * b;
    const UnitQuaternion q = UnitQuaternion::from_rotation(rel);
    const Eigen::Vector3d v(q.x(), q.y(), q.z());
    const double vn = v.norm();
    if (vn < 1e-11) return a; // a and b agree to ~2e-11 rad
    const double angle = 2.0 * std::atan2(vn, q.w());
    return a * rot_about_axis(UnitVector3(v / vn), angle / 2.0);
}

} // namespace mavg
