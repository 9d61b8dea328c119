#include "mocomp/geometry.hpp"

#include <algorithm>
#include <cmath>

#include "mocomp/errors.hpp"

namespace mocomp {

UnitQuaternion UnitQuaternion::normalized(double x, double y, double z, double w) {
    const double n = std::sqrt(x * x + y * y + z * z + w * w);
    if (!std::isfinite(n) || n == 0.0) {
        throw Error(ErrorCode::SchemaError, "quaternion has zero or non-finite norm");
    }
    // already unit up to rounding: keep the stored bits so load/save round-trips exactly
    if (std::abs(n - 1.0) <= 4e-16) {
        return {x, y, z, w};
    }
    return {x / n, y / n, z / n, w / n};
}

UnitQuaternion UnitQuaternion::from_axis_angle(const Vec3& axis, double angle) {
    const double n = axis.norm();
    if (n == 0.0) {
        return identity();
    }
    const Vec3 u = axis / n;
    const double s = std::sin(0.5 * angle);
    return normalized(u.x() * s, u.y() * s, u.z() * s, std::cos(0.5 * angle));
}

UnitQuaternion UnitQuaternion::from_rpy(double roll, double pitch, double yaw) {
    const auto qx = from_axis_angle(Vec3::UnitX(), roll);
    const auto qy = from_axis_angle(Vec3::UnitY(), pitch);
    const auto qz = from_axis_angle(Vec3::UnitZ(), yaw);
    return qz * qy * qx;
}

double UnitQuaternion::norm() const { return std::sqrt(x * x + y * y + z * z + w * w); }

UnitQuaternion UnitQuaternion::operator*(const UnitQuaternion& r) const {
    UnitQuaternion out{
        w * r.x + x * r.w + y * r.z - z * r.y,
        w * r.y - x * r.z + y * r.w + z * r.x,
        w * r.z + x * r.y - y * r.x + z * r.w,
        w * r.w - x * r.x - y * r.y - z * r.z,
    };
    // keep drift from accumulating across long kinematic chains
    const double n = out.norm();
    return {out.x / n, out.y / n, out.z / n, out.w / n};
}

Vec3 UnitQuaternion::rotate(const Vec3& v) const {
    const Vec3 u(x, y, z);
    const Vec3 t = 2.0 * u.cross(v);
    return v + w * t + u.cross(t);
}

double UnitQuaternion::angle() const {
    const double vec = std::sqrt(x * x + y * y + z * z);
    return 2.0 * std::atan2(vec, std::abs(w));
}

UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b_in, double s) {
    UnitQuaternion b = b_in;
    double d = a.dot(b);
    if (d < 0.0) {
        b = -b;
        d = -d;
    }
    double wa = 1.0 - s;
    double wb = s;
    if (d < 1.0 - 1e-12) {
        const double theta = std::acos(std::min(d, 1.0));
        const double sin_theta = std::sin(theta);
        wa = std::sin((1.0 - s) * theta) / sin_theta;
        wb = std::sin(s * theta) / sin_theta;
    }
    return UnitQuaternion::normalized(wa * a.x + wb * b.x, wa * a.y + wb * b.y, wa * a.z + wb * b.z,
                                      wa * a.w + wb * b.w);
}

double geodesic_angle(const UnitQuaternion& a, const UnitQuaternion& b) {
    const double d = std::min(1.0, std::abs(a.dot(b)));
    return 2.0 * std::acos(d);
}

Pose Pose::from_xyz_rpy(const Vec3& xyz, const Vec3& rpy) {
    return {xyz, UnitQuaternion::from_rpy(rpy.x(), rpy.y(), rpy.z())};
}

Pose Pose::operator*(const Pose& rhs) const {
    return {position + orientation.rotate(rhs.position), orientation * rhs.orientation};
}

}  // namespace mocomp
