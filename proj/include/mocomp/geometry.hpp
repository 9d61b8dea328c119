#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace mocomp {

using Vec3 = Eigen::Vector3d;

/// Rotation as a unit quaternion, stored (x, y, z, w).
///
/// Aggregate initialization does not normalize; use normalized() for data
/// coming from outside. q and -q describe the same rotation and are kept
/// as given: hemisphere choice is made where it matters (interpolation,
/// traces), not at storage time.
struct UnitQuaternion {
    double x = 0.0;
    double y = 0.0;
    double z = 0.0;
    double w = 1.0;

    /// Throws Error(SchemaError) for zero or non-finite input.
    static UnitQuaternion normalized(double x, double y, double z, double w);
    static UnitQuaternion identity() { return {}; }
    static UnitQuaternion from_axis_angle(const Vec3& axis, double angle);
    /// URDF convention: fixed axes, roll about x, then pitch about y, then yaw about z.
    static UnitQuaternion from_rpy(double roll, double pitch, double yaw);

    double norm() const;
    double dot(const UnitQuaternion& other) const { return x * other.x + y * other.y + z * other.z + w * other.w; }
    UnitQuaternion operator-() const { return {-x, -y, -z, -w}; }
    UnitQuaternion operator*(const UnitQuaternion& rhs) const;
    Vec3 rotate(const Vec3& v) const;
    /// Rotation angle in [0, pi].
    double angle() const;

    bool operator==(const UnitQuaternion&) const = default;
};

/// Spherical linear interpolation along the shortest arc.
UnitQuaternion slerp(const UnitQuaternion& a, const UnitQuaternion& b, double s);

/// Geodesic angle between two rotations, 2 acos(|<a, b>|), in [0, pi].
double geodesic_angle(const UnitQuaternion& a, const UnitQuaternion& b);

struct Pose {
    Vec3 position = Vec3::Zero();
    UnitQuaternion orientation;

    static Pose identity() { return {}; }
    static Pose from_xyz_rpy(const Vec3& xyz, const Vec3& rpy);

    /// this ∘ rhs: rhs expressed in this frame.
    Pose operator*(const Pose& rhs) const;

    bool operator==(const Pose& other) const {
        return position == other.position && orientation == other.orientation;
    }
};

}  // namespace mocomp
