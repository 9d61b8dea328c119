#pragma once

#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "mocomp/geometry.hpp"
#include "mocomp/motion.hpp"

namespace mocomp {

enum class JointKind { Revolute, Continuous, Prismatic, Fixed };

const char* joint_kind_name(JointKind kind);

struct JointLimits {
    double lower = 0.0;
    double upper = 0.0;
};

struct JointSpec {
    std::string name;
    JointKind kind = JointKind::Fixed;
    std::string parent_link;
    std::string child_link;
    Pose origin;
    Vec3 axis = Vec3::UnitX();
    std::optional<JointLimits> limits;
};

/// Kinematic tree of links connected by joints.
///
/// Construct through parse_urdf() or RobotModel::build(); both verify that the
/// joints form a single tree. Immutable afterwards.
class RobotModel {
public:
    RobotModel() = default;

    /// Validates the tree and normalizes joint axes. Throws CycleError,
    /// DanglingLinkError or SchemaError.
    static RobotModel build(std::string name, std::vector<std::string> links, std::vector<JointSpec> joints);

    const std::string& name() const { return name_; }
    const std::vector<std::string>& links() const { return links_; }
    const std::vector<JointSpec>& joints() const { return joints_; }
    const std::string& root_link() const { return root_; }
    bool has_link(std::string_view link) const;

    /// Names of non-fixed joints in document order; n = actuated_joints().size().
    const std::vector<std::string>& actuated_joints() const { return actuated_names_; }
    std::size_t dof() const { return actuated_names_.size(); }
    const JointSpec& actuated_joint(std::size_t k) const { return joints_[actuated_[k]]; }
    std::optional<std::size_t> actuated_index(std::string_view joint) const;

    /// Joint indices ordered so every parent link is placed before its children.
    const std::vector<std::size_t>& traversal_order() const { return order_; }
    /// For joint index i, its slot in the configuration vector or -1 for fixed joints.
    int config_slot(std::size_t joint_index) const { return slot_[joint_index]; }

private:
    std::string name_;
    std::vector<std::string> links_;
    std::vector<JointSpec> joints_;
    std::string root_;
    std::vector<std::size_t> actuated_;
    std::vector<std::string> actuated_names_;
    std::vector<std::size_t> order_;
    std::vector<int> slot_;
};

/// Parses robot/link/joint with origin, axis and limit. Other elements are ignored.
/// Throws ParseError, UnsupportedJointType, CycleError, DanglingLinkError.
RobotModel parse_urdf(std::string_view document);

using LinkPoses = std::map<std::string, Pose>;

/// Pose of every link, root at identity. Throws DimensionMismatch.
LinkPoses forward_kinematics(const RobotModel& model, std::span<const double> config);

/// Pose of a single link. Throws DimensionMismatch, UnknownLink.
Pose link_pose(const RobotModel& model, std::span<const double> config, std::string_view link);

/// Reorders a trajectory's columns into the model's actuated-joint order.
/// Throws JointNameMismatch when the name sets differ.
JointTrajectory reorder_to_model(const RobotModel& model, const JointTrajectory& joints);

/// One pose per sample. Throws UnknownLink, JointNameMismatch.
PoseTrajectory link_pose_trajectory(const RobotModel& model, const JointTrajectory& joints, std::string_view link);

inline constexpr double kDefaultLimitMargin = 1e-6;

enum class LimitSide { AtLower, AtUpper };

const char* limit_side_name(LimitSide side);

struct LimitViolation {
    std::string joint;
    LimitSide kind;
    double start = 0.0;
    double end = 0.0;

    bool operator==(const LimitViolation&) const = default;
};

/// Maximal time spans where a joint sits within margin of (or beyond) a
/// position limit, sorted by start time. Joints without limits are skipped.
std::vector<LimitViolation> joint_limit_violations(const RobotModel& model, const JointTrajectory& joints,
                                                   double margin = kDefaultLimitMargin);

}  // namespace mocomp
