#pragma once

#include <cstddef>
#include <map>
#include <string>
#include <vector>

#include "mocomp/geometry.hpp"

namespace mocomp {

class RobotModel;

/// Joint values for one sample; radians for revolute joints, meters for prismatic.
using Configuration = std::vector<double>;

/// Timestamped joint configurations of an n-joint robot.
struct JointTrajectory {
    std::vector<std::string> joint_names;
    std::vector<double> timestamps;
    std::vector<Configuration> configurations;

    std::size_t size() const { return timestamps.size(); }
    std::size_t dof() const { return joint_names.size(); }
    bool empty() const { return timestamps.empty(); }

    bool operator==(const JointTrajectory&) const = default;
};

/// Timestamped rigid poses in the world frame.
struct PoseTrajectory {
    std::vector<double> timestamps;
    std::vector<Pose> poses;

    std::size_t size() const { return timestamps.size(); }
    bool empty() const { return timestamps.empty(); }

    bool operator==(const PoseTrajectory&) const = default;
};

/// One recorded or planned motion: a robot's joint trajectory plus any
/// tracked objects (manipulated items, an operator's hand) in world frame.
struct Motion {
    std::string id;
    std::string name;
    std::string robot_ref;
    std::string ee_link;
    JointTrajectory joints;
    std::map<std::string, PoseTrajectory> object_tracks;

    bool operator==(const Motion&) const = default;
};

/// Last timestamp minus first. Throws EmptyMotion for empty input.
double duration(const JointTrajectory& traj);
double duration(const PoseTrajectory& traj);

/// Samples per second implied by the endpoints: (size - 1) / duration.
/// Zero for single-sample trajectories.
double sample_rate(const std::vector<double>& timestamps);

/// Linear interpolation of joint values. Exact samples are returned verbatim.
/// Throws OutOfRange outside [first, last].
Configuration interpolate_at(const JointTrajectory& traj, double t);

/// Linear interpolation of position, shortest-arc slerp of orientation.
Pose interpolate_at(const PoseTrajectory& traj, double t);

/// first + k / rate for k = 0, 1, ... strictly before last, then last itself.
std::vector<double> uniform_grid(double first, double last, double rate);

/// Throws InvalidRate for rate <= 0 and TooShort for fewer than two samples.
JointTrajectory resample_uniform(const JointTrajectory& traj, double rate);
PoseTrajectory resample_uniform(const PoseTrajectory& traj, double rate);

/// Resample onto an explicit grid that lies within the trajectory span.
JointTrajectory resample_at(const JointTrajectory& traj, const std::vector<double>& grid);
PoseTrajectory resample_at(const PoseTrajectory& traj, const std::vector<double>& grid);

enum class DiagnosticKind {
    EmptyTrajectory,
    NonMonotoneTime,
    NonFiniteValue,
    JointCountMismatch,
    UnknownJointName,
    MissingJoint,
    UnknownEndEffector,
};

const char* diagnostic_name(DiagnosticKind kind);

struct Diagnostic {
    DiagnosticKind kind;
    /// "joints" or "object_tracks/<name>"
    std::string where;
    /// Sample index for per-sample findings, otherwise 0.
    std::size_t index = 0;
    std::string message;
};

/// Structural checks of a motion against its robot. An empty result means valid.
std::vector<Diagnostic> validate(const Motion& motion, const RobotModel& model);

}  // namespace mocomp
