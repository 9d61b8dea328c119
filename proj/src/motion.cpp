#include "mocomp/motion.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mocomp/errors.hpp"
#include "mocomp/kinematics.hpp"

namespace mocomp {
namespace {

// Slack for query times that fall outside the span only through rounding.
constexpr double kSpanSlack = 1e-9;

double span_of(const std::vector<double>& ts) {
    if (ts.empty()) {
        throw Error(ErrorCode::EmptyMotion, "trajectory has no samples");
    }
    return ts.back() - ts.front();
}

struct Bracket {
    std::size_t lo = 0;
    std::size_t hi = 0;
    double s = 0.0;
    bool exact = false;
};

Bracket locate(const std::vector<double>& ts, double t) {
    if (ts.empty()) {
        throw Error(ErrorCode::EmptyMotion, "trajectory has no samples");
    }
    if (!(t >= ts.front() - kSpanSlack && t <= ts.back() + kSpanSlack)) {
        throw Error(ErrorCode::OutOfRange, "time " + std::to_string(t) + " outside trajectory span [" +
                                               std::to_string(ts.front()) + ", " + std::to_string(ts.back()) + "]");
    }
    t = std::clamp(t, ts.front(), ts.back());
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    const auto hi = static_cast<std::size_t>(it - ts.begin());
    if (*it == t) {
        return {hi, hi, 0.0, true};
    }
    const std::size_t lo = hi - 1;
    return {lo, hi, (t - ts[lo]) / (ts[hi] - ts[lo]), false};
}

void require_resample_input(std::size_t samples, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw Error(ErrorCode::InvalidRate, "resampling rate must be positive and finite");
    }
    if (samples < 2) {
        throw Error(ErrorCode::TooShort, "resampling needs at least two samples");
    }
}

void check_times(const std::vector<double>& ts, const std::string& where, std::vector<Diagnostic>& out) {
    if (ts.empty()) {
        out.push_back({DiagnosticKind::EmptyTrajectory, where, 0, "trajectory has no samples"});
        return;
    }
    for (std::size_t i = 0; i < ts.size(); ++i) {
        if (!std::isfinite(ts[i])) {
            out.push_back({DiagnosticKind::NonFiniteValue, where, i, "timestamp is not finite"});
        } else if (i > 0 && !(ts[i] > ts[i - 1])) {
            out.push_back({DiagnosticKind::NonMonotoneTime, where, i, "timestamp does not increase"});
        }
    }
}

}  // namespace

double duration(const JointTrajectory& traj) { return span_of(traj.timestamps); }
double duration(const PoseTrajectory& traj) { return span_of(traj.timestamps); }

double sample_rate(const std::vector<double>& timestamps) {
    if (timestamps.size() < 2) {
        return 0.0;
    }
    return static_cast<double>(timestamps.size() - 1) / (timestamps.back() - timestamps.front());
}

Configuration interpolate_at(const JointTrajectory& traj, double t) {
    const Bracket b = locate(traj.timestamps, t);
    if (b.exact) {
        return traj.configurations[b.lo];
    }
    const auto& qa = traj.configurations[b.lo];
    const auto& qb = traj.configurations[b.hi];
    Configuration out(qa.size());
    for (std::size_t k = 0; k < qa.size(); ++k) {
        out[k] = qa[k] + b.s * (qb[k] - qa[k]);
    }
    return out;
}

Pose interpolate_at(const PoseTrajectory& traj, double t) {
    const Bracket b = locate(traj.timestamps, t);
    if (b.exact) {
        return traj.poses[b.lo];
    }
    const Pose& pa = traj.poses[b.lo];
    const Pose& pb = traj.poses[b.hi];
    return {pa.position + b.s * (pb.position - pa.position), slerp(pa.orientation, pb.orientation, b.s)};
}

std::vector<double> uniform_grid(double first, double last, double rate) {
    if (!(rate > 0.0) || !std::isfinite(rate)) {
        throw Error(ErrorCode::InvalidRate, "grid rate must be positive and finite");
    }
    std::vector<double> grid;
    // A grid point within this tolerance of `last` is replaced by `last` itself.
    const double tol = 1e-9 / rate;
    for (std::size_t k = 0;; ++k) {
        const double t = first + static_cast<double>(k) / rate;
        if (t >= last - tol) {
            break;
        }
        grid.push_back(t);
    }
    grid.push_back(last);
    return grid;
}

JointTrajectory resample_at(const JointTrajectory& traj, const std::vector<double>& grid) {
    JointTrajectory out;
    out.joint_names = traj.joint_names;
    out.timestamps = grid;
    out.configurations.reserve(grid.size());
    for (double t : grid) {
        out.configurations.push_back(interpolate_at(traj, t));
    }
    return out;
}

PoseTrajectory resample_at(const PoseTrajectory& traj, const std::vector<double>& grid) {
    PoseTrajectory out;
    out.timestamps = grid;
    out.poses.reserve(grid.size());
    for (double t : grid) {
        out.poses.push_back(interpolate_at(traj, t));
    }
    return out;
}

JointTrajectory resample_uniform(const JointTrajectory& traj, double rate) {
    require_resample_input(traj.size(), rate);
    return resample_at(traj, uniform_grid(traj.timestamps.front(), traj.timestamps.back(), rate));
}

PoseTrajectory resample_uniform(const PoseTrajectory& traj, double rate) {
    require_resample_input(traj.size(), rate);
    return resample_at(traj, uniform_grid(traj.timestamps.front(), traj.timestamps.back(), rate));
}

const char* diagnostic_name(DiagnosticKind kind) {
    switch (kind) {
        case DiagnosticKind::EmptyTrajectory: return "EmptyTrajectory";
        case DiagnosticKind::NonMonotoneTime: return "NonMonotoneTime";
        case DiagnosticKind::NonFiniteValue: return "NonFiniteValue";
        case DiagnosticKind::JointCountMismatch: return "JointCountMismatch";
        case DiagnosticKind::UnknownJointName: return "UnknownJointName";
        case DiagnosticKind::MissingJoint: return "MissingJoint";
        case DiagnosticKind::UnknownEndEffector: return "UnknownEndEffector";
    }
    return "Unknown";
}

std::vector<Diagnostic> validate(const Motion& motion, const RobotModel& model) {
    std::vector<Diagnostic> out;
    const JointTrajectory& joints = motion.joints;

    if (joints.configurations.size() != joints.timestamps.size()) {
        out.push_back({DiagnosticKind::JointCountMismatch, "joints", 0,
                       "configuration count differs from timestamp count"});
    }
    check_times(joints.timestamps, "joints", out);

    const std::size_t n = model.dof();
    if (joints.dof() != n) {
        out.push_back({DiagnosticKind::JointCountMismatch, "joints", 0,
                       "trajectory names " + std::to_string(joints.dof()) + " joints, robot has " +
                           std::to_string(n)});
    }
    for (std::size_t i = 0; i < joints.configurations.size(); ++i) {
        const auto& q = joints.configurations[i];
        if (q.size() != n) {
            out.push_back({DiagnosticKind::JointCountMismatch, "joints", i,
                           "configuration has " + std::to_string(q.size()) + " values, robot has " +
                               std::to_string(n) + " joints"});
            continue;
        }
        if (std::any_of(q.begin(), q.end(), [](double v) { return !std::isfinite(v); })) {
            out.push_back({DiagnosticKind::NonFiniteValue, "joints", i, "joint value is not finite"});
        }
    }

    std::set<std::string> seen;
    for (const auto& name : joints.joint_names) {
        if (!model.actuated_index(name)) {
            out.push_back({DiagnosticKind::UnknownJointName, "joints", 0, "robot has no actuated joint '" + name + "'"});
        }
        seen.insert(name);
    }
    for (const auto& name : model.actuated_joints()) {
        if (!seen.count(name) && joints.dof() == n) {
            out.push_back({DiagnosticKind::MissingJoint, "joints", 0, "trajectory lacks joint '" + name + "'"});
        }
    }
    if (!motion.ee_link.empty() && !model.has_link(motion.ee_link)) {
        out.push_back({DiagnosticKind::UnknownEndEffector, "ee_link", 0, "robot has no link '" + motion.ee_link + "'"});
    }

    for (const auto& [track_name, track] : motion.object_tracks) {
        const std::string where = "object_tracks/" + track_name;
        if (track.poses.size() != track.timestamps.size()) {
            out.push_back({DiagnosticKind::JointCountMismatch, where, 0, "pose count differs from timestamp count"});
        }
        check_times(track.timestamps, where, out);
        for (std::size_t i = 0; i < track.poses.size(); ++i) {
            const Pose& p = track.poses[i];
            const auto& q = p.orientation;
            if (!p.position.allFinite() || !std::isfinite(q.x + q.y + q.z + q.w)) {
                out.push_back({DiagnosticKind::NonFiniteValue, where, i, "pose is not finite"});
            }
        }
    }
    return out;
}

}  // namespace mocomp
