#include "mocomp/trace.hpp"

#include <algorithm>
#include <cmath>

#include "mocomp/errors.hpp"
#include "mocomp/timeseries.hpp"

namespace mocomp {
namespace {

constexpr double kStillSpeed = 1e-12;

UnitQuaternion upper_hemisphere(const UnitQuaternion& q) {
    if (q.w > 0.0) return q;
    if (q.w < 0.0) return -q;
    for (double c : {q.x, q.y, q.z}) {
        if (c > 0.0) return q;
        if (c < 0.0) return -q;
    }
    return q;
}

}  // namespace

PositionTrace position_trace(const PoseTrajectory& traj, double cone_stride) {
    ConeOptions options;
    options.stride = cone_stride;
    return position_trace(traj, options);
}

PositionTrace position_trace(const PoseTrajectory& traj, const ConeOptions& options) {
    if (traj.size() < 2) {
        throw Error(ErrorCode::TooShort, "position trace needs at least two samples");
    }
    if (!(options.stride > 0.0) || !std::isfinite(options.stride)) {
        throw Error(ErrorCode::InvalidArgument, "cone stride must be positive");
    }
    PositionTrace out;
    out.polyline.timestamps = traj.timestamps;
    out.polyline.points.reserve(traj.size());
    Vec3 lo = traj.poses.front().position;
    Vec3 hi = lo;
    for (const Pose& p : traj.poses) {
        out.polyline.points.push_back(p.position);
        lo = lo.cwiseMin(p.position);
        hi = hi.cwiseMax(p.position);
    }

    std::vector<std::vector<double>> velocity(3);
    for (int axis = 0; axis < 3; ++axis) {
        std::vector<double> v;
        v.reserve(traj.size());
        for (const Pose& p : traj.poses) v.push_back(p.position[axis]);
        velocity[static_cast<std::size_t>(axis)] = first_difference(traj.timestamps, v);
    }

    const double span = duration(traj);
    const double v_ref = options.reference_speed.value_or(trace_arc_length(out.polyline) / span);
    const double s0 = options.base_scale.value_or(0.01 * (hi - lo).norm());
    if (!(v_ref > 0.0) || !(s0 > 0.0)) {
        return out;
    }

    const auto& ts = traj.timestamps;
    for (std::size_t k = 0;; ++k) {
        const double t = ts.front() + static_cast<double>(k) * options.stride;
        if (t > ts.back() + 1e-9 * options.stride) break;
        const double tc = std::min(t, ts.back());
        auto it = std::lower_bound(ts.begin(), ts.end(), tc);
        const auto hi_idx = static_cast<std::size_t>(it - ts.begin());
        Vec3 vel;
        if (*it == tc || hi_idx == 0) {
            vel = {velocity[0][hi_idx], velocity[1][hi_idx], velocity[2][hi_idx]};
        } else {
            const std::size_t lo_idx = hi_idx - 1;
            const double s = (tc - ts[lo_idx]) / (ts[hi_idx] - ts[lo_idx]);
            for (int axis = 0; axis < 3; ++axis) {
                const auto& va = velocity[static_cast<std::size_t>(axis)];
                vel[axis] = va[lo_idx] + s * (va[hi_idx] - va[lo_idx]);
            }
        }
        const double speed = vel.norm();
        if (speed <= kStillSpeed) continue;
        const double factor = std::clamp(speed / v_ref, kMinConeScaleFactor, kMaxConeScaleFactor);
        out.cones.push_back({interpolate_at(traj, tc).position, vel / speed, s0 * factor});
    }
    return out;
}

Vec3 project_quaternion(const UnitQuaternion& q) {
    const UnitQuaternion h = upper_hemisphere(q);
    return {h.x, h.y, h.z};
}

TracePolyline quaternion_trace(const PoseTrajectory& traj) {
    TracePolyline out;
    out.timestamps = traj.timestamps;
    out.points.reserve(traj.size());
    UnitQuaternion prev;
    for (std::size_t i = 0; i < traj.size(); ++i) {
        UnitQuaternion q = traj.poses[i].orientation;
        if (i == 0) {
            q = upper_hemisphere(q);
        } else if (q.dot(prev) < 0.0) {
            q = -q;
        }
        out.points.emplace_back(q.x, q.y, q.z);
        prev = q;
    }
    return out;
}

double trace_arc_length(const TracePolyline& polyline) {
    double total = 0.0;
    for (std::size_t i = 0; i + 1 < polyline.points.size(); ++i) {
        total += (polyline.points[i + 1] - polyline.points[i]).norm();
    }
    return total;
}

DistanceRibbon distance_ribbon(const TracePolyline& a, const TracePolyline& b, const WarpingPath& path) {
    for (const auto& [i, j] : path.pairs) {
        if (i >= a.size() || j >= b.size()) {
            throw Error(ErrorCode::IndexOutOfRange, "correspondence (" + std::to_string(i) + ", " + std::to_string(j) +
                                                        ") outside traces of " + std::to_string(a.size()) + " and " +
                                                        std::to_string(b.size()) + " points");
        }
    }
    DistanceRibbon ribbon;
    for (std::size_t k = 0; k + 1 < path.pairs.size(); ++k) {
        const auto [i0, j0] = path.pairs[k];
        const auto [i1, j1] = path.pairs[k + 1];
        ribbon.quads.push_back({a.points[i0], b.points[j0], b.points[j1], a.points[i1]});
        ribbon.distances.push_back((a.points[i0] - b.points[j0]).norm());
    }
    return ribbon;
}

}  // namespace mocomp
