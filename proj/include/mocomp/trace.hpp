#pragma once

#include <array>
#include <optional>
#include <vector>

#include "mocomp/geometry.hpp"
#include "mocomp/motion.hpp"
#include "mocomp/warping.hpp"

namespace mocomp {

struct TracePolyline {
    std::vector<double> timestamps;
    std::vector<Vec3> points;

    std::size_t size() const { return points.size(); }
};

/// Direction-and-speed marker placed along a position trace.
struct ConeGlyph {
    Vec3 position;
    Vec3 direction;
    double scale = 0.0;
};

struct PositionTrace {
    TracePolyline polyline;
    std::vector<ConeGlyph> cones;
};

struct ConeOptions {
    /// Time between cones, seconds.
    double stride = 0.1;
    /// Speed mapped to the base scale; mean speed of the trajectory when empty.
    std::optional<double> reference_speed;
    /// Base cone size in meters; 1% of the trace bounding-box diagonal when empty.
    std::optional<double> base_scale;
};

inline constexpr double kMinConeScaleFactor = 0.2;
inline constexpr double kMaxConeScaleFactor = 3.0;

/// Raw positions plus cones at a uniform time stride whose size tracks speed.
/// Instants with zero velocity get no cone. Throws TooShort (< 2 samples),
/// InvalidArgument (stride <= 0).
PositionTrace position_trace(const PoseTrajectory& traj, const ConeOptions& options);
PositionTrace position_trace(const PoseTrajectory& traj, double cone_stride);

/// Vector part of q after choosing the w >= 0 hemisphere: sin(angle/2) * axis.
Vec3 project_quaternion(const UnitQuaternion& q);

/// Sign-continuous projected orientations, seeded by the first sample's hemisphere.
TracePolyline quaternion_trace(const PoseTrajectory& traj);

double trace_arc_length(const TracePolyline& polyline);

/// Quad strip filling the gap between two traces under a correspondence.
struct DistanceRibbon {
    /// Corners (a_i, b_j, b_j', a_i') for consecutive path pairs.
    std::vector<std::array<Vec3, 4>> quads;
    /// Distance |a_i - b_j| along each quad's leading edge.
    std::vector<double> distances;
};

/// Throws IndexOutOfRange when the path addresses points the traces lack.
DistanceRibbon distance_ribbon(const TracePolyline& a, const TracePolyline& b, const WarpingPath& path);

}  // namespace mocomp
