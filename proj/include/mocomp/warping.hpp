#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mocomp/geometry.hpp"
#include "mocomp/kinematics.hpp"
#include "mocomp/motion.hpp"

namespace mocomp {

/// Weighted sum of per-pair distances used inside DTW.
struct LocalCost {
    double joint_l2 = 0.0;
    double ee_position = 0.0;
    double quaternion_geodesic = 0.0;

    static LocalCost joint() { return {1.0, 0.0, 0.0}; }
    static LocalCost ee() { return {0.0, 1.0, 0.0}; }
    static LocalCost quaternion() { return {0.0, 0.0, 1.0}; }

    /// "joint_l2", "ee_position" (alias "ee"), "quaternion_geodesic" (alias "quat").
    static LocalCost from_name(std::string_view name);
    /// Canonical name for single-term costs, "weighted_sum" otherwise.
    std::string name() const;

    /// Throws InvalidArgument for negative or all-zero weights.
    void check() const;

    bool operator==(const LocalCost&) const = default;
};

/// Per-sample quantities a LocalCost can compare. Unavailable quantities stay empty.
struct AlignmentSignal {
    std::vector<double> timestamps;
    std::vector<Configuration> joints;
    std::vector<Vec3> positions;
    std::vector<UnitQuaternion> orientations;

    std::size_t size() const { return timestamps.size(); }
};

/// Joint values plus the FK pose of `ee_link` for every sample.
AlignmentSignal signal_from_joints(const RobotModel& model, const JointTrajectory& joints, std::string_view ee_link);
/// Positions and orientations of a pose track (no joint values).
AlignmentSignal signal_from_poses(const PoseTrajectory& poses);

/// Sample grids that bring two trajectories to a common rate, the higher of the two.
/// Returns the inputs unchanged when their rates already agree.
std::pair<std::vector<double>, std::vector<double>> common_rate_grids(const std::vector<double>& a,
                                                                      const std::vector<double>& b);

struct WarpingPath {
    std::vector<std::pair<std::size_t, std::size_t>> pairs;
    double total_cost = 0.0;
    std::vector<double> timestamps_a;
    std::vector<double> timestamps_b;
};

struct DtwOptions {
    /// Sakoe-Chiba radius in samples around the scaled diagonal; unconstrained when empty.
    std::optional<std::size_t> band;
};

/// Classic symmetric DTW over an n x m local-cost function. Backtracking
/// prefers the diagonal step, then (0,1), then (1,0) on ties.
/// Throws EmptyMotion for n or m of zero, InvalidArgument when the band
/// leaves the end cell unreachable.
WarpingPath dtw(std::size_t n, std::size_t m, const std::function<double(std::size_t, std::size_t)>& cost,
                const DtwOptions& options = {});

/// Local cost between sample i of a and sample j of b.
double local_cost(const AlignmentSignal& a, std::size_t i, const AlignmentSignal& b, std::size_t j,
                  const LocalCost& cost);

/// Aligns two signals. Throws DimensionMismatch when the cost needs a quantity
/// one side lacks or joint counts differ, EmptyMotion for empty input.
WarpingPath dtw_align(const AlignmentSignal& a, const AlignmentSignal& b, const LocalCost& cost,
                      const DtwOptions& options = {});

struct WarpingCurve {
    /// (t_a, t_b) per path pair.
    std::vector<std::pair<double, double>> points;
    /// Endpoints of the equal-time reference line.
    std::pair<double, double> diagonal_start;
    std::pair<double, double> diagonal_end;
};

WarpingCurve warping_curve(const WarpingPath& path);

enum class Subject { A, B };

struct RelativeSpeedSeries {
    std::vector<double> timestamps;
    /// d t_reference / d t_subject; > 1 means the subject is faster.
    std::vector<double> ratio;
    /// clamp(log2(ratio) / 2, -1, 1): positive = faster (red), negative = slower (blue).
    std::vector<double> color_scalar;
};

/// Half-width, in subject samples, of the window used to estimate speed ratios.
inline constexpr std::size_t kRelativeSpeedHalfWindow = 10;

/// Speed of `subject` relative to the other motion, one value per subject sample.
/// Throws DegeneratePath when either side has a single sample.
RelativeSpeedSeries relative_speed(const WarpingPath& path, Subject subject);

/// Maps a time on `from`'s timeline to the corresponding time on the other.
/// Piecewise linear over the warping curve, runs collapsed to their midpoint;
/// span endpoints map to span endpoints. Throws OutOfRange.
double remap_time(const WarpingPath& path, double t, Subject from = Subject::A);

/// Pairs (k, k) for two equally long sequences; total_cost 0.
/// Throws DimensionMismatch when the lengths differ.
WarpingPath identity_path(const std::vector<double>& timestamps_a, const std::vector<double>& timestamps_b);

/// Path with the roles of a and b exchanged.
WarpingPath transpose(const WarpingPath& path);

}  // namespace mocomp
