#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "mocomp/kinematics.hpp"
#include "mocomp/motion.hpp"
#include "mocomp/warping.hpp"

namespace mocomp {

struct ScalarSeries {
    std::string name;
    std::string unit;
    std::vector<double> timestamps;
    std::vector<double> values;

    std::size_t size() const { return values.size(); }

    bool operator==(const ScalarSeries&) const = default;
};

/// One differentiation pass: central differences inside, one-sided at both ends.
/// Requires at least two samples.
std::vector<double> first_difference(const std::vector<double>& timestamps, const std::vector<double>& values);

/// Repeated first_difference, order in {1, 2, 3}. Throws TooShort when
/// the series has fewer than order + 1 samples, InvalidArgument for other orders.
ScalarSeries derivative(const ScalarSeries& series, int order);

enum class SmoothingMethod { MovingAverage, Exponential };

struct Smoothing {
    SmoothingMethod method = SmoothingMethod::MovingAverage;
    /// Odd window length in samples (moving average).
    int window = 1;
    /// Weight of the newest sample in (0, 1] (exponential).
    double alpha = 1.0;

    static Smoothing moving_average(int window) { return {SmoothingMethod::MovingAverage, window, 1.0}; }
    static Smoothing exponential(double alpha) { return {SmoothingMethod::Exponential, 1, alpha}; }
    /// "ma:<odd window>" or "ema:<alpha>". Throws InvalidWindow.
    static Smoothing parse(std::string_view text);
    std::string tag() const;
};

/// Throws InvalidWindow for an even or non-positive window, or alpha outside (0, 1].
ScalarSeries smooth(const ScalarSeries& series, const Smoothing& filter);

/// Align by resampling both sides onto the coarser of their two rates.
struct ResampledAlignment {};

using SeriesAlignment = std::variant<WarpingPath, ResampledAlignment>;

/// a - b. Along a warping path: one sample per pair at a's timestamp (so
/// timestamps repeat across vertical runs). Resampled: both on a common grid.
/// Throws SpanMismatch, IndexOutOfRange.
ScalarSeries difference_series(const ScalarSeries& a, const ScalarSeries& b, const SeriesAlignment& alignment);

/// Euclidean distance between corresponding positions.
ScalarSeries cartesian_distance_series(const PoseTrajectory& a, const PoseTrajectory& b,
                                       const SeriesAlignment& alignment);

/// Shortest distance from p to a polyline (a single point counts as a polyline).
double distance_to_polyline(const Vec3& p, const std::vector<Vec3>& polyline);

/// Summary numbers for one motion. The formulas are this library's own:
///   duration           last - first joint timestamp
///   ee_path_length     arc length of the FK end-effector positions
///   jerk_rms           RMS norm of the third derivative of ee position, over
///                      samples at least three steps from either end (all
///                      samples when the motion is shorter than seven)
///   tracking_error_rms RMS distance from each ee sample to the reference polyline
struct MotionMetrics {
    double duration = 0.0;
    double ee_path_length = 0.0;
    double jerk_rms = 0.0;
    std::optional<double> tracking_error_rms;
};

MotionMetrics motion_metrics(const Motion& motion, const RobotModel& model, std::string_view ee_link,
                             const PoseTrajectory* reference_path = nullptr);

}  // namespace mocomp
