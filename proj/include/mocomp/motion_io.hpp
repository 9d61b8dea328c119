#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mocomp/kinematics.hpp"
#include "mocomp/motion.hpp"
#include "mocomp/timeseries.hpp"
#include "mocomp/trace.hpp"

namespace mocomp {

inline constexpr int kMotionFormatVersion = 1;

enum class MotionFormat { Json, Csv };

/// Robot description accompanying a motion.
struct RobotSource {
    std::string urdf;
    std::string ee_link;
};

/// A motion together with the robot it was recorded on.
struct LoadedMotion {
    Motion motion;
    RobotModel robot;
    std::string urdf;
};

struct LoadOptions {
    /// Directory against which {"file": ...} robot references resolve.
    std::filesystem::path base_dir;
    /// Required for csv; for json it replaces the embedded robot when set.
    std::optional<RobotSource> robot;
    /// Allow {"file": ...} robot references (disabled for untrusted uploads).
    bool allow_file_refs = true;
    /// Display name for csv input.
    std::string name = "motion";
};

/// Parses a motion file. Timestamps are shifted so the earliest sample is at 0
/// and degree-tagged joints are converted to radians.
/// Throws SchemaError (detail = JSON pointer or "line N"), UnitError,
/// MonotonicityError, and URDF errors from parse_urdf.
LoadedMotion load_motion(std::string_view bytes, MotionFormat format, const LoadOptions& options = {});

/// Canonical JSON motion file (radians, inline URDF).
std::string save_motion(const LoadedMotion& motion);

/// Shortest decimal text that parses back to the same double.
std::string format_double(double value);

/// "t,<name>" header plus one row per sample.
std::string export_series_csv(const ScalarSeries& series);
/// Long format "series,unit,t,value" for several series.
std::string export_series_csv(const std::vector<ScalarSeries>& series);
/// Inverse of export_series_csv (either layout). Throws SchemaError.
std::vector<ScalarSeries> parse_series_csv(std::string_view bytes);

/// Plain-text line-set geometry:
///
///     mocomp-trace 1
///     vertices <N>
///     v <x> <y> <z> <t>          (N lines)
///     polyline <N> <i0> ... <iN-1>
///     cones <M>
///     c <px> <py> <pz> <dx> <dy> <dz> <scale>   (M lines)
std::string export_trace(const TracePolyline& polyline, const std::vector<ConeGlyph>& cones);
/// Inverse of export_trace. Throws SchemaError.
PositionTrace parse_trace(std::string_view bytes);

}  // namespace mocomp
