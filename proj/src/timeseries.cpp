#include "mocomp/timeseries.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>

#include "mocomp/errors.hpp"

namespace mocomp {
namespace {

std::string shortest(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, end);
}

double lerp_series(const std::vector<double>& ts, const std::vector<double>& vs, double t) {
    auto it = std::lower_bound(ts.begin(), ts.end(), t);
    if (it == ts.end()) return vs.back();
    const auto hi = static_cast<std::size_t>(it - ts.begin());
    if (*it == t || hi == 0) return vs[hi];
    const std::size_t lo = hi - 1;
    const double s = (t - ts[lo]) / (ts[hi] - ts[lo]);
    return vs[lo] + s * (vs[hi] - vs[lo]);
}

struct CommonGrid {
    std::vector<double> grid;
    bool shared = false;
};

CommonGrid common_grid(const std::vector<double>& ta, const std::vector<double>& tb) {
    if (ta.empty() || tb.empty()) {
        throw Error(ErrorCode::EmptyMotion, "cannot align an empty series");
    }
    if (ta == tb) {
        return {ta, true};
    }
    const double scale = std::max({1.0, std::abs(ta.back()), std::abs(tb.back())});
    const double tol = 1e-9 * scale;
    if (std::abs(ta.front() - tb.front()) > tol || std::abs(ta.back() - tb.back()) > tol) {
        throw Error(ErrorCode::SpanMismatch, "series spans differ: [" + shortest(ta.front()) + ", " +
                                                 shortest(ta.back()) + "] vs [" + shortest(tb.front()) + ", " +
                                                 shortest(tb.back()) + "]");
    }
    if (ta.size() < 2 || tb.size() < 2) {
        throw Error(ErrorCode::TooShort, "resampled alignment needs at least two samples per series");
    }
    const double rate = std::min(sample_rate(ta), sample_rate(tb));
    const double first = std::max(ta.front(), tb.front());
    const double last = std::min(ta.back(), tb.back());
    return {uniform_grid(first, last, rate), false};
}

void check_path(const WarpingPath& path, std::size_t na, std::size_t nb) {
    for (const auto& [i, j] : path.pairs) {
        if (i >= na || j >= nb) {
            throw Error(ErrorCode::IndexOutOfRange, "warping path pair (" + std::to_string(i) + ", " +
                                                        std::to_string(j) + ") outside series of length " +
                                                        std::to_string(na) + " and " + std::to_string(nb));
        }
    }
}

}  // namespace

std::vector<double> first_difference(const std::vector<double>& t, const std::vector<double>& v) {
    const std::size_t n = v.size();
    if (n < 2 || t.size() != n) {
        throw Error(ErrorCode::TooShort, "differentiation needs at least two samples");
    }
    std::vector<double> d(n);
    d[0] = (v[1] - v[0]) / (t[1] - t[0]);
    d[n - 1] = (v[n - 1] - v[n - 2]) / (t[n - 1] - t[n - 2]);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        d[i] = (v[i + 1] - v[i - 1]) / (t[i + 1] - t[i - 1]);
    }
    return d;
}

ScalarSeries derivative(const ScalarSeries& series, int order) {
    if (order < 1 || order > 3) {
        throw Error(ErrorCode::InvalidArgument, "derivative order must be 1, 2 or 3");
    }
    if (series.size() < static_cast<std::size_t>(order) + 1 || series.size() < 2) {
        throw Error(ErrorCode::TooShort, "series '" + series.name + "' has " + std::to_string(series.size()) +
                                             " samples, order " + std::to_string(order) + " needs " +
                                             std::to_string(std::max(order + 1, 2)));
    }
    ScalarSeries out;
    out.timestamps = series.timestamps;
    out.values = series.values;
    for (int k = 0; k < order; ++k) {
        out.values = first_difference(out.timestamps, out.values);
    }
    const std::string suffix = order == 1 ? "" : std::to_string(order);
    out.name = "d" + suffix + "(" + series.name + ")/dt" + suffix;
    const std::string base = series.unit.empty() ? "1" : series.unit;
    out.unit = order == 1 ? base + "/s" : base + "/s^" + std::to_string(order);
    return out;
}

Smoothing Smoothing::parse(std::string_view text) {
    const auto colon = text.find(':');
    if (colon == std::string_view::npos) {
        throw Error(ErrorCode::InvalidWindow, "smoothing spec must look like ma:<window> or ema:<alpha>",
                    std::string(text));
    }
    const std::string_view kind = text.substr(0, colon);
    const std::string_view arg = text.substr(colon + 1);
    if (kind == "ma") {
        int window = 0;
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), window);
        if (ec != std::errc() || ptr != arg.data() + arg.size()) {
            throw Error(ErrorCode::InvalidWindow, "moving-average window must be an integer", std::string(text));
        }
        return moving_average(window);
    }
    if (kind == "ema") {
        double alpha = 0.0;
        auto [ptr, ec] = std::from_chars(arg.data(), arg.data() + arg.size(), alpha);
        if (ec != std::errc() || ptr != arg.data() + arg.size()) {
            throw Error(ErrorCode::InvalidWindow, "exponential alpha must be a number", std::string(text));
        }
        return exponential(alpha);
    }
    throw Error(ErrorCode::InvalidWindow, "unknown smoothing method '" + std::string(kind) + "'", std::string(text));
}

std::string Smoothing::tag() const {
    return method == SmoothingMethod::MovingAverage ? "ma:" + std::to_string(window) : "ema:" + shortest(alpha);
}

ScalarSeries smooth(const ScalarSeries& series, const Smoothing& filter) {
    ScalarSeries out = series;
    out.name = series.name + " (" + filter.tag() + ")";
    const auto& v = series.values;
    const std::size_t n = v.size();
    if (filter.method == SmoothingMethod::MovingAverage) {
        if (filter.window < 1 || filter.window % 2 == 0) {
            throw Error(ErrorCode::InvalidWindow, "moving-average window must be odd and >= 1");
        }
        const std::size_t half = static_cast<std::size_t>(filter.window / 2);
        for (std::size_t i = 0; i < n; ++i) {
            const std::size_t lo = i >= half ? i - half : 0;
            const std::size_t hi = std::min(n - 1, i + half);
            // mean of deviations from v[i]: exact for constant windows
            double dev = 0.0;
            double wmin = v[i];
            double wmax = v[i];
            for (std::size_t j = lo; j <= hi; ++j) {
                dev += v[j] - v[i];
                wmin = std::min(wmin, v[j]);
                wmax = std::max(wmax, v[j]);
            }
            out.values[i] = std::clamp(v[i] + dev / static_cast<double>(hi - lo + 1), wmin, wmax);
        }
    } else {
        if (!(filter.alpha > 0.0 && filter.alpha <= 1.0)) {
            throw Error(ErrorCode::InvalidWindow, "exponential alpha must lie in (0, 1]");
        }
        for (std::size_t i = 1; i < n; ++i) {
            out.values[i] = out.values[i - 1] + filter.alpha * (v[i] - out.values[i - 1]);
        }
    }
    return out;
}

ScalarSeries difference_series(const ScalarSeries& a, const ScalarSeries& b, const SeriesAlignment& alignment) {
    ScalarSeries out;
    out.name = a.name + " - " + b.name;
    out.unit = a.unit;
    if (const auto* path = std::get_if<WarpingPath>(&alignment)) {
        check_path(*path, a.size(), b.size());
        out.timestamps.reserve(path->pairs.size());
        out.values.reserve(path->pairs.size());
        for (const auto& [i, j] : path->pairs) {
            out.timestamps.push_back(a.timestamps[i]);
            out.values.push_back(a.values[i] - b.values[j]);
        }
        return out;
    }
    const CommonGrid g = common_grid(a.timestamps, b.timestamps);
    out.timestamps = g.grid;
    out.values.resize(g.grid.size());
    for (std::size_t k = 0; k < g.grid.size(); ++k) {
        out.values[k] = g.shared ? a.values[k] - b.values[k]
                                 : lerp_series(a.timestamps, a.values, g.grid[k]) -
                                       lerp_series(b.timestamps, b.values, g.grid[k]);
    }
    return out;
}

ScalarSeries cartesian_distance_series(const PoseTrajectory& a, const PoseTrajectory& b,
                                       const SeriesAlignment& alignment) {
    ScalarSeries out;
    out.name = "distance";
    out.unit = "m";
    if (const auto* path = std::get_if<WarpingPath>(&alignment)) {
        check_path(*path, a.size(), b.size());
        for (const auto& [i, j] : path->pairs) {
            out.timestamps.push_back(a.timestamps[i]);
            out.values.push_back((a.poses[i].position - b.poses[j].position).norm());
        }
        return out;
    }
    const CommonGrid g = common_grid(a.timestamps, b.timestamps);
    out.timestamps = g.grid;
    if (g.shared) {
        for (std::size_t k = 0; k < a.size(); ++k) {
            out.values.push_back((a.poses[k].position - b.poses[k].position).norm());
        }
    } else {
        const PoseTrajectory ra = resample_at(a, g.grid);
        const PoseTrajectory rb = resample_at(b, g.grid);
        for (std::size_t k = 0; k < g.grid.size(); ++k) {
            out.values.push_back((ra.poses[k].position - rb.poses[k].position).norm());
        }
    }
    return out;
}

double distance_to_polyline(const Vec3& p, const std::vector<Vec3>& polyline) {
    if (polyline.empty()) {
        throw Error(ErrorCode::InvalidArgument, "reference polyline is empty");
    }
    if (polyline.size() == 1) {
        return (p - polyline.front()).norm();
    }
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < polyline.size(); ++i) {
        const Vec3& s0 = polyline[i];
        const Vec3 seg = polyline[i + 1] - s0;
        const double len2 = seg.squaredNorm();
        const double u = len2 > 0.0 ? std::clamp((p - s0).dot(seg) / len2, 0.0, 1.0) : 0.0;
        best = std::min(best, (p - (s0 + u * seg)).norm());
    }
    return best;
}

MotionMetrics motion_metrics(const Motion& motion, const RobotModel& model, std::string_view ee_link,
                             const PoseTrajectory* reference_path) {
    MotionMetrics m;
    m.duration = duration(motion.joints);
    const PoseTrajectory ee = link_pose_trajectory(model, motion.joints, ee_link);
    const std::size_t n = ee.size();
    for (std::size_t i = 0; i + 1 < n; ++i) {
        m.ee_path_length += (ee.poses[i + 1].position - ee.poses[i].position).norm();
    }

    if (n >= 4) {
        std::vector<std::vector<double>> jerk(3);
        for (int axis = 0; axis < 3; ++axis) {
            ScalarSeries s{"p", "m", ee.timestamps, {}};
            s.values.reserve(n);
            for (const Pose& p : ee.poses) s.values.push_back(p.position[axis]);
            jerk[static_cast<std::size_t>(axis)] = derivative(s, 3).values;
        }
        const std::size_t skip = n >= 7 ? 3 : 0;
        double sum = 0.0;
        for (std::size_t i = skip; i < n - skip; ++i) {
            sum += jerk[0][i] * jerk[0][i] + jerk[1][i] * jerk[1][i] + jerk[2][i] * jerk[2][i];
        }
        m.jerk_rms = std::sqrt(sum / static_cast<double>(n - 2 * skip));
    }

    if (reference_path != nullptr) {
        std::vector<Vec3> ref;
        ref.reserve(reference_path->size());
        for (const Pose& p : reference_path->poses) ref.push_back(p.position);
        double sum = 0.0;
        for (const Pose& p : ee.poses) {
            const double d = distance_to_polyline(p.position, ref);
            sum += d * d;
        }
        m.tracking_error_rms = std::sqrt(sum / static_cast<double>(n));
    }
    return m;
}

}  // namespace mocomp
