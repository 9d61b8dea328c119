#include "mocomp/warping.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mocomp/errors.hpp"

namespace mocomp {

LocalCost LocalCost::from_name(std::string_view name) {
    if (name == "joint_l2" || name == "joint") return joint();
    if (name == "ee_position" || name == "ee") return ee();
    if (name == "quaternion_geodesic" || name == "quat") return quaternion();
    throw Error(ErrorCode::InvalidArgument, "unknown local cost '" + std::string(name) + "'", std::string(name));
}

std::string LocalCost::name() const {
    if (*this == joint()) return "joint_l2";
    if (*this == ee()) return "ee_position";
    if (*this == quaternion()) return "quaternion_geodesic";
    return "weighted_sum";
}

void LocalCost::check() const {
    const bool finite = std::isfinite(joint_l2) && std::isfinite(ee_position) && std::isfinite(quaternion_geodesic);
    if (!finite || joint_l2 < 0.0 || ee_position < 0.0 || quaternion_geodesic < 0.0) {
        throw Error(ErrorCode::InvalidArgument, "local cost weights must be finite and non-negative");
    }
    if (joint_l2 == 0.0 && ee_position == 0.0 && quaternion_geodesic == 0.0) {
        throw Error(ErrorCode::InvalidArgument, "local cost weights are all zero");
    }
}

AlignmentSignal signal_from_joints(const RobotModel& model, const JointTrajectory& joints, std::string_view ee_link) {
    const JointTrajectory ordered = reorder_to_model(model, joints);
    AlignmentSignal s;
    s.timestamps = ordered.timestamps;
    s.joints = ordered.configurations;
    if (!ee_link.empty()) {
        const PoseTrajectory ee = link_pose_trajectory(model, ordered, ee_link);
        for (const Pose& p : ee.poses) {
            s.positions.push_back(p.position);
            s.orientations.push_back(p.orientation);
        }
    }
    return s;
}

AlignmentSignal signal_from_poses(const PoseTrajectory& poses) {
    AlignmentSignal s;
    s.timestamps = poses.timestamps;
    for (const Pose& p : poses.poses) {
        s.positions.push_back(p.position);
        s.orientations.push_back(p.orientation);
    }
    return s;
}

std::pair<std::vector<double>, std::vector<double>> common_rate_grids(const std::vector<double>& a,
                                                                      const std::vector<double>& b) {
    const double ra = sample_rate(a);
    const double rb = sample_rate(b);
    if (ra == 0.0 || rb == 0.0 || std::abs(ra - rb) <= 1e-9 * std::max(ra, rb)) {
        return {a, b};
    }
    const double rate = std::max(ra, rb);
    return {uniform_grid(a.front(), a.back(), rate), uniform_grid(b.front(), b.back(), rate)};
}

WarpingPath dtw(std::size_t n, std::size_t m, const std::function<double(std::size_t, std::size_t)>& cost,
                const DtwOptions& options) {
    if (n == 0 || m == 0) {
        throw Error(ErrorCode::EmptyMotion, "cannot align an empty sequence");
    }
    constexpr double inf = std::numeric_limits<double>::infinity();
    std::vector<double> acc(n * m, inf);
    auto at = [&](std::size_t i, std::size_t j) -> double& { return acc[i * m + j]; };

    auto in_band = [&](std::size_t i, std::size_t j) {
        if (!options.band) return true;
        const double centre = n == 1 ? 0.0 : static_cast<double>(i) * static_cast<double>(m - 1) / static_cast<double>(n - 1);
        return std::abs(static_cast<double>(j) - centre) <= static_cast<double>(*options.band) + 1e-9;
    };

    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < m; ++j) {
            if (!in_band(i, j)) continue;
            double prev = 0.0;
            if (i > 0 || j > 0) {
                prev = inf;
                if (i > 0 && j > 0) prev = std::min(prev, at(i - 1, j - 1));
                if (i > 0) prev = std::min(prev, at(i - 1, j));
                if (j > 0) prev = std::min(prev, at(i, j - 1));
                if (prev == inf) continue;
            }
            at(i, j) = cost(i, j) + prev;
        }
    }
    if (!std::isfinite(at(n - 1, m - 1))) {
        throw Error(ErrorCode::InvalidArgument, "Sakoe-Chiba band is too narrow to connect the sequence ends");
    }

    WarpingPath path;
    path.total_cost = at(n - 1, m - 1);
    std::size_t i = n - 1;
    std::size_t j = m - 1;
    path.pairs.emplace_back(i, j);
    while (i > 0 || j > 0) {
        if (i == 0) {
            --j;
        } else if (j == 0) {
            --i;
        } else {
            // strict comparisons keep the earlier-listed move on ties
            double best = at(i - 1, j - 1);
            std::size_t ni = i - 1;
            std::size_t nj = j - 1;
            if (at(i, j - 1) < best) {
                best = at(i, j - 1);
                ni = i;
                nj = j - 1;
            }
            if (at(i - 1, j) < best) {
                ni = i - 1;
                nj = j;
            }
            i = ni;
            j = nj;
        }
        path.pairs.emplace_back(i, j);
    }
    std::reverse(path.pairs.begin(), path.pairs.end());
    return path;
}

double local_cost(const AlignmentSignal& a, std::size_t i, const AlignmentSignal& b, std::size_t j,
                  const LocalCost& cost) {
    double total = 0.0;
    if (cost.joint_l2 > 0.0) {
        const auto& qa = a.joints[i];
        const auto& qb = b.joints[j];
        double sum = 0.0;
        for (std::size_t k = 0; k < qa.size(); ++k) {
            const double d = qa[k] - qb[k];
            sum += d * d;
        }
        total += cost.joint_l2 * std::sqrt(sum);
    }
    if (cost.ee_position > 0.0) {
        total += cost.ee_position * (a.positions[i] - b.positions[j]).norm();
    }
    if (cost.quaternion_geodesic > 0.0) {
        total += cost.quaternion_geodesic * geodesic_angle(a.orientations[i], b.orientations[j]);
    }
    return total;
}

WarpingPath dtw_align(const AlignmentSignal& a, const AlignmentSignal& b, const LocalCost& cost,
                      const DtwOptions& options) {
    cost.check();
    if (a.size() == 0 || b.size() == 0) {
        throw Error(ErrorCode::EmptyMotion, "cannot align an empty motion");
    }
    if (cost.joint_l2 > 0.0) {
        if (a.joints.size() != a.size() || b.joints.size() != b.size()) {
            throw Error(ErrorCode::DimensionMismatch, "joint_l2 cost needs joint values on both sides");
        }
        if (a.joints.front().size() != b.joints.front().size()) {
            throw Error(ErrorCode::DimensionMismatch, "joint_l2 cost needs equal joint counts (" +
                                                          std::to_string(a.joints.front().size()) + " vs " +
                                                          std::to_string(b.joints.front().size()) + ")");
        }
    }
    if (cost.ee_position > 0.0 && (a.positions.size() != a.size() || b.positions.size() != b.size())) {
        throw Error(ErrorCode::DimensionMismatch, "ee_position cost needs end-effector positions on both sides");
    }
    if (cost.quaternion_geodesic > 0.0 && (a.orientations.size() != a.size() || b.orientations.size() != b.size())) {
        throw Error(ErrorCode::DimensionMismatch, "quaternion_geodesic cost needs orientations on both sides");
    }
    WarpingPath path = dtw(a.size(), b.size(),
                           [&](std::size_t i, std::size_t j) { return local_cost(a, i, b, j, cost); }, options);
    path.timestamps_a = a.timestamps;
    path.timestamps_b = b.timestamps;
    return path;
}

WarpingCurve warping_curve(const WarpingPath& path) {
    WarpingCurve curve;
    curve.points.reserve(path.pairs.size());
    for (const auto& [i, j] : path.pairs) {
        curve.points.emplace_back(path.timestamps_a.at(i), path.timestamps_b.at(j));
    }
    const double lo = std::min(path.timestamps_a.front(), path.timestamps_b.front());
    const double hi = std::max(path.timestamps_a.back(), path.timestamps_b.back());
    curve.diagonal_start = {lo, lo};
    curve.diagonal_end = {hi, hi};
    return curve;
}

WarpingPath transpose(const WarpingPath& path) {
    WarpingPath out;
    out.total_cost = path.total_cost;
    out.timestamps_a = path.timestamps_b;
    out.timestamps_b = path.timestamps_a;
    out.pairs.reserve(path.pairs.size());
    for (const auto& [i, j] : path.pairs) out.pairs.emplace_back(j, i);
    return out;
}

WarpingPath identity_path(const std::vector<double>& timestamps_a, const std::vector<double>& timestamps_b) {
    if (timestamps_a.size() != timestamps_b.size()) {
        throw Error(ErrorCode::DimensionMismatch, "identity correspondence needs equally long sequences");
    }
    WarpingPath path;
    path.timestamps_a = timestamps_a;
    path.timestamps_b = timestamps_b;
    for (std::size_t k = 0; k < timestamps_a.size(); ++k) path.pairs.emplace_back(k, k);
    return path;
}

namespace {

/// For every index of the path's first sequence, the time on the second
/// sequence its run maps to: the run's first time for index 0, its last time
/// for the final index, the run midpoint otherwise.
std::vector<double> collapsed_other_times(const WarpingPath& path) {
    const std::size_t na = path.timestamps_a.size();
    std::vector<double> lo(na, std::numeric_limits<double>::infinity());
    std::vector<double> hi(na, -std::numeric_limits<double>::infinity());
    for (const auto& [i, j] : path.pairs) {
        const double t = path.timestamps_b.at(j);
        lo.at(i) = std::min(lo[i], t);
        hi[i] = std::max(hi[i], t);
    }
    std::vector<double> out(na);
    for (std::size_t i = 0; i < na; ++i) {
        if (i == 0) {
            out[i] = lo[i];
        } else if (i + 1 == na) {
            out[i] = hi[i];
        } else {
            out[i] = 0.5 * (lo[i] + hi[i]);
        }
    }
    return out;
}

void require_full_path(const WarpingPath& path) {
    if (path.pairs.empty() || path.timestamps_a.empty() || path.timestamps_b.empty()) {
        throw Error(ErrorCode::DegeneratePath, "warping path is empty");
    }
}

}  // namespace

RelativeSpeedSeries relative_speed(const WarpingPath& path_in, Subject subject) {
    require_full_path(path_in);
    const WarpingPath path = subject == Subject::A ? path_in : transpose(path_in);
    const std::size_t ns = path.timestamps_a.size();
    if (path.pairs.size() < 2 || ns < 2 || path.timestamps_b.size() < 2) {
        throw Error(ErrorCode::DegeneratePath, "relative speed needs at least two samples on each side");
    }
    std::vector<double> ref_times(ns);
    {
        std::vector<double> lo(ns, std::numeric_limits<double>::infinity());
        std::vector<double> hi(ns, -std::numeric_limits<double>::infinity());
        for (const auto& [i, j] : path.pairs) {
            lo.at(i) = std::min(lo[i], path.timestamps_b.at(j));
            hi[i] = std::max(hi[i], path.timestamps_b.at(j));
        }
        for (std::size_t i = 0; i < ns; ++i) ref_times[i] = 0.5 * (lo[i] + hi[i]);
    }

    RelativeSpeedSeries out;
    out.timestamps = path.timestamps_a;
    out.ratio.resize(ns);
    out.color_scalar.resize(ns);
    const std::size_t width = std::min(2 * kRelativeSpeedHalfWindow, ns - 1);
    for (std::size_t s = 0; s < ns; ++s) {
        std::size_t lo = s >= kRelativeSpeedHalfWindow ? s - kRelativeSpeedHalfWindow : 0;
        lo = std::min(lo, ns - 1 - width);
        std::size_t hi = lo + width;
        double dref = ref_times[hi] - ref_times[lo];
        while (!(dref > 0.0) && (lo > 0 || hi + 1 < ns)) {
            if (lo > 0) --lo;
            if (hi + 1 < ns) ++hi;
            dref = ref_times[hi] - ref_times[lo];
        }
        const double dsub = path.timestamps_a[hi] - path.timestamps_a[lo];
        if (!(dref > 0.0) || !(dsub > 0.0)) {
            throw Error(ErrorCode::DegeneratePath, "warping path has no extent on one side");
        }
        out.ratio[s] = dref / dsub;
        out.color_scalar[s] = std::clamp(std::log2(out.ratio[s]) / 2.0, -1.0, 1.0);
    }
    return out;
}

double remap_time(const WarpingPath& path_in, double t, Subject from) {
    require_full_path(path_in);
    const WarpingPath path = from == Subject::A ? path_in : transpose(path_in);
    const auto& ta = path.timestamps_a;
    const double slack = 1e-9 * std::max(1.0, std::abs(ta.back()));
    if (!(t >= ta.front() - slack && t <= ta.back() + slack)) {
        throw Error(ErrorCode::OutOfRange, "time outside the motion span");
    }
    const std::vector<double> other = collapsed_other_times(path);
    if (ta.size() == 1) {
        return other.front();
    }
    t = std::clamp(t, ta.front(), ta.back());
    auto it = std::lower_bound(ta.begin(), ta.end(), t);
    const auto hi = static_cast<std::size_t>(it - ta.begin());
    if (*it == t) return other[hi];
    const std::size_t lo = hi - 1;
    const double s = (t - ta[lo]) / (ta[hi] - ta[lo]);
    return other[lo] + s * (other[hi] - other[lo]);
}

}  // namespace mocomp
