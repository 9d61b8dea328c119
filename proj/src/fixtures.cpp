#include "mocomp/fixtures.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numbers>
#include <random>

#include "mocomp/errors.hpp"
#include "mocomp/kinematics.hpp"

namespace mocomp::fixtures {
namespace {

constexpr double kPi = std::numbers::pi;

const char* const kArmUrdf = R"(<robot name="fixture_arm">
  <link name="base_link"/>
  <link name="link1"/>
  <link name="link2"/>
  <link name="link3"/>
  <link name="link4"/>
  <link name="link5"/>
  <link name="link6"/>
  <link name="link7"/>
  <link name="tool"/>
  <joint name="joint1" type="revolute">
    <parent link="base_link"/><child link="link1"/>
    <origin xyz="0 0 0.3" rpy="0 0 0"/><axis xyz="0 0 1"/>
    <limit lower="-2.9" upper="2.9" effort="50" velocity="2"/>
  </joint>
  <joint name="joint2" type="revolute">
    <parent link="link1"/><child link="link2"/>
    <origin xyz="0 0 0.1" rpy="0 0 0"/><axis xyz="0 1 0"/>
    <limit lower="-1.8" upper="1.8" effort="50" velocity="2"/>
  </joint>
  <joint name="joint3" type="revolute">
    <parent link="link2"/><child link="link3"/>
    <origin xyz="0 0 0.4" rpy="0 0 0"/><axis xyz="0 0 1"/>
    <limit lower="-2.9" upper="2.9" effort="50" velocity="2"/>
  </joint>
  <joint name="joint4" type="revolute">
    <parent link="link3"/><child link="link4"/>
    <origin xyz="0 0 0" rpy="0 0 0"/><axis xyz="0 1 0"/>
    <limit lower="-0.1" upper="3.0" effort="50" velocity="2"/>
  </joint>
  <joint name="joint5" type="revolute">
    <parent link="link4"/><child link="link5"/>
    <origin xyz="0 0 0.4" rpy="0 0 0"/><axis xyz="0 0 1"/>
    <limit lower="-2.9" upper="2.9" effort="50" velocity="2"/>
  </joint>
  <joint name="joint6" type="revolute">
    <parent link="link5"/><child link="link6"/>
    <origin xyz="0 0 0" rpy="0 0 0"/><axis xyz="0 1 0"/>
    <limit lower="-0.5" upper="3.7" effort="50" velocity="2"/>
  </joint>
  <joint name="joint7" type="revolute">
    <parent link="link6"/><child link="link7"/>
    <origin xyz="0 0 0.1" rpy="0 0 0"/><axis xyz="0 0 1"/>
    <limit lower="-2.9" upper="2.9" effort="50" velocity="2"/>
  </joint>
  <joint name="tool_joint" type="fixed">
    <parent link="link7"/><child link="tool"/>
    <origin xyz="0 0 0.1" rpy="0 0 0"/>
  </joint>
</robot>
)";

const char* const kGantryUrdf = R"(<robot name="fixture_gantry">
  <link name="frame"/>
  <link name="carriage_x"/>
  <link name="carriage_y"/>
  <link name="carriage_z"/>
  <link name="tool"/>
  <joint name="x" type="prismatic">
    <parent link="frame"/><child link="carriage_x"/>
    <axis xyz="1 0 0"/><limit lower="-1" upper="1" effort="100" velocity="1"/>
  </joint>
  <joint name="y" type="prismatic">
    <parent link="carriage_x"/><child link="carriage_y"/>
    <axis xyz="0 1 0"/><limit lower="-1" upper="1" effort="100" velocity="1"/>
  </joint>
  <joint name="z" type="prismatic">
    <parent link="carriage_y"/><child link="carriage_z"/>
    <axis xyz="0 0 1"/><limit lower="0" upper="1" effort="100" velocity="1"/>
  </joint>
  <joint name="yaw" type="revolute">
    <parent link="carriage_z"/><child link="tool"/>
    <axis xyz="0 0 1"/><limit lower="-3.1" upper="3.1" effort="10" velocity="2"/>
  </joint>
</robot>
)";

// 10 s^3 - 15 s^4 + 6 s^5: rest-to-rest profile on [0, 1].
double min_jerk(double s) {
    s = std::clamp(s, 0.0, 1.0);
    return s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

LoadedMotion make_motion(const std::string& urdf, const std::string& name, const std::string& ee_link,
                         const std::vector<double>& times, const std::function<Configuration(double)>& q) {
    LoadedMotion out;
    out.urdf = urdf;
    out.robot = parse_urdf(urdf);
    out.motion.name = name;
    out.motion.robot_ref = out.robot.name();
    out.motion.ee_link = ee_link;
    out.motion.joints.joint_names = out.robot.actuated_joints();
    for (double t : times) {
        out.motion.joints.timestamps.push_back(t);
        out.motion.joints.configurations.push_back(q(t));
    }
    return out;
}

// k / rate for k = 0..round(duration * rate).
std::vector<double> sample_times(double duration, double rate) {
    const auto n = static_cast<std::size_t>(std::llround(duration * rate));
    std::vector<double> out(n + 1);
    for (std::size_t k = 0; k <= n; ++k) out[k] = static_cast<double>(k) / rate;
    return out;
}

void attach_link_track(LoadedMotion& m, const std::string& track, const std::string& link) {
    m.motion.object_tracks[track] = link_pose_trajectory(m.robot, m.motion.joints, link);
}

std::string two_digits(std::size_t k) { return (k < 10 ? "0" : "") + std::to_string(k); }

Configuration straight_path(double s) {
    return {0.8 * s - 0.4, 0.2 + 0.4 * s, 0.5 * s, 1.0 + 0.6 * s, -0.3 * s, 1.2 - 0.5 * s, 0.9 * s};
}

}  // namespace

std::string arm_urdf() { return kArmUrdf; }
std::string gantry_urdf() { return kGantryUrdf; }

double uniform01(std::uint64_t bits) { return static_cast<double>(bits >> 11) * 0x1.0p-53; }

std::vector<NamedMotion> case_a() {
    std::vector<NamedMotion> out;
    const auto times = sample_times(4.0, 50.0);
    for (std::size_t k = 1; k <= 5; ++k) {
        const double turn = static_cast<double>(30 * k) * kPi / 180.0;
        auto q = [turn](double t) {
            const double s = min_jerk(t / 4.0);
            const double q2 = 0.3 + 0.2 * s;
            const double q4 = 1.2 - 0.2 * s;
            // q2 + q4 + q6 = pi keeps the tool pointing down; the bottle then
            // turns about the vertical by q7 - q1.
            return Configuration{1.0 * s, q2, 0.0, q4, 0.0, kPi - q2 - q4, (1.0 - turn) * s};
        };
        auto m = make_motion(kArmUrdf, "pick_place_" + std::to_string(30 * k) + "deg", "tool", times, q);
        attach_link_track(m, "bottle", "tool");
        out.push_back({"case_a_turn" + std::to_string(30 * k) + ".json", std::move(m)});
    }
    return out;
}

std::vector<NamedMotion> case_b() {
    const auto times = sample_times(7.0, 20.0);
    auto arm = [](double offset) {
        return [offset](double t) {
            const double q6 =
                kArmJoint6Lower + offset + 0.3 * std::max(0.0, kClampStart - t) + 0.3 * std::max(0.0, t - kClampEnd);
            return Configuration{0.5 * std::sin(0.6 * t), 0.4, 0.0, 1.2 + 0.2 * std::sin(0.5 * t), 0.0, q6,
                                 0.3 * t / 7.0};
        };
    };
    std::vector<NamedMotion> out;
    out.push_back({"case_b_clamped.json", make_motion(kArmUrdf, "clamped_joint6", "tool", times, arm(0.0))});
    out.push_back({"case_b_clear.json", make_motion(kArmUrdf, "clear_joint6", "tool", times, arm(0.6))});
    return out;
}

std::vector<NamedMotion> case_c(std::uint64_t seed) {
    const double offset[7] = {0.0, 0.2, 0.0, 1.3, 0.0, 1.5, 0.0};
    const double amp[7] = {0.6, 0.3, 0.4, 0.4, 0.5, 0.4, 0.8};
    const double freq[7] = {1.0, 1.0, 0.5, 1.5, 1.0, 0.5, 1.0};
    const double phase[7] = {0.0, 0.5, 1.0, 0.0, 0.3, 0.8, 0.2};
    const double outlier_shift[7] = {1.0, -1.0, 1.0, 1.0, 1.0, 1.0, 1.0};
    std::mt19937_64 rng(seed);
    auto jitter = [&rng](double scale) { return scale * (2.0 * uniform01(rng()) - 1.0); };

    const auto times = sample_times(3.0, 20.0);
    std::vector<NamedMotion> out;
    for (std::size_t k = 0; k < 5; ++k) {
        const bool outlier = k == 4;
        double c[7], a[7], f[7], p[7];
        for (std::size_t j = 0; j < 7; ++j) {
            c[j] = offset[j] + jitter(0.05) + (outlier ? outlier_shift[j] : 0.0);
            a[j] = amp[j] * (1.0 + jitter(0.1));
            f[j] = freq[j] * (1.0 + jitter(0.05));
            p[j] = phase[j] + jitter(0.1);
        }
        auto q = [=](double t) {
            Configuration out(7);
            for (std::size_t j = 0; j < 7; ++j) out[j] = c[j] + a[j] * std::sin(2.0 * kPi * f[j] * t / 3.0 + p[j]);
            return out;
        };
        const std::string name = outlier ? "outlier" : "tuned_" + two_digits(k + 1);
        out.push_back({"case_c_" + name + ".json", make_motion(kArmUrdf, name, "tool", times, q)});
    }
    return out;
}

std::vector<NamedMotion> case_d() {
    const double duration = 6.0;
    auto operator_at = [](double t) {
        return Vec3(0.4 + 0.25 * std::sin(0.8 * t), 0.3 * std::sin(1.1 * t), 0.5 + 0.1 * std::sin(1.7 * t));
    };
    auto yaw_at = [](double t) { return 0.3 * std::sin(0.5 * t); };
    const auto times = sample_times(duration, 50.0);

    PoseTrajectory operator_track;
    for (double t : times) {
        operator_track.timestamps.push_back(t);
        operator_track.poses.push_back({operator_at(t), UnitQuaternion::from_axis_angle(Vec3::UnitZ(), yaw_at(t))});
    }
    auto follower = [&](bool deviate) {
        return [=](double t) {
            const double lagged = std::max(0.0, t - kOperatorDelay);
            Vec3 p = operator_at(lagged);
            if (deviate && t >= 2.5 && t <= 3.5) p.y() += 0.05 * std::pow(std::sin(kPi * (t - 2.5)), 2);
            return Configuration{p.x(), p.y(), p.z(), yaw_at(lagged)};
        };
    };
    std::vector<NamedMotion> out;
    for (bool deviate : {false, true}) {
        auto m = make_motion(kGantryUrdf, deviate ? "teleop_deviating" : "teleop_delayed", "tool", times,
                             follower(deviate));
        m.motion.object_tracks["operator"] = operator_track;
        out.push_back({deviate ? "case_d_deviating.json" : "case_d_delayed.json", std::move(m)});
    }
    return out;
}

std::vector<NamedMotion> speed_pair() {
    std::vector<NamedMotion> out;
    for (double duration : {2.0, 4.0}) {
        auto q = [duration](double t) { return straight_path(t / duration); };
        const std::string name = duration == 2.0 ? "fast" : "slow";
        out.push_back(
            {"speed_" + name + ".json", make_motion(kArmUrdf, name, "tool", sample_times(duration, 50.0), q)});
    }
    return out;
}

std::vector<NamedMotion> piecewise_pair() {
    // First half of the path in 1 s, second half in 4 s.
    auto piecewise = [](double t) { return straight_path(t <= 1.0 ? 0.5 * t : 0.5 + 0.125 * (t - 1.0)); };
    auto uniform = [](double t) { return straight_path(t / 4.0); };
    std::vector<NamedMotion> out;
    out.push_back({"piecewise_varying.json", make_motion(kArmUrdf, "varying", "tool", sample_times(5.0, 50.0), piecewise)});
    out.push_back({"piecewise_uniform.json", make_motion(kArmUrdf, "uniform", "tool", sample_times(4.0, 50.0), uniform)});
    return out;
}

std::vector<NamedMotion> generate(std::string_view which) {
    if (which == "A") return case_a();
    if (which == "B") return case_b();
    if (which == "C") return case_c();
    if (which == "D") return case_d();
    if (which == "speed") return speed_pair();
    if (which == "piecewise") return piecewise_pair();
    throw Error(ErrorCode::InvalidArgument,
                "unknown fixture case '" + std::string(which) + "' (expected A, B, C, D, speed or piecewise)");
}

}  // namespace mocomp::fixtures
