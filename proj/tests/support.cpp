#include "support.hpp"

#include <cmath>
#include <functional>
#include <limits>
#include <sstream>

#include "mocomp/kinematics.hpp"

namespace testing {

mocomp::UnitQuaternion Rng::quaternion() {
    double v[4];
    double n = 0.0;
    do {
        n = 0.0;
        for (double& c : v) {
            c = normal();
            n += c * c;
        }
    } while (n < 1e-6);
    return mocomp::UnitQuaternion::normalized(v[0], v[1], v[2], v[3]);
}

mocomp::Vec3 Rng::unit_vector() {
    mocomp::Vec3 v;
    do {
        v = {normal(), normal(), normal()};
    } while (v.norm() < 1e-6);
    return v.normalized();
}

std::string planar_chain_urdf(const std::vector<double>& lengths) {
    std::ostringstream u;
    u.precision(17);
    u << "<robot name=\"planar" << lengths.size() << "\">\n  <link name=\"base\"/>\n";
    for (std::size_t k = 0; k < lengths.size(); ++k) u << "  <link name=\"l" << k << "\"/>\n";
    u << "  <link name=\"tip\"/>\n";
    std::string parent = "base";
    double offset = 0.0;
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        u << "  <joint name=\"j" << k << "\" type=\"continuous\">\n"
          << "    <parent link=\"" << parent << "\"/><child link=\"l" << k << "\"/>\n"
          << "    <origin xyz=\"" << offset << " 0 0\" rpy=\"0 0 0\"/><axis xyz=\"0 0 1\"/>\n"
          << "  </joint>\n";
        parent = "l" + std::to_string(k);
        offset = lengths[k];
    }
    u << "  <joint name=\"tip_joint\" type=\"fixed\">\n"
      << "    <parent link=\"" << parent << "\"/><child link=\"tip\"/>\n"
      << "    <origin xyz=\"" << offset << " 0 0\"/>\n"
      << "  </joint>\n</robot>\n";
    return u.str();
}

mocomp::Vec3 planar_tip(const std::vector<double>& lengths, const std::vector<double>& q) {
    double x = 0.0, y = 0.0, angle = 0.0;
    for (std::size_t k = 0; k < lengths.size(); ++k) {
        angle += q[k];
        x += lengths[k] * std::cos(angle);
        y += lengths[k] * std::sin(angle);
    }
    return {x, y, 0.0};
}

double brute_force_dtw(const std::vector<std::vector<double>>& cost) {
    const std::size_t n = cost.size();
    const std::size_t m = cost[0].size();
    double best = std::numeric_limits<double>::infinity();
    std::function<void(std::size_t, std::size_t, double)> walk = [&](std::size_t i, std::size_t j, double acc) {
        acc += cost[i][j];
        if (i == n - 1 && j == m - 1) {
            best = std::min(best, acc);
            return;
        }
        if (i + 1 < n && j + 1 < m) walk(i + 1, j + 1, acc);
        if (i + 1 < n) walk(i + 1, j, acc);
        if (j + 1 < m) walk(i, j + 1, acc);
    };
    walk(0, 0, 0.0);
    return best;
}

mocomp::LoadedMotion make_motion(const std::string& urdf, const std::string& ee_link, const std::vector<double>& ts,
                                 const std::vector<mocomp::Configuration>& q) {
    mocomp::LoadedMotion m;
    m.urdf = urdf;
    m.robot = mocomp::parse_urdf(urdf);
    m.motion.name = "test";
    m.motion.robot_ref = m.robot.name();
    m.motion.ee_link = ee_link;
    m.motion.joints.joint_names = m.robot.actuated_joints();
    m.motion.joints.timestamps = ts;
    m.motion.joints.configurations = q;
    return m;
}

std::vector<double> times(std::size_t n, double dt) {
    std::vector<double> out(n);
    for (std::size_t k = 0; k < n; ++k) out[k] = static_cast<double>(k) * dt;
    return out;
}

}  // namespace testing
