#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mocomp/motion_io.hpp"

/// Analytic, seeded example motions for tests and demos.
namespace mocomp::fixtures {

struct NamedMotion {
    std::string file;
    LoadedMotion motion;
};

/// 7-joint arm (joint1..joint7, ee link "tool"). Joint 6 has lower limit -0.5.
std::string arm_urdf();
/// Cartesian gantry: prismatic x, y, z plus a yaw joint, ee link "tool".
std::string gantry_urdf();

inline constexpr double kArmJoint6Lower = -0.5;

/// Five pick-and-place variants; the carried bottle turns by 30, 60, 90, 120
/// and 150 degrees. Each motion has an object track "bottle".
std::vector<NamedMotion> case_a();
/// Joint 6 pressed against its lower limit from t = 2 s to t = 5 s (20 Hz),
/// plus a variant that keeps clear of it.
std::vector<NamedMotion> case_b();
inline constexpr double kClampStart = 2.0;
inline constexpr double kClampEnd = 5.0;
/// Four parameter-perturbed motions and one outlier offset by about 1 rad.
std::vector<NamedMotion> case_c(std::uint64_t seed = 7);
/// Gantry following an operator track ("operator") with a 0.2 s delay, plus a
/// variant that also deviates sideways between 2.5 s and 3.5 s.
std::vector<NamedMotion> case_d();
inline constexpr double kOperatorDelay = 0.2;

/// The same straight joint-space path traversed in 2 s and in 4 s.
std::vector<NamedMotion> speed_pair();
/// A piecewise-speed motion (twice as fast, then half as fast) against the
/// uniform 4 s traversal of the same path.
std::vector<NamedMotion> piecewise_pair();

/// "A", "B", "C", "D", "speed" or "piecewise". Throws InvalidArgument.
std::vector<NamedMotion> generate(std::string_view which);

/// Uniform double in [0, 1) identical on every platform for a given engine state.
double uniform01(std::uint64_t bits);

}  // namespace mocomp::fixtures
