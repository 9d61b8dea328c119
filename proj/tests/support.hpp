#pragma once

// Shared helpers for tests: seeded generators and independent reference
// implementations used as oracles.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "mocomp/geometry.hpp"
#include "mocomp/motion_io.hpp"

namespace testing {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    double uniform(double lo = 0.0, double hi = 1.0) {
        return lo + (hi - lo) * (static_cast<double>(engine_() >> 11) * 0x1.0p-53);
    }
    std::size_t index(std::size_t lo, std::size_t hi) { return lo + static_cast<std::size_t>(engine_() % (hi - lo + 1)); }
    double normal() {
        // Box-Muller on the portable uniform draw
        const double u1 = 1.0 - uniform();
        const double u2 = uniform();
        return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * 3.141592653589793 * u2);
    }
    mocomp::UnitQuaternion quaternion();
    mocomp::Vec3 unit_vector();

private:
    std::mt19937_64 engine_;
};

/// Planar chain in the xy plane: revolute joints about z, link k of length
/// lengths[k] along x, ee link "tip".
std::string planar_chain_urdf(const std::vector<double>& lengths);
/// Closed-form tip position of the planar chain.
mocomp::Vec3 planar_tip(const std::vector<double>& lengths, const std::vector<double>& q);

/// Minimum over every monotone, contiguous path of the summed local cost, by
/// exhaustive enumeration. Only for tiny n, m.
double brute_force_dtw(const std::vector<std::vector<double>>& cost);

/// A motion on `urdf` with the given samples and no object tracks.
mocomp::LoadedMotion make_motion(const std::string& urdf, const std::string& ee_link,
                                 const std::vector<double>& times, const std::vector<mocomp::Configuration>& q);

/// n evenly spaced times k * dt.
std::vector<double> times(std::size_t n, double dt);

}  // namespace testing
