#include <cmath>
#include <numbers>

#include "doctest.h"
#include "mocomp/errors.hpp"
#include "mocomp/kinematics.hpp"
#include "mocomp/timeseries.hpp"
#include "mocomp/warping.hpp"
#include "support.hpp"

using namespace mocomp;
using doctest::Approx;

namespace {

ScalarSeries sampled(const std::vector<double>& ts, double (*f)(double), std::string name = "x") {
    ScalarSeries s{std::move(name), "m", ts, {}};
    for (double t : ts) s.values.push_back(f(t));
    return s;
}

double rms(const std::vector<double>& v) {
    double sum = 0.0;
    for (double x : v) sum += x * x;
    return std::sqrt(sum / static_cast<double>(v.size()));
}

}  // namespace

TEST_CASE("derivative of an affine series is the slope everywhere") {
    const auto s = sampled(testing::times(41, 0.1), [](double t) { return 3.0 * t - 2.0; });
    const auto d = derivative(s, 1);
    for (double v : d.values) CHECK(std::abs(v - 3.0) <= 1e-12);
    for (double v : derivative(s, 2).values) CHECK(std::abs(v) <= 1e-11);
    CHECK(d.name == "d(x)/dt");
    CHECK(d.unit == "m/s");
    CHECK(derivative(s, 3).name == "d3(x)/dt3");
    CHECK(derivative(s, 2).unit == "m/s^2");
}

TEST_CASE("central differences are exact for quadratics inside the series") {
    const auto s = sampled(testing::times(31, 0.1), [](double t) { return 0.5 * t * t - t + 4.0; });
    const auto d = derivative(s, 1);
    for (std::size_t i = 1; i + 1 < s.size(); ++i) CHECK(std::abs(d.values[i] - (s.timestamps[i] - 1.0)) <= 1e-9);
    const auto d2 = derivative(s, 2);
    for (std::size_t i = 2; i + 2 < s.size(); ++i) CHECK(std::abs(d2.values[i] - 1.0) <= 1e-9);
}

TEST_CASE("endpoints use one-sided differences") {
    ScalarSeries s{"x", "m", {0.0, 1.0, 3.0}, {0.0, 2.0, 3.0}};
    const auto d = first_difference(s.timestamps, s.values);
    CHECK(d[0] == 2.0);
    CHECK(d[1] == 1.0);
    CHECK(d[2] == 0.5);
}

TEST_CASE("derivative is linear") {
    testing::Rng rng(12);
    for (int trial = 0; trial < 30; ++trial) {
        std::vector<double> ts{0.0};
        while (ts.size() < 25) ts.push_back(ts.back() + rng.uniform(0.05, 0.2));
        ScalarSeries f{"f", "", ts, {}}, g{"g", "", ts, {}}, h{"h", "", ts, {}};
        const double a = rng.uniform(-2, 2), b = rng.uniform(-2, 2);
        for (std::size_t i = 0; i < ts.size(); ++i) {
            f.values.push_back(rng.normal());
            g.values.push_back(rng.normal());
            h.values.push_back(a * f.values[i] + b * g.values[i]);
        }
        for (int order = 1; order <= 3; ++order) {
            const auto df = derivative(f, order), dg = derivative(g, order), dh = derivative(h, order);
            for (std::size_t i = 0; i < ts.size(); ++i) {
                const double expect = a * df.values[i] + b * dg.values[i];
                CHECK(std::abs(dh.values[i] - expect) <= 1e-9 * (1.0 + std::abs(expect)));
            }
        }
    }
}

TEST_CASE("derivative argument checks") {
    ScalarSeries s{"x", "", {0.0, 1.0}, {0.0, 1.0}};
    CHECK_THROWS_AS(derivative(s, 0), Error);
    CHECK_THROWS_AS(derivative(s, 4), Error);
    CHECK_THROWS_AS(derivative(s, 2), Error);
    CHECK_NOTHROW(derivative(s, 1));
}

TEST_CASE("smoothing keeps constants exactly") {
    ScalarSeries s{"x", "", testing::times(20, 0.1), std::vector<double>(20, 0.1 + 0.2)};
    for (int window : {1, 3, 5, 9}) CHECK(smooth(s, Smoothing::moving_average(window)).values == s.values);
    for (double alpha : {0.1, 0.5, 1.0}) CHECK(smooth(s, Smoothing::exponential(alpha)).values == s.values);
}

TEST_CASE("smoothing reduces noise on a sine") {
    testing::Rng rng(99);
    ScalarSeries clean = sampled(testing::times(400, 0.01), [](double t) { return std::sin(2.0 * t); });
    ScalarSeries noisy = clean;
    for (double& v : noisy.values) v += 0.1 * rng.normal();
    auto error = [&](const ScalarSeries& s) {
        std::vector<double> e;
        for (std::size_t i = 0; i < s.size(); ++i) e.push_back(s.values[i] - clean.values[i]);
        return rms(e);
    };
    const double raw = error(noisy);
    CHECK(error(smooth(noisy, Smoothing::moving_average(9))) < 0.5 * raw);
    CHECK(error(smooth(noisy, Smoothing::exponential(0.2))) < 0.7 * raw);
}

TEST_CASE("moving average matches a direct window mean") {
    testing::Rng rng(1);
    ScalarSeries s{"x", "", testing::times(30, 0.1), {}};
    for (int i = 0; i < 30; ++i) s.values.push_back(rng.normal());
    const auto out = smooth(s, Smoothing::moving_average(5));
    for (std::size_t i = 0; i < s.size(); ++i) {
        const std::size_t lo = i >= 2 ? i - 2 : 0, hi = std::min<std::size_t>(29, i + 2);
        double sum = 0.0;
        for (std::size_t j = lo; j <= hi; ++j) sum += s.values[j];
        CHECK(out.values[i] == Approx(sum / static_cast<double>(hi - lo + 1)).epsilon(1e-12));
    }
    CHECK(out.name == "x (ma:5)");
}

TEST_CASE("smoothing specs") {
    CHECK(Smoothing::parse("ma:5").window == 5);
    CHECK(Smoothing::parse("ema:0.25").alpha == 0.25);
    CHECK_THROWS_AS(Smoothing::parse("median:3"), Error);
    CHECK_THROWS_AS(Smoothing::parse("ma"), Error);
    ScalarSeries s{"x", "", {0, 1, 2}, {1, 2, 3}};
    CHECK_THROWS_AS(smooth(s, Smoothing::moving_average(4)), Error);
    CHECK_THROWS_AS(smooth(s, Smoothing::exponential(0.0)), Error);
    CHECK_THROWS_AS(smooth(s, Smoothing::exponential(1.5)), Error);
}

TEST_CASE("difference of a series with itself is zero") {
    const auto s = sampled(testing::times(50, 0.02), [](double t) { return std::cos(3 * t); });
    for (double v : difference_series(s, s, ResampledAlignment{}).values) CHECK(v == 0.0);
    const auto path = identity_path(s.timestamps, s.timestamps);
    for (double v : difference_series(s, s, path).values) CHECK(v == 0.0);
}

TEST_CASE("resampled difference on mismatched rates uses the coarser grid") {
    const auto a = sampled(testing::times(11, 0.1), [](double t) { return 2.0 * t; });
    const auto b = sampled(testing::times(21, 0.05), [](double t) { return 0.5 * t + 1.0; });
    const auto d = difference_series(a, b, ResampledAlignment{});
    CHECK(d.size() == 11);
    for (std::size_t k = 0; k < d.size(); ++k) {
        CHECK(d.values[k] == Approx(1.5 * d.timestamps[k] - 1.0).epsilon(1e-12));
    }
    const auto c = sampled(testing::times(11, 0.2), [](double t) { return t; });
    CHECK_THROWS_AS(difference_series(a, c, ResampledAlignment{}), Error);
}

TEST_CASE("difference along a warping path follows the pairs") {
    // a visits 0, 1, 2; b lingers at 0 then jumps: hand-computed expectation
    ScalarSeries a{"a", "", {0, 1, 2}, {0.0, 1.0, 2.0}};
    ScalarSeries b{"b", "", {0, 1, 2, 3}, {0.0, 0.0, 1.0, 2.0}};
    const auto cost = [&](std::size_t i, std::size_t j) { return std::abs(a.values[i] - b.values[j]); };
    const auto path = dtw(3, 4, cost);
    CHECK(path.total_cost == 0.0);
    auto with_times = path;
    with_times.timestamps_a = a.timestamps;
    with_times.timestamps_b = b.timestamps;
    const auto d = difference_series(a, b, with_times);
    CHECK(d.timestamps == std::vector<double>{0, 0, 1, 2});
    CHECK(d.values == std::vector<double>{0, 0, 0, 0});
    with_times.pairs.push_back({3, 3});
    CHECK_THROWS_AS(difference_series(a, b, with_times), Error);
}

TEST_CASE("distance series between parallel tracks") {
    PoseTrajectory a, b;
    for (double t : testing::times(10, 0.1)) {
        a.timestamps.push_back(t);
        b.timestamps.push_back(t);
        a.poses.push_back({Vec3(t, 0, 0), UnitQuaternion::identity()});
        b.poses.push_back({Vec3(t, 0.3, 0.4), UnitQuaternion::identity()});
    }
    for (double v : cartesian_distance_series(a, b, ResampledAlignment{}).values) CHECK(v == Approx(0.5));
}

TEST_CASE("distance to a polyline") {
    const std::vector<Vec3> line{{0, 0, 0}, {1, 0, 0}, {1, 1, 0}};
    CHECK(distance_to_polyline({0.5, 0.5, 0}, line) == Approx(0.5));
    CHECK(distance_to_polyline({2, 2, 0}, line) == Approx(std::sqrt(2.0)));
    CHECK(distance_to_polyline({0, 0, 3}, {Vec3(0, 0, 0)}) == 3.0);
    CHECK_THROWS_AS(distance_to_polyline({0, 0, 0}, {}), Error);
}

TEST_CASE("metrics of a constant-speed planar motion") {
    // single joint spinning at 1 rad/s: tip moves on the unit circle
    const auto urdf = testing::planar_chain_urdf({1.0});
    const auto ts = testing::times(101, 0.01);
    std::vector<Configuration> q;
    for (double t : ts) q.push_back({t});
    const auto m = testing::make_motion(urdf, "tip", ts, q);
    const auto metrics = motion_metrics(m.motion, m.robot, "tip");
    CHECK(metrics.duration == Approx(1.0));
    // chord sum of 100 steps of 0.01 rad on the unit circle
    CHECK(metrics.ee_path_length == Approx(100 * 2 * std::sin(0.005)).epsilon(1e-12));
    // jerk of a unit circle at 1 rad/s has magnitude 1
    CHECK(metrics.jerk_rms == Approx(1.0).epsilon(1e-3));
    CHECK(!metrics.tracking_error_rms);
}

TEST_CASE("metrics: straight line has zero jerk and tracking error against a shifted copy") {
    const auto urdf = R"(<robot name="slide"><link name="a"/><link name="b"/>
      <joint name="x" type="prismatic"><parent link="a"/><child link="b"/><axis xyz="1 0 0"/>
      <limit lower="-5" upper="5"/></joint></robot>)";
    const auto ts = testing::times(50, 0.02);
    std::vector<Configuration> q;
    for (double t : ts) q.push_back({0.7 * t});
    const auto m = testing::make_motion(urdf, "b", ts, q);
    PoseTrajectory reference;
    for (double t : ts) {
        reference.timestamps.push_back(t);
        reference.poses.push_back({Vec3(0.7 * t, 0.25, 0.0), UnitQuaternion::identity()});
    }
    const auto metrics = motion_metrics(m.motion, m.robot, "b", &reference);
    CHECK(metrics.jerk_rms <= 1e-9);
    REQUIRE(metrics.tracking_error_rms);
    CHECK(*metrics.tracking_error_rms == Approx(0.25));
}
