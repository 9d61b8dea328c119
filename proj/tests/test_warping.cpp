#include <cmath>

#include "doctest.h"
#include "mocomp/errors.hpp"
#include "mocomp/warping.hpp"
#include "support.hpp"

using namespace mocomp;
using doctest::Approx;

namespace {

using Matrix = std::vector<std::vector<double>>;

Matrix random_matrix(testing::Rng& rng, std::size_t n, std::size_t m) {
    Matrix c(n, std::vector<double>(m));
    for (auto& row : c) {
        for (double& v : row) v = rng.uniform(0.0, 3.0);
    }
    return c;
}

WarpingPath run(const Matrix& c, DtwOptions options = {}) {
    return dtw(c.size(), c[0].size(), [&](std::size_t i, std::size_t j) { return c[i][j]; }, options);
}

void check_path_shape(const WarpingPath& p, std::size_t n, std::size_t m) {
    REQUIRE(!p.pairs.empty());
    CHECK(p.pairs.front() == std::pair<std::size_t, std::size_t>{0, 0});
    CHECK(p.pairs.back() == std::pair<std::size_t, std::size_t>{n - 1, m - 1});
    for (std::size_t k = 1; k < p.pairs.size(); ++k) {
        const auto di = p.pairs[k].first - p.pairs[k - 1].first;
        const auto dj = p.pairs[k].second - p.pairs[k - 1].second;
        CHECK((di <= 1 && dj <= 1 && di + dj >= 1));
    }
}

AlignmentSignal scalar_signal(const std::vector<double>& ts, const std::vector<double>& v) {
    AlignmentSignal s;
    s.timestamps = ts;
    for (double x : v) s.joints.push_back({x});
    return s;
}

}  // namespace

TEST_CASE("dtw total equals the exhaustive minimum") {
    testing::Rng rng(2024);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = rng.index(1, 6), m = rng.index(1, 6);
        const Matrix c = random_matrix(rng, n, m);
        const WarpingPath p = run(c);
        CHECK(p.total_cost == testing::brute_force_dtw(c));
        check_path_shape(p, n, m);
        double along = 0.0;
        for (const auto& [i, j] : p.pairs) along += c[i][j];
        CHECK(along == p.total_cost);
    }
}

TEST_CASE("dtw is symmetric under transposition") {
    testing::Rng rng(5);
    for (int trial = 0; trial < 100; ++trial) {
        const std::size_t n = rng.index(1, 12), m = rng.index(1, 12);
        const Matrix c = random_matrix(rng, n, m);
        Matrix ct(m, std::vector<double>(n));
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < m; ++j) ct[j][i] = c[i][j];
        }
        CHECK(run(c).total_cost == run(ct).total_cost);
    }
}

TEST_CASE("ties prefer the diagonal, then advancing b") {
    const Matrix zeros(3, std::vector<double>(3, 0.0));
    const auto diag = run(zeros).pairs;
    CHECK(diag == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 1}, {2, 2}});

    Matrix c = zeros;
    c[1][1] = 10.0;
    const auto detour = run(c).pairs;
    CHECK(detour == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {1, 0}, {2, 1}, {2, 2}});

    const Matrix wide(2, std::vector<double>(3, 0.0));
    CHECK(run(wide).pairs == std::vector<std::pair<std::size_t, std::size_t>>{{0, 0}, {0, 1}, {1, 2}});
}

TEST_CASE("band constrains the path") {
    testing::Rng rng(77);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = rng.index(2, 15), m = rng.index(2, 15);
        const Matrix c = random_matrix(rng, n, m);
        const double free_cost = run(c).total_cost;
        CHECK(run(c, {std::max(n, m)}).total_cost == free_cost);
        const std::size_t band = rng.index(1, 3);
        try {
            const WarpingPath p = run(c, {band});
            CHECK(p.total_cost >= free_cost);
            for (const auto& [i, j] : p.pairs) {
                const double centre = static_cast<double>(i) * static_cast<double>(m - 1) / static_cast<double>(n - 1);
                CHECK(std::abs(static_cast<double>(j) - centre) <= static_cast<double>(band) + 1e-9);
            }
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidArgument);
        }
    }
    const Matrix square(5, std::vector<double>(5, 1.0));
    CHECK(run(square, {0}).pairs.size() == 5);
    CHECK_THROWS_AS(run(Matrix(3, std::vector<double>(5, 1.0)), {0}), Error);
}

TEST_CASE("empty input is rejected") {
    CHECK_THROWS_AS(dtw(0, 3, [](std::size_t, std::size_t) { return 0.0; }), Error);
}

TEST_CASE("local cost names and weights") {
    CHECK(LocalCost::from_name("ee") == LocalCost::ee());
    CHECK(LocalCost::from_name("quat").name() == "quaternion_geodesic");
    CHECK(LocalCost::from_name("joint").name() == "joint_l2");
    CHECK(LocalCost{1.0, 0.5, 0.0}.name() == "weighted_sum");
    CHECK_THROWS_AS(LocalCost::from_name("cosine"), Error);
    CHECK_THROWS_AS((LocalCost{0.0, 0.0, 0.0}.check()), Error);
    CHECK_THROWS_AS((LocalCost{-1.0, 1.0, 0.0}.check()), Error);
}

TEST_CASE("weighted local cost sums its terms") {
    AlignmentSignal a, b;
    a.timestamps = b.timestamps = {0.0};
    a.joints = {{0.0, 0.0}};
    b.joints = {{3.0, 4.0}};
    a.positions = {Vec3(0, 0, 0)};
    b.positions = {Vec3(0, 0, 2)};
    a.orientations = {UnitQuaternion::identity()};
    b.orientations = {UnitQuaternion::from_axis_angle(Vec3(0, 0, 1), 0.5)};
    CHECK(local_cost(a, 0, b, 0, {1.0, 0.0, 0.0}) == Approx(5.0));
    CHECK(local_cost(a, 0, b, 0, {0.0, 1.0, 0.0}) == Approx(2.0));
    CHECK(local_cost(a, 0, b, 0, {0.0, 0.0, 1.0}) == Approx(0.5));
    CHECK(local_cost(a, 0, b, 0, {2.0, 1.0, 4.0}) == Approx(14.0));
}

TEST_CASE("dtw_align checks the signals") {
    AlignmentSignal a = scalar_signal({0, 1}, {0, 1});
    AlignmentSignal b = a;
    b.joints = {{0, 0}, {1, 1}};
    CHECK_THROWS_AS(dtw_align(a, b, LocalCost::joint()), Error);
    CHECK_THROWS_AS(dtw_align(a, a, LocalCost::ee()), Error);
    CHECK_THROWS_AS(dtw_align(a, AlignmentSignal{}, LocalCost::joint()), Error);
    const WarpingPath p = dtw_align(a, a, LocalCost::joint());
    CHECK(p.total_cost == 0.0);
    CHECK(p.timestamps_a == a.timestamps);
}

TEST_CASE("warping curve and its diagonal") {
    const AlignmentSignal a = scalar_signal({0.0, 0.5, 1.0}, {0, 1, 2});
    const AlignmentSignal b = scalar_signal({0.0, 0.5, 1.0, 1.5, 2.0}, {0, 0.5, 1, 1.5, 2});
    const WarpingPath p = dtw_align(a, b, LocalCost::joint());
    const WarpingCurve curve = warping_curve(p);
    REQUIRE(curve.points.size() == p.pairs.size());
    for (std::size_t k = 0; k < p.pairs.size(); ++k) {
        CHECK(curve.points[k].first == a.timestamps[p.pairs[k].first]);
        CHECK(curve.points[k].second == b.timestamps[p.pairs[k].second]);
    }
    CHECK(curve.diagonal_start == std::pair<double, double>{0.0, 0.0});
    CHECK(curve.diagonal_end == std::pair<double, double>{2.0, 2.0});
}

TEST_CASE("relative speed of a motion run twice as fast") {
    std::vector<double> ta, va, tb, vb;
    for (int k = 0; k <= 40; ++k) {
        ta.push_back(0.05 * k);
        va.push_back(k / 40.0);
    }
    for (int k = 0; k <= 80; ++k) {
        tb.push_back(0.05 * k);
        vb.push_back(k / 80.0);
    }
    const WarpingPath p = dtw_align(scalar_signal(ta, va), scalar_signal(tb, vb), LocalCost::joint());
    const RelativeSpeedSeries fast = relative_speed(p, Subject::A);
    const RelativeSpeedSeries slow = relative_speed(p, Subject::B);
    CHECK(fast.timestamps == ta);
    CHECK(slow.timestamps == tb);
    for (std::size_t i = 0; i < fast.ratio.size(); ++i) {
        CHECK(fast.ratio[i] >= 1.9);
        CHECK(fast.ratio[i] <= 2.1);
        CHECK(fast.color_scalar[i] == Approx(std::log2(fast.ratio[i]) / 2.0));
        CHECK(fast.color_scalar[i] > 0.0);
    }
    for (std::size_t i = 0; i < slow.ratio.size(); ++i) {
        // one fast sample spans two slow ones, so the window quantizes to 0.05
        CHECK(slow.ratio[i] >= 0.45 - 1e-12);
        CHECK(slow.ratio[i] <= 0.55 + 1e-12);
        CHECK(slow.color_scalar[i] < 0.0);
    }
}

TEST_CASE("relative speed of identical motions is one") {
    const auto ts = testing::times(30, 0.1);
    const WarpingPath p = identity_path(ts, ts);
    for (double r : relative_speed(p, Subject::A).ratio) CHECK(r == Approx(1.0).epsilon(1e-12));
    for (double c : relative_speed(p, Subject::B).color_scalar) CHECK(std::abs(c) <= 1e-12);
}

TEST_CASE("color scalar saturates") {
    // b covers 16x the time of a
    const WarpingPath p = identity_path(testing::times(5, 0.1), testing::times(5, 1.6));
    const auto rs = relative_speed(p, Subject::A);
    for (std::size_t i = 0; i < rs.ratio.size(); ++i) {
        CHECK(rs.ratio[i] == Approx(16.0));
        CHECK(rs.color_scalar[i] == 1.0);
    }
    for (double c : relative_speed(p, Subject::B).color_scalar) CHECK(c == -1.0);
}

TEST_CASE("relative speed needs two samples per side") {
    const WarpingPath p = identity_path({0.0}, {0.0});
    CHECK_THROWS_AS(relative_speed(p, Subject::A), Error);
    CHECK_THROWS_AS(relative_speed(WarpingPath{}, Subject::A), Error);
}

TEST_CASE("remap_time along an identity path") {
    const auto ts = testing::times(11, 0.1);
    const WarpingPath p = identity_path(ts, ts);
    for (double t : {0.0, 0.05, 0.33, 0.7, 1.0}) CHECK(remap_time(p, t) == Approx(t));
    CHECK_THROWS_AS(remap_time(p, -0.5), Error);
    CHECK_THROWS_AS(remap_time(p, 1.5, Subject::B), Error);
}

TEST_CASE("remap_time maps endpoints to endpoints and is monotone") {
    testing::Rng rng(31);
    for (int trial = 0; trial < 60; ++trial) {
        const std::size_t n = rng.index(2, 20), m = rng.index(2, 20);
        std::vector<double> va(n), vb(m);
        for (double& v : va) v = rng.uniform();
        for (double& v : vb) v = rng.uniform();
        const auto ta = testing::times(n, 0.1), tb = testing::times(m, 0.07);
        const WarpingPath p = dtw_align(scalar_signal(ta, va), scalar_signal(tb, vb), LocalCost::joint());
        CHECK(remap_time(p, ta.front()) == tb.front());
        CHECK(remap_time(p, ta.back()) == tb.back());
        CHECK(remap_time(p, tb.back(), Subject::B) == ta.back());
        double last = -1.0;
        for (int k = 0; k <= 50; ++k) {
            const double t = ta.back() * k / 50.0;
            const double mapped = remap_time(p, t);
            CHECK(mapped >= last);
            CHECK(mapped >= tb.front());
            CHECK(mapped <= tb.back());
            last = mapped;
        }
    }
}

TEST_CASE("transpose swaps roles") {
    const WarpingPath p = identity_path({0, 1}, {0, 2});
    const WarpingPath t = transpose(p);
    CHECK(t.timestamps_a == p.timestamps_b);
    CHECK(t.pairs == p.pairs);
    CHECK(transpose(t).timestamps_a == p.timestamps_a);
    CHECK_THROWS_AS(identity_path({0, 1}, {0}), Error);
}

TEST_CASE("common rate grids") {
    const auto a = testing::times(11, 0.1), b = testing::times(21, 0.1);
    CHECK(common_rate_grids(a, b).first == a);
    const auto [ga, gb] = common_rate_grids(a, testing::times(41, 0.05));
    CHECK(ga.size() == 21);
    CHECK(gb.size() == 41);
    CHECK(ga.back() == a.back());
    for (std::size_t k = 1; k < ga.size(); ++k) CHECK(ga[k] - ga[k - 1] == Approx(0.05));
}
