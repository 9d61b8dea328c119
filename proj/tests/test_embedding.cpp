#include <cmath>
#include <set>

#include "doctest.h"
#include "mocomp/embedding.hpp"
#include "mocomp/errors.hpp"
#include "support.hpp"

using namespace mocomp;
using doctest::Approx;

namespace {

using Rows = std::vector<std::vector<double>>;

// 12 points in R^4 and a 2D layout of them; reference scores from sklearn.manifold.trustworthiness
const Rows kHigh = {{2.041, -2.556, 0.418, -0.568}, {-0.453, -0.216, -2.02, -0.232}, {-0.865, 3.323, 0.226, -0.353},
                    {-0.281, -0.668, -1.055, -0.391}, {0.482, -0.239, 0.958, -0.2},  {0.024, 1.546, 0.545, -0.505},
                    {-0.183, 0.541, 1.935, -0.27},   {-0.244, 1.002, -0.886, -0.292}, {0.883, 0.58, 0.092, 0.67},
                    {-2.828, 1.021, -0.96, -1.669},  {0.276, 0.701, -0.445, -1.076}, {0.026, -0.053, 1.406, 0.747}};
const std::vector<Point2> kLow = {{2.157, -1.889}, {-0.576, -0.772}, {-0.515, 3.673}, {-0.41, -1.138},
                                  {0.619, -1.735}, {0.438, 1.841},   {-1.166, 0.578}, {-0.822, 1.456},
                                  {-0.338, 0.031}, {-2.402, 1.715},  {-1.019, 0.402}, {0.223, -0.419}};

JointTrajectory cluster(testing::Rng& rng, double cx, double cy, std::size_t n, double t0 = 0.0) {
    JointTrajectory t;
    t.joint_names = {"a", "b", "c"};
    for (std::size_t k = 0; k < n; ++k) {
        t.timestamps.push_back(t0 + 0.1 * static_cast<double>(k));
        t.configurations.push_back({cx + 0.05 * rng.normal(), cy + 0.05 * rng.normal(), 0.05 * rng.normal()});
    }
    return t;
}

Point2 centroid(const std::vector<Point2>& pts, std::size_t lo, std::size_t hi) {
    Point2 c{0.0, 0.0};
    for (std::size_t k = lo; k < hi; ++k) {
        c[0] += pts[k][0];
        c[1] += pts[k][1];
    }
    c[0] /= static_cast<double>(hi - lo);
    c[1] /= static_cast<double>(hi - lo);
    return c;
}

double dist(const Point2& a, const Point2& b) { return std::hypot(a[0] - b[0], a[1] - b[1]); }

}  // namespace

TEST_CASE("curve parameters match a least-squares reference fit") {
    // scipy.optimize.curve_fit on the same 300-point target
    const std::vector<std::tuple<double, double, double>> expected = {
        {0.1, 1.5769434602697652, 0.8950608778515733},
        {0.0, 1.93280839734315, 0.7904949732233831},
        {0.25, 1.1214363422305684, 1.057499876683671},
        {0.5, 0.5830300203414425, 1.3341669924314914},
    };
    for (const auto& [min_dist, a, b] : expected) {
        const auto [fa, fb] = fit_ab(min_dist);
        CHECK(fa == Approx(a).epsilon(1e-4));
        CHECK(fb == Approx(b).epsilon(1e-4));
    }
}

TEST_CASE("trustworthiness matches the reference implementation") {
    CHECK(trustworthiness(kHigh, kLow, 1) == Approx(0.775).epsilon(1e-12));
    CHECK(trustworthiness(kHigh, kLow, 3) == Approx(0.746031746031746).epsilon(1e-12));
    CHECK(trustworthiness(kHigh, kLow, 5) == Approx(0.7291666666666667).epsilon(1e-12));
}

TEST_CASE("trustworthiness bounds and domain") {
    std::vector<Point2> exact;
    for (const auto& r : kHigh) exact.push_back({r[0], r[1]});
    const Rows flat = [&] {
        Rows out;
        for (const auto& p : exact) out.push_back({p[0], p[1], 0.0});
        return out;
    }();
    CHECK(trustworthiness(flat, exact, 3) == Approx(1.0));
    for (std::size_t k = 1; k < 6; ++k) {
        const double t = trustworthiness(kHigh, kLow, k);
        CHECK(t >= 0.0);
        CHECK(t <= 1.0);
    }
    for (std::size_t k : {std::size_t{0}, std::size_t{6}, std::size_t{11}}) {
        try {
            trustworthiness(kHigh, kLow, k);
            FAIL("accepted k");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::InvalidK);
        }
    }
    CHECK_THROWS_AS(trustworthiness(kHigh, std::vector<Point2>(kLow.begin(), kLow.end() - 1), 2), Error);
}

TEST_CASE("pca matches a reference eigendecomposition") {
    // numpy.linalg.eigh of the population covariance
    const Rows a = {{2, 0.5, 1}, {1, 1.5, -0.5}, {0, -1, 2}, {3, 2, 0.5}, {-1, 0, 1}, {0.5, 0.5, 0.5}};
    const PcaResult r = pca_2d(a);
    CHECK(r.eigenvalues[0] == Approx(2.51065821).epsilon(1e-7));
    CHECK(r.eigenvalues[1] == Approx(0.66542671).epsilon(1e-7));
    CHECK(r.eigenvalues[2] == Approx(0.03919286).epsilon(1e-6));
    const double comps[3][2] = {{0.76554597, 0.58425517}, {0.56947004, -0.42045927}, {-0.29940481, 0.69416129}};
    for (int i = 0; i < 3; ++i) {
        for (int j = 0; j < 2; ++j) CHECK(r.components(i, j) == Approx(comps[i][j]).epsilon(1e-7));
    }
    const double pts[6][2] = {{0.70703443, 0.84152169}, {0.96006571, -1.20443468}, {-1.97766738, 0.99786156},
                              {2.47648787, 0.44800731},  {-1.8743385, -0.70101417}, {-0.29158212, -0.3819417}};
    for (int k = 0; k < 6; ++k) {
        CHECK(r.points[static_cast<std::size_t>(k)][0] == Approx(pts[k][0]).epsilon(1e-7));
        CHECK(r.points[static_cast<std::size_t>(k)][1] == Approx(pts[k][1]).epsilon(1e-7));
    }
}

TEST_CASE("pca projections preserve the spread along the components") {
    testing::Rng rng(8);
    for (int trial = 0; trial < 20; ++trial) {
        Rows rows;
        const std::size_t n = rng.index(5, 40), d = rng.index(2, 6);
        for (std::size_t k = 0; k < n; ++k) {
            std::vector<double> row(d);
            for (std::size_t j = 0; j < d; ++j) row[j] = rng.normal() * static_cast<double>(j + 1);
            rows.push_back(row);
        }
        const PcaResult r = pca_2d(rows);
        for (int c = 0; c < 2; ++c) {
            double mean = 0.0, var = 0.0;
            for (const auto& p : r.points) mean += p[static_cast<std::size_t>(c)];
            mean /= static_cast<double>(n);
            for (const auto& p : r.points) var += std::pow(p[static_cast<std::size_t>(c)] - mean, 2);
            var /= static_cast<double>(n);
            CHECK(std::abs(mean) <= 1e-9);
            CHECK(var == Approx(r.eigenvalues[c]).epsilon(1e-9));
            const Eigen::VectorXd col = r.components.col(c);
            CHECK(col.norm() == Approx(1.0));
            Eigen::Index arg = 0;
            col.cwiseAbs().maxCoeff(&arg);
            CHECK(col[arg] > 0.0);
        }
        CHECK(std::abs(r.components.col(0).dot(r.components.col(1))) <= 1e-9);
    }
}

TEST_CASE("umap is deterministic for a fixed seed") {
    testing::Rng rng(3);
    std::vector<JointTrajectory> motions = {cluster(rng, 0, 0, 30), cluster(rng, 2, 2, 30)};
    EmbeddingParams p;
    p.n_neighbors = 10;
    p.n_epochs = 100;
    const Embedding e1 = embed_joint_states(motions, p);
    const Embedding e2 = embed_joint_states(motions, p);
    CHECK(e1.points == e2.points);
    p.seed = 43;
    CHECK(embed_joint_states(motions, p).points != e1.points);
}

TEST_CASE("umap separates two well separated clusters") {
    testing::Rng rng(11);
    std::vector<JointTrajectory> motions = {cluster(rng, 0, 0, 40), cluster(rng, 3, -3, 40)};
    EmbeddingParams p;
    p.n_neighbors = 10;
    const Embedding e = embed_joint_states(motions, p);
    REQUIRE(e.spans.size() == 2);
    CHECK(e.spans[0] == std::pair<std::size_t, std::size_t>{0, 40});
    CHECK(e.spans[1] == std::pair<std::size_t, std::size_t>{40, 80});
    const Point2 c0 = centroid(e.points, 0, 40), c1 = centroid(e.points, 40, 80);
    double spread = 0.0;
    for (std::size_t k = 0; k < 80; ++k) spread = std::max(spread, dist(e.points[k], k < 40 ? c0 : c1));
    CHECK(dist(c0, c1) > 2.0 * spread);
    Rows high;
    for (const auto& m : motions) {
        for (const auto& q : m.configurations) high.push_back(q);
    }
    CHECK(trustworthiness(high, e, 5) > 0.8);
}

TEST_CASE("identical joint states share coordinates") {
    Rows rows;
    testing::Rng rng(4);
    for (int k = 0; k < 20; ++k) rows.push_back({rng.normal(), rng.normal()});
    rows.push_back(rows[3]);
    rows.push_back(rows[3]);
    EmbeddingParams p;
    p.n_neighbors = 5;
    p.n_epochs = 50;
    const auto pts = umap_layout(rows, p);
    REQUIRE(pts.size() == rows.size());
    CHECK(pts[20] == pts[3]);
    CHECK(pts[21] == pts[3]);
}

TEST_CASE("embedding timestamps and traces follow the inputs") {
    testing::Rng rng(6);
    std::vector<JointTrajectory> motions = {cluster(rng, 0, 0, 12), cluster(rng, 1, 1, 8, 5.0)};
    EmbeddingParams p;
    p.method = EmbeddingMethod::Pca;
    const Embedding e = embed_joint_states(motions, p);
    CHECK(e.points.size() == 20);
    const JointTrace t = joint_trace_polyline(e, 1);
    CHECK(t.timestamps == motions[1].timestamps);
    CHECK(t.points == std::vector<Point2>(e.points.begin() + 12, e.points.end()));
    CHECK_THROWS_AS(joint_trace_polyline(e, 2), Error);
}

TEST_CASE("embedding argument errors") {
    testing::Rng rng(9);
    EmbeddingParams p;
    JointTrajectory two = cluster(rng, 0, 0, 20);
    JointTrajectory narrow = two;
    narrow.joint_names.pop_back();
    for (auto& q : narrow.configurations) q.pop_back();
    try {
        embed_joint_states({two, narrow}, p);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::JointCountMismatch);
    }
    try {
        embed_joint_states({cluster(rng, 0, 0, 10)}, p);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::TooFewSamples);
    }
    CHECK_THROWS_AS(embed_joint_states({}, p), Error);
    p.n_neighbors = 1;
    CHECK_THROWS_AS(p.check(), Error);
    p = {};
    p.min_dist = 1.0;
    CHECK_THROWS_AS(p.check(), Error);
    p = {};
    p.n_epochs = 0;
    CHECK_THROWS_AS(p.check(), Error);
}
