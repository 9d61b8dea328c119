#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include "doctest.h"
#include "json.hpp"
#include "mocomp/errors.hpp"
#include "mocomp/fixtures.hpp"
#include "mocomp/motion_io.hpp"
#include "support.hpp"

using namespace mocomp;
using nlohmann::json;
using doctest::Approx;

namespace {

const std::string kSlider = R"(<robot name="slider"><link name="base"/><link name="cart"/><link name="tip"/>
  <joint name="rail" type="prismatic"><parent link="base"/><child link="cart"/><axis xyz="1 0 0"/>
    <limit lower="-1" upper="1"/></joint>
  <joint name="wrist" type="revolute"><parent link="cart"/><child link="tip"/><axis xyz="0 0 1"/>
    <limit lower="-3" upper="3"/></joint></robot>)";

json base_doc() {
    return {{"format_version", 1},
            {"name", "demo"},
            {"robot", {{"urdf", kSlider}, {"ee_link", "tip"}}},
            {"joints", {{"names", {"rail", "wrist"}}, {"units", {"m", "deg"}}, {"rows", {{2.0, 0.1, 90}, {2.5, 0.2, 180}}}}}};
}

ErrorCode code_of(const json& doc, std::string* detail = nullptr, LoadOptions options = {}) {
    try {
        load_motion(doc.dump(), MotionFormat::Json, options);
    } catch (const Error& e) {
        if (detail) *detail = e.detail();
        return e.code();
    }
    FAIL("document accepted");
    return ErrorCode::Internal;
}

LoadOptions csv_options() {
    LoadOptions o;
    o.robot = RobotSource{kSlider, "tip"};
    o.name = "recorded";
    return o;
}

}  // namespace

TEST_CASE("json motion loads with unit conversion and time shift") {
    const LoadedMotion m = load_motion(base_doc().dump(), MotionFormat::Json);
    CHECK(m.motion.name == "demo");
    CHECK(m.motion.ee_link == "tip");
    CHECK(m.motion.robot_ref == "slider");
    CHECK(m.motion.joints.timestamps == std::vector<double>{0.0, 0.5});
    CHECK(m.motion.joints.configurations[0][0] == 0.1);
    CHECK(m.motion.joints.configurations[0][1] == Approx(std::numbers::pi / 2));
    CHECK(m.motion.joints.configurations[1][1] == Approx(std::numbers::pi));
}

TEST_CASE("a single unit string applies to every joint") {
    json doc = base_doc();
    doc["robot"]["urdf"] = testing::planar_chain_urdf({1.0, 1.0});
    doc["joints"]["names"] = {"j0", "j1"};
    doc["joints"]["units"] = "deg";
    doc["joints"]["rows"] = {{0, 0, 45}, {1, 0, 90}};
    const LoadedMotion m = load_motion(doc.dump(), MotionFormat::Json);
    CHECK(m.motion.joints.configurations[1][1] == Approx(std::numbers::pi / 2));
}

TEST_CASE("object tracks share the time origin") {
    json doc = base_doc();
    doc["object_tracks"] = {{"cup", {{"rows", {{1.0, 0, 0, 0, 0, 0, 0, 1}, {3.0, 1, 0, 0, 0, 0, 0, 2}}}}}};
    const LoadedMotion m = load_motion(doc.dump(), MotionFormat::Json);
    CHECK(m.motion.joints.timestamps.front() == 1.0);
    const auto& cup = m.motion.object_tracks.at("cup");
    CHECK(cup.timestamps == std::vector<double>{0.0, 2.0});
    // quaternions are renormalized on construction
    CHECK(cup.poses[1].orientation.w == Approx(1.0));
}

TEST_CASE("schema errors carry a json pointer") {
    std::string where;
    json doc = base_doc();
    doc.erase("format_version");
    CHECK(code_of(doc, &where) == ErrorCode::SchemaError);
    CHECK(where == "/format_version");

    doc = base_doc();
    doc["format_version"] = 2;
    CHECK(code_of(doc, &where) == ErrorCode::SchemaError);
    CHECK(where == "/format_version");

    doc = base_doc();
    doc["robot"]["ee_link"] = "gripper";
    CHECK(code_of(doc, &where) == ErrorCode::SchemaError);
    CHECK(where == "/robot/ee_link");

    doc = base_doc();
    doc["joints"]["rows"][1] = {2.5, 0.2};
    CHECK(code_of(doc, &where) == ErrorCode::SchemaError);
    CHECK(where == "/joints/rows/1");

    doc = base_doc();
    doc["joints"]["rows"][0][2] = "ninety";
    CHECK(code_of(doc, &where) == ErrorCode::SchemaError);
    CHECK(where == "/joints/rows/0/2");

    doc = base_doc();
    doc["joints"]["names"] = {"rail", "elbow"};
    CHECK(code_of(doc) == ErrorCode::SchemaError);

    CHECK_THROWS_AS(load_motion("{not json", MotionFormat::Json), Error);
}

TEST_CASE("unit and time errors") {
    json doc = base_doc();
    doc["joints"]["units"] = {"deg", "deg"};
    CHECK(code_of(doc) == ErrorCode::UnitError);
    doc["joints"]["units"] = {"m", "m"};
    CHECK(code_of(doc) == ErrorCode::UnitError);
    doc["joints"]["units"] = {"m", "furlong"};
    CHECK(code_of(doc) == ErrorCode::UnitError);

    doc = base_doc();
    doc["joints"]["rows"][1][0] = 2.0;
    std::string where;
    CHECK(code_of(doc, &where) == ErrorCode::MonotonicityError);
    CHECK(where == "/joints/rows/1");
}

TEST_CASE("robot file references") {
    const auto dir = std::filesystem::temp_directory_path() / "mocomp_test_io";
    std::filesystem::create_directories(dir);
    std::ofstream(dir / "slider.urdf") << kSlider;
    json doc = base_doc();
    doc["robot"]["urdf"] = {{"file", "slider.urdf"}};
    LoadOptions options;
    options.base_dir = dir;
    CHECK(load_motion(doc.dump(), MotionFormat::Json, options).motion.robot_ref == "slider");
    options.allow_file_refs = false;
    std::string where;
    CHECK(code_of(doc, &where, options) == ErrorCode::SchemaError);
    CHECK(where == "/robot/urdf");
    options.allow_file_refs = true;
    doc["robot"]["urdf"] = {{"file", "missing.urdf"}};
    CHECK(code_of(doc, &where, options) == ErrorCode::SchemaError);
    std::filesystem::remove_all(dir);
}

TEST_CASE("save and load round-trip every fixture exactly") {
    for (const char* which : {"A", "B", "C", "D", "speed", "piecewise"}) {
        for (const auto& named : fixtures::generate(which)) {
            const std::string bytes = save_motion(named.motion);
            const LoadedMotion back = load_motion(bytes, MotionFormat::Json);
            CHECK(back.motion.joints == named.motion.motion.joints);
            CHECK(back.motion.object_tracks.size() == named.motion.motion.object_tracks.size());
            for (const auto& [name, track] : named.motion.motion.object_tracks) {
                const auto& other = back.motion.object_tracks.at(name);
                CHECK(other.timestamps == track.timestamps);
                for (std::size_t k = 0; k < track.size(); ++k) {
                    CHECK(other.poses[k].position == track.poses[k].position);
                    const auto& p = other.poses[k].orientation;
                    const auto& q = track.poses[k].orientation;
                    CHECK(std::abs(std::abs(p.dot(q)) - 1.0) <= 1e-15);
                }
            }
            CHECK(save_motion(back) == bytes);
        }
    }
}

TEST_CASE("csv motions") {
    const std::string csv = "t,rail[m],wrist[deg]\n10,0.5,0\n10.5,0.25,-90\n11,0,-180\n";
    const LoadedMotion m = load_motion(csv, MotionFormat::Csv, csv_options());
    CHECK(m.motion.name == "recorded");
    CHECK(m.motion.joints.timestamps == std::vector<double>{0.0, 0.5, 1.0});
    CHECK(m.motion.joints.configurations[2][1] == Approx(-std::numbers::pi));

    try {
        load_motion("t,rail,wrist\n0,1,2\n1,2\n", MotionFormat::Csv, csv_options());
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaError);
        CHECK(e.detail() == "line 3");
    }
    try {
        load_motion("t,rail,wrist\n1,0,0\n0,0,0\n", MotionFormat::Csv, csv_options());
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::MonotonicityError);
        CHECK(e.detail() == "line 3");
    }
    CHECK_THROWS_AS(load_motion("t,rail[deg]\n0,1\n", MotionFormat::Csv, csv_options()), Error);
    CHECK_THROWS_AS(load_motion(csv, MotionFormat::Csv), Error);
}

TEST_CASE("format_double round-trips") {
    testing::Rng rng(17);
    for (int k = 0; k < 2000; ++k) {
        const double v = rng.normal() * std::pow(10.0, rng.uniform(-12, 12));
        CHECK(std::stod(format_double(v)) == v);
    }
    CHECK(format_double(0.1) == "0.1");
    CHECK(format_double(2.0) == "2");
}

TEST_CASE("series csv round-trips in both layouts") {
    const ScalarSeries a{"d(joint6)/dt", "rad/s", {0.0, 0.1, 0.2}, {1.5, -2.25, 1e-9}};
    const ScalarSeries b{"speed, smoothed", "m/s", {0.0, 1.0}, {0.1, 0.3}};
    CHECK(export_series_csv(a) == "t,d(joint6)/dt\n0,1.5\n0.1,-2.25\n0.2,1e-09\n");
    const auto one = parse_series_csv(export_series_csv(a));
    REQUIRE(one.size() == 1);
    CHECK(one[0].timestamps == a.timestamps);
    CHECK(one[0].values == a.values);
    CHECK(one[0].name == a.name);

    const auto both = parse_series_csv(export_series_csv(std::vector<ScalarSeries>{a, b}));
    REQUIRE(both.size() == 2);
    CHECK(both[0] == a);
    CHECK(both[1] == b);
    CHECK_THROWS_AS(parse_series_csv("x,y\n1,2\n"), Error);
}

TEST_CASE("trace text round-trips") {
    TracePolyline poly{{0.0, 0.5, 1.0}, {Vec3(0, 0, 0), Vec3(0.1, 0.2, 0.3), Vec3(1, 1, 1)}};
    const std::vector<ConeGlyph> cones{{Vec3(0, 0, 0), Vec3(1, 0, 0), 0.02}};
    const std::string text = export_trace(poly, cones);
    CHECK(text.rfind("mocomp-trace 1\nvertices 3\n", 0) == 0);
    const PositionTrace back = parse_trace(text);
    CHECK(back.polyline.timestamps == poly.timestamps);
    CHECK(back.polyline.points == poly.points);
    REQUIRE(back.cones.size() == 1);
    CHECK(back.cones[0].direction == Vec3(1, 0, 0));
    CHECK(back.cones[0].scale == 0.02);
    CHECK_THROWS_AS(parse_trace("mocomp-trace 1\nvertices 2\nv 0 0 0 0\n"), Error);
    CHECK_THROWS_AS(parse_trace("something else"), Error);
}
