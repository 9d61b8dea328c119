#include "doctest.h"
#include "mocomp/errors.hpp"
#include "mocomp/session.hpp"
#include "support.hpp"

using namespace mocomp;
using nlohmann::json;

namespace {

LayoutNode random_layout(testing::Rng& rng, const std::vector<std::string>& views, int depth) {
    LayoutNode node;
    if (depth == 0 || rng.uniform() < 0.3) {
        node.view = views[rng.index(0, views.size() - 1)];
        return node;
    }
    node.direction = rng.uniform() < 0.5 ? "horizontal" : "vertical";
    const std::size_t n = rng.index(2, 3);
    // proportions that sum to exactly 1 in binary
    node.proportions = n == 2 ? std::vector<double>{0.25, 0.75} : std::vector<double>{0.5, 0.25, 0.25};
    for (std::size_t k = 0; k < n; ++k) node.children.push_back(random_layout(rng, views, depth - 1));
    return node;
}

Session random_session(testing::Rng& rng) {
    Session s;
    s.session_id = "s" + std::to_string(rng.index(1, 99));
    const std::size_t nm = rng.index(0, 4);
    for (std::size_t k = 0; k < nm; ++k) s.motion_ids.push_back("m" + std::to_string(k + 1));
    s.cursor = rng.uniform(0.0, 10.0);
    std::vector<std::string> names;
    const std::size_t nv = rng.index(1, 5);
    for (std::size_t k = 0; k < nv; ++k) {
        ViewConfig v;
        v.kind = kPanelKinds[rng.index(0, kPanelKinds.size() - 1)];
        for (const auto& id : s.motion_ids) {
            if (rng.uniform() < 0.5) v.visible_motions.push_back(id);
            if (rng.uniform() < 0.3) v.opacity[id] = rng.uniform();
        }
        if (rng.uniform() < 0.5) v.toggles["cones"] = rng.uniform() < 0.5;
        if (rng.uniform() < 0.5) v.toggles["ribbon"] = true;
        if (rng.uniform() < 0.5) v.selected_joints = {rng.index(0, 6), rng.index(0, 6)};
        if (s.motion_ids.size() >= 2 && rng.uniform() < 0.5) {
            v.warp = WarpPair{s.motion_ids[0], s.motion_ids[1], rng.uniform() < 0.5 ? LocalCost::ee() : LocalCost{0.5, 1.5, 0.0},
                              rng.uniform() < 0.5 ? std::optional<std::size_t>(rng.index(1, 20)) : std::nullopt};
        }
        if (rng.uniform() < 0.5) {
            v.camera = CameraPose{{rng.normal(), rng.normal(), rng.normal()}, {0.0, 0.1, 0.2}, {0.0, 0.0, 1.0}};
            v.camera_sync_group = "g" + std::to_string(rng.index(1, 2));
        }
        v.cursor_sync = rng.uniform() < 0.7;
        if (rng.uniform() < 0.3) v.extra["ui_hint"] = {{"zoom", rng.uniform()}};
        names.push_back("view" + std::to_string(k));
        s.views[names.back()] = v;
    }
    if (rng.uniform() < 0.8) s.layout = random_layout(rng, names, 3);
    if (rng.uniform() < 0.3) s.extra["future_field"] = json::array({1, "two"});
    return s;
}

json minimal() {
    return {{"format_version", 1},
            {"session_id", "s1"},
            {"motion_ids", {"m1", "m2"}},
            {"cursor", 1.5},
            {"layout",
             {{"direction", "horizontal"},
              {"proportions", {0.5, 0.5}},
              {"children", {{{"view", "left"}}, {{"view", "right"}}}}}},
            {"views",
             {{"left", {{"kind", "scene3d"}, {"visible_motions", {"m1", "m2"}}, {"opacity", {{"m2", 0.5}}}}},
              {"right", {{"kind", "timeline"}, {"warp", {{"a", "m1"}, {"b", "m2"}, {"cost", "ee"}}}}}}}};
}

std::string pointer_of(const json& doc) {
    try {
        session_from_json(doc);
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::SchemaError);
        return e.detail();
    }
    FAIL("document accepted");
    return {};
}

}  // namespace

TEST_CASE("sessions round-trip through their canonical bytes") {
    testing::Rng rng(100);
    for (int trial = 0; trial < 200; ++trial) {
        const Session s = random_session(rng);
        const std::string bytes = save_session(s);
        const Session back = load_session(bytes);
        CHECK(back == s);
        CHECK(save_session(back) == bytes);
    }
}

TEST_CASE("a minimal document loads") {
    const Session s = session_from_json(minimal());
    CHECK(s.motion_ids == std::vector<std::string>{"m1", "m2"});
    CHECK(s.views.at("left").opacity.at("m2") == 0.5);
    CHECK(s.views.at("right").warp->cost == LocalCost::ee());
    CHECK(s.views.at("left").cursor_sync);
    REQUIRE(s.layout);
    CHECK(s.layout->children[1].view == "right");
}

TEST_CASE("unknown keys are preserved") {
    json doc = minimal();
    doc["annotations"] = {{"note", "bottle slips at 2.1 s"}};
    doc["views"]["left"]["grid"] = true;
    const std::string bytes = save_session(session_from_json(doc));
    const json back = json::parse(bytes);
    CHECK(back["annotations"]["note"] == "bottle slips at 2.1 s");
    CHECK(back["views"]["left"]["grid"] == true);
}

TEST_CASE("canonical bytes sort keys") {
    const std::string bytes = save_session(session_from_json(minimal()));
    CHECK(bytes.find("\"cursor\"") < bytes.find("\"format_version\""));
    CHECK(bytes.find('\n') == std::string::npos);
    CHECK(bytes.find(": ") == std::string::npos);
}

TEST_CASE("version policy") {
    json doc = minimal();
    doc["format_version"] = 2;
    try {
        session_from_json(doc);
        FAIL("accepted");
    } catch (const Error& e) {
        CHECK(e.code() == ErrorCode::VersionError);
    }
    doc.erase("format_version");
    CHECK(pointer_of(doc) == "/format_version");
    CHECK_THROWS_AS(load_session("[1, 2"), Error);
}

TEST_CASE("structural errors point at the offending field") {
    json doc = minimal();
    doc["views"]["left"]["kind"] = "radar";
    CHECK(pointer_of(doc) == "/views/left/kind");

    doc = minimal();
    doc["layout"]["proportions"] = {0.5, 0.6};
    CHECK(pointer_of(doc) == "/layout/proportions");

    doc = minimal();
    doc["layout"]["proportions"] = {1.5, -0.5};
    CHECK(pointer_of(doc) == "/layout/proportions/1");

    doc = minimal();
    doc["layout"]["children"][1]["view"] = "middle";
    CHECK(pointer_of(doc) == "/layout/children/1/view");

    doc = minimal();
    doc["views"]["left"]["visible_motions"] = {"m1", "m9"};
    CHECK(pointer_of(doc) == "/views/left/visible_motions/1");

    doc = minimal();
    doc["views"]["left"]["opacity"]["m1"] = 1.5;
    CHECK(pointer_of(doc) == "/views/left/opacity/m1");

    doc = minimal();
    doc["views"]["right"]["warp"]["cost"] = {{"joint_l2", 0}};
    CHECK(pointer_of(doc) == "/views/right/warp/cost");

    doc = minimal();
    doc["cursor"] = -1.0;
    CHECK(pointer_of(doc) == "/cursor");

    doc = minimal();
    doc["motion_ids"] = {"m1", "m1"};
    CHECK(pointer_of(doc) == "/motion_ids");

    doc = minimal();
    doc["layout"]["direction"] = "diagonal";
    CHECK(pointer_of(doc) == "/layout/direction");
}

TEST_CASE("missing motions") {
    const Session s = session_from_json(minimal());
    CHECK(missing_motions(s, [](const std::string& id) { return id == "m1"; }) == std::vector<std::string>{"m2"});
    CHECK(missing_motions(s, [](const std::string&) { return true; }).empty());
}
