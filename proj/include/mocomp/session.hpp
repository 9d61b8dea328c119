#pragma once

#include <array>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"
#include "mocomp/warping.hpp"

namespace mocomp {

inline constexpr int kSessionFormatVersion = 1;

/// Panel kinds a layout leaf may show.
inline constexpr std::array<const char*, 7> kPanelKinds = {
    "scene3d", "quaternion_space", "timeseries", "umap_graph", "timeline", "motion_library", "options"};

struct CameraPose {
    std::array<double, 3> position{0.0, 0.0, 1.0};
    std::array<double, 3> target{0.0, 0.0, 0.0};
    std::array<double, 3> up{0.0, 0.0, 1.0};

    bool operator==(const CameraPose&) const = default;
};

struct WarpPair {
    std::string a;
    std::string b;
    LocalCost cost;
    std::optional<std::size_t> window;

    bool operator==(const WarpPair&) const = default;
};

/// Per-panel state. Keys this version does not know about are kept in `extra`
/// and written back unchanged.
struct ViewConfig {
    std::string kind;
    std::vector<std::string> visible_motions;
    std::map<std::string, double> opacity;
    /// Named on/off switches: "trace", "cones", "ribbon", "color_encoding", ...
    std::map<std::string, bool> toggles;
    std::vector<std::size_t> selected_joints;
    std::optional<WarpPair> warp;
    std::optional<CameraPose> camera;
    std::optional<std::string> camera_sync_group;
    bool cursor_sync = true;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const ViewConfig&) const = default;
};

/// Dock tree. A leaf names a view; a split has a direction, two or more
/// children, and one proportion per child summing to 1.
struct LayoutNode {
    std::string view;
    std::string direction;
    std::vector<double> proportions;
    std::vector<LayoutNode> children;

    bool is_leaf() const { return children.empty(); }
    bool operator==(const LayoutNode&) const = default;
};

struct Session {
    std::string session_id;
    std::vector<std::string> motion_ids;
    std::optional<LayoutNode> layout;
    std::map<std::string, ViewConfig> views;
    double cursor = 0.0;
    nlohmann::json extra = nlohmann::json::object();

    bool operator==(const Session&) const = default;
};

/// Checks internal consistency: known panel kinds, split proportions,
/// view and motion references. Throws SchemaError with a JSON pointer detail.
void check_session(const Session& session);

nlohmann::json session_to_json(const Session& session);
/// Throws VersionError for a format_version other than the current one and
/// SchemaError for structural problems.
Session session_from_json(const nlohmann::json& doc);

/// Canonical bytes: sorted keys, compact, shortest round-trip numbers.
std::string save_session(const Session& session);
Session load_session(std::string_view bytes);

/// Motion ids the session references that `known` does not contain.
template <typename Pred>
std::vector<std::string> missing_motions(const Session& session, Pred&& known) {
    std::vector<std::string> out;
    for (const auto& id : session.motion_ids) {
        if (!known(id)) out.push_back(id);
    }
    return out;
}

}  // namespace mocomp
