#include "mocomp/session.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "mocomp/errors.hpp"

namespace mocomp {
using nlohmann::json;

namespace {

[[noreturn]] void fail(const std::string& message, const std::string& where) {
    throw Error(ErrorCode::SchemaError, message + " (at " + where + ")", where.empty() ? "/" : where);
}

std::string escape_key(const std::string& key) {
    std::string out;
    for (char c : key) {
        if (c == '~') out += "~0";
        else if (c == '/') out += "~1";
        else out += c;
    }
    return out;
}

// Reads the known keys of a JSON object and collects everything else.
class Reader {
public:
    Reader(const json& obj, std::string path) : obj_(obj), path_(std::move(path)) {
        if (!obj.is_object()) fail("expected an object", path_);
    }

    const json* find(const std::string& key) {
        seen_.insert(key);
        auto it = obj_.find(key);
        return it == obj_.end() ? nullptr : &*it;
    }

    std::string at(const std::string& key) const { return path_ + "/" + escape_key(key); }

    std::string string(const std::string& key, const std::string& fallback = {}) {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_string()) fail("expected a string", at(key));
        return v->get<std::string>();
    }

    double number(const std::string& key, double fallback) {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_number() || !std::isfinite(v->get<double>())) fail("expected a finite number", at(key));
        return v->get<double>();
    }

    bool boolean(const std::string& key, bool fallback) {
        const json* v = find(key);
        if (v == nullptr) return fallback;
        if (!v->is_boolean()) fail("expected true or false", at(key));
        return v->get<bool>();
    }

    std::vector<std::string> strings(const std::string& key) {
        std::vector<std::string> out;
        const json* v = find(key);
        if (v == nullptr) return out;
        if (!v->is_array()) fail("expected an array", at(key));
        for (std::size_t i = 0; i < v->size(); ++i) {
            if (!(*v)[i].is_string()) fail("expected a string", at(key) + "/" + std::to_string(i));
            out.push_back((*v)[i].get<std::string>());
        }
        return out;
    }

    json rest() const {
        json out = json::object();
        for (const auto& [k, v] : obj_.items()) {
            if (!seen_.count(k)) out[k] = v;
        }
        return out;
    }

    const std::string& path() const { return path_; }

private:
    const json& obj_;
    std::string path_;
    std::set<std::string> seen_;
};

std::array<double, 3> vec3_at(const json& v, const std::string& where) {
    if (!v.is_array() || v.size() != 3) fail("expected [x, y, z]", where);
    std::array<double, 3> out{};
    for (std::size_t i = 0; i < 3; ++i) {
        if (!v[i].is_number()) fail("expected a number", where + "/" + std::to_string(i));
        out[i] = v[i].get<double>();
    }
    return out;
}

json cost_to_json(const LocalCost& c) {
    return {{"joint_l2", c.joint_l2}, {"ee_position", c.ee_position}, {"quaternion_geodesic", c.quaternion_geodesic}};
}

LayoutNode layout_from_json(const json& doc, const std::string& path) {
    Reader r(doc, path);
    LayoutNode node;
    node.view = r.string("view");
    node.direction = r.string("direction");
    if (const json* p = r.find("proportions")) {
        if (!p->is_array()) fail("expected an array", r.at("proportions"));
        for (std::size_t i = 0; i < p->size(); ++i) {
            if (!(*p)[i].is_number()) fail("expected a number", r.at("proportions") + "/" + std::to_string(i));
            node.proportions.push_back((*p)[i].get<double>());
        }
    }
    if (const json* c = r.find("children")) {
        if (!c->is_array()) fail("expected an array", r.at("children"));
        for (std::size_t i = 0; i < c->size(); ++i) {
            node.children.push_back(layout_from_json((*c)[i], r.at("children") + "/" + std::to_string(i)));
        }
    }
    if (!r.rest().empty()) fail("unknown layout key '" + r.rest().begin().key() + "'", path);
    return node;
}

json layout_to_json(const LayoutNode& node) {
    json out = json::object();
    if (node.is_leaf()) {
        out["view"] = node.view;
        return out;
    }
    out["direction"] = node.direction;
    out["proportions"] = node.proportions;
    json children = json::array();
    for (const auto& c : node.children) children.push_back(layout_to_json(c));
    out["children"] = children;
    return out;
}

void check_layout(const LayoutNode& node, const Session& s, const std::string& path) {
    if (node.is_leaf()) {
        if (!node.direction.empty() || !node.proportions.empty()) {
            fail("a leaf has no direction or proportions", path);
        }
        if (!s.views.count(node.view)) fail("layout names unknown view '" + node.view + "'", path + "/view");
        return;
    }
    if (!node.view.empty()) fail("a split does not name a view", path + "/view");
    if (node.direction != "horizontal" && node.direction != "vertical") {
        fail("direction must be 'horizontal' or 'vertical'", path + "/direction");
    }
    if (node.children.size() < 2) fail("a split needs at least two children", path + "/children");
    if (node.proportions.size() != node.children.size()) {
        fail("one proportion per child expected", path + "/proportions");
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < node.proportions.size(); ++i) {
        const double p = node.proportions[i];
        if (!std::isfinite(p) || p <= 0.0) fail("proportions must be positive", path + "/proportions/" + std::to_string(i));
        sum += p;
    }
    if (std::abs(sum - 1.0) > 1e-9) fail("proportions sum to " + std::to_string(sum) + ", not 1", path + "/proportions");
    for (std::size_t i = 0; i < node.children.size(); ++i) {
        check_layout(node.children[i], s, path + "/children/" + std::to_string(i));
    }
}

}  // namespace

void check_session(const Session& s) {
    if (!std::isfinite(s.cursor) || s.cursor < 0.0) fail("cursor must be a finite non-negative time", "/cursor");
    const std::set<std::string> motions(s.motion_ids.begin(), s.motion_ids.end());
    if (motions.size() != s.motion_ids.size()) fail("duplicate motion id", "/motion_ids");
    auto known = [&](const std::string& id, const std::string& where) {
        if (!motions.count(id)) fail("motion '" + id + "' is not part of the session", where);
    };
    for (const auto& [name, view] : s.views) {
        const std::string base = "/views/" + escape_key(name);
        if (std::find_if(kPanelKinds.begin(), kPanelKinds.end(), [&](const char* k) { return view.kind == k; }) ==
            kPanelKinds.end()) {
            fail("unknown panel kind '" + view.kind + "'", base + "/kind");
        }
        for (std::size_t i = 0; i < view.visible_motions.size(); ++i) {
            known(view.visible_motions[i], base + "/visible_motions/" + std::to_string(i));
        }
        for (const auto& [id, alpha] : view.opacity) {
            known(id, base + "/opacity/" + escape_key(id));
            if (!(alpha >= 0.0 && alpha <= 1.0)) fail("opacity must lie in [0, 1]", base + "/opacity/" + escape_key(id));
        }
        if (view.warp) {
            known(view.warp->a, base + "/warp/a");
            known(view.warp->b, base + "/warp/b");
            try {
                view.warp->cost.check();
            } catch (const Error& e) {
                fail(e.what(), base + "/warp/cost");
            }
        }
    }
    if (s.layout) check_layout(*s.layout, s, "/layout");
}

json session_to_json(const Session& s) {
    json out = s.extra;
    out["format_version"] = kSessionFormatVersion;
    out["session_id"] = s.session_id;
    out["motion_ids"] = s.motion_ids;
    out["layout"] = s.layout ? layout_to_json(*s.layout) : json(nullptr);
    out["cursor"] = s.cursor;
    json views = json::object();
    for (const auto& [name, v] : s.views) {
        json view = v.extra;
        view["kind"] = v.kind;
        view["visible_motions"] = v.visible_motions;
        view["opacity"] = v.opacity;
        view["toggles"] = v.toggles;
        view["selected_joints"] = v.selected_joints;
        view["cursor_sync"] = v.cursor_sync;
        view["camera_sync_group"] = v.camera_sync_group ? json(*v.camera_sync_group) : json(nullptr);
        if (v.warp) {
            view["warp"] = {{"a", v.warp->a},
                            {"b", v.warp->b},
                            {"cost", cost_to_json(v.warp->cost)},
                            {"window", v.warp->window ? json(*v.warp->window) : json(nullptr)}};
        } else {
            view["warp"] = nullptr;
        }
        if (v.camera) {
            view["camera"] = {{"position", v.camera->position}, {"target", v.camera->target}, {"up", v.camera->up}};
        } else {
            view["camera"] = nullptr;
        }
        views[name] = view;
    }
    out["views"] = views;
    return out;
}

Session session_from_json(const json& doc) {
    Reader r(doc, "");
    const json* version = r.find("format_version");
    if (version == nullptr) fail("missing field 'format_version'", "/format_version");
    if (!version->is_number_integer()) fail("expected an integer", "/format_version");
    if (version->get<long long>() != kSessionFormatVersion) {
        throw Error(ErrorCode::VersionError,
                    "unsupported session format_version " + version->dump() + " (expected " +
                        std::to_string(kSessionFormatVersion) + ")",
                    "/format_version");
    }
    Session s;
    s.session_id = r.string("session_id");
    s.motion_ids = r.strings("motion_ids");
    s.cursor = r.number("cursor", 0.0);
    if (const json* layout = r.find("layout"); layout != nullptr && !layout->is_null()) {
        s.layout = layout_from_json(*layout, "/layout");
    }
    if (const json* views = r.find("views"); views != nullptr) {
        if (!views->is_object()) fail("expected an object", "/views");
        for (const auto& [name, vdoc] : views->items()) {
            Reader v(vdoc, "/views/" + escape_key(name));
            ViewConfig view;
            view.kind = v.string("kind");
            view.visible_motions = v.strings("visible_motions");
            if (const json* op = v.find("opacity")) {
                if (!op->is_object()) fail("expected an object", v.at("opacity"));
                for (const auto& [id, a] : op->items()) {
                    if (!a.is_number()) fail("expected a number", v.at("opacity") + "/" + escape_key(id));
                    view.opacity[id] = a.get<double>();
                }
            }
            if (const json* t = v.find("toggles")) {
                if (!t->is_object()) fail("expected an object", v.at("toggles"));
                for (const auto& [key, on] : t->items()) {
                    if (!on.is_boolean()) fail("expected true or false", v.at("toggles") + "/" + escape_key(key));
                    view.toggles[key] = on.get<bool>();
                }
            }
            if (const json* sel = v.find("selected_joints")) {
                if (!sel->is_array()) fail("expected an array", v.at("selected_joints"));
                for (std::size_t i = 0; i < sel->size(); ++i) {
                    if (!(*sel)[i].is_number_unsigned()) {
                        fail("expected a joint index", v.at("selected_joints") + "/" + std::to_string(i));
                    }
                    view.selected_joints.push_back((*sel)[i].get<std::size_t>());
                }
            }
            view.cursor_sync = v.boolean("cursor_sync", true);
            if (const json* g = v.find("camera_sync_group"); g != nullptr && !g->is_null()) {
                if (!g->is_string()) fail("expected a string", v.at("camera_sync_group"));
                view.camera_sync_group = g->get<std::string>();
            }
            if (const json* w = v.find("warp"); w != nullptr && !w->is_null()) {
                Reader wr(*w, v.at("warp"));
                WarpPair pair;
                pair.a = wr.string("a");
                pair.b = wr.string("b");
                if (const json* c = wr.find("cost")) {
                    if (c->is_string()) {
                        try {
                            pair.cost = LocalCost::from_name(c->get<std::string>());
                        } catch (const Error& e) {
                            fail(e.what(), wr.at("cost"));
                        }
                    } else {
                        Reader cr(*c, wr.at("cost"));
                        pair.cost = {cr.number("joint_l2", 0.0), cr.number("ee_position", 0.0),
                                     cr.number("quaternion_geodesic", 0.0)};
                    }
                } else {
                    pair.cost = LocalCost::joint();
                }
                if (const json* win = wr.find("window"); win != nullptr && !win->is_null()) {
                    if (!win->is_number_unsigned()) fail("expected a sample count", wr.at("window"));
                    pair.window = win->get<std::size_t>();
                }
                view.warp = pair;
            }
            if (const json* cam = v.find("camera"); cam != nullptr && !cam->is_null()) {
                Reader cr(*cam, v.at("camera"));
                CameraPose pose;
                if (const json* p = cr.find("position")) pose.position = vec3_at(*p, cr.at("position"));
                if (const json* p = cr.find("target")) pose.target = vec3_at(*p, cr.at("target"));
                if (const json* p = cr.find("up")) pose.up = vec3_at(*p, cr.at("up"));
                view.camera = pose;
            }
            view.extra = v.rest();
            s.views.emplace(name, std::move(view));
        }
    }
    s.extra = r.rest();
    check_session(s);
    return s;
}

std::string save_session(const Session& session) {
    check_session(session);
    return session_to_json(session).dump();
}

Session load_session(std::string_view bytes) {
    json doc;
    try {
        doc = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what(), "byte " + std::to_string(e.byte));
    }
    return session_from_json(doc);
}

}  // namespace mocomp
