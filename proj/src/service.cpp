#include "mocomp/service.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "httplib.h"
#include "json.hpp"
#include "mocomp/embedding.hpp"
#include "mocomp/errors.hpp"
#include "mocomp/kinematics.hpp"
#include "mocomp/timeseries.hpp"
#include "mocomp/trace.hpp"
#include "mocomp/warping.hpp"

namespace mocomp {
using nlohmann::json;

namespace {

using MotionPtr = std::shared_ptr<const LoadedMotion>;

constexpr std::size_t kCacheCapacity = 512;

HttpResponse json_response(json body, int status = 200) {
    body["format_version"] = kApiFormatVersion;
    return {status, "application/json", body.dump()};
}

json parse_body(const std::string& body) {
    try {
        return json::parse(body);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, std::string("malformed JSON body: ") + e.what(),
                    "byte " + std::to_string(e.byte));
    }
}

std::vector<std::string> split_path(const std::string& path) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : path) {
        if (c == '/') {
            if (!cur.empty()) out.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    if (!cur.empty()) out.push_back(std::move(cur));
    return out;
}

const std::string* query(const HttpRequest& req, const std::string& key) {
    auto it = req.query.find(key);
    return it == req.query.end() ? nullptr : &it->second;
}

double parse_number(const std::string& text, const std::string& what) {
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size() || !std::isfinite(v)) {
        throw Error(ErrorCode::InvalidArgument, "'" + what + "' must be a number, got '" + text + "'", what);
    }
    return v;
}

long long parse_integer(const std::string& text, const std::string& what) {
    long long v = 0;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc() || ptr != text.data() + text.size()) {
        throw Error(ErrorCode::InvalidArgument, "'" + what + "' must be an integer, got '" + text + "'", what);
    }
    return v;
}

json vec3(const Vec3& v) { return json::array({v.x(), v.y(), v.z()}); }

json points_json(const std::vector<Vec3>& points) {
    json out = json::array();
    for (const auto& p : points) out.push_back(vec3(p));
    return out;
}

json series_json(const ScalarSeries& s) {
    return {{"name", s.name}, {"unit", s.unit}, {"timestamps", s.timestamps}, {"values", s.values}};
}

json cost_json(const LocalCost& c) {
    return {{"name", c.name()},
            {"joint_l2", c.joint_l2},
            {"ee_position", c.ee_position},
            {"quaternion_geodesic", c.quaternion_geodesic}};
}

json summary_json(const LoadedMotion& m) {
    json tracks = json::array();
    for (const auto& [name, t] : m.motion.object_tracks) tracks.push_back(name);
    return {{"id", m.motion.id},
            {"name", m.motion.name},
            {"robot", m.motion.robot_ref},
            {"ee_link", m.motion.ee_link},
            {"n", m.motion.joints.dof()},
            {"samples", m.motion.joints.size()},
            {"duration", duration(m.motion.joints)},
            {"joint_names", m.motion.joints.joint_names},
            {"object_tracks", tracks}};
}

// A pose source: a robot link through FK, or one of the motion's object tracks.
struct Frame {
    MotionPtr motion;
    std::string link;
    std::string track;

    std::string label() const { return track.empty() ? link : "track:" + track; }

    const std::vector<double>& timestamps() const {
        return track.empty() ? motion->motion.joints.timestamps : motion->motion.object_tracks.at(track).timestamps;
    }

    PoseTrajectory poses(const std::vector<double>* grid) const {
        if (!track.empty()) {
            const PoseTrajectory& t = motion->motion.object_tracks.at(track);
            return grid ? resample_at(t, *grid) : t;
        }
        return link_pose_trajectory(motion->robot, joints(grid), link);
    }

    JointTrajectory joints(const std::vector<double>* grid) const {
        JointTrajectory ordered = reorder_to_model(motion->robot, motion->motion.joints);
        return grid ? resample_at(ordered, *grid) : ordered;
    }

    AlignmentSignal signal(const std::vector<double>* grid) const {
        if (!track.empty()) return signal_from_poses(poses(grid));
        return signal_from_joints(motion->robot, joints(grid), link);
    }
};

Frame resolve_frame(MotionPtr motion, const std::string& frame) {
    Frame f;
    f.motion = std::move(motion);
    const auto& tracks = f.motion->motion.object_tracks;
    if (frame.empty()) {
        f.link = f.motion->motion.ee_link;
    } else if (frame.rfind("track:", 0) == 0) {
        f.track = frame.substr(6);
        if (!tracks.count(f.track)) {
            throw Error(ErrorCode::UnknownTrack, "motion has no object track '" + f.track + "'", frame);
        }
    } else if (f.motion->robot.has_link(frame)) {
        f.link = frame;
    } else if (tracks.count(frame)) {
        f.track = frame;
    } else {
        throw Error(ErrorCode::UnknownLink, "robot has no link '" + frame + "'", frame);
    }
    return f;
}

LocalCost parse_cost(const json* doc) {
    if (doc == nullptr || doc->is_null()) return LocalCost::joint();
    LocalCost cost;
    if (doc->is_string()) {
        cost = LocalCost::from_name(doc->get<std::string>());
    } else if (doc->is_object()) {
        auto weight = [&](const char* key) {
            auto it = doc->find(key);
            if (it == doc->end()) return 0.0;
            if (!it->is_number()) throw Error(ErrorCode::SchemaError, "cost weights must be numbers", std::string("/cost/") + key);
            return it->get<double>();
        };
        cost = {weight("joint_l2"), weight("ee_position"), weight("quaternion_geodesic")};
    } else {
        throw Error(ErrorCode::SchemaError, "cost must be a name or a weight object", "/cost");
    }
    cost.check();
    return cost;
}

DtwOptions parse_window(const json* doc, const std::string& where) {
    DtwOptions options;
    if (doc == nullptr || doc->is_null()) return options;
    if (!doc->is_number_unsigned()) throw Error(ErrorCode::SchemaError, "window must be a sample count", where);
    options.band = doc->get<std::size_t>();
    return options;
}

const json* member(const json& obj, const char* key) {
    auto it = obj.find(key);
    return it == obj.end() ? nullptr : &*it;
}

std::string string_member(const json& obj, const char* key, const std::string& where, bool required = true) {
    const json* v = member(obj, key);
    if (v == nullptr || v->is_null()) {
        if (required) throw Error(ErrorCode::SchemaError, std::string("missing field '") + key + "'", where + "/" + key);
        return {};
    }
    if (!v->is_string()) throw Error(ErrorCode::SchemaError, std::string("'") + key + "' must be a string", where + "/" + key);
    return v->get<std::string>();
}

struct Alignment {
    Frame a;
    Frame b;
    LocalCost cost;
    std::vector<double> grid_a;
    std::vector<double> grid_b;
    bool resampled = false;
    WarpingPath path;
};

Alignment align_frames(Frame a, Frame b, const LocalCost& cost, const DtwOptions& options) {
    Alignment out{std::move(a), std::move(b), cost, {}, {}, false, {}};
    std::tie(out.grid_a, out.grid_b) = common_rate_grids(out.a.timestamps(), out.b.timestamps());
    out.resampled = out.grid_a != out.a.timestamps() || out.grid_b != out.b.timestamps();
    const auto* ga = out.resampled ? &out.grid_a : nullptr;
    const auto* gb = out.resampled ? &out.grid_b : nullptr;
    out.path = dtw_align(out.a.signal(ga), out.b.signal(gb), cost, options);
    return out;
}

// Quantity, joint, axis, frame, deriv, smooth.
struct SeriesSpec {
    std::string motion;
    std::string quantity = "joint";
    std::string joint;
    std::string axis = "x";
    std::string frame;
    int deriv = 0;
    std::optional<Smoothing> smooth;
};

void check_spec(const SeriesSpec& s) {
    if (s.quantity != "joint" && s.quantity != "ee_pos" && s.quantity != "ee_speed") {
        throw Error(ErrorCode::InvalidArgument, "quantity must be joint, ee_pos or ee_speed", "quantity");
    }
    if (s.quantity == "joint" && s.joint.empty()) {
        throw Error(ErrorCode::InvalidArgument, "quantity=joint needs a joint index or name", "joint");
    }
    if (s.quantity == "ee_pos" && s.axis != "x" && s.axis != "y" && s.axis != "z") {
        throw Error(ErrorCode::InvalidArgument, "axis must be x, y or z", "axis");
    }
    if (s.deriv < 0 || s.deriv > 3) throw Error(ErrorCode::InvalidArgument, "deriv must be 0..3", "deriv");
}

SeriesSpec spec_from_query(const HttpRequest& req, std::string motion) {
    SeriesSpec s;
    s.motion = std::move(motion);
    if (auto v = query(req, "quantity")) s.quantity = *v;
    if (auto v = query(req, "joint")) s.joint = *v;
    if (auto v = query(req, "axis")) s.axis = *v;
    if (auto v = query(req, "frame")) s.frame = *v;
    if (auto v = query(req, "deriv")) s.deriv = static_cast<int>(parse_integer(*v, "deriv"));
    if (auto v = query(req, "smooth"); v && !v->empty()) s.smooth = Smoothing::parse(*v);
    check_spec(s);
    return s;
}

SeriesSpec spec_from_json(const json& doc, const std::string& where) {
    if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "series spec must be an object", where);
    SeriesSpec s;
    s.motion = string_member(doc, "motion", where);
    if (auto v = string_member(doc, "quantity", where, false); !v.empty()) s.quantity = v;
    if (const json* j = member(doc, "joint"); j && !j->is_null()) {
        if (j->is_number_unsigned()) s.joint = std::to_string(j->get<std::size_t>());
        else if (j->is_string()) s.joint = j->get<std::string>();
        else throw Error(ErrorCode::SchemaError, "joint must be an index or a name", where + "/joint");
    }
    if (auto v = string_member(doc, "axis", where, false); !v.empty()) s.axis = v;
    s.frame = string_member(doc, "frame", where, false);
    if (const json* d = member(doc, "deriv"); d && !d->is_null()) {
        if (!d->is_number_integer()) throw Error(ErrorCode::SchemaError, "deriv must be an integer", where + "/deriv");
        s.deriv = d->get<int>();
    }
    if (auto v = string_member(doc, "smooth", where, false); !v.empty()) s.smooth = Smoothing::parse(v);
    check_spec(s);
    return s;
}

ScalarSeries compute_series(const SeriesSpec& spec, const Frame& frame, const std::vector<double>* grid) {
    ScalarSeries s;
    if (spec.quantity == "joint") {
        const JointTrajectory jt = frame.joints(grid);
        std::optional<std::size_t> k;
        if (std::all_of(spec.joint.begin(), spec.joint.end(), [](char c) { return c >= '0' && c <= '9'; })) {
            const auto idx = static_cast<std::size_t>(parse_integer(spec.joint, "joint"));
            if (idx < jt.dof()) k = idx;
        } else {
            k = frame.motion->robot.actuated_index(spec.joint);
        }
        if (!k) throw Error(ErrorCode::InvalidArgument, "no joint '" + spec.joint + "'", "joint");
        s.name = jt.joint_names[*k];
        s.unit = frame.motion->robot.actuated_joint(*k).kind == JointKind::Prismatic ? "m" : "rad";
        s.timestamps = jt.timestamps;
        for (const auto& q : jt.configurations) s.values.push_back(q[*k]);
    } else {
        const PoseTrajectory poses = frame.poses(grid);
        s.timestamps = poses.timestamps;
        if (spec.quantity == "ee_pos") {
            const int axis = spec.axis[0] - 'x';
            s.name = frame.label() + "." + spec.axis;
            s.unit = "m";
            for (const auto& p : poses.poses) s.values.push_back(p.position[axis]);
        } else {
            s.name = frame.label() + ".speed";
            s.unit = "m/s";
            if (poses.size() < 2) throw Error(ErrorCode::TooShort, "speed needs at least two samples");
            std::vector<std::vector<double>> v(3);
            for (int axis = 0; axis < 3; ++axis) {
                std::vector<double> x;
                for (const auto& p : poses.poses) x.push_back(p.position[axis]);
                v[axis] = first_difference(poses.timestamps, x);
            }
            for (std::size_t i = 0; i < poses.size(); ++i) {
                s.values.push_back(std::sqrt(v[0][i] * v[0][i] + v[1][i] * v[1][i] + v[2][i] * v[2][i]));
            }
        }
    }
    if (spec.smooth) s = smooth(s, *spec.smooth);
    if (spec.deriv > 0) s = derivative(s, spec.deriv);
    return s;
}

json relative_speed_json(const WarpingPath& path, Subject subject) {
    try {
        const RelativeSpeedSeries r = relative_speed(path, subject);
        return {{"timestamps", r.timestamps}, {"ratio", r.ratio}, {"color_scalar", r.color_scalar}};
    } catch (const Error& e) {
        if (e.code() != ErrorCode::DegeneratePath) throw;
        return nullptr;
    }
}

json pairs_json(const WarpingPath& path) {
    json out = json::array();
    for (const auto& [i, j] : path.pairs) out.push_back(json::array({i, j}));
    return out;
}

EmbeddingParams parse_embedding_params(const json* doc, std::uint64_t default_seed) {
    EmbeddingParams p;
    p.seed = default_seed;
    if (doc == nullptr || doc->is_null()) return p;
    if (!doc->is_object()) throw Error(ErrorCode::SchemaError, "params must be an object", "/params");
    for (const auto& [key, v] : doc->items()) {
        const std::string where = "/params/" + key;
        if (key == "n_neighbors" || key == "n_epochs") {
            if (!v.is_number_integer()) throw Error(ErrorCode::SchemaError, key + " must be an integer", where);
            (key == "n_neighbors" ? p.n_neighbors : p.n_epochs) = v.get<int>();
        } else if (key == "min_dist") {
            if (!v.is_number()) throw Error(ErrorCode::SchemaError, "min_dist must be a number", where);
            p.min_dist = v.get<double>();
        } else if (key == "seed") {
            if (!v.is_number_unsigned()) throw Error(ErrorCode::SchemaError, "seed must be a non-negative integer", where);
            p.seed = v.get<std::uint64_t>();
        } else if (key == "method") {
            const std::string m = v.is_string() ? v.get<std::string>() : "";
            if (m == "umap") p.method = EmbeddingMethod::Umap;
            else if (m == "pca") p.method = EmbeddingMethod::Pca;
            else throw Error(ErrorCode::InvalidArgument, "method must be 'umap' or 'pca'", where);
        } else {
            throw Error(ErrorCode::SchemaError, "unknown embedding parameter '" + key + "'", where);
        }
    }
    p.check();
    return p;
}

json point2(const Point2& p) { return json::array({p[0], p[1]}); }

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Route handlers -----------------------------------------------------------

HttpResponse motion_trace(const HttpRequest& req, MotionPtr m) {
    const std::string kind = query(req, "kind") ? *query(req, "kind") : "position";
    const Frame frame = resolve_frame(std::move(m), query(req, "frame") ? *query(req, "frame") : "");
    const PoseTrajectory poses = frame.poses(nullptr);
    json body = {{"kind", kind}, {"frame", frame.label()}};
    if (kind == "position") {
        const double stride = query(req, "stride") ? parse_number(*query(req, "stride"), "stride") : 0.1;
        const PositionTrace trace = position_trace(poses, stride);
        json cones = json::array();
        for (const auto& c : trace.cones) {
            cones.push_back({{"position", vec3(c.position)}, {"direction", vec3(c.direction)}, {"scale", c.scale}});
        }
        body["timestamps"] = trace.polyline.timestamps;
        body["points"] = points_json(trace.polyline.points);
        body["cones"] = cones;
        body["arc_length"] = trace_arc_length(trace.polyline);
    } else if (kind == "quaternion") {
        const TracePolyline trace = quaternion_trace(poses);
        body["timestamps"] = trace.timestamps;
        body["points"] = points_json(trace.points);
        body["arc_length"] = trace_arc_length(trace);
    } else {
        throw Error(ErrorCode::InvalidArgument, "kind must be 'position' or 'quaternion'", "kind");
    }
    return json_response(body);
}

HttpResponse motion_limits(const HttpRequest& req, const LoadedMotion& m) {
    const double margin = query(req, "margin") ? parse_number(*query(req, "margin"), "margin") : kDefaultLimitMargin;
    json list = json::array();
    for (const auto& v : joint_limit_violations(m.robot, m.motion.joints, margin)) {
        list.push_back({{"joint", v.joint}, {"kind", limit_side_name(v.kind)}, {"start", v.start}, {"end", v.end}});
    }
    return json_response({{"motion", m.motion.id}, {"margin", margin}, {"violations", list}});
}

}  // namespace

std::string error_body(ErrorCode code, const std::string& message, const std::string& detail) {
    json err = {{"code", code_name(code)}, {"message", message}, {"detail", detail}};
    if (code == ErrorCode::StaleMotionRefs) {
        json missing = json::array();
        std::stringstream ss(detail);
        for (std::string id; std::getline(ss, id, ',');) missing.push_back(id);
        err["missing"] = missing;
    }
    return json{{"error", err}}.dump();
}

ComparatorService::ComparatorService(ServiceConfig config)
    : config_(std::move(config)), motions_(config_.data_dir), sessions_(config_.data_dir) {}

HttpResponse ComparatorService::handle(const HttpRequest& req) {
    const auto segments = split_path(req.path);
    const bool cacheable =
        (req.method == "GET" && segments.size() == 4 && segments[0] == "api" && segments[1] == "motions") ||
        (req.method == "POST" && segments.size() == 2 && segments[0] == "api" &&
         (segments[1] == "align" || segments[1] == "diff" || segments[1] == "embed"));
    std::string key;
    std::uint64_t generation = 0;
    if (cacheable) {
        key = req.method + " " + req.path + "?";
        for (const auto& [k, v] : req.query) key += k + "=" + v + "&";
        key += "\n" + req.body;
        std::lock_guard lock(cache_mutex_);
        if (auto it = cache_.find(key); it != cache_.end()) return it->second;
        generation = generation_;
    }

    HttpResponse res;
    try {
        if (req.body.size() > config_.max_upload_bytes) {
            throw Error(ErrorCode::PayloadTooLarge,
                        "request body exceeds " + std::to_string(config_.max_upload_bytes) + " bytes");
        }
        res = route(req);
    } catch (const Error& e) {
        res = {http_status(e.code()), "application/json", error_body(e.code(), e.what(), e.detail())};
    } catch (const json::exception& e) {
        res = {400, "application/json", error_body(ErrorCode::SchemaError, e.what(), "")};
    } catch (const std::exception&) {
        res = {500, "application/json", error_body(ErrorCode::Internal, "internal error", "")};
    }

    if (cacheable && res.status == 200) {
        std::lock_guard lock(cache_mutex_);
        if (generation == generation_) {
            if (cache_.size() >= kCacheCapacity) cache_.clear();
            cache_.emplace(std::move(key), res);
        }
    }
    return res;
}

HttpResponse ComparatorService::route(const HttpRequest& req) {
    const auto seg = split_path(req.path);
    const std::string& method = req.method;
    auto only = [&](std::initializer_list<const char*> allowed) {
        for (const char* m : allowed) {
            if (method == m) return;
        }
        throw Error(ErrorCode::MethodNotAllowed, method + " is not allowed on " + req.path, req.path);
    };
    auto body_json = [&]() {
        json doc = parse_body(req.body);
        if (!doc.is_object()) throw Error(ErrorCode::SchemaError, "request body must be a JSON object", "/");
        return doc;
    };

    if (seg.size() == 2 && seg[0] == "s") {
        only({"GET"});
        std::string doc = sessions_.get(seg[1]);
        if (req.accept.find("text/html") != std::string::npos && config_.static_dir) {
            const auto index = *config_.static_dir / "index.html";
            if (std::filesystem::exists(index)) return {200, "text/html", read_file(index)};
        }
        return {200, "application/json", std::move(doc)};
    }
    if (seg.empty() || seg[0] != "api") {
        throw Error(ErrorCode::UnknownRoute, "no route for " + req.path, req.path);
    }

    if (seg.size() == 2 && seg[1] == "motions") {
        only({"GET", "POST"});
        if (method == "GET") {
            json list = json::array();
            for (const auto& m : motions_.list()) list.push_back(summary_json(*m));
            return json_response({{"motions", list}});
        }
        LoadOptions options;
        options.allow_file_refs = false;
        if (auto name = query(req, "name")) options.name = *name;
        std::string id = motions_.add(load_motion(req.body, MotionFormat::Json, options));
        return json_response({{"id", id}}, 201);
    }

    if (seg.size() >= 3 && seg[1] == "motions") {
        if (seg.size() == 3) {
            only({"GET", "DELETE"});
            if (method == "DELETE") {
                motions_.remove(seg[2]);
                std::lock_guard lock(cache_mutex_);
                cache_.clear();
                ++generation_;
                return json_response({{"deleted", seg[2]}});
            }
            return json_response(summary_json(*motions_.get(seg[2])));
        }
        if (seg.size() == 4) {
            const std::string& what = seg[3];
            if (what != "trace" && what != "series" && what != "limits" && what != "metrics") {
                throw Error(ErrorCode::UnknownRoute, "no route for " + req.path, req.path);
            }
            only({"GET"});
            MotionPtr m = motions_.get(seg[2]);
            if (what == "trace") return motion_trace(req, m);
            if (what == "limits") return motion_limits(req, *m);
            if (what == "series") {
                const SeriesSpec spec = spec_from_query(req, seg[2]);
                const Frame frame = resolve_frame(m, spec.frame);
                return json_response(series_json(compute_series(spec, frame, nullptr)));
            }
            std::optional<PoseTrajectory> reference;
            std::string reference_name;
            if (auto ref = query(req, "reference"); ref && !ref->empty()) {
                reference_name = *ref;
                if (ref->rfind("track:", 0) == 0) {
                    reference = resolve_frame(m, *ref).poses(nullptr);
                } else {
                    MotionPtr other = motions_.get(*ref);
                    reference = resolve_frame(other, "").poses(nullptr);
                }
            }
            const MotionMetrics mm =
                motion_metrics(m->motion, m->robot, m->motion.ee_link, reference ? &*reference : nullptr);
            return json_response({{"motion", m->motion.id},
                                  {"reference", reference ? json(reference_name) : json(nullptr)},
                                  {"duration", mm.duration},
                                  {"ee_path_length", mm.ee_path_length},
                                  {"jerk_rms", mm.jerk_rms},
                                  {"tracking_error_rms",
                                   mm.tracking_error_rms ? json(*mm.tracking_error_rms) : json(nullptr)}});
        }
    }

    if (seg.size() == 2 && seg[1] == "align") {
        only({"POST"});
        const json doc = body_json();
        auto side = [&](const char* key) {
            const json* v = member(doc, key);
            const std::string where = std::string("/") + key;
            if (v == nullptr) throw Error(ErrorCode::SchemaError, std::string("missing field '") + key + "'", where);
            if (v->is_string()) return resolve_frame(motions_.get(v->get<std::string>()), "");
            if (!v->is_object()) throw Error(ErrorCode::SchemaError, "expected a motion id or {motion, frame}", where);
            return resolve_frame(motions_.get(string_member(*v, "motion", where)),
                                 string_member(*v, "frame", where, false));
        };
        Frame a = side("a");
        Frame b = side("b");
        const LocalCost cost = parse_cost(member(doc, "cost"));
        const Alignment al = align_frames(std::move(a), std::move(b), cost, parse_window(member(doc, "window"), "/window"));
        const WarpingCurve curve = warping_curve(al.path);
        json curve_points = json::array();
        for (const auto& [ta, tb] : curve.points) curve_points.push_back(json::array({ta, tb}));
        return json_response(
            {{"a", {{"motion", al.a.motion->motion.id}, {"frame", al.a.label()}}},
             {"b", {{"motion", al.b.motion->motion.id}, {"frame", al.b.label()}}},
             {"cost", cost_json(cost)},
             {"resampled", al.resampled},
             {"total_cost", al.path.total_cost},
             {"path", pairs_json(al.path)},
             {"timestamps_a", al.path.timestamps_a},
             {"timestamps_b", al.path.timestamps_b},
             {"warping_curve",
              {{"points", curve_points},
               {"diagonal",
                json::array({json::array({curve.diagonal_start.first, curve.diagonal_start.second}),
                             json::array({curve.diagonal_end.first, curve.diagonal_end.second})})}}},
             {"relative_speed",
              {{"a", relative_speed_json(al.path, Subject::A)}, {"b", relative_speed_json(al.path, Subject::B)}}}});
    }

    if (seg.size() == 2 && seg[1] == "diff") {
        only({"POST"});
        const json doc = body_json();
        const json* sa = member(doc, "a");
        const json* sb = member(doc, "b");
        if (sa == nullptr || sb == nullptr) throw Error(ErrorCode::SchemaError, "diff needs series specs 'a' and 'b'", "/");
        const SeriesSpec a = spec_from_json(*sa, "/a");
        const SeriesSpec b = spec_from_json(*sb, "/b");
        const std::string mode = doc.contains("mode") ? string_member(doc, "mode", "") : "difference";
        if (mode != "difference" && mode != "distance") {
            throw Error(ErrorCode::InvalidArgument, "mode must be 'difference' or 'distance'", "/mode");
        }
        const Frame fa = resolve_frame(motions_.get(a.motion), a.frame);
        const Frame fb = resolve_frame(motions_.get(b.motion), b.frame);

        const json* alignment = member(doc, "alignment");
        json alignment_out;
        ScalarSeries result;
        if (alignment == nullptr || (alignment->is_string() && alignment->get<std::string>() == "resampled")) {
            alignment_out = "resampled";
            result = mode == "distance" ? cartesian_distance_series(fa.poses(nullptr), fb.poses(nullptr), ResampledAlignment{})
                                        : difference_series(compute_series(a, fa, nullptr), compute_series(b, fb, nullptr),
                                                            ResampledAlignment{});
        } else if (alignment->is_object() && alignment->contains("dtw")) {
            const json& dtw_doc = (*alignment)["dtw"];
            if (!dtw_doc.is_object()) throw Error(ErrorCode::SchemaError, "dtw options must be an object", "/alignment/dtw");
            const LocalCost cost = parse_cost(member(dtw_doc, "cost"));
            const Alignment al = align_frames(fa, fb, cost, parse_window(member(dtw_doc, "window"), "/alignment/dtw/window"));
            const auto* ga = al.resampled ? &al.grid_a : nullptr;
            const auto* gb = al.resampled ? &al.grid_b : nullptr;
            alignment_out = {{"dtw", {{"cost", cost_json(cost)}, {"total_cost", al.path.total_cost}}}};
            result = mode == "distance" ? cartesian_distance_series(fa.poses(ga), fb.poses(gb), al.path)
                                        : difference_series(compute_series(a, fa, ga), compute_series(b, fb, gb), al.path);
        } else {
            throw Error(ErrorCode::SchemaError, "alignment must be \"resampled\" or {\"dtw\": {...}}", "/alignment");
        }
        json body = series_json(result);
        body["mode"] = mode;
        body["alignment"] = alignment_out;
        return json_response(body);
    }

    if (seg.size() == 2 && seg[1] == "embed") {
        only({"POST"});
        const json doc = body_json();
        const json* ids = member(doc, "motion_ids");
        if (ids == nullptr || !ids->is_array() || ids->empty()) {
            throw Error(ErrorCode::SchemaError, "motion_ids must be a non-empty array", "/motion_ids");
        }
        const EmbeddingParams params = parse_embedding_params(member(doc, "params"), config_.default_seed);
        std::vector<MotionPtr> motions;
        std::vector<std::string> id_list;
        for (std::size_t i = 0; i < ids->size(); ++i) {
            if (!(*ids)[i].is_string()) {
                throw Error(ErrorCode::SchemaError, "motion ids are strings", "/motion_ids/" + std::to_string(i));
            }
            id_list.push_back((*ids)[i].get<std::string>());
            motions.push_back(motions_.get(id_list.back()));
        }
        std::vector<JointTrajectory> joints;
        const RobotModel& first = motions.front()->robot;
        for (const auto& m : motions) {
            if (m->motion.joints.dof() != first.dof()) {
                throw Error(ErrorCode::JointCountMismatch,
                            "motion " + m->motion.id + " has " + std::to_string(m->motion.joints.dof()) +
                                " joints, expected " + std::to_string(first.dof()),
                            m->motion.id);
            }
            joints.push_back(reorder_to_model(first, m->motion.joints));
        }
        const Embedding emb = embed_joint_states(joints, params);
        json points = json::array();
        for (const auto& p : emb.points) points.push_back(point2(p));
        json spans = json::array();
        for (const auto& [begin, end] : emb.spans) spans.push_back(json::array({begin, end}));
        json traces = json::array();
        for (std::size_t k = 0; k < motions.size(); ++k) {
            const JointTrace t = joint_trace_polyline(emb, k);
            json tp = json::array();
            for (const auto& p : t.points) tp.push_back(point2(p));
            traces.push_back({{"motion_id", id_list[k]}, {"timestamps", t.timestamps}, {"points", tp}});
        }
        return json_response({{"method", params.method == EmbeddingMethod::Umap ? "umap" : "pca"},
                              {"params",
                               {{"n_neighbors", params.n_neighbors},
                                {"min_dist", params.min_dist},
                                {"n_epochs", params.n_epochs},
                                {"seed", params.seed}}},
                              {"points", points},
                              {"timestamps", emb.timestamps},
                              {"spans", spans},
                              {"traces", traces}});
    }

    if (seg.size() >= 2 && seg[1] == "sessions" && seg.size() <= 3) {
        auto checked = [&]() {
            Session s = load_session(req.body);
            const auto missing = missing_motions(s, [&](const std::string& id) { return motions_.contains(id); });
            if (!missing.empty()) {
                std::string joined;
                for (const auto& id : missing) joined += (joined.empty() ? "" : ",") + id;
                throw Error(ErrorCode::StaleMotionRefs, "session references motions that do not exist: " + joined, joined);
            }
            return s;
        };
        if (seg.size() == 2) {
            only({"POST"});
            const std::string id = sessions_.create(checked());
            return json_response({{"id", id}, {"share_url", "/s/" + id}}, 201);
        }
        only({"GET", "PUT"});
        if (method == "GET") return {200, "application/json", sessions_.get(seg[2])};
        sessions_.put(seg[2], checked());
        return json_response({{"id", seg[2]}, {"share_url", "/s/" + seg[2]}});
    }

    throw Error(ErrorCode::UnknownRoute, "no route for " + req.path, req.path);
}

struct HttpServer::Impl {
    explicit Impl(ComparatorService& s) : service(s) {}
    ComparatorService& service;
    httplib::Server server;
};

HttpServer::HttpServer(ComparatorService& service) : impl_(std::make_unique<Impl>(service)) {
    auto& svr = impl_->server;
    auto handler = [this](const httplib::Request& req, httplib::Response& res) {
        HttpRequest r;
        r.method = req.method;
        r.path = req.path;
        for (const auto& [k, v] : req.params) r.query.emplace(k, v);
        r.body = req.body;
        r.accept = req.get_header_value("Accept");
        HttpResponse out = impl_->service.handle(r);
        res.status = out.status;
        res.set_content(out.body, out.content_type);
    };
    svr.Get(".*", handler);
    svr.Post(".*", handler);
    svr.Put(".*", handler);
    svr.Delete(".*", handler);
    svr.Patch(".*", handler);
    svr.Options(".*", handler);
    const auto& config = service.config();
    svr.set_payload_max_length(config.max_upload_bytes);
    svr.set_error_handler([max = config.max_upload_bytes](const httplib::Request&, httplib::Response& res) {
        if (!res.body.empty()) return httplib::Server::HandlerResponse::Unhandled;
        if (res.status == 413) {
            res.set_content(error_body(ErrorCode::PayloadTooLarge,
                                       "request body exceeds " + std::to_string(max) + " bytes", ""),
                            "application/json");
            return httplib::Server::HandlerResponse::Handled;
        }
        return httplib::Server::HandlerResponse::Unhandled;
    });
    if (config.static_dir) svr.set_mount_point("/", config.static_dir->string());
}

HttpServer::~HttpServer() { stop(); }

int HttpServer::bind(const std::string& host, int port) {
    if (port == 0) return impl_->server.bind_to_any_port(host);
    return impl_->server.bind_to_port(host, port) ? port : -1;
}

bool HttpServer::listen() { return impl_->server.listen_after_bind(); }

void HttpServer::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace mocomp
