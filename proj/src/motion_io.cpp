#include "mocomp/motion_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

#include "json.hpp"
#include "mocomp/errors.hpp"

namespace mocomp {
using nlohmann::json;

namespace {

[[noreturn]] void schema_error(const std::string& message, const std::string& where) {
    throw Error(ErrorCode::SchemaError, message + " (at " + where + ")", where);
}

const json& member(const json& obj, const char* key, const std::string& where) {
    auto it = obj.find(key);
    if (it == obj.end()) {
        schema_error(std::string("missing field '") + key + "'", (where == "/" ? "" : where) + "/" + key);
    }
    return *it;
}

std::string string_at(const json& v, const std::string& where) {
    if (!v.is_string()) schema_error("expected a string", where);
    return v.get<std::string>();
}

double number_at(const json& v, const std::string& where) {
    if (!v.is_number()) schema_error("expected a number", where);
    const double d = v.get<double>();
    if (!std::isfinite(d)) schema_error("expected a finite number", where);
    return d;
}

bool parse_double(std::string_view text, double& out) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) text.remove_prefix(1);
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t')) text.remove_suffix(1);
    if (!text.empty() && text.front() == '+') text.remove_prefix(1);
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc() && ptr == text.data() + text.size() && !text.empty();
}

std::vector<std::string> split_csv(std::string_view line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur += '"';
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else {
            cur += c;
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string csv_field(const std::string& text) {
    if (text.find_first_of(",\"\n") == std::string::npos) return text;
    std::string out = "\"";
    for (char c : text) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::vector<std::string> split_lines(std::string_view bytes) {
    std::vector<std::string> lines;
    std::size_t start = 0;
    while (start <= bytes.size()) {
        const std::size_t end = bytes.find('\n', start);
        std::string line(bytes.substr(start, end == std::string_view::npos ? std::string_view::npos : end - start));
        if (!line.empty() && line.back() == '\r') line.pop_back();
        lines.push_back(std::move(line));
        if (end == std::string_view::npos) break;
        start = end + 1;
    }
    if (!lines.empty() && lines.back().empty()) lines.pop_back();
    return lines;
}

double unit_factor(const std::string& unit, const JointSpec* joint, const std::string& where) {
    const bool linear = joint != nullptr && joint->kind == JointKind::Prismatic;
    if (unit == "rad" || unit == "deg") {
        if (linear) {
            throw Error(ErrorCode::UnitError, "angular unit '" + unit + "' on prismatic joint '" + joint->name + "'", where);
        }
        return unit == "deg" ? std::numbers::pi / 180.0 : 1.0;
    }
    if (unit == "m") {
        if (joint != nullptr && !linear) {
            throw Error(ErrorCode::UnitError, "linear unit 'm' on rotational joint '" + joint->name + "'", where);
        }
        return 1.0;
    }
    throw Error(ErrorCode::UnitError, "unknown unit '" + unit + "'", where);
}

const JointSpec* find_joint(const RobotModel& model, const std::string& name) {
    for (const auto& j : model.joints()) {
        if (j.name == name && j.kind != JointKind::Fixed) return &j;
    }
    return nullptr;
}

void require_increasing(const std::vector<double>& ts, const std::function<std::string(std::size_t)>& where) {
    for (std::size_t i = 1; i < ts.size(); ++i) {
        if (!(ts[i] > ts[i - 1])) {
            throw Error(ErrorCode::MonotonicityError,
                        "timestamps must increase strictly (" + format_double(ts[i]) + " after " +
                            format_double(ts[i - 1]) + ")",
                        where(i));
        }
    }
}

RobotSource robot_from_json(const json& root, const LoadOptions& options) {
    const json& robot = member(root, "robot", "/");
    if (!robot.is_object()) schema_error("expected an object", "/robot");
    RobotSource src;
    src.ee_link = string_at(member(robot, "ee_link", "/robot"), "/robot/ee_link");
    const json& urdf = member(robot, "urdf", "/robot");
    if (urdf.is_string()) {
        src.urdf = urdf.get<std::string>();
    } else if (urdf.is_object()) {
        if (!options.allow_file_refs) schema_error("file references are not accepted here", "/robot/urdf");
        const auto file = options.base_dir / string_at(member(urdf, "file", "/robot/urdf"), "/robot/urdf/file");
        std::ifstream in(file, std::ios::binary);
        if (!in) schema_error("cannot read robot file '" + file.string() + "'", "/robot/urdf/file");
        std::ostringstream ss;
        ss << in.rdbuf();
        src.urdf = ss.str();
    } else {
        schema_error("expected inline URDF text or {\"file\": ...}", "/robot/urdf");
    }
    return src;
}

void finish(LoadedMotion& out, const RobotSource& robot) {
    out.urdf = robot.urdf;
    out.robot = parse_urdf(robot.urdf);
    out.motion.robot_ref = out.robot.name();
    out.motion.ee_link = robot.ee_link;
    if (!out.robot.has_link(robot.ee_link)) {
        throw Error(ErrorCode::SchemaError, "robot has no link '" + robot.ee_link + "' for ee_link", "/robot/ee_link");
    }
}

void normalize_time(Motion& motion) {
    double t0 = motion.joints.timestamps.front();
    for (const auto& [name, track] : motion.object_tracks) t0 = std::min(t0, track.timestamps.front());
    if (t0 == 0.0) return;
    for (double& t : motion.joints.timestamps) t -= t0;
    for (auto& [name, track] : motion.object_tracks) {
        for (double& t : track.timestamps) t -= t0;
    }
}

void check_against_robot(const LoadedMotion& loaded) {
    for (const Diagnostic& d : validate(loaded.motion, loaded.robot)) {
        throw Error(ErrorCode::SchemaError, std::string(diagnostic_name(d.kind)) + ": " + d.message,
                    "/" + d.where + (d.index > 0 ? "/" + std::to_string(d.index) : ""));
    }
}

LoadedMotion load_json(std::string_view bytes, const LoadOptions& options) {
    json root;
    try {
        root = json::parse(bytes);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::SchemaError, std::string("malformed JSON: ") + e.what(), "byte " + std::to_string(e.byte));
    }
    if (!root.is_object()) schema_error("expected an object", "/");
    const json& version = member(root, "format_version", "/");
    if (!version.is_number_integer() || version.get<int>() != kMotionFormatVersion) {
        schema_error("unsupported format_version (expected " + std::to_string(kMotionFormatVersion) + ")",
                     "/format_version");
    }

    LoadedMotion out;
    out.motion.name = root.contains("name") ? string_at(root["name"], "/name") : options.name;
    const RobotSource robot = options.robot ? *options.robot : robot_from_json(root, options);
    finish(out, robot);

    const json& joints = member(root, "joints", "/");
    if (!joints.is_object()) schema_error("expected an object", "/joints");
    const json& names = member(joints, "names", "/joints");
    if (!names.is_array()) schema_error("expected an array", "/joints/names");
    for (std::size_t k = 0; k < names.size(); ++k) {
        out.motion.joints.joint_names.push_back(string_at(names[k], "/joints/names/" + std::to_string(k)));
    }
    const std::size_t n = out.motion.joints.joint_names.size();

    std::vector<double> factor(n, 1.0);
    if (auto it = joints.find("units"); it != joints.end()) {
        for (std::size_t k = 0; k < n; ++k) {
            std::string where = "/joints/units";
            std::string unit;
            if (it->is_string()) {
                unit = it->get<std::string>();
            } else if (it->is_array() && it->size() == n) {
                where += "/" + std::to_string(k);
                unit = string_at((*it)[k], where);
            } else {
                schema_error("expected a unit string or one unit per joint", where);
            }
            factor[k] = unit_factor(unit, find_joint(out.robot, out.motion.joints.joint_names[k]), where);
        }
    }

    const json& rows = member(joints, "rows", "/joints");
    if (!rows.is_array() || rows.empty()) schema_error("expected a non-empty array", "/joints/rows");
    for (std::size_t r = 0; r < rows.size(); ++r) {
        const std::string where = "/joints/rows/" + std::to_string(r);
        const json& row = rows[r];
        if (!row.is_array() || row.size() != n + 1) {
            schema_error("row width " + std::to_string(row.is_array() ? row.size() : 0) + ", expected " +
                             std::to_string(n + 1),
                         where);
        }
        out.motion.joints.timestamps.push_back(number_at(row[0], where + "/0"));
        Configuration q(n);
        for (std::size_t k = 0; k < n; ++k) q[k] = number_at(row[k + 1], where + "/" + std::to_string(k + 1)) * factor[k];
        out.motion.joints.configurations.push_back(std::move(q));
    }
    require_increasing(out.motion.joints.timestamps, [](std::size_t i) { return "/joints/rows/" + std::to_string(i); });

    if (auto it = root.find("object_tracks"); it != root.end()) {
        if (!it->is_object()) schema_error("expected an object", "/object_tracks");
        for (const auto& [track_name, track] : it->items()) {
            const std::string base = "/object_tracks/" + track_name;
            const json& trows = member(track, "rows", base);
            if (!trows.is_array() || trows.empty()) schema_error("expected a non-empty array", base + "/rows");
            PoseTrajectory poses;
            for (std::size_t r = 0; r < trows.size(); ++r) {
                const std::string where = base + "/rows/" + std::to_string(r);
                const json& row = trows[r];
                if (!row.is_array() || row.size() != 8) schema_error("pose rows are [t, x, y, z, qx, qy, qz, qw]", where);
                double v[8];
                for (std::size_t k = 0; k < 8; ++k) v[k] = number_at(row[k], where + "/" + std::to_string(k));
                poses.timestamps.push_back(v[0]);
                Pose p;
                p.position = {v[1], v[2], v[3]};
                try {
                    p.orientation = UnitQuaternion::normalized(v[4], v[5], v[6], v[7]);
                } catch (const Error&) {
                    schema_error("zero quaternion", where);
                }
                poses.poses.push_back(p);
            }
            require_increasing(poses.timestamps, [&](std::size_t i) { return base + "/rows/" + std::to_string(i); });
            out.motion.object_tracks.emplace(track_name, std::move(poses));
        }
    }
    normalize_time(out.motion);
    check_against_robot(out);
    return out;
}

LoadedMotion load_csv(std::string_view bytes, const LoadOptions& options) {
    if (!options.robot) {
        throw Error(ErrorCode::SchemaError, "csv motions need a robot description alongside", "robot");
    }
    LoadedMotion out;
    out.motion.name = options.name;
    finish(out, *options.robot);

    const auto lines = split_lines(bytes);
    if (lines.empty()) throw Error(ErrorCode::SchemaError, "empty csv", "line 1");
    const auto header = split_csv(lines[0]);
    if (header.empty() || header[0] != "t") {
        throw Error(ErrorCode::SchemaError, "csv header must start with 't'", "line 1");
    }
    std::vector<double> factor;
    for (std::size_t k = 1; k < header.size(); ++k) {
        std::string name = header[k];
        std::string unit;
        if (const auto open = name.find('['); open != std::string::npos && name.back() == ']') {
            unit = name.substr(open + 1, name.size() - open - 2);
            name = name.substr(0, open);
        }
        const JointSpec* joint = find_joint(out.robot, name);
        factor.push_back(unit.empty() ? 1.0 : unit_factor(unit, joint, "line 1"));
        out.motion.joints.joint_names.push_back(name);
    }
    const std::size_t width = header.size();
    for (std::size_t l = 1; l < lines.size(); ++l) {
        const std::string where = "line " + std::to_string(l + 1);
        const auto fields = split_csv(lines[l]);
        if (fields.size() != width) {
            throw Error(ErrorCode::SchemaError,
                        "row has " + std::to_string(fields.size()) + " fields, expected " + std::to_string(width) +
                            " (at " + where + ")",
                        where);
        }
        double t = 0.0;
        if (!parse_double(fields[0], t) || !std::isfinite(t)) {
            throw Error(ErrorCode::SchemaError, "bad number '" + fields[0] + "' (at " + where + ")", where);
        }
        Configuration q(width - 1);
        for (std::size_t k = 1; k < width; ++k) {
            double v = 0.0;
            if (!parse_double(fields[k], v) || !std::isfinite(v)) {
                throw Error(ErrorCode::SchemaError, "bad number '" + fields[k] + "' (at " + where + ")", where);
            }
            q[k - 1] = v * factor[k - 1];
        }
        out.motion.joints.timestamps.push_back(t);
        out.motion.joints.configurations.push_back(std::move(q));
    }
    if (out.motion.joints.empty()) throw Error(ErrorCode::SchemaError, "csv has no samples", "line 2");
    require_increasing(out.motion.joints.timestamps, [](std::size_t i) { return "line " + std::to_string(i + 2); });
    normalize_time(out.motion);
    check_against_robot(out);
    return out;
}

}  // namespace

std::string format_double(double value) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, end);
}

LoadedMotion load_motion(std::string_view bytes, MotionFormat format, const LoadOptions& options) {
    return format == MotionFormat::Json ? load_json(bytes, options) : load_csv(bytes, options);
}

std::string save_motion(const LoadedMotion& loaded) {
    const Motion& m = loaded.motion;
    json root;
    root["format_version"] = kMotionFormatVersion;
    root["name"] = m.name;
    root["robot"] = {{"urdf", loaded.urdf}, {"ee_link", m.ee_link}};
    json units = json::array();
    for (const auto& name : m.joints.joint_names) {
        const JointSpec* joint = find_joint(loaded.robot, name);
        units.push_back(joint != nullptr && joint->kind == JointKind::Prismatic ? "m" : "rad");
    }
    json rows = json::array();
    for (std::size_t i = 0; i < m.joints.size(); ++i) {
        json row = json::array({m.joints.timestamps[i]});
        for (double v : m.joints.configurations[i]) row.push_back(v);
        rows.push_back(std::move(row));
    }
    root["joints"] = {{"names", m.joints.joint_names}, {"units", units}, {"rows", rows}};
    if (!m.object_tracks.empty()) {
        json tracks = json::object();
        for (const auto& [name, track] : m.object_tracks) {
            json trows = json::array();
            for (std::size_t i = 0; i < track.size(); ++i) {
                const Pose& p = track.poses[i];
                trows.push_back({track.timestamps[i], p.position.x(), p.position.y(), p.position.z(), p.orientation.x,
                                 p.orientation.y, p.orientation.z, p.orientation.w});
            }
            tracks[name] = {{"rows", trows}};
        }
        root["object_tracks"] = tracks;
    }
    return root.dump() + "\n";
}

std::string export_series_csv(const ScalarSeries& series) {
    std::string out = "t," + csv_field(series.name) + "\n";
    for (std::size_t i = 0; i < series.size(); ++i) {
        out += format_double(series.timestamps[i]) + "," + format_double(series.values[i]) + "\n";
    }
    return out;
}

std::string export_series_csv(const std::vector<ScalarSeries>& series) {
    std::string out = "series,unit,t,value\n";
    for (const auto& s : series) {
        const std::string prefix = csv_field(s.name) + "," + csv_field(s.unit) + ",";
        for (std::size_t i = 0; i < s.size(); ++i) {
            out += prefix + format_double(s.timestamps[i]) + "," + format_double(s.values[i]) + "\n";
        }
    }
    return out;
}

std::vector<ScalarSeries> parse_series_csv(std::string_view bytes) {
    const auto lines = split_lines(bytes);
    if (lines.empty()) throw Error(ErrorCode::SchemaError, "empty csv", "line 1");
    const auto header = split_csv(lines[0]);
    auto number = [](const std::string& text, std::size_t line) {
        double v = 0.0;
        if (!parse_double(text, v)) {
            throw Error(ErrorCode::SchemaError, "bad number '" + text + "'", "line " + std::to_string(line));
        }
        return v;
    };
    std::vector<ScalarSeries> out;
    if (header.size() == 2 && header[0] == "t") {
        ScalarSeries s;
        s.name = header[1];
        for (std::size_t l = 1; l < lines.size(); ++l) {
            const auto f = split_csv(lines[l]);
            if (f.size() != 2) throw Error(ErrorCode::SchemaError, "expected 2 fields", "line " + std::to_string(l + 1));
            s.timestamps.push_back(number(f[0], l + 1));
            s.values.push_back(number(f[1], l + 1));
        }
        out.push_back(std::move(s));
        return out;
    }
    if (header == std::vector<std::string>{"series", "unit", "t", "value"}) {
        for (std::size_t l = 1; l < lines.size(); ++l) {
            const auto f = split_csv(lines[l]);
            if (f.size() != 4) throw Error(ErrorCode::SchemaError, "expected 4 fields", "line " + std::to_string(l + 1));
            if (out.empty() || out.back().name != f[0] || out.back().unit != f[1]) {
                out.push_back({f[0], f[1], {}, {}});
            }
            out.back().timestamps.push_back(number(f[2], l + 1));
            out.back().values.push_back(number(f[3], l + 1));
        }
        return out;
    }
    throw Error(ErrorCode::SchemaError, "unrecognized series csv header", "line 1");
}

std::string export_trace(const TracePolyline& polyline, const std::vector<ConeGlyph>& cones) {
    std::string out = "mocomp-trace 1\n";
    out += "vertices " + std::to_string(polyline.size()) + "\n";
    for (std::size_t i = 0; i < polyline.size(); ++i) {
        const Vec3& p = polyline.points[i];
        out += "v " + format_double(p.x()) + " " + format_double(p.y()) + " " + format_double(p.z()) + " " +
               format_double(polyline.timestamps[i]) + "\n";
    }
    out += "polyline " + std::to_string(polyline.size());
    for (std::size_t i = 0; i < polyline.size(); ++i) out += " " + std::to_string(i);
    out += "\ncones " + std::to_string(cones.size()) + "\n";
    for (const auto& c : cones) {
        out += "c " + format_double(c.position.x()) + " " + format_double(c.position.y()) + " " +
               format_double(c.position.z()) + " " + format_double(c.direction.x()) + " " +
               format_double(c.direction.y()) + " " + format_double(c.direction.z()) + " " + format_double(c.scale) +
               "\n";
    }
    return out;
}

PositionTrace parse_trace(std::string_view bytes) {
    const auto lines = split_lines(bytes);
    std::size_t l = 0;
    auto fail = [&](const std::string& what) -> void {
        throw Error(ErrorCode::SchemaError, what, "line " + std::to_string(l + 1));
    };
    auto tokens = [&](std::size_t idx) {
        std::vector<std::string> out;
        if (idx >= lines.size()) return out;
        std::istringstream in(lines[idx]);
        for (std::string tok; in >> tok;) out.push_back(tok);
        return out;
    };
    auto num = [&](const std::string& text) {
        double v = 0.0;
        if (!parse_double(text, v)) fail("bad number '" + text + "'");
        return v;
    };
    auto count = [&](const std::vector<std::string>& t, const char* key) {
        if (t.size() < 2 || t[0] != key) fail(std::string("expected '") + key + "'");
        return static_cast<std::size_t>(num(t[1]));
    };

    if (lines.empty() || lines[0] != "mocomp-trace 1") fail("missing 'mocomp-trace 1' header");
    PositionTrace out;
    l = 1;
    const std::size_t nv = count(tokens(l), "vertices");
    for (std::size_t i = 0; i < nv; ++i) {
        ++l;
        const auto t = tokens(l);
        if (t.size() != 5 || t[0] != "v") fail("expected a vertex line");
        out.polyline.points.emplace_back(num(t[1]), num(t[2]), num(t[3]));
        out.polyline.timestamps.push_back(num(t[4]));
    }
    ++l;
    const auto poly = tokens(l);
    if (count(poly, "polyline") != nv || poly.size() != nv + 2) fail("polyline must index every vertex");
    for (std::size_t i = 0; i < nv; ++i) {
        if (poly[i + 2] != std::to_string(i)) fail("polyline indices must be 0..N-1 in order");
    }
    ++l;
    const std::size_t nc = count(tokens(l), "cones");
    for (std::size_t i = 0; i < nc; ++i) {
        ++l;
        const auto t = tokens(l);
        if (t.size() != 8 || t[0] != "c") fail("expected a cone line");
        out.cones.push_back({{num(t[1]), num(t[2]), num(t[3])}, {num(t[4]), num(t[5]), num(t[6])}, num(t[7])});
    }
    if (l + 1 != lines.size()) {
        ++l;
        fail("unexpected trailing content");
    }
    return out;
}

}  // namespace mocomp
