#include "cli_commands.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include "json.hpp"
#include "mocomp/errors.hpp"
#include "mocomp/fixtures.hpp"
#include "mocomp/motion_io.hpp"
#include "mocomp/service.hpp"

namespace mocomp::cli {
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

// A service response with a 4xx/5xx status, already rendered as an error body.
struct ApiFailure {
    std::string body;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::InvalidArgument, "cannot read '" + path + "'", path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_bytes(const std::string& target, const std::string& bytes) {
    if (target == "-") {
        std::cout << bytes << std::flush;
        return;
    }
    std::ofstream out(target, std::ios::binary | std::ios::trunc);
    out << bytes;
    if (!out) throw Error(ErrorCode::InvalidArgument, "cannot write '" + target + "'", target);
}

LoadedMotion load_file(const std::string& file, const Inputs& in) {
    const fs::path path(file);
    LoadOptions options;
    options.base_dir = path.parent_path();
    options.name = path.stem().string();
    if (!in.robot.empty()) {
        if (in.ee_link.empty()) throw Error(ErrorCode::InvalidArgument, "--robot needs --ee-link", "ee_link");
        options.robot = RobotSource{read_file(in.robot), in.ee_link};
    }
    const MotionFormat format = path.extension() == ".csv" ? MotionFormat::Csv : MotionFormat::Json;
    return load_motion(read_file(file), format, options);
}

// Registers the input files in order, so they get ids m1, m2, ...
std::vector<std::string> register_all(ComparatorService& service, const Inputs& in) {
    std::vector<std::string> ids;
    for (const auto& f : in.files) ids.push_back(service.motions().add(load_file(f, in)));
    return ids;
}

std::string call(ComparatorService& service, const std::string& method, const std::string& path,
                 std::map<std::string, std::string> query = {}, std::string body = {}) {
    HttpResponse res = service.handle({method, path, std::move(query), std::move(body), ""});
    if (res.status >= 400) throw ApiFailure{res.body};
    return res.body;
}

template <typename Fn>
int guarded(Fn&& fn) {
    try {
        fn();
        return 0;
    } catch (const ApiFailure& f) {
        const json err = json::parse(f.body)["error"];
        std::cerr << "error: " << err["code"].get<std::string>() << ": " << err["message"].get<std::string>();
        if (!err["detail"].get<std::string>().empty()) std::cerr << " [" << err["detail"].get<std::string>() << "]";
        std::cerr << "\n";
    } catch (const Error& e) {
        std::cerr << "error: " << code_name(e.code()) << ": " << e.what();
        if (!e.detail().empty()) std::cerr << " [" << e.detail() << "]";
        std::cerr << "\n";
    } catch (const std::exception& e) {
        std::cerr << "error: Internal: " << e.what() << "\n";
    }
    return 1;
}

template <typename Human>
void emit(const Output& out, const std::string& body, Human&& human) {
    if (!out.json.empty()) {
        write_bytes(out.json, body);
        return;
    }
    human(json::parse(body));
}

std::string num(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.6g", v);
    return buf;
}

void print_series_summary(const json& s) {
    const auto& values = s["values"];
    std::cout << s["name"].get<std::string>() << " [" << s["unit"].get<std::string>() << "], " << values.size()
              << " samples\n";
    std::cout << "       t        value\n";
    for (std::size_t i = 0; i < values.size(); ++i) {
        std::printf("%8s  %11s\n", num(s["timestamps"][i].get<double>()).c_str(), num(values[i].get<double>()).c_str());
    }
    std::fflush(stdout);
}

ScalarSeries series_from_json(const json& s) {
    return {s["name"].get<std::string>(), s["unit"].get<std::string>(), s["timestamps"].get<std::vector<double>>(),
            s["values"].get<std::vector<double>>()};
}

json series_spec(const std::string& id, const SeriesArgs& a) {
    json spec = {{"motion", id}, {"quantity", a.quantity}, {"axis", a.axis}, {"deriv", a.deriv}};
    if (!a.joint.empty()) spec["joint"] = a.joint;
    if (!a.frame.empty()) spec["frame"] = a.frame;
    if (!a.smooth.empty()) spec["smooth"] = a.smooth;
    return spec;
}

void require_files(const Inputs& in, std::size_t count) {
    if (in.files.size() != count) {
        throw Error(ErrorCode::InvalidArgument, "expected " + std::to_string(count) + " motion file(s)");
    }
}

}  // namespace

int ingest(const Inputs& in, const Output& out) {
    return guarded([&] {
        ComparatorService service;
        for (const auto& id : register_all(service, in)) {
            emit(out, call(service, "GET", "/api/motions/" + id), [](const json& m) {
                std::cout << "id        " << m["id"].get<std::string>() << "\n"
                          << "name      " << m["name"].get<std::string>() << "\n"
                          << "robot     " << m["robot"].get<std::string>() << "\n"
                          << "ee_link   " << m["ee_link"].get<std::string>() << "\n"
                          << "joints    " << m["n"].get<std::size_t>() << " (";
                const auto& names = m["joint_names"];
                for (std::size_t i = 0; i < names.size(); ++i) {
                    std::cout << (i ? " " : "") << names[i].get<std::string>();
                }
                std::cout << ")\n"
                          << "samples   " << m["samples"].get<std::size_t>() << "\n"
                          << "duration  " << num(m["duration"].get<double>()) << " s\n";
                if (!m["object_tracks"].empty()) {
                    std::cout << "tracks   ";
                    for (const auto& t : m["object_tracks"]) std::cout << " " << t.get<std::string>();
                    std::cout << "\n";
                }
            });
        }
    });
}

int align(const Inputs& in, const AlignArgs& args, const Output& out) {
    return guarded([&] {
        require_files(in, 2);
        ComparatorService service;
        const auto ids = register_all(service, in);
        auto side = [](const std::string& id, const std::string& frame) {
            return frame.empty() ? json(id) : json{{"motion", id}, {"frame", frame}};
        };
        json req = {{"a", side(ids[0], args.frame_a)}, {"b", side(ids[1], args.frame_b)}, {"cost", args.cost}};
        if (args.window) req["window"] = *args.window;
        const std::string body = call(service, "POST", "/api/align", {}, req.dump());
        if (!out.csv.empty()) {
            const json doc = json::parse(body);
            ScalarSeries curve{"t_b", "s", {}, {}};
            for (const auto& p : doc["warping_curve"]["points"]) {
                curve.timestamps.push_back(p[0].get<double>());
                curve.values.push_back(p[1].get<double>());
            }
            write_bytes(out.csv, export_series_csv(curve));
        }
        emit(out, body, [](const json& r) {
            std::cout << "cost         " << r["cost"]["name"].get<std::string>() << "\n"
                      << "total_cost   " << num(r["total_cost"].get<double>()) << "\n"
                      << "path_length  " << r["path"].size() << "\n"
                      << "samples      " << r["timestamps_a"].size() << " x " << r["timestamps_b"].size() << "\n";
            for (const char* side : {"a", "b"}) {
                const json& rs = r["relative_speed"][side];
                if (rs.is_null()) continue;
                double lo = rs["ratio"][0].get<double>(), hi = lo;
                for (const auto& v : rs["ratio"]) {
                    lo = std::min(lo, v.get<double>());
                    hi = std::max(hi, v.get<double>());
                }
                std::cout << "speed_" << side << "      " << num(lo) << " .. " << num(hi) << "\n";
            }
        });
    });
}

int diff(const Inputs& in, const DiffArgs& args, const Output& out) {
    return guarded([&] {
        require_files(in, 2);
        ComparatorService service;
        const auto ids = register_all(service, in);
        json req = {{"a", series_spec(ids[0], args.series)}, {"b", series_spec(ids[1], args.series)}, {"mode", args.mode}};
        if (args.alignment == "dtw") {
            json dtw = {{"cost", args.cost}};
            if (args.window) dtw["window"] = *args.window;
            req["alignment"] = {{"dtw", dtw}};
        } else {
            req["alignment"] = args.alignment;
        }
        const std::string body = call(service, "POST", "/api/diff", {}, req.dump());
        if (!out.csv.empty()) write_bytes(out.csv, export_series_csv(series_from_json(json::parse(body))));
        emit(out, body, print_series_summary);
    });
}

int trace(const Inputs& in, const TraceArgs& args, const Output& out) {
    return guarded([&] {
        require_files(in, 1);
        ComparatorService service;
        const auto ids = register_all(service, in);
        std::map<std::string, std::string> q = {{"kind", args.kind}, {"stride", format_double(args.stride)}};
        if (!args.frame.empty()) q["frame"] = args.frame;
        const std::string body = call(service, "GET", "/api/motions/" + ids[0] + "/trace", q);
        const json doc = json::parse(body);
        if (!args.out.empty()) {
            TracePolyline poly;
            poly.timestamps = doc["timestamps"].get<std::vector<double>>();
            for (const auto& p : doc["points"]) poly.points.emplace_back(p[0].get<double>(), p[1].get<double>(), p[2].get<double>());
            std::vector<ConeGlyph> cones;
            if (doc.contains("cones")) {
                for (const auto& c : doc["cones"]) {
                    const auto& p = c["position"];
                    const auto& d = c["direction"];
                    cones.push_back({{p[0].get<double>(), p[1].get<double>(), p[2].get<double>()},
                                     {d[0].get<double>(), d[1].get<double>(), d[2].get<double>()},
                                     c["scale"].get<double>()});
                }
            }
            write_bytes(args.out, export_trace(poly, cones));
        }
        emit(out, body, [](const json& t) {
            std::cout << "kind        " << t["kind"].get<std::string>() << "\n"
                      << "frame       " << t["frame"].get<std::string>() << "\n"
                      << "vertices    " << t["points"].size() << "\n";
            if (t.contains("cones")) std::cout << "cones       " << t["cones"].size() << "\n";
            std::cout << "arc_length  " << num(t["arc_length"].get<double>()) << "\n";
        });
    });
}

int embed(const Inputs& in, const EmbedArgs& args, const Output& out) {
    return guarded([&] {
        if (in.files.empty()) throw Error(ErrorCode::InvalidArgument, "embed needs at least one motion file");
        ComparatorService service;
        const auto ids = register_all(service, in);
        const json req = {{"motion_ids", ids},
                          {"params",
                           {{"seed", args.seed},
                            {"method", args.method},
                            {"n_neighbors", args.n_neighbors},
                            {"min_dist", args.min_dist},
                            {"n_epochs", args.n_epochs}}}};
        emit(out, call(service, "POST", "/api/embed", {}, req.dump()), [&](const json& e) {
            std::cout << "method " << e["method"].get<std::string>() << ", seed " << e["params"]["seed"].get<std::uint64_t>()
                      << "\n";
            std::cout << "motion  samples    centroid_x    centroid_y  file\n";
            for (std::size_t k = 0; k < e["traces"].size(); ++k) {
                const auto& t = e["traces"][k];
                double cx = 0.0, cy = 0.0;
                for (const auto& p : t["points"]) {
                    cx += p[0].get<double>();
                    cy += p[1].get<double>();
                }
                const double n = static_cast<double>(t["points"].size());
                std::printf("%-6s  %7zu  %12s  %12s  %s\n", t["motion_id"].get<std::string>().c_str(), t["points"].size(),
                            num(cx / n).c_str(), num(cy / n).c_str(), in.files[k].c_str());
            }
            std::fflush(stdout);
        });
    });
}

int metrics(const Inputs& in, const std::string& reference, const Output& out) {
    return guarded([&] {
        require_files(in, 1);
        ComparatorService service;
        const auto ids = register_all(service, in);
        std::map<std::string, std::string> q;
        if (reference.rfind("track:", 0) == 0) {
            q["reference"] = reference;
        } else if (!reference.empty()) {
            Inputs ref = in;
            ref.files = {reference};
            q["reference"] = register_all(service, ref)[0];
        }
        emit(out, call(service, "GET", "/api/motions/" + ids[0] + "/metrics", q), [](const json& m) {
            std::cout << "duration            " << num(m["duration"].get<double>()) << " s\n"
                      << "ee_path_length      " << num(m["ee_path_length"].get<double>()) << " m\n"
                      << "jerk_rms            " << num(m["jerk_rms"].get<double>()) << " m/s^3\n";
            if (!m["tracking_error_rms"].is_null()) {
                std::cout << "tracking_error_rms  " << num(m["tracking_error_rms"].get<double>()) << " m\n";
            }
        });
    });
}

int limits(const Inputs& in, double margin, const Output& out) {
    return guarded([&] {
        require_files(in, 1);
        ComparatorService service;
        const auto ids = register_all(service, in);
        const auto body = call(service, "GET", "/api/motions/" + ids[0] + "/limits", {{"margin", format_double(margin)}});
        emit(out, body, [](const json& r) {
            if (r["violations"].empty()) {
                std::cout << "no joints at their limits\n";
                return;
            }
            std::cout << "joint       side          start        end\n";
            for (const auto& v : r["violations"]) {
                std::printf("%-10s  %-9s  %9s  %9s\n", v["joint"].get<std::string>().c_str(),
                            v["kind"].get<std::string>().c_str(), num(v["start"].get<double>()).c_str(),
                            num(v["end"].get<double>()).c_str());
            }
            std::fflush(stdout);
        });
    });
}

int fixtures_gen(const std::string& which, const std::string& dir) {
    return guarded([&] {
        const auto motions = fixtures::generate(which);
        fs::create_directories(dir);
        for (const auto& m : motions) {
            const fs::path path = fs::path(dir) / m.file;
            write_bytes(path.string(), save_motion(m.motion));
            std::cout << path.string() << "\n";
        }
    });
}

int serve(const ServeArgs& args) {
    return guarded([&] {
        const auto colon = args.addr.rfind(':');
        if (colon == std::string::npos) throw Error(ErrorCode::InvalidArgument, "--addr must be host:port", args.addr);
        const std::string host = args.addr.substr(0, colon);
        int port = 0;
        try {
            port = std::stoi(args.addr.substr(colon + 1));
        } catch (const std::exception&) {
            throw Error(ErrorCode::InvalidArgument, "--addr must be host:port", args.addr);
        }
        ServiceConfig config;
        config.max_upload_bytes = args.max_upload;
        config.default_seed = args.seed;
        if (!args.data_dir.empty()) config.data_dir = args.data_dir;
        if (!args.static_dir.empty()) config.static_dir = args.static_dir;
        ComparatorService service(config);
        HttpServer server(service);
        const int bound = server.bind(host, port);
        if (bound < 0) throw Error(ErrorCode::InvalidArgument, "cannot listen on " + args.addr, args.addr);
        std::cerr << "mocomp: listening on http://" << host << ":" << bound << "\n";
        server.listen();
    });
}

}  // namespace mocomp::cli
