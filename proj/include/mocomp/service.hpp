#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>

#include "mocomp/errors.hpp"
#include "mocomp/store.hpp"

namespace mocomp {

inline constexpr int kApiFormatVersion = 1;

struct HttpRequest {
    std::string method;
    std::string path;
    std::map<std::string, std::string> query;
    std::string body;
    /// Value of the Accept header, used only to serve the UI page for share links.
    std::string accept;
};

struct HttpResponse {
    int status = 200;
    std::string content_type = "application/json";
    std::string body;
};

struct ServiceConfig {
    std::size_t max_upload_bytes = 64u << 20;
    std::uint64_t default_seed = 42;
    std::optional<std::filesystem::path> data_dir;
    std::optional<std::filesystem::path> static_dir;
};

/// The JSON API, independent of any transport. Every route is a pure function
/// of the stored motions and the request, so successful compute responses are
/// cached by request and dropped when a motion is deleted.
///
/// Routes:
///   GET    /api/motions
///   POST   /api/motions                      motion file json -> 201 {id}
///   GET    /api/motions/{id}                 summary
///   DELETE /api/motions/{id}
///   GET    /api/motions/{id}/trace           kind, frame, stride
///   GET    /api/motions/{id}/series          quantity, joint, axis, frame, deriv, smooth
///   GET    /api/motions/{id}/limits          margin
///   GET    /api/motions/{id}/metrics         reference
///   POST   /api/align
///   POST   /api/diff
///   POST   /api/embed
///   POST   /api/sessions                     -> 201 {id, share_url}
///   GET    /api/sessions/{id}, PUT /api/sessions/{id}
///   GET    /s/{id}                           same document as /api/sessions/{id}
///
/// Errors come back as {"error": {"code", "message", "detail"}} with the status
/// from http_status().
class ComparatorService {
public:
    explicit ComparatorService(ServiceConfig config = {});

    HttpResponse handle(const HttpRequest& request);

    MotionStore& motions() { return motions_; }
    SessionStore& sessions() { return sessions_; }
    const ServiceConfig& config() const { return config_; }

private:
    HttpResponse route(const HttpRequest& request);

    ServiceConfig config_;
    MotionStore motions_;
    SessionStore sessions_;
    std::mutex cache_mutex_;
    std::map<std::string, HttpResponse> cache_;
    std::uint64_t generation_ = 0;
};

/// Error body for an engine error; StaleMotionRefs details become a "missing" list.
std::string error_body(ErrorCode code, const std::string& message, const std::string& detail);

/// Serves a ComparatorService over HTTP/1.1, plus static files when configured.
class HttpServer {
public:
    explicit HttpServer(ComparatorService& service);
    ~HttpServer();
    HttpServer(const HttpServer&) = delete;
    HttpServer& operator=(const HttpServer&) = delete;

    /// Binds; port 0 picks a free port. Returns the bound port or -1.
    int bind(const std::string& host, int port);
    /// Blocks until stop().
    bool listen();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace mocomp
