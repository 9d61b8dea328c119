#include "mocomp/store.hpp"

#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>

#include "mocomp/errors.hpp"

namespace mocomp {
namespace fs = std::filesystem;

namespace {

// "m12" -> 12 for the given prefix; nullopt for anything else.
std::optional<std::uint64_t> parse_id(const std::string& id, char prefix) {
    if (id.size() < 2 || id[0] != prefix || id[1] == '0') return std::nullopt;
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(id.data() + 1, id.data() + id.size(), v);
    if (ec != std::errc() || ptr != id.data() + id.size()) return std::nullopt;
    return v;
}

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const fs::path& path, const std::string& bytes) {
    const fs::path tmp = path.string() + ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << bytes;
        if (!out) throw Error(ErrorCode::Internal, "cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

template <typename Fn>
void scan(const fs::path& dir, char prefix, Fn&& fn) {
    if (!fs::exists(dir)) return;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.path().extension() != ".json") continue;
        if (auto key = parse_id(entry.path().stem().string(), prefix)) fn(*key, read_file(entry.path()));
    }
}

}  // namespace

MotionStore::MotionStore(std::optional<fs::path> data_dir) : dir_(std::move(data_dir)) {
    if (!dir_) return;
    fs::create_directories(*dir_ / "motions");
    scan(*dir_ / "motions", 'm', [&](std::uint64_t key, const std::string& bytes) {
        LoadOptions options;
        options.allow_file_refs = false;
        auto loaded = load_motion(bytes, MotionFormat::Json, options);
        loaded.motion.id = "m" + std::to_string(key);
        motions_.emplace(key, std::make_shared<const LoadedMotion>(std::move(loaded)));
        next_ = std::max(next_, key + 1);
    });
}

std::string MotionStore::add(LoadedMotion motion) {
    std::unique_lock lock(mutex_);
    const std::uint64_t key = next_++;
    motion.motion.id = "m" + std::to_string(key);
    if (dir_) write_file(*dir_ / "motions" / (motion.motion.id + ".json"), save_motion(motion));
    std::string id = motion.motion.id;
    motions_.emplace(key, std::make_shared<const LoadedMotion>(std::move(motion)));
    return id;
}

std::shared_ptr<const LoadedMotion> MotionStore::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    if (auto key = parse_id(id, 'm')) {
        if (auto it = motions_.find(*key); it != motions_.end()) return it->second;
    }
    throw Error(ErrorCode::UnknownMotion, "no motion with id '" + id + "'", id);
}

bool MotionStore::contains(const std::string& id) const {
    std::shared_lock lock(mutex_);
    auto key = parse_id(id, 'm');
    return key && motions_.count(*key) > 0;
}

void MotionStore::remove(const std::string& id) {
    std::unique_lock lock(mutex_);
    auto key = parse_id(id, 'm');
    if (!key || motions_.erase(*key) == 0) {
        throw Error(ErrorCode::UnknownMotion, "no motion with id '" + id + "'", id);
    }
    if (dir_) fs::remove(*dir_ / "motions" / (id + ".json"));
}

std::vector<std::shared_ptr<const LoadedMotion>> MotionStore::list() const {
    std::shared_lock lock(mutex_);
    std::vector<std::shared_ptr<const LoadedMotion>> out;
    for (const auto& [key, m] : motions_) out.push_back(m);
    return out;
}

SessionStore::SessionStore(std::optional<fs::path> data_dir) : dir_(std::move(data_dir)) {
    if (!dir_) return;
    fs::create_directories(*dir_ / "sessions");
    scan(*dir_ / "sessions", 's', [&](std::uint64_t key, const std::string& bytes) {
        sessions_.emplace(key, save_session(load_session(bytes)));
        next_ = std::max(next_, key + 1);
    });
}

void SessionStore::persist(std::uint64_t key, const std::string& bytes) const {
    if (dir_) write_file(*dir_ / "sessions" / ("s" + std::to_string(key) + ".json"), bytes);
}

std::string SessionStore::create(Session session) {
    std::unique_lock lock(mutex_);
    const std::uint64_t key = next_++;
    session.session_id = "s" + std::to_string(key);
    std::string bytes = save_session(session);
    persist(key, bytes);
    sessions_.emplace(key, std::move(bytes));
    return session.session_id;
}

void SessionStore::put(const std::string& id, Session session) {
    std::unique_lock lock(mutex_);
    auto key = parse_id(id, 's');
    if (!key || !sessions_.count(*key)) {
        throw Error(ErrorCode::UnknownSession, "no session with id '" + id + "'", id);
    }
    session.session_id = id;
    std::string bytes = save_session(session);
    persist(*key, bytes);
    sessions_[*key] = std::move(bytes);
}

std::string SessionStore::get(const std::string& id) const {
    std::shared_lock lock(mutex_);
    if (auto key = parse_id(id, 's')) {
        if (auto it = sessions_.find(*key); it != sessions_.end()) return it->second;
    }
    throw Error(ErrorCode::UnknownSession, "no session with id '" + id + "'", id);
}

}  // namespace mocomp
