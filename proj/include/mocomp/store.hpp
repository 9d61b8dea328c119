#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "mocomp/motion_io.hpp"
#include "mocomp/session.hpp"

namespace mocomp {

/// Registered motions. Entries are immutable once added; readers share them
/// through shared_ptr so a concurrent delete never invalidates a computation.
/// Ids are "m1", "m2", ... and never reused.
class MotionStore {
public:
    /// With a data directory, motions persist as <dir>/motions/<id>.json and
    /// are reloaded on construction.
    explicit MotionStore(std::optional<std::filesystem::path> data_dir = {});

    std::string add(LoadedMotion motion);
    /// Throws UnknownMotion.
    std::shared_ptr<const LoadedMotion> get(const std::string& id) const;
    bool contains(const std::string& id) const;
    /// Throws UnknownMotion.
    void remove(const std::string& id);
    /// In id order.
    std::vector<std::shared_ptr<const LoadedMotion>> list() const;

private:
    mutable std::shared_mutex mutex_;
    std::map<std::uint64_t, std::shared_ptr<const LoadedMotion>> motions_;
    std::uint64_t next_ = 1;
    std::optional<std::filesystem::path> dir_;
};

/// Saved sessions, stored as their canonical bytes. Ids are "s1", "s2", ...
class SessionStore {
public:
    explicit SessionStore(std::optional<std::filesystem::path> data_dir = {});

    /// Assigns a fresh id and stores the session under it.
    std::string create(Session session);
    /// Throws UnknownSession.
    void put(const std::string& id, Session session);
    /// Canonical document bytes. Throws UnknownSession.
    std::string get(const std::string& id) const;

private:
    void persist(std::uint64_t key, const std::string& bytes) const;

    mutable std::shared_mutex mutex_;
    std::map<std::uint64_t, std::string> sessions_;
    std::uint64_t next_ = 1;
    std::optional<std::filesystem::path> dir_;
};

}  // namespace mocomp
