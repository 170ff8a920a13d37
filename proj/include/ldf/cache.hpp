#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <list>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ldf/server.hpp"

namespace ldf::cache {

/// Least-recently-used map keyed by canonical request strings. An empty capacity
/// means unbounded.
template <typename V>
class LruMap {
public:
    explicit LruMap(std::optional<std::size_t> capacity = std::nullopt) : capacity_(capacity) {}

    /// Returns the entry and marks it most recently used, or nullptr.
    V* touch(const std::string& key) {
        auto it = index_.find(key);
        if (it == index_.end()) return nullptr;
        order_.splice(order_.begin(), order_, it->second);
        return &it->second->second;
    }

    /// Inserts as most recently used, evicting the LRU entry when full. No-op if present.
    void insert(const std::string& key, V value) {
        if (index_.count(key)) return;
        if (capacity_ && *capacity_ == 0) return;
        if (capacity_ && index_.size() >= *capacity_) {
            index_.erase(order_.back().first);
            order_.pop_back();
        }
        order_.emplace_front(key, std::move(value));
        index_.emplace(key, order_.begin());
    }

    std::size_t size() const noexcept { return index_.size(); }
    std::optional<std::size_t> capacity() const noexcept { return capacity_; }

private:
    using Entry = std::pair<std::string, V>;
    std::optional<std::size_t> capacity_;
    std::list<Entry> order_;
    std::unordered_map<std::string, typename std::list<Entry>::iterator> index_;
};

struct CacheStats {
    std::uint64_t hits = 0;
    std::uint64_t misses = 0;

    std::uint64_t total() const noexcept { return hits + misses; }
    double hitRate() const noexcept { return total() ? static_cast<double>(hits) / total() : 0.0; }
};

/// Hit/miss simulation of an HTTP cache over a stream of request keys.
class CacheModel {
public:
    explicit CacheModel(std::optional<std::size_t> capacity = std::nullopt) : entries_(capacity) {}

    /// Returns true on a hit. A miss inserts the key.
    bool observe(const std::string& key);

    const CacheStats& stats() const noexcept { return stats_; }
    std::size_t size() const noexcept { return entries_.size(); }
    std::optional<std::size_t> capacity() const noexcept { return entries_.capacity(); }

private:
    LruMap<char> entries_;
    CacheStats stats_;
};

struct ReplayRow {
    std::optional<std::size_t> capacity;  // nullopt = unlimited
    CacheStats stats;
};

/// One independent simulation per capacity over the same trace.
std::vector<ReplayRow> replay(const std::vector<std::string>& trace,
                              const std::vector<std::optional<std::size_t>>& capacities);

std::size_t distinct_count(const std::vector<std::string>& trace);

/// `capacity,hits,misses,hitRate`; unlimited capacity prints as `unlimited`.
void write_stats_csv(std::ostream& out, const std::vector<ReplayRow>& rows);

std::vector<std::string> load_trace(const std::filesystem::path& path);
void write_trace(std::ostream& out, const std::vector<std::string>& trace);

/// Parses capacities such as `2500`, `unlimited`. Throws ldf::ConfigError.
std::optional<std::size_t> parse_capacity(const std::string& text);

/// HTTP pass-through that answers repeated request targets from an LRU cache.
/// Hit/miss accounting is serialized under a mutex.
class CachingProxy {
public:
    CachingProxy(std::string upstream_url, std::optional<std::size_t> capacity,
                 std::string host = "127.0.0.1", int port = 0, std::size_t threads = 32);
    ~CachingProxy();
    CachingProxy(const CachingProxy&) = delete;
    CachingProxy& operator=(const CachingProxy&) = delete;

    void start();
    void stop();
    int port() const;
    std::string url() const;
    CacheStats stats() const;

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace ldf::cache
