#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

namespace ldf {

/// `key=value` lines; `#` starts a comment line. Later keys override earlier ones.
class KeyValues {
public:
    static KeyValues parse(std::istream& in);
    static KeyValues load(const std::filesystem::path& path);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    void set(const std::string& key, std::string value) { values_[key] = std::move(value); }

    std::string get(const std::string& key, const std::string& fallback) const;
    std::uint64_t get_uint(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list of unsigned integers.
    std::vector<std::uint64_t> get_uint_list(const std::string& key,
                                             std::vector<std::uint64_t> fallback) const;
    std::vector<std::string> get_list(const std::string& key, std::vector<std::string> fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

private:
    std::map<std::string, std::string> values_;
};

}  // namespace ldf
