#pragma once

#include <filesystem>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

namespace netabc {

/// Ordered flat `key = value` record. Blank lines and lines starting with
/// '#' are ignored when parsing; keys are unique.
class KeyValues {
public:
    static KeyValues parse(std::string_view text, std::string_view source = "<text>");
    static KeyValues load(const std::filesystem::path& path);

    void set(std::string key, std::string value);
    void set(std::string key, double value);
    void set(std::string key, std::int64_t value);
    bool contains(std::string_view key) const;
    std::optional<std::string> get(std::string_view key) const;
    /// Throws IoError naming the source when the key is missing or malformed.
    std::string require(std::string_view key) const;
    double require_double(std::string_view key) const;
    std::int64_t require_int(std::string_view key) const;
    std::uint64_t require_uint(std::string_view key) const;

    const std::vector<std::pair<std::string, std::string>>& entries() const { return entries_; }
    const std::string& source() const { return source_; }
    std::string to_text() const;

private:
    std::vector<std::pair<std::string, std::string>> entries_;
    std::string source_ = "<text>";
};

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);
double parse_double(std::string_view text);
std::int64_t parse_int(std::string_view text);

std::string read_file(const std::filesystem::path& path);
/// Writes to a sibling temporary file and renames it over `path`.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view text);

} // namespace netabc
