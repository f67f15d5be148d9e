#include "netabc/kvfile.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "netabc/error.hpp"

namespace netabc {

namespace {

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

} // namespace

std::string format_double(double value)
{
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

double parse_double(std::string_view text)
{
    text = trim(text);
    double value = 0.0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("not a number: '" + std::string(text) + "'");
    }
    return value;
}

std::int64_t parse_int(std::string_view text)
{
    text = trim(text);
    std::int64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw InvalidArgument("not an integer: '" + std::string(text) + "'");
    }
    return value;
}

KeyValues KeyValues::parse(std::string_view text, std::string_view source)
{
    KeyValues kv;
    kv.source_ = std::string(source);
    std::size_t line_no = 0;
    while (!text.empty()) {
        const auto eol = text.find('\n');
        std::string_view line = text.substr(0, eol);
        text = eol == std::string_view::npos ? std::string_view{} : text.substr(eol + 1);
        ++line_no;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw IoError(kv.source_ + ":" + std::to_string(line_no) + ": expected 'key = value'");
        }
        std::string key(trim(line.substr(0, eq)));
        if (key.empty()) {
            throw IoError(kv.source_ + ":" + std::to_string(line_no) + ": empty key");
        }
        if (kv.contains(key)) {
            throw IoError(kv.source_ + ":" + std::to_string(line_no) + ": duplicate key '" + key + "'");
        }
        kv.entries_.emplace_back(std::move(key), std::string(trim(line.substr(eq + 1))));
    }
    return kv;
}

KeyValues KeyValues::load(const std::filesystem::path& path)
{
    return parse(read_file(path), path.string());
}

void KeyValues::set(std::string key, std::string value)
{
    for (auto& [k, v] : entries_) {
        if (k == key) {
            v = std::move(value);
            return;
        }
    }
    entries_.emplace_back(std::move(key), std::move(value));
}

void KeyValues::set(std::string key, double value) { set(std::move(key), format_double(value)); }

void KeyValues::set(std::string key, std::int64_t value) { set(std::move(key), std::to_string(value)); }

bool KeyValues::contains(std::string_view key) const { return get(key).has_value(); }

std::optional<std::string> KeyValues::get(std::string_view key) const
{
    for (const auto& [k, v] : entries_) {
        if (k == key) {
            return v;
        }
    }
    return std::nullopt;
}

std::string KeyValues::require(std::string_view key) const
{
    auto v = get(key);
    if (!v) {
        throw IoError(source_ + ": missing key '" + std::string(key) + "'");
    }
    return *v;
}

double KeyValues::require_double(std::string_view key) const
{
    try {
        return parse_double(require(key));
    } catch (const InvalidArgument& e) {
        throw IoError(source_ + ": key '" + std::string(key) + "': " + e.what());
    }
}

std::int64_t KeyValues::require_int(std::string_view key) const
{
    try {
        return parse_int(require(key));
    } catch (const InvalidArgument& e) {
        throw IoError(source_ + ": key '" + std::string(key) + "': " + e.what());
    }
}

std::uint64_t KeyValues::require_uint(std::string_view key) const
{
    const std::string text = require(key);
    std::uint64_t value = 0;
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size()) {
        throw IoError(source_ + ": key '" + std::string(key) + "': not an unsigned integer");
    }
    return value;
}

std::string KeyValues::to_text() const
{
    std::string out;
    for (const auto& [k, v] : entries_) {
        out += k;
        out += " = ";
        out += v;
        out += '\n';
    }
    return out;
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw IoError("cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file_atomic(const std::filesystem::path& path, std::string_view contents)
{
    std::filesystem::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) {
            throw IoError("cannot write '" + tmp.string() + "'");
        }
        out.write(contents.data(), static_cast<std::streamsize>(contents.size()));
        out.flush();
        if (!out) {
            throw IoError("write failed for '" + tmp.string() + "'");
        }
    }
    std::error_code ec;
    std::filesystem::rename(tmp, path, ec);
    if (ec) {
        std::filesystem::remove(tmp);
        throw IoError("cannot rename '" + tmp.string() + "' to '" + path.string() + "': " + ec.message());
    }
}

std::uint64_t fnv1a(std::string_view text)
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (const char c : text) {
        h ^= static_cast<unsigned char>(c);
        h *= 0x100000001b3ULL;
    }
    return h;
}

} // namespace netabc
