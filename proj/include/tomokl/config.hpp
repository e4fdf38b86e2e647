#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

namespace tomokl {

/// Flat key=value settings. Lines after a "[section]" header get the key
/// "section.key"; '#' and ';' start comments. Later assignments win.
class Config {
public:
    static Config parse(std::istream& in, std::string_view source = "<config>");
    static Config load(const std::filesystem::path& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    /// Parses "key=value" (as given to --set).
    void set_assignment(std::string_view assignment);
    /// Copies every entry of `other` over this one.
    void merge(const Config& other);

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    std::size_t get_size(const std::string& key, std::size_t fallback) const;
    std::uint64_t get_u64(const std::string& key, std::uint64_t fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    /// Comma-separated list; empty items are dropped.
    std::vector<std::string> get_list(const std::string& key, const std::vector<std::string>& fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::size_t> get_sizes(const std::string& key, const std::vector<std::size_t>& fallback) const;

    const std::map<std::string, std::string>& entries() const noexcept { return values_; }

    /// Sorted "key=value" lines; the basis of hash().
    std::string canonical() const;
    /// 16 hex digits of the 64-bit FNV-1a hash of canonical().
    std::string hash() const;

private:
    std::map<std::string, std::string> values_;
};

std::uint64_t fnv1a64(std::string_view bytes) noexcept;

double parse_double(std::string_view text, std::string_view what);
std::size_t parse_size(std::string_view text, std::string_view what);
std::vector<std::string> split_list(std::string_view text);

}  // namespace tomokl
