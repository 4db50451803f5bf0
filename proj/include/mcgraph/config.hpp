#pragma once

#include "mcgraph/common.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace mcgraph {

/// Configuration error naming the offending key (or section) and line.
class ConfigError : public Error {
public:
    ConfigError(const std::string& what, std::string key, int line)
        : Error(what), key_(std::move(key)), line_(line) {}
    const std::string& key() const { return key_; }
    int line() const { return line_; }

private:
    std::string key_;
    int line_;
};

/// One `key = value` entry. A value is a number, a quoted string or a comma
/// separated list of those.
struct ConfigValue {
    std::vector<std::string> items;  ///< list elements, strings unquoted
    std::vector<bool> quoted;
    int line = 0;
};

/// Line-oriented text configuration:
///
///     # comment
///     [section]
///     key = 1.5
///     name = "disk"
///     list = 0.25, 0.5, 1
///
/// Keys are lowercase snake_case and unique within a section.
class Config {
public:
    static Config parse(const std::string& text, const std::string& origin = "config");
    static Config load(const std::string& path);

    bool has_section(const std::string& section) const;
    bool has(const std::string& section, const std::string& key) const;
    std::vector<std::string> sections() const;
    std::vector<std::string> keys(const std::string& section) const;
    int section_line(const std::string& section) const;
    /// Line of the key, or of its section when the key is absent (0 if neither).
    int line(const std::string& section, const std::string& key) const;

    double number(const std::string& section, const std::string& key) const;
    double number(const std::string& section, const std::string& key, double fallback) const;
    int integer(const std::string& section, const std::string& key, int fallback) const;
    std::string string(const std::string& section, const std::string& key) const;
    std::string string(const std::string& section, const std::string& key, const std::string& fallback) const;
    std::vector<double> numbers(const std::string& section, const std::string& key) const;
    std::vector<std::string> strings(const std::string& section, const std::string& key) const;

    /// Overrides (or adds) an entry, e.g. from `--set section.key=value`.
    void set(const std::string& section, const std::string& key, const std::string& raw_value);

    /// Throws ConfigError for any key of `section` not in `allowed`.
    void require_known(const std::string& section, const std::vector<std::string>& allowed) const;
    /// Throws ConfigError naming the section when it is missing.
    void require_section(const std::string& section) const;

    /// Canonical text of the configuration (sorted sections and keys), used
    /// for hashing. Sections listed in `skip` are left out.
    std::string canonical(const std::vector<std::string>& skip = {}) const;

private:
    const ConfigValue& value(const std::string& section, const std::string& key) const;
    std::map<std::string, std::map<std::string, ConfigValue>> data_;
    std::map<std::string, int> section_lines_;
};

/// 64-bit FNV-1a hash as 16 lowercase hex digits.
std::string fnv1a_hex(const std::string& text);

} // namespace mcgraph
