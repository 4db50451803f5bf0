#include "mcgraph/config.hpp"

#include <charconv>
#include <cstdint>
#include <fstream>
#include <iomanip>
#include <sstream>

namespace mcgraph {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool is_identifier(const std::string& s) {
    if (s.empty() || !(s[0] >= 'a' && s[0] <= 'z')) return false;
    for (char c : s)
        if (!((c >= 'a' && c <= 'z') || (c >= '0' && c <= '9') || c == '_')) return false;
    return true;
}

std::optional<double> parse_number(const std::string& s) {
    double v = 0.0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    if (first != last && *first == '+') ++first;
    const auto [ptr, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
    return v;
}

std::string where(const std::string& key, int line) {
    std::ostringstream os;
    os << "'" << key << "' (line " << line << ")";
    return os.str();
}

// Splits a raw value into list items, honouring double quotes.
ConfigValue parse_value(const std::string& raw, const std::string& key, int line) {
    ConfigValue v;
    v.line = line;
    std::size_t i = 0;
    const std::string s = trim(raw);
    if (s.empty()) throw ConfigError("missing value for key " + where(key, line), key, line);
    while (i <= s.size()) {
        while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
        std::string item;
        bool quoted = false;
        if (i < s.size() && s[i] == '"') {
            quoted = true;
            ++i;
            bool closed = false;
            while (i < s.size()) {
                if (s[i] == '\\' && i + 1 < s.size()) {
                    item += s[i + 1];
                    i += 2;
                } else if (s[i] == '"') {
                    closed = true;
                    ++i;
                    break;
                } else {
                    item += s[i++];
                }
            }
            if (!closed) throw ConfigError("unterminated string in key " + where(key, line), key, line);
            while (i < s.size() && (s[i] == ' ' || s[i] == '\t')) ++i;
            if (i < s.size() && s[i] != ',')
                throw ConfigError("unexpected text after string in key " + where(key, line), key, line);
        } else {
            const auto comma = s.find(',', i);
            item = trim(s.substr(i, comma == std::string::npos ? std::string::npos : comma - i));
            if (item.empty()) throw ConfigError("empty list element in key " + where(key, line), key, line);
            if (!parse_number(item))
                throw ConfigError("value '" + item + "' of key " + where(key, line) +
                                      " is neither a number nor a quoted string",
                                  key, line);
            i = comma == std::string::npos ? s.size() : comma;
        }
        v.items.push_back(item);
        v.quoted.push_back(quoted);
        if (i >= s.size()) break;
        ++i;  // skip the comma
        if (i >= s.size()) throw ConfigError("trailing comma in key " + where(key, line), key, line);
    }
    return v;
}

// Strips a trailing comment that is not inside a string.
std::string strip_comment(const std::string& line) {
    bool in_string = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
        if (!in_string && line[i] == '#') return line.substr(0, i);
    }
    return line;
}

} // namespace

Config Config::parse(const std::string& text, const std::string& origin) {
    Config cfg;
    std::istringstream in(text);
    std::string raw;
    std::string section;
    int line = 0;
    while (std::getline(in, raw)) {
        ++line;
        const std::string s = trim(strip_comment(raw));
        if (s.empty()) continue;
        if (s.front() == '[') {
            if (s.back() != ']') throw ConfigError(origin + ": malformed section header on line " + std::to_string(line), s, line);
            section = trim(s.substr(1, s.size() - 2));
            if (!is_identifier(section))
                throw ConfigError(origin + ": invalid section name '" + section + "' on line " + std::to_string(line),
                                  section, line);
            if (cfg.section_lines_.count(section))
                throw ConfigError(origin + ": duplicate section '" + section + "' on line " + std::to_string(line),
                                  section, line);
            cfg.section_lines_[section] = line;
            cfg.data_[section];
            continue;
        }
        const auto eq = s.find('=');
        if (eq == std::string::npos)
            throw ConfigError(origin + ": expected 'key = value' on line " + std::to_string(line), s, line);
        const std::string key = trim(s.substr(0, eq));
        if (!is_identifier(key))
            throw ConfigError(origin + ": invalid key '" + key + "' on line " + std::to_string(line) +
                                  " (keys are lowercase snake_case)",
                              key, line);
        if (section.empty())
            throw ConfigError(origin + ": key " + where(key, line) + " appears before any [section]", key, line);
        auto& sec = cfg.data_[section];
        if (sec.count(key))
            throw ConfigError(origin + ": duplicate key " + where(section + "." + key, line), key, line);
        sec[key] = parse_value(s.substr(eq + 1), section + "." + key, line);
    }
    return cfg;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read configuration file " + path, path, 0);
    std::ostringstream os;
    os << in.rdbuf();
    return parse(os.str(), path);
}

bool Config::has_section(const std::string& section) const { return data_.count(section) > 0; }

bool Config::has(const std::string& section, const std::string& key) const {
    const auto it = data_.find(section);
    return it != data_.end() && it->second.count(key) > 0;
}

std::vector<std::string> Config::sections() const {
    std::vector<std::string> out;
    for (const auto& [name, _] : data_) out.push_back(name);
    return out;
}

std::vector<std::string> Config::keys(const std::string& section) const {
    std::vector<std::string> out;
    const auto it = data_.find(section);
    if (it != data_.end())
        for (const auto& [k, _] : it->second) out.push_back(k);
    return out;
}

int Config::section_line(const std::string& section) const {
    const auto it = section_lines_.find(section);
    return it == section_lines_.end() ? 0 : it->second;
}

int Config::line(const std::string& section, const std::string& key) const {
    return has(section, key) ? value(section, key).line : section_line(section);
}

const ConfigValue& Config::value(const std::string& section, const std::string& key) const {
    const auto s = data_.find(section);
    if (s == data_.end())
        throw ConfigError("missing section [" + section + "] (needed for key '" + section + "." + key + "')", section,
                          0);
    const auto k = s->second.find(key);
    if (k == s->second.end())
        throw ConfigError("missing key '" + section + "." + key + "' in section [" + section + "] (line " +
                              std::to_string(section_line(section)) + ")",
                          section + "." + key, section_line(section));
    return k->second;
}

double Config::number(const std::string& section, const std::string& key) const {
    const ConfigValue& v = value(section, key);
    const std::string name = section + "." + key;
    if (v.items.size() != 1 || v.quoted[0])
        throw ConfigError("key " + where(name, v.line) + " must be a single number", name, v.line);
    return *parse_number(v.items[0]);
}

double Config::number(const std::string& section, const std::string& key, double fallback) const {
    return has(section, key) ? number(section, key) : fallback;
}

int Config::integer(const std::string& section, const std::string& key, int fallback) const {
    if (!has(section, key)) return fallback;
    const double v = number(section, key);
    const int line = value(section, key).line;
    if (v != std::floor(v) || std::abs(v) > 1e9)
        throw ConfigError("key " + where(section + "." + key, line) + " must be an integer", section + "." + key, line);
    return static_cast<int>(v);
}

std::string Config::string(const std::string& section, const std::string& key) const {
    const ConfigValue& v = value(section, key);
    const std::string name = section + "." + key;
    if (v.items.size() != 1 || !v.quoted[0])
        throw ConfigError("key " + where(name, v.line) + " must be a quoted string", name, v.line);
    return v.items[0];
}

std::string Config::string(const std::string& section, const std::string& key, const std::string& fallback) const {
    return has(section, key) ? string(section, key) : fallback;
}

std::vector<double> Config::numbers(const std::string& section, const std::string& key) const {
    const ConfigValue& v = value(section, key);
    const std::string name = section + "." + key;
    std::vector<double> out;
    for (std::size_t i = 0; i < v.items.size(); ++i) {
        if (v.quoted[i]) throw ConfigError("key " + where(name, v.line) + " must be a list of numbers", name, v.line);
        out.push_back(*parse_number(v.items[i]));
    }
    return out;
}

std::vector<std::string> Config::strings(const std::string& section, const std::string& key) const {
    const ConfigValue& v = value(section, key);
    const std::string name = section + "." + key;
    for (std::size_t i = 0; i < v.items.size(); ++i)
        if (!v.quoted[i]) throw ConfigError("key " + where(name, v.line) + " must be a list of strings", name, v.line);
    return v.items;
}

void Config::set(const std::string& section, const std::string& key, const std::string& raw_value) {
    if (!is_identifier(section) || !is_identifier(key))
        throw ConfigError("invalid override '" + section + "." + key + "'", section + "." + key, 0);
    data_[section][key] = parse_value(raw_value, section + "." + key, 0);
    section_lines_.try_emplace(section, 0);
}

void Config::require_known(const std::string& section, const std::vector<std::string>& allowed) const {
    const auto it = data_.find(section);
    if (it == data_.end()) return;
    for (const auto& [k, v] : it->second)
        if (std::find(allowed.begin(), allowed.end(), k) == allowed.end())
            throw ConfigError("unknown key " + where(section + "." + k, v.line), section + "." + k, v.line);
}

void Config::require_section(const std::string& section) const {
    if (!has_section(section)) throw ConfigError("missing section [" + section + "]", section, 0);
}

std::string Config::canonical(const std::vector<std::string>& skip) const {
    std::ostringstream os;
    for (const auto& [sec, entries] : data_) {
        if (std::find(skip.begin(), skip.end(), sec) != skip.end()) continue;
        os << '[' << sec << "]\n";
        for (const auto& [k, v] : entries) {
            os << k << '=';
            for (std::size_t i = 0; i < v.items.size(); ++i) {
                if (i) os << ',';
                if (v.quoted[i]) os << std::quoted(v.items[i]);
                else os << std::setprecision(17) << *parse_number(v.items[i]);
            }
            os << '\n';
        }
    }
    return os.str();
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    std::ostringstream os;
    os << std::hex << std::setw(16) << std::setfill('0') << h;
    return os.str();
}

} // namespace mcgraph
