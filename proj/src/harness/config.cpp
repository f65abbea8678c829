#include "prodiab/harness/config.hpp"

#include <cctype>
#include <cerrno>
#include <cstdlib>
#include <fstream>
#include <sstream>

namespace prodiab::harness {

namespace {

std::string trim(std::string_view s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string_view::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return std::string(s.substr(b, e - b + 1));
}

bool valid_key(const std::string& k) {
    if (k.empty()) return false;
    for (char c : k)
        if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '.' || c == '_' || c == '-')) return false;
    return true;
}

double to_double(const std::string& s, const std::string& key, int line) {
    errno = 0;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (s.empty() || end != s.c_str() + s.size() || errno == ERANGE)
        throw ConfigError("value of '" + key + "' is not a number: '" + s + "'", line);
    return v;
}

}  // namespace

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

Config Config::parse(std::string_view text) {
    Config c;
    int line_no = 0;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto nl = text.find('\n', pos);
        const std::string_view raw = text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos);
        pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
        ++line_no;
        std::string line(raw);
        if (const auto h = line.find('#'); h != std::string::npos) line.erase(h);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError("expected 'key = value'", line_no);
        const std::string key = trim(std::string_view(line).substr(0, eq));
        const std::string value = trim(std::string_view(line).substr(eq + 1));
        if (!valid_key(key)) throw ConfigError("malformed key '" + key + "'", line_no);
        if (c.has(key))
            throw ConfigError("duplicate key '" + key + "' (first set on line " + std::to_string(c.line_of(key)) + ")",
                              line_no);
        c.set(key, value, line_no);
    }
    return c;
}

Config Config::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    return parse(ss.str());
}

void Config::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos) throw ConfigError("override must look like key=value: '" + assignment + "'");
    const std::string key = trim(std::string_view(assignment).substr(0, eq));
    if (!valid_key(key)) throw ConfigError("malformed override key '" + key + "'");
    set(key, trim(std::string_view(assignment).substr(eq + 1)), 0);
}

void Config::set(const std::string& key, const std::string& value, int line) { entries_[key] = {value, line}; }

std::string Config::get_string(const std::string& key, const std::string& fallback) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? fallback : it->second.value;
}

double Config::get_double(const std::string& key, double fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return to_double(it->second.value, key, it->second.line);
}

int Config::get_int(const std::string& key, int fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    const double v = to_double(it->second.value, key, it->second.line);
    if (v != double(int(v))) throw ConfigError("value of '" + key + "' must be an integer", it->second.line);
    return int(v);
}

std::vector<double> Config::get_doubles(const std::string& key, const std::vector<double>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    std::vector<double> out;
    for (const auto& s : split_list(it->second.value)) out.push_back(to_double(s, key, it->second.line));
    return out;
}

std::vector<std::string> Config::get_strings(const std::string& key, const std::vector<std::string>& fallback) const {
    const auto it = entries_.find(key);
    if (it == entries_.end()) return fallback;
    return split_list(it->second.value);
}

int Config::line_of(const std::string& key) const {
    const auto it = entries_.find(key);
    return it == entries_.end() ? 0 : it->second.line;
}

}  // namespace prodiab::harness
