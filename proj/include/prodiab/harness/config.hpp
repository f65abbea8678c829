#pragma once

#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "prodiab/error.hpp"

namespace prodiab::harness {

struct ConfigError : Error {
    int line = 0;  // 0 when not tied to a line (overrides, missing keys)
    ConfigError(const std::string& what, int line_no = 0)
        : Error(line_no > 0 ? "line " + std::to_string(line_no) + ": " + what : what), line(line_no) {}
};

// Flat "dotted.key = value" text. '#' starts a comment, blank lines are ignored.
class Config {
public:
    struct Entry {
        std::string value;
        int line = 0;
    };

    static Config parse(std::string_view text);
    static Config load(const std::string& path);

    // "key=value" from the command line; replaces any existing entry
    void apply_override(const std::string& assignment);
    void set(const std::string& key, const std::string& value, int line = 0);

    bool has(const std::string& key) const { return entries_.count(key) > 0; }
    const std::map<std::string, Entry>& entries() const { return entries_; }

    std::string get_string(const std::string& key, const std::string& fallback) const;
    double get_double(const std::string& key, double fallback) const;
    int get_int(const std::string& key, int fallback) const;
    std::vector<double> get_doubles(const std::string& key, const std::vector<double>& fallback) const;
    std::vector<std::string> get_strings(const std::string& key, const std::vector<std::string>& fallback) const;
    int line_of(const std::string& key) const;

private:
    std::map<std::string, Entry> entries_;
};

std::vector<std::string> split_list(const std::string& s);

}  // namespace prodiab::harness
