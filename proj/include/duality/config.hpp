#pragma once

#include <cctype>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "duality/errors.hpp"

// Flat key = value configuration with optional [section] headers that prefix
// the keys ("section.key"). Lines starting with '#' or ';' are comments.
// Every key records its source line; reads mark keys as used, and finish()
// rejects anything never consumed, so typos surface with a location instead
// of silently falling back to defaults.

namespace duality {

class Config {
  public:
    Config() = default;

    static Config from_string(const std::string& text,
                              const std::string& origin = "<string>") {
        Config c;
        c.origin_ = origin;
        std::istringstream in(text);
        std::string line, section;
        int lineno = 0;
        while (std::getline(in, line)) {
            ++lineno;
            const std::string s = trim(line);
            if (s.empty() || s[0] == '#' || s[0] == ';') continue;
            if (s.front() == '[') {
                if (s.back() != ']')
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": unterminated section header");
                section = trim(s.substr(1, s.size() - 2));
                if (section.empty())
                    throw ConfigError(origin + ":" + std::to_string(lineno) +
                                      ": empty section name");
                continue;
            }
            const size_t eq = s.find('=');
            if (eq == std::string::npos)
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": expected key = value");
            std::string key = trim(s.substr(0, eq));
            const std::string value = trim(s.substr(eq + 1));
            if (key.empty())
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": empty key");
            if (!section.empty()) key = section + "." + key;
            auto it = c.entries_.find(key);
            if (it != c.entries_.end())
                throw ConfigError(origin + ":" + std::to_string(lineno) +
                                  ": duplicate key '" + key + "' (first at line " +
                                  std::to_string(it->second.line) + ")");
            c.entries_[key] = Entry{value, lineno, false};
        }
        return c;
    }

    static Config from_file(const std::string& path) {
        std::ifstream in(path);
        if (!in) throw ConfigError("cannot open config file '" + path + "'");
        std::ostringstream buf;
        buf << in.rdbuf();
        return from_string(buf.str(), path);
    }

    // command-line override "key=value"; replaces any file value
    void apply_override(const std::string& assignment) {
        const size_t eq = assignment.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override '" + assignment +
                              "' is not of the form key=value");
        const std::string key = trim(assignment.substr(0, eq));
        entries_[key] = Entry{trim(assignment.substr(eq + 1)), -1, false};
    }

    bool has(const std::string& key) const {
        return entries_.find(key) != entries_.end();
    }

    std::string get_string(const std::string& key, const std::string& dflt) {
        const Entry* e = touch(key);
        return e ? e->value : dflt;
    }

    double get_double(const std::string& key, double dflt) {
        const Entry* e = touch(key);
        return e ? parse_double(key, *e) : dflt;
    }

    int get_int(const std::string& key, int dflt) {
        const Entry* e = touch(key);
        return e ? parse_int(key, *e) : dflt;
    }

    bool get_bool(const std::string& key, bool dflt) {
        const Entry* e = touch(key);
        return e ? parse_bool(key, *e) : dflt;
    }

    std::string require_string(const std::string& key) {
        const Entry* e = touch(key);
        if (!e) throw ConfigError("missing required key '" + key + "'");
        return e->value;
    }

    double require_double(const std::string& key) {
        const Entry* e = touch(key);
        if (!e) throw ConfigError("missing required key '" + key + "'");
        return parse_double(key, *e);
    }

    // rejects keys that were never read; call after all getters ran
    void finish() const {
        std::vector<std::string> bad;
        for (const auto& kv : entries_)
            if (!kv.second.used) {
                std::string where =
                    kv.second.line >= 0
                        ? origin_ + ":" + std::to_string(kv.second.line)
                        : std::string("override");
                bad.push_back("'" + kv.first + "' (" + where + ")");
            }
        if (!bad.empty()) {
            std::string msg = "unknown configuration key";
            if (bad.size() > 1) msg += "s";
            msg += ": ";
            for (size_t i = 0; i < bad.size(); ++i) {
                if (i) msg += ", ";
                msg += bad[i];
            }
            throw ConfigError(msg);
        }
    }

  private:
    struct Entry {
        std::string value;
        int line = -1;
        mutable bool used = false;
    };

    static std::string trim(const std::string& s) {
        size_t b = 0, e = s.size();
        while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
        while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
        return s.substr(b, e - b);
    }

    const Entry* touch(const std::string& key) const {
        auto it = entries_.find(key);
        if (it == entries_.end()) return nullptr;
        it->second.used = true;
        return &it->second;
    }

    double parse_double(const std::string& key, const Entry& e) const {
        char* end = nullptr;
        const double v = std::strtod(e.value.c_str(), &end);
        if (end == e.value.c_str() || *end != '\0')
            throw ConfigError(locate(key, e) + ": '" + e.value +
                              "' is not a number");
        return v;
    }

    int parse_int(const std::string& key, const Entry& e) const {
        char* end = nullptr;
        const long v = std::strtol(e.value.c_str(), &end, 10);
        if (end == e.value.c_str() || *end != '\0')
            throw ConfigError(locate(key, e) + ": '" + e.value +
                              "' is not an integer");
        return static_cast<int>(v);
    }

    bool parse_bool(const std::string& key, const Entry& e) const {
        const std::string& v = e.value;
        if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
        if (v == "false" || v == "0" || v == "no" || v == "off") return false;
        throw ConfigError(locate(key, e) + ": '" + v + "' is not a boolean");
    }

    std::string locate(const std::string& key, const Entry& e) const {
        if (e.line < 0) return "override '" + key + "'";
        return origin_ + ":" + std::to_string(e.line) + ": key '" + key + "'";
    }

    std::string origin_ = "<none>";
    std::map<std::string, Entry> entries_;
};

}  // namespace duality
