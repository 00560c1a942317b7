#pragma once

#include <cstdio>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "duality/errors.hpp"

// Deterministic report serialization. Objects keep their keys sorted and
// doubles print through one fixed %.17g format, so a report is byte-identical
// across runs with the same inputs. No timestamps, no locale dependence.

namespace duality {

inline std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

// ============================================================
// JSON tree
// ============================================================

class Json {
  public:
    Json() : kind_(Kind::null_kind) {}
    Json(bool b) : kind_(Kind::boolean), flag_(b) {}
    Json(int v) : kind_(Kind::integer), int_(v) {}
    Json(long long v) : kind_(Kind::integer), int_(v) {}
    Json(double v) : kind_(Kind::number), num_(v) {}
    Json(const char* s) : kind_(Kind::text), str_(s) {}
    Json(const std::string& s) : kind_(Kind::text), str_(s) {}

    static Json object() {
        Json j;
        j.kind_ = Kind::object;
        return j;
    }
    static Json array() {
        Json j;
        j.kind_ = Kind::array;
        return j;
    }

    Json& operator[](const std::string& key) {
        if (kind_ == Kind::null_kind) kind_ = Kind::object;
        if (kind_ != Kind::object)
            throw InternalError("json: key access on a non-object");
        return obj_[key];
    }

    void push_back(Json v) {
        if (kind_ == Kind::null_kind) kind_ = Kind::array;
        if (kind_ != Kind::array)
            throw InternalError("json: push_back on a non-array");
        arr_.push_back(std::move(v));
    }

    bool empty() const {
        if (kind_ == Kind::object) return obj_.empty();
        if (kind_ == Kind::array) return arr_.empty();
        return kind_ == Kind::null_kind;
    }

    std::string dump(int indent = 2) const {
        std::string out;
        write(out, indent, 0);
        out += "\n";
        return out;
    }

  private:
    enum class Kind { null_kind, boolean, integer, number, text, array, object };

    static void escape(std::string& out, const std::string& s) {
        out += '"';
        for (char ch : s) {
            switch (ch) {
                case '"': out += "\\\""; break;
                case '\\': out += "\\\\"; break;
                case '\n': out += "\\n"; break;
                case '\t': out += "\\t"; break;
                case '\r': out += "\\r"; break;
                default:
                    if (static_cast<unsigned char>(ch) < 0x20) {
                        char buf[8];
                        std::snprintf(buf, sizeof(buf), "\\u%04x", ch);
                        out += buf;
                    } else {
                        out += ch;
                    }
            }
        }
        out += '"';
    }

    void write(std::string& out, int indent, int depth) const {
        const std::string pad(static_cast<size_t>(indent * (depth + 1)), ' ');
        const std::string pad0(static_cast<size_t>(indent * depth), ' ');
        switch (kind_) {
            case Kind::null_kind: out += "null"; break;
            case Kind::boolean: out += flag_ ? "true" : "false"; break;
            case Kind::integer: out += std::to_string(int_); break;
            case Kind::number: out += format_double(num_); break;
            case Kind::text: escape(out, str_); break;
            case Kind::array: {
                if (arr_.empty()) {
                    out += "[]";
                    break;
                }
                out += "[\n";
                for (size_t i = 0; i < arr_.size(); ++i) {
                    out += pad;
                    arr_[i].write(out, indent, depth + 1);
                    if (i + 1 < arr_.size()) out += ",";
                    out += "\n";
                }
                out += pad0 + "]";
                break;
            }
            case Kind::object: {
                if (obj_.empty()) {
                    out += "{}";
                    break;
                }
                out += "{\n";
                size_t i = 0;
                for (const auto& kv : obj_) {
                    out += pad;
                    escape(out, kv.first);
                    out += ": ";
                    kv.second.write(out, indent, depth + 1);
                    if (++i < obj_.size()) out += ",";
                    out += "\n";
                }
                out += pad0 + "}";
                break;
            }
        }
    }

    Kind kind_;
    bool flag_ = false;
    long long int_ = 0;
    double num_ = 0.0;
    std::string str_;
    std::vector<Json> arr_;
    std::map<std::string, Json> obj_;
};

// ============================================================
// CSV table
// ============================================================

// versioned table with a schema comment line followed by the column names
class CsvWriter {
  public:
    explicit CsvWriter(std::vector<std::string> columns, int version = 1)
        : columns_(std::move(columns)), version_(version) {}

    void add_row(const std::vector<double>& vals) {
        if (vals.size() != columns_.size())
            throw InternalError("csv row width does not match the schema");
        rows_.push_back(vals);
    }

    std::string str() const {
        std::string out = "# duality-csv v" + std::to_string(version_) + "\n";
        for (size_t c = 0; c < columns_.size(); ++c) {
            if (c) out += ",";
            out += columns_[c];
        }
        out += "\n";
        for (const auto& row : rows_) {
            for (size_t c = 0; c < row.size(); ++c) {
                if (c) out += ",";
                out += format_double(row[c]);
            }
            out += "\n";
        }
        return out;
    }

  private:
    std::vector<std::string> columns_;
    int version_;
    std::vector<std::vector<double>> rows_;
};

inline void write_text_file(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write to '" + path + "'");
    out << text;
    if (!out) throw ConfigError("write failed for '" + path + "'");
}

}  // namespace duality
