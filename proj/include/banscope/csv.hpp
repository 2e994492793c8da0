#pragma once

#include <charconv>
#include <type_traits>
#include <cstdint>
#include <fstream>
#include <stdexcept>
#include <string>

namespace banscope {

// Shortest round-trip decimal form; stable bytes for identical doubles,
// which the reproducibility contract of the CSV outputs depends on.
inline std::string format_double(double v) {
    char buf[64];
    auto [ptr, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) throw std::runtime_error("double formatting failed");
    return std::string(buf, ptr);
}

inline std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

class CsvWriter {
public:
    explicit CsvWriter(const std::string& path) : out_(path, std::ios::binary) {
        if (!out_) throw std::runtime_error("cannot open " + path + " for writing");
    }

    template <typename... Fields>
    void row(const Fields&... fields) {
        bool first = true;
        (write_field(fields, first), ...);
        out_ << '\n';
    }

private:
    void put(const std::string& s) { out_ << csv_escape(s); }
    void put(const char* s) { out_ << csv_escape(s); }
    void put(double v) { out_ << format_double(v); }
    template <typename T>
        requires std::is_integral_v<T>
    void put(T v) {
        out_ << v;
    }

    template <typename T>
    void write_field(const T& value, bool& first) {
        if (!first) out_ << ',';
        first = false;
        put(value);
    }

    std::ofstream out_;
};

}  // namespace banscope
