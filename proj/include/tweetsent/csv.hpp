#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

namespace tweetsent::csv {

// RFC-4180 style CSV: comma separated, double-quote escaping, quoted fields
// may contain commas, quotes ("" = literal quote) and newlines.

struct Row {
    std::vector<std::string> fields;
    std::size_t line;  // 1-based physical line the row starts on
};

class ParseError : public std::runtime_error {
  public:
    ParseError(const std::string& what, std::size_t line)
        : std::runtime_error(what + " (line " + std::to_string(line) + ")"), line_(line) {}
    std::size_t line() const { return line_; }

  private:
    std::size_t line_;
};

inline std::vector<Row> parse(const std::string& content) {
    std::vector<Row> rows;
    std::vector<std::string> fields;
    std::string field;
    bool quoted = false;
    bool field_started = false;
    std::size_t line = 1;
    std::size_t row_line = 1;

    auto end_field = [&] {
        fields.push_back(field);
        field.clear();
        field_started = false;
    };
    auto end_row = [&] {
        end_field();
        rows.push_back({fields, row_line});
        fields.clear();
        row_line = line;
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                if (c == '\n') ++line;
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"':
                if (field.empty() && !field_started) {
                    quoted = true;
                    field_started = true;
                } else {
                    throw ParseError("stray quote inside unquoted field", line);
                }
                break;
            case ',':
                end_field();
                break;
            case '\r':
                break;  // swallowed; \r\n and \n both end rows at '\n'
            case '\n':
                ++line;
                end_row();
                break;
            default:
                field += c;
                field_started = true;
        }
    }
    if (quoted) throw ParseError("unterminated quoted field", row_line);
    if (!field.empty() || field_started || !fields.empty()) end_row();
    return rows;
}

inline std::vector<Row> parse_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse(buf.str());
}

inline bool needs_quoting(const std::string& field) {
    return field.find_first_of(",\"\n\r") != std::string::npos;
}

inline std::string escape(const std::string& field) {
    if (!needs_quoting(field)) return field;
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::string format_row(const std::vector<std::string>& fields) {
    std::string out;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) out += ',';
        out += escape(fields[i]);
    }
    out += '\n';
    return out;
}

}  // namespace tweetsent::csv
