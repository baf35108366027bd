#include "lanesim/csv.hpp"

#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace lanesim {
namespace csv {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.10g", v);
    return buf;
}

std::string num(long v) { return std::to_string(v); }

int Table::column(const std::string& name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) return static_cast<int>(i);
    }
    return -1;
}

Table read_table(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV: " + path);
    Table table;
    std::string line;
    long line_no = 0;
    bool have_header = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty() || line[0] == '#') continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) fields.push_back(field);
        if (!line.empty() && line.back() == ',') fields.push_back("");
        if (!have_header) {
            table.header = fields;
            have_header = true;
            continue;
        }
        if (fields.size() != table.header.size()) {
            throw std::runtime_error(path + ":" + std::to_string(line_no) + ": expected " +
                                     std::to_string(table.header.size()) + " fields, got " +
                                     std::to_string(fields.size()));
        }
        std::vector<double> row;
        row.reserve(fields.size());
        for (std::size_t i = 0; i < fields.size(); ++i) {
            try {
                std::size_t pos = 0;
                row.push_back(std::stod(fields[i], &pos));
                if (pos != fields[i].size()) throw std::invalid_argument(fields[i]);
            } catch (const std::exception&) {
                throw std::runtime_error(path + ":" + std::to_string(line_no) +
                                         ": field '" + table.header[i] +
                                         "' is not a number: '" + fields[i] + "'");
            }
        }
        table.rows.push_back(std::move(row));
    }
    if (!have_header) throw std::runtime_error(path + ":1: missing header row");
    return table;
}

std::vector<std::string> read_comments(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open CSV: " + path);
    std::vector<std::string> comments;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] != '#') continue;
        std::size_t start = 1;
        if (start < line.size() && line[start] == ' ') ++start;
        comments.push_back(line.substr(start));
    }
    return comments;
}

Writer::Writer(const std::string& path) : out_(path), path_(path) {
    if (!out_) throw std::runtime_error("cannot write CSV: " + path);
}

void Writer::comment_block(const std::string& text) {
    std::stringstream ss(text);
    std::string line;
    while (std::getline(ss, line)) out_ << "# " << line << '\n';
}

void Writer::header(const std::string& line) { out_ << line << '\n'; }

void Writer::row(const std::string& line) { out_ << line << '\n'; }

}  // namespace csv
}  // namespace lanesim
