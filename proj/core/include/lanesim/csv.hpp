#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace lanesim {
namespace csv {

// Deterministic number formatting shared by every emitted artifact.
std::string num(double v);
std::string num(long v);

// Numeric CSV with a header row; '#' lines are skipped. Errors carry
// "<path>:<row>:" prefixes.
struct Table {
    std::vector<std::string> header;
    std::vector<std::vector<double>> rows;

    int column(const std::string& name) const;  // -1 when absent
};
Table read_table(const std::string& path);

// '#'-comment lines of a file, markers stripped.
std::vector<std::string> read_comments(const std::string& path);

// Writer that prefixes the file with '#'-commented metadata (the config
// and seed that produced it).
class Writer {
public:
    explicit Writer(const std::string& path);

    void comment_block(const std::string& text);  // one '#' per line
    void header(const std::string& line);
    void row(const std::string& line);
    bool good() const { return static_cast<bool>(out_); }

private:
    std::ofstream out_;
    std::string path_;
};

}  // namespace csv
}  // namespace lanesim
