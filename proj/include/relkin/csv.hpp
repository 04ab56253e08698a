#pragma once

#include <fstream>
#include <string>
#include <vector>

namespace relkin {

/// 17 significant digits, shortest-roundtrip not attempted (fixed %.17g).
std::string fmt_double(double v);
std::string fnv1a_hex(const std::string& text);

/// Writes `path.tmp` and renames it onto `path` on commit(); the first line is
/// "# config_hash=<hash>", the second the header row.
class CsvWriter {
public:
    CsvWriter(std::string path, const std::string& hash, const std::vector<std::string>& header);
    ~CsvWriter();
    CsvWriter(const CsvWriter&) = delete;
    CsvWriter& operator=(const CsvWriter&) = delete;

    void row(const std::vector<std::string>& fields);
    void commit();

private:
    std::string path_, tmp_;
    std::ofstream os_;
    bool committed_ = false;
};

struct CsvTable {
    std::string hash;
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

/// Reads a file written by CsvWriter (comment lines start with '#'; fields
/// containing commas or quotes are double-quoted).
CsvTable read_csv(const std::string& path);

}  // namespace relkin
