#include "relkin/csv.hpp"

#include <cstdint>
#include <cstdio>
#include <filesystem>

#include "relkin/error.hpp"

namespace relkin {

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string fnv1a_hex(const std::string& text) {
    std::uint64_t h = 1469598103934665603ULL;
    for (unsigned char ch : text) {
        h ^= ch;
        h *= 1099511628211ULL;
    }
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

CsvWriter::CsvWriter(std::string path, const std::string& hash, const std::vector<std::string>& header)
    : path_(std::move(path)), tmp_(path_ + ".tmp") {
    const auto parent = std::filesystem::path(path_).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
    os_.open(tmp_, std::ios::out | std::ios::trunc);
    if (!os_) throw Error(Errc::Io, "cannot open " + tmp_);
    os_ << "# config_hash=" << hash << '\n';
    row(header);
}

CsvWriter::~CsvWriter() {
    if (!committed_) {
        os_.close();
        std::error_code ec;
        std::filesystem::remove(tmp_, ec);
    }
}

void CsvWriter::row(const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os_ << ',';
        const std::string& f = fields[i];
        if (f.find_first_of(",\"\n") == std::string::npos) {
            os_ << f;
            continue;
        }
        os_ << '"';
        for (char ch : f) {
            if (ch == '"') os_ << '"';
            os_ << ch;
        }
        os_ << '"';
    }
    os_ << '\n';
}

void CsvWriter::commit() {
    os_.close();
    if (!os_) throw Error(Errc::Io, "write failed for " + tmp_);
    std::filesystem::rename(tmp_, path_);
    committed_ = true;
}

CsvTable read_csv(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw Error(Errc::Io, "cannot open " + path);
    CsvTable t;
    std::string line;
    bool have_header = false;
    while (std::getline(is, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (line[0] == '#') {
            const std::string key = "# config_hash=";
            if (line.rfind(key, 0) == 0) t.hash = line.substr(key.size());
            continue;
        }
        std::vector<std::string> fields(1);
        bool quoted = false;
        for (std::size_t i = 0; i < line.size(); ++i) {
            const char ch = line[i];
            if (quoted) {
                if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                    fields.back() += '"';
                    ++i;
                } else if (ch == '"') {
                    quoted = false;
                } else {
                    fields.back() += ch;
                }
            } else if (ch == '"') {
                quoted = true;
            } else if (ch == ',') {
                fields.emplace_back();
            } else {
                fields.back() += ch;
            }
        }
        if (quoted) throw Error(Errc::InvalidInput, "unterminated quote in " + path);
        if (!have_header) {
            t.header = fields;
            have_header = true;
        } else {
            t.rows.push_back(fields);
        }
    }
    return t;
}

}  // namespace relkin
