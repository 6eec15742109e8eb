#include "biaslab/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>

#include "biaslab/error.hpp"

namespace biaslab {

Dataset::Dataset(std::vector<std::string> names, std::vector<std::vector<double>> columns)
    : names_(std::move(names)), columns_(std::move(columns)) {
    if (names_.size() != columns_.size())
        throw Error(ErrorKind::InvalidArgument, "column names and columns differ in count");
    std::set<std::string> seen;
    for (std::size_t j = 0; j < names_.size(); ++j) {
        if (names_[j].empty() || names_[j].find(',') != std::string::npos)
            throw Error(ErrorKind::InvalidArgument, "invalid column name '" + names_[j] + "'");
        if (!seen.insert(names_[j]).second)
            throw Error(ErrorKind::InvalidArgument, "duplicate column '" + names_[j] + "'");
        if (columns_[j].size() != columns_.front().size())
            throw Error(ErrorKind::InvalidArgument, "column '" + names_[j] + "' has a different length");
        for (double v : columns_[j])
            if (!std::isfinite(v)) throw Error(ErrorKind::InvalidArgument, "non-finite value in '" + names_[j] + "'");
    }
}

bool Dataset::has_column(std::string_view name) const noexcept {
    return std::find(names_.begin(), names_.end(), name) != names_.end();
}

std::size_t Dataset::column_index(std::string_view name) const {
    const auto it = std::find(names_.begin(), names_.end(), name);
    if (it == names_.end()) throw Error(ErrorKind::UnknownColumn, "no column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - names_.begin());
}

Dataset Dataset::take(std::span<const std::size_t> rows) const {
    Dataset out;
    out.names_ = names_;
    out.columns_.resize(columns_.size());
    for (std::size_t j = 0; j < columns_.size(); ++j) {
        auto& col = out.columns_[j];
        col.reserve(rows.size());
        for (std::size_t r : rows) col.push_back(columns_[j].at(r));
    }
    return out;
}

Dataset Dataset::project(std::span<const std::string> names) const {
    std::vector<std::vector<double>> cols;
    for (const auto& n : names) cols.push_back(columns_[column_index(n)]);
    return Dataset({names.begin(), names.end()}, std::move(cols));
}

void write_csv(const Dataset& data, std::ostream& out) {
    const auto& names = data.names();
    for (std::size_t j = 0; j < names.size(); ++j) out << (j ? "," : "") << names[j];
    out << '\n';
    char buf[32];
    for (std::size_t r = 0; r < data.rows(); ++r) {
        for (std::size_t j = 0; j < data.cols(); ++j) {
            const auto res = std::to_chars(buf, buf + sizeof buf, data.column(j)[r], std::chars_format::general, 17);
            if (j) out << ',';
            out.write(buf, res.ptr - buf);
        }
        out << '\n';
    }
}

void write_csv(const Dataset& data, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::IoError, "cannot write '" + path.string() + "'");
    write_csv(data, out);
}

Dataset read_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorKind::ParseError, "line 1: empty CSV");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    // Skip a UTF-8 byte order mark.
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);

    std::vector<std::string> names;
    std::size_t start = 0;
    while (true) {
        const auto comma = line.find(',', start);
        names.push_back(line.substr(start, comma == std::string::npos ? std::string::npos : comma - start));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    std::vector<std::vector<double>> cols(names.size());
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const char* p = line.data();
        const char* end = p + line.size();
        for (std::size_t j = 0; j < names.size(); ++j) {
            double v = 0.0;
            const auto res = std::from_chars(p, end, v);
            if (res.ec != std::errc{} || !std::isfinite(v))
                throw Error(ErrorKind::ParseError,
                            "line " + std::to_string(line_no) + ": bad number in column '" + names[j] + "'");
            p = res.ptr;
            if (j + 1 < names.size()) {
                if (p == end || *p != ',')
                    throw Error(ErrorKind::ParseError,
                                "line " + std::to_string(line_no) + ": expected " + std::to_string(names.size()) +
                                    " fields");
                ++p;
            }
            cols[j].push_back(v);
        }
        if (p != end)
            throw Error(ErrorKind::ParseError, "line " + std::to_string(line_no) + ": trailing characters");
    }
    return Dataset(std::move(names), std::move(cols));
}

Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorKind::IoError, "cannot open '" + path.string() + "'");
    return read_csv(in);
}

}  // namespace biaslab
