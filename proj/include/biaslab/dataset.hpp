#pragma once

#include <filesystem>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace biaslab {

/// Named numeric columns of equal length, all values finite.
class Dataset {
public:
    Dataset() = default;
    /// Throws InvalidArgument on ragged/duplicate/non-finite input.
    Dataset(std::vector<std::string> names, std::vector<std::vector<double>> columns);

    std::size_t rows() const noexcept { return columns_.empty() ? 0 : columns_.front().size(); }
    std::size_t cols() const noexcept { return columns_.size(); }
    const std::vector<std::string>& names() const noexcept { return names_; }

    bool has_column(std::string_view name) const noexcept;
    /// Throws UnknownColumn.
    std::size_t column_index(std::string_view name) const;
    std::span<const double> column(std::string_view name) const { return columns_[column_index(name)]; }
    std::span<const double> column(std::size_t index) const { return columns_.at(index); }

    /// Rows whose indices are listed, in the listed order.
    Dataset take(std::span<const std::size_t> rows) const;
    /// Subset of columns, in the listed order.
    Dataset project(std::span<const std::string> names) const;

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    std::vector<std::string> names_;
    std::vector<std::vector<double>> columns_;
};

/// CSV: header of comma-separated names, then one row of decimal numbers per
/// line.  No quoting.  Values are written with 17 significant digits so a
/// round trip is exact.
void write_csv(const Dataset& data, std::ostream& out);
void write_csv(const Dataset& data, const std::filesystem::path& path);
Dataset read_csv(std::istream& in);
Dataset read_csv(const std::filesystem::path& path);

}  // namespace biaslab
