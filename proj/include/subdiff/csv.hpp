#pragma once

#include <cstdio>
#include <filesystem>
#include <sstream>
#include <string>
#include <type_traits>
#include <vector>

#include "errors.hpp"
#include "graph.hpp"

namespace subdiff {

// Floats use 17 significant digits so every value round-trips.
inline std::string format_cell(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
inline std::string format_cell(const std::string& v) { return v; }
inline std::string format_cell(const char* v) { return v; }
inline std::string format_cell(bool v) { return v ? "true" : "false"; }
template <class I, std::enable_if_t<std::is_integral_v<I> && !std::is_same_v<I, bool>, int> = 0>
std::string format_cell(I v) {
    return std::to_string(v);
}

class CsvTable {
public:
    explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

    template <class... Cells>
    void add(const Cells&... cells) {
        static_assert(sizeof...(Cells) > 0);
        std::vector<std::string> row{format_cell(cells)...};
        if (row.size() != header_.size()) throw Error("CSV row width does not match header");
        rows_.push_back(std::move(row));
    }

    const std::vector<std::string>& header() const { return header_; }
    const std::vector<std::vector<std::string>>& rows() const { return rows_; }
    std::size_t size() const { return rows_.size(); }

    std::string str() const {
        std::ostringstream os;
        write_row(os, header_);
        for (const auto& r : rows_) write_row(os, r);
        return os.str();
    }

    void save(const std::filesystem::path& path) const {
        if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
        detail::atomic_write(path, str());
    }

private:
    static void write_row(std::ostringstream& os, const std::vector<std::string>& r) {
        for (std::size_t i = 0; i < r.size(); ++i) {
            if (i) os << ',';
            os << r[i];
        }
        os << '\n';
    }

    std::vector<std::string> header_;
    std::vector<std::vector<std::string>> rows_;
};

} // namespace subdiff
