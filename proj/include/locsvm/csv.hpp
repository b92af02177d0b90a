#pragma once

#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "locsvm/types.hpp"

namespace locsvm {

namespace detail {
inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') {
            out.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    out.push_back(cur);
    for (auto& f : out) {
        const auto b = f.find_first_not_of(" \t");
        const auto e = f.find_last_not_of(" \t");
        f = b == std::string::npos ? std::string{} : f.substr(b, e - b + 1);
    }
    return out;
}
}  // namespace detail

/// Reads "x0,...,x{d-1},y" with a header row. Missing or malformed values are errors.
inline Dataset read_csv(std::istream& in, const std::string& name = "<csv>") {
    std::string line;
    if (!std::getline(in, line)) throw InputError(name + ": empty file");
    const auto header = detail::split_csv_line(line);
    if (header.size() < 2) throw InputError(name + ": need at least one feature column and y");
    for (std::size_t j = 0; j + 1 < header.size(); ++j) {
        if (header[j] != "x" + std::to_string(j)) {
            throw InputError(name + ": header column " + std::to_string(j + 1) + " must be 'x" + std::to_string(j) + "'");
        }
    }
    if (header.back() != "y") throw InputError(name + ": last header column must be 'y'");
    const std::size_t d = header.size() - 1;

    std::vector<double> values;
    std::size_t rows = 0;
    for (std::size_t lineno = 2; std::getline(in, line); ++lineno) {
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        const auto fields = detail::split_csv_line(line);
        if (fields.size() != d + 1) {
            throw InputError(name + ":" + std::to_string(lineno) + ": expected " + std::to_string(d + 1) + " fields, got " +
                             std::to_string(fields.size()));
        }
        for (std::size_t j = 0; j < fields.size(); ++j) {
            const auto& f = fields[j];
            double v = 0.0;
            const auto [ptr, ec] = std::from_chars(f.data(), f.data() + f.size(), v);
            if (f.empty() || ec != std::errc{} || ptr != f.data() + f.size() || !std::isfinite(v)) {
                throw InputError(name + ":" + std::to_string(lineno) + ": missing or invalid value in column " +
                                 std::to_string(j + 1));
            }
            values.push_back(v);
        }
        ++rows;
    }
    if (rows == 0) throw InputError(name + ": no data rows");
    Dataset data{Points(static_cast<Eigen::Index>(rows), static_cast<Eigen::Index>(d)), Vector(static_cast<Eigen::Index>(rows))};
    for (std::size_t i = 0; i < rows; ++i) {
        for (std::size_t j = 0; j < d; ++j) {
            data.x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = values[i * (d + 1) + j];
        }
        data.y[static_cast<Eigen::Index>(i)] = values[i * (d + 1) + d];
    }
    return data;
}

inline Dataset read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError("file not found: " + path.string());
    return read_csv(in, path.string());
}

inline void write_csv(std::ostream& out, const Dataset& data) {
    for (Eigen::Index j = 0; j < data.dim(); ++j) out << 'x' << j << ',';
    out << "y\n";
    char buf[32];
    for (Eigen::Index i = 0; i < data.size(); ++i) {
        for (Eigen::Index j = 0; j <= data.dim(); ++j) {
            const double v = j < data.dim() ? data.x(i, j) : data.y[i];
            const auto r = std::to_chars(buf, buf + sizeof buf, v);
            out.write(buf, r.ptr - buf);
            out << (j < data.dim() ? ',' : '\n');
        }
    }
}

}  // namespace locsvm
