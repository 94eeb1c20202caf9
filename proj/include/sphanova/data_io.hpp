#pragma once

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "sphanova/angular_model.hpp"
#include "sphanova/multisample.hpp"

namespace sphanova {

enum class DataFormat { Csv, Json };

struct ParseOptions {
    double unit_tolerance = 1e-6;    // rows within this of unit norm are silently renormalized
    double reject_tolerance = 1e-3;  // rows further than this from unit norm are rejected
};

struct DataRow {
    std::string group;
    Vector x;
};

struct ParsedData {
    MultiSample sample;
    std::size_t renormalized = 0;  // rows whose norm deviated by more than unit_tolerance
};

namespace detail {

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream is(line);
    while (std::getline(is, cell, ',')) out.push_back(trim(cell));
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

inline std::vector<DataRow> read_csv_rows(std::istream& in) {
    std::vector<DataRow> rows;
    std::string line;
    bool header_seen = false;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty() || trim(line).front() == '#') continue;
        const auto cells = split_csv_line(line);
        if (!header_seen) {
            header_seen = true;
            if (cells.empty() || cells[0] != "group")
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected header 'group,x1,...,xk'");
            continue;
        }
        if (cells.size() < 2)
            throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": expected a group label and coordinates");
        DataRow r{cells[0], Vector(static_cast<Eigen::Index>(cells.size() - 1))};
        for (std::size_t c = 1; c < cells.size(); ++c) {
            try {
                r.x(static_cast<Eigen::Index>(c - 1)) = parse_double(cells[c], "coordinate");
            } catch (const Error&) {
                throw Error(Errc::ParseError, "line " + std::to_string(line_no) + ": bad number '" + cells[c] + "'");
            }
        }
        rows.push_back(std::move(r));
    }
    return rows;
}

inline std::vector<DataRow> read_json_rows(std::istream& in) {
    try {
        nlohmann::json j = nlohmann::json::parse(in);
        if (j.is_object()) j = j.at("rows");
        std::vector<DataRow> rows;
        for (const auto& e : j) {
            const auto& g = e.at("group");
            const auto xs = e.at("x").get<std::vector<double>>();
            rows.push_back({g.is_string() ? g.get<std::string>() : g.dump(),
                            Eigen::Map<const Vector>(xs.data(), static_cast<Eigen::Index>(xs.size()))});
        }
        return rows;
    } catch (const nlohmann::json::exception& e) {
        throw Error(Errc::ParseError, e.what());
    }
}

} // namespace detail

/// Groups rows by label in order of first appearance, renormalizing every row.
inline ParsedData group_rows(const std::vector<DataRow>& rows, const ParseOptions& opt = {}) {
    if (rows.empty()) throw Error(Errc::TooFewGroups, "no data rows");
    const Eigen::Index k = rows.front().x.size();
    std::vector<std::string> labels;
    std::vector<std::vector<Vector>> cols;
    std::size_t renormalized = 0;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const auto& r = rows[i];
        if (r.x.size() != k)
            throw Error(Errc::MixedDimensions,
                        "row " + std::to_string(i) + " has " + std::to_string(r.x.size()) + " coordinates, expected " +
                            std::to_string(k), i);
        const double norm = r.x.norm();
        if (!(std::abs(norm - 1.0) <= opt.reject_tolerance)) {
            std::ostringstream os;
            os << "row " << i << " has norm " << std::setprecision(10) << norm;
            throw Error(Errc::NonUnitRow, os.str(), i);
        }
        if (std::abs(norm - 1.0) > opt.unit_tolerance) ++renormalized;
        const auto it = std::find(labels.begin(), labels.end(), r.group);
        const auto g = static_cast<std::size_t>(it - labels.begin());
        if (it == labels.end()) {
            labels.push_back(r.group);
            cols.emplace_back();
        }
        cols[g].push_back(r.x / norm);
    }
    if (labels.size() < 2)
        throw Error(Errc::TooFewGroups, "found " + std::to_string(labels.size()) + " distinct group label(s)");
    std::vector<Matrix> groups;
    for (const auto& c : cols) {
        Matrix g(k, static_cast<Eigen::Index>(c.size()));
        for (std::size_t j = 0; j < c.size(); ++j) g.col(static_cast<Eigen::Index>(j)) = c[j];
        groups.push_back(std::move(g));
    }
    return {MultiSample(std::move(groups), std::move(labels)), renormalized};
}

/// Ungrouped rows, as stored in the file.
inline std::vector<DataRow> read_rows(std::istream& in, DataFormat fmt) {
    return fmt == DataFormat::Csv ? detail::read_csv_rows(in) : detail::read_json_rows(in);
}

inline ParsedData read_data(std::istream& in, DataFormat fmt, const ParseOptions& opt = {}) {
    return group_rows(read_rows(in, fmt), opt);
}

inline ParsedData parse_data(const std::string& path, DataFormat fmt, const ParseOptions& opt = {}) {
    std::ifstream in(path);
    if (!in) throw Error(Errc::ParseError, "cannot open '" + path + "'");
    return read_data(in, fmt, opt);
}

/// Guesses the format from the extension; anything but ".json" is CSV.
inline DataFormat format_from_path(const std::string& path) {
    const auto dot = path.rfind('.');
    if (dot != std::string::npos) {
        std::string ext = path.substr(dot + 1);
        for (auto& ch : ext) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
        if (ext == "json") return DataFormat::Json;
    }
    return DataFormat::Csv;
}

inline void write_csv_header(std::ostream& out, Eigen::Index k) {
    out << "group";
    for (Eigen::Index i = 1; i <= k; ++i) out << ",x" << i;
    out << '\n';
}

/// Columns of `x` as CSV rows, 17 significant digits.
inline void write_csv_rows(std::ostream& out, const std::string& group, const Matrix& x) {
    const auto old = out.precision(17);
    for (Eigen::Index j = 0; j < x.cols(); ++j) {
        out << group;
        for (Eigen::Index i = 0; i < x.rows(); ++i) out << ',' << x(i, j);
        out << '\n';
    }
    out.precision(old);
}

inline void write_csv(std::ostream& out, const MultiSample& ms) {
    write_csv_header(out, ms.dim());
    for (std::size_t i = 0; i < ms.groups(); ++i) write_csv_rows(out, ms.label(i), ms.group(i));
}

} // namespace sphanova
