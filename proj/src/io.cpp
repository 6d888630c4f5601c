#include "boxbp/io.hpp"

#include "json.hpp"

#include <cctype>
#include <charconv>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <vector>

namespace boxbp::io {

namespace {

std::string trim(std::string_view s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return std::string(s.substr(a, b - a));
}

double parse_number(std::string_view cell, const std::string& source, int line, int column) {
    const std::string t = trim(cell);
    if (t.empty()) throw ParseError(source, line, column, "empty field");
    double v = 0.0;
    const char* first = t.data();
    if (*first == '+') ++first;
    auto [ptr, ec] = std::from_chars(first, t.data() + t.size(), v);
    if (ec != std::errc{} || ptr != t.data() + t.size()) {
        throw ParseError(source, line, column, "not a number: '" + t + "'");
    }
    return v;
}

}  // namespace

ParseError::ParseError(const std::string& source, int line, int column, const std::string& what)
    : std::runtime_error(source + ":" + std::to_string(line) + ":" + std::to_string(column) + ": " +
                         what),
      line_(line),
      column_(column) {}

std::string format_double(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

Matrix parse_matrix_csv(const std::string& text, const std::string& source) {
    std::vector<std::vector<double>> rows;
    int line_no = 0;
    std::size_t width = 0;
    std::istringstream in(text);
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (trim(line).empty()) continue;
        std::vector<double> row;
        std::size_t start = 0;
        while (true) {
            const std::size_t comma = line.find(',', start);
            const std::size_t end = comma == std::string::npos ? line.size() : comma;
            row.push_back(parse_number(std::string_view(line).substr(start, end - start), source,
                                       line_no, static_cast<int>(start) + 1));
            if (comma == std::string::npos) break;
            start = comma + 1;
        }
        if (rows.empty()) {
            width = row.size();
        } else if (row.size() != width) {
            throw ParseError(source, line_no, 1,
                             "expected " + std::to_string(width) + " fields, found " +
                                 std::to_string(row.size()));
        }
        rows.push_back(std::move(row));
    }
    if (rows.empty()) throw ParseError(source, line_no + 1, 1, "no data");
    Matrix A(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(width));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        for (std::size_t j = 0; j < width; ++j) {
            A(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return A;
}

Matrix parse_matrix_json(const std::string& text, const std::string& source) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        // nlohmann reports a byte offset; convert it to line/column.
        int line = 1, col = 1;
        for (std::size_t i = 0; i + 1 < e.byte && i < text.size(); ++i) {
            if (text[i] == '\n') {
                ++line;
                col = 1;
            } else {
                ++col;
            }
        }
        throw ParseError(source, line, col, "invalid JSON");
    }
    if (!j.is_object() || !j.contains("rows") || !j.contains("cols") || !j.contains("data")) {
        throw ParseError(source, 1, 1, "expected object with rows, cols and data");
    }
    if (!j["rows"].is_number_integer() || !j["cols"].is_number_integer() || !j["data"].is_array()) {
        throw ParseError(source, 1, 1, "rows/cols must be integers and data an array");
    }
    const long rows = j["rows"].get<long>();
    const long cols = j["cols"].get<long>();
    const auto& data = j["data"];
    if (rows < 1 || cols < 1 || data.size() != static_cast<std::size_t>(rows * cols)) {
        throw ParseError(source, 1, 1,
                         "data has " + std::to_string(data.size()) + " entries, expected rows*cols");
    }
    Matrix A(rows, cols);
    for (long i = 0; i < rows; ++i) {
        for (long c = 0; c < cols; ++c) {
            const auto& v = data[static_cast<std::size_t>(i * cols + c)];
            if (!v.is_number()) {
                throw ParseError(source, 1, 1,
                                 "data entry " + std::to_string(i * cols + c) + " is not a number");
            }
            A(i, c) = v.get<double>();
        }
    }
    return A;
}

Matrix parse_matrix(const std::string& text, const std::string& source) {
    const std::string t = trim(text);
    if (!t.empty() && t.front() == '{') return parse_matrix_json(text, source);
    return parse_matrix_csv(text, source);
}

std::string format_matrix_csv(const Matrix& A) {
    std::string out;
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (j) out += ',';
            out += format_double(A(i, j));
        }
        out += '\n';
    }
    return out;
}

std::string format_matrix_json(const Matrix& A) {
    // Built by hand to keep the 17-digit representation.
    std::string out = "{\"rows\":" + std::to_string(A.rows()) +
                      ",\"cols\":" + std::to_string(A.cols()) + ",\"data\":[";
    for (Eigen::Index i = 0; i < A.rows(); ++i) {
        for (Eigen::Index j = 0; j < A.cols(); ++j) {
            if (i || j) out += ',';
            out += format_double(A(i, j));
        }
    }
    out += "]}\n";
    return out;
}

Vector parse_vector(const std::string& text, const std::string& source) {
    const Matrix M = parse_matrix(text, source);
    if (M.cols() == 1) return M.col(0);
    if (M.rows() == 1) return M.row(0).transpose();
    throw ParseError(source, 1, 1,
                     "expected a single row or column, got " + std::to_string(M.rows()) + "x" +
                         std::to_string(M.cols()));
}

std::string format_vector_csv(const Vector& v) {
    std::string out;
    for (Eigen::Index i = 0; i < v.size(); ++i) {
        out += format_double(v[i]);
        out += '\n';
    }
    return out;
}

std::string read_text(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FileError("cannot open '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw FileError("cannot write '" + path + "'");
    out << text;
}

Matrix read_matrix(const std::string& path) { return parse_matrix(read_text(path), path); }
Vector read_vector(const std::string& path) { return parse_vector(read_text(path), path); }

}  // namespace boxbp::io
