#include "fastdebias/io.hpp"

#include <array>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace fastdebias {
namespace {

bool ends_with_csv(const std::string& path) {
    return path.size() >= 4 && path.compare(path.size() - 4, 4, ".csv") == 0;
}

void write_u64(std::ostream& out, std::uint64_t v) {
    std::array<unsigned char, 8> buf;
    for (int i = 0; i < 8; ++i) buf[static_cast<std::size_t>(i)] = (v >> (8 * i)) & 0xFF;
    out.write(reinterpret_cast<const char*>(buf.data()), 8);
}

std::uint64_t read_u64(std::istream& in) {
    std::array<unsigned char, 8> buf;
    in.read(reinterpret_cast<char*>(buf.data()), 8);
    std::uint64_t v = 0;
    for (int i = 0; i < 8; ++i) v |= static_cast<std::uint64_t>(buf[static_cast<std::size_t>(i)]) << (8 * i);
    return v;
}

std::ofstream open_out(const std::string& path, bool binary) {
    std::ofstream out(path, binary ? std::ios::binary : std::ios::out);
    if (!out) throw std::runtime_error("cannot open for writing: " + path);
    return out;
}

std::ifstream open_in(const std::string& path, bool binary) {
    std::ifstream in(path, binary ? std::ios::binary : std::ios::in);
    if (!in) throw std::runtime_error("cannot open for reading: " + path);
    return in;
}

void check_header(std::istream& in, const char* magic, const std::string& path) {
    char got[4];
    in.read(got, 4);
    if (!in || std::memcmp(got, magic, 4) != 0) {
        throw std::runtime_error("bad magic in " + path);
    }
    char version;
    in.read(&version, 1);
    if (!in || static_cast<unsigned char>(version) != kFormatVersion) {
        throw std::runtime_error("unsupported format version in " + path);
    }
}

Eigen::MatrixXd read_csv_matrix(std::istream& in, const std::string& path) {
    std::vector<std::vector<double>> rows;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line[0] == '#') continue;
        std::vector<double> row;
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) {
            try {
                row.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw std::runtime_error("bad number '" + cell + "' in " + path);
            }
        }
        if (!row.empty()) rows.push_back(std::move(row));
    }
    if (rows.empty()) throw std::runtime_error("empty CSV: " + path);
    const std::size_t cols = rows.front().size();
    Eigen::MatrixXd m(static_cast<Eigen::Index>(rows.size()),
                      static_cast<Eigen::Index>(cols));
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != cols) {
            throw std::runtime_error("ragged CSV rows in " + path);
        }
        for (std::size_t j = 0; j < cols; ++j) {
            m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
        }
    }
    return m;
}

}  // namespace

std::string format_double(double v) {
    char buf[32];
    for (int precision = 1; precision <= 17; ++precision) {
        std::snprintf(buf, sizeof(buf), "%.*g", precision, v);
        if (std::strtod(buf, nullptr) == v) break;
    }
    return buf;
}

void write_matrix(const std::string& path, const Eigen::MatrixXd& m) {
    if (ends_with_csv(path)) {
        auto out = open_out(path, false);
        for (Eigen::Index i = 0; i < m.rows(); ++i) {
            for (Eigen::Index j = 0; j < m.cols(); ++j) {
                if (j) out << ',';
                out << format_double(m(i, j));
            }
            out << '\n';
        }
        return;
    }
    auto out = open_out(path, true);
    out.write("FDBM", 4);
    const char version = static_cast<char>(kFormatVersion);
    out.write(&version, 1);
    write_u64(out, static_cast<std::uint64_t>(m.rows()));
    write_u64(out, static_cast<std::uint64_t>(m.cols()));
    out.write(reinterpret_cast<const char*>(m.data()),
              static_cast<std::streamsize>(sizeof(double)) * m.size());
    if (!out) throw std::runtime_error("write failed: " + path);
}

Eigen::MatrixXd read_matrix(const std::string& path) {
    if (ends_with_csv(path)) {
        auto in = open_in(path, false);
        return read_csv_matrix(in, path);
    }
    auto in = open_in(path, true);
    check_header(in, "FDBM", path);
    const auto rows = static_cast<Eigen::Index>(read_u64(in));
    const auto cols = static_cast<Eigen::Index>(read_u64(in));
    if (!in || rows < 0 || cols < 0) throw std::runtime_error("bad header in " + path);
    Eigen::MatrixXd m(rows, cols);
    in.read(reinterpret_cast<char*>(m.data()),
            static_cast<std::streamsize>(sizeof(double)) * m.size());
    if (!in) throw std::runtime_error("truncated matrix in " + path);
    return m;
}

void write_vector(const std::string& path, const Eigen::VectorXd& v) {
    if (ends_with_csv(path)) {
        auto out = open_out(path, false);
        for (Eigen::Index i = 0; i < v.size(); ++i) out << format_double(v(i)) << '\n';
        return;
    }
    auto out = open_out(path, true);
    out.write("FDBV", 4);
    const char version = static_cast<char>(kFormatVersion);
    out.write(&version, 1);
    write_u64(out, static_cast<std::uint64_t>(v.size()));
    out.write(reinterpret_cast<const char*>(v.data()),
              static_cast<std::streamsize>(sizeof(double)) * v.size());
    if (!out) throw std::runtime_error("write failed: " + path);
}

Eigen::VectorXd read_vector(const std::string& path) {
    if (ends_with_csv(path)) {
        auto in = open_in(path, false);
        const Eigen::MatrixXd m = read_csv_matrix(in, path);
        if (m.cols() != 1) throw std::runtime_error("expected one column in " + path);
        return m.col(0);
    }
    auto in = open_in(path, true);
    check_header(in, "FDBV", path);
    const auto len = static_cast<Eigen::Index>(read_u64(in));
    if (!in || len < 0) throw std::runtime_error("bad header in " + path);
    Eigen::VectorXd v(len);
    in.read(reinterpret_cast<char*>(v.data()),
            static_cast<std::streamsize>(sizeof(double)) * v.size());
    if (!in) throw std::runtime_error("truncated vector in " + path);
    return v;
}

}  // namespace fastdebias
