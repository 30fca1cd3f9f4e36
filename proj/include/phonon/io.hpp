#pragma once

// Plain-text and binary output. Numbers are written with 17 significant
// digits so that a rerun with identical input reproduces files byte for byte.

#include <Eigen/Dense>

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "phonon/errors.hpp"

namespace phonon {

inline std::string format_number(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v == 0.0 ? 0.0 : v);  // no "-0"
    return buf;
}

class CsvWriter {
public:
    CsvWriter(const std::string& path, const std::vector<std::string>& header) : path_(path), out_(path)
    {
        if (!out_) {
            throw ConfigError("cannot open '" + path + "' for writing");
        }
        write_strings(header);
    }

    void row(const std::vector<double>& values)
    {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << format_number(values[i]);
        }
        out_ << '\n';
    }

    void write_strings(const std::vector<std::string>& values)
    {
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (i) out_ << ',';
            out_ << values[i];
        }
        out_ << '\n';
    }

    void close()
    {
        out_.close();
        if (!out_) {
            throw NumericalError("failed writing '" + path_ + "'");
        }
    }

private:
    std::string path_;
    std::ofstream out_;
};

namespace detail {

inline void put_le(std::ofstream& out, double v)
{
    auto bits = std::bit_cast<std::uint64_t>(v);
    unsigned char bytes[8];
    for (int b = 0; b < 8; ++b) {
        bytes[b] = static_cast<unsigned char>(bits >> (8 * b));
    }
    out.write(reinterpret_cast<const char*>(bytes), 8);
}

inline double get_le(const unsigned char* bytes)
{
    std::uint64_t bits = 0;
    for (int b = 0; b < 8; ++b) {
        bits |= static_cast<std::uint64_t>(bytes[b]) << (8 * b);
    }
    return std::bit_cast<double>(bits);
}

}  // namespace detail

/// Appends C to a snapshot file: N*N entries in row-major order, each written
/// as real then imaginary part, IEEE-754 binary64, little-endian. Snapshots
/// follow one another with no header; their times are the rows of the
/// trajectory table.
class SnapshotWriter {
public:
    explicit SnapshotWriter(const std::string& path) : path_(path), out_(path, std::ios::binary)
    {
        if (!out_) {
            throw ConfigError("cannot open '" + path + "' for writing");
        }
    }

    void write(const Eigen::MatrixXcd& c)
    {
        for (Eigen::Index i = 0; i < c.rows(); ++i) {
            for (Eigen::Index j = 0; j < c.cols(); ++j) {
                detail::put_le(out_, c(i, j).real());
                detail::put_le(out_, c(i, j).imag());
            }
        }
    }

    void close()
    {
        out_.close();
        if (!out_) {
            throw NumericalError("failed writing '" + path_ + "'");
        }
    }

private:
    std::string path_;
    std::ofstream out_;
};

inline std::vector<Eigen::MatrixXcd> read_snapshots(const std::string& path, Eigen::Index sites)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw ConfigError("cannot open '" + path + "'");
    }
    const std::vector<unsigned char> data((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    const std::size_t per = static_cast<std::size_t>(sites * sites) * 16;
    detail::require(per > 0 && data.size() % per == 0, "snapshot file size does not match the site count");
    std::vector<Eigen::MatrixXcd> out;
    for (std::size_t off = 0; off < data.size(); off += per) {
        Eigen::MatrixXcd c(sites, sites);
        const unsigned char* p = data.data() + off;
        for (Eigen::Index i = 0; i < sites; ++i) {
            for (Eigen::Index j = 0; j < sites; ++j, p += 16) {
                c(i, j) = {detail::get_le(p), detail::get_le(p + 8)};
            }
        }
        out.push_back(std::move(c));
    }
    return out;
}

}  // namespace phonon
