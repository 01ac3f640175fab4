#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <istream>
#include <ostream>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace shapeclust {

class Error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class MalformedFilename : public Error { public: using Error::Error; };
class EmptyImage : public Error { public: using Error::Error; };
class EmptyDirectory : public Error { public: using Error::Error; };
class DecodeError : public Error { public: using Error::Error; };
class IoError : public Error { public: using Error::Error; };
class DimensionMismatch : public Error { public: using Error::Error; };
class DomainError : public Error { public: using Error::Error; };
class EmptyData : public Error { public: using Error::Error; };
class DivergenceError : public Error { public: using Error::Error; };
class ConfigError : public Error { public: using Error::Error; };
class ZeroVector : public Error { public: using Error::Error; };
class DegenerateData : public Error { public: using Error::Error; };
class IncompatibleMetric : public Error { public: using Error::Error; };
class SizeMismatch : public Error { public: using Error::Error; };
class AllPairsSkipped : public Error { public: using Error::Error; };
class LabelMismatch : public Error { public: using Error::Error; };

/// Pipeline failure carrying the name of the stage that raised it.
class StageError : public Error {
public:
    StageError(const std::string& stage, const std::string& cause)
        : Error(stage + ": " + cause), stage_(stage) {}
    const std::string& stage() const noexcept { return stage_; }

private:
    std::string stage_;
};

/// Dense row-major matrix of doubles; rows are samples.
struct Matrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> values;

    Matrix() = default;
    Matrix(std::size_t r, std::size_t c, double fill = 0.0)
        : rows(r), cols(c), values(r * c, fill) {}

    std::span<double> row(std::size_t i) { return {values.data() + i * cols, cols}; }
    std::span<const double> row(std::size_t i) const { return {values.data() + i * cols, cols}; }
    double& at(std::size_t i, std::size_t j) { return values[i * cols + j]; }
    double at(std::size_t i, std::size_t j) const { return values[i * cols + j]; }
};

// std::uniform_real_distribution is implementation-defined; draw doubles with a
// fixed 53-bit construction so seeded streams are identical everywhere.
inline double uniform01(std::mt19937_64& rng) {
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

inline double uniform_range(std::mt19937_64& rng, double lo, double hi) {
    return lo + (hi - lo) * uniform01(rng);
}

/// Quantile with linear interpolation between closest ranks; input must be sorted.
inline double quantile_sorted(std::span<const double> sorted, double q) {
    if (sorted.empty()) throw EmptyData("quantile of empty data");
    if (sorted.size() == 1) return sorted[0];
    q = std::clamp(q, 0.0, 1.0);
    const double h = q * static_cast<double>(sorted.size() - 1);
    const auto lo = static_cast<std::size_t>(h);
    if (lo + 1 >= sorted.size()) return sorted.back();
    return sorted[lo] + (h - static_cast<double>(lo)) * (sorted[lo + 1] - sorted[lo]);
}

inline double percentile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    return quantile_sorted(values, p / 100.0);
}

inline std::string format_double(const char* fmt, double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), fmt, v);
    return buf;
}

/// Quote a CSV field only when it contains a delimiter, quote or newline.
inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        out += c;
        if (c == '"') out += '"';
    }
    out += '"';
    return out;
}

/// Split one CSV line produced by csv_field quoting.
inline std::vector<std::string> csv_split(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cur += '"';
                    ++i;
                } else {
                    quoted = false;
                }
            } else {
                cur += c;
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(cur);
            cur.clear();
        } else if (c != '\r') {
            cur += c;
        }
    }
    fields.push_back(cur);
    return fields;
}

namespace detail {

inline void write_f64le(std::ostream& os, std::span<const double> v) {
    std::vector<unsigned char> buf(v.size() * 8);
    for (std::size_t i = 0; i < v.size(); ++i) {
        const auto bits = std::bit_cast<std::uint64_t>(v[i]);
        for (int k = 0; k < 8; ++k)
            buf[i * 8 + k] = static_cast<unsigned char>(bits >> (8 * k));
    }
    os.write(reinterpret_cast<const char*>(buf.data()),
             static_cast<std::streamsize>(buf.size()));
}

inline void read_f64le(std::istream& is, std::span<double> v) {
    std::vector<unsigned char> buf(v.size() * 8);
    is.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
    if (static_cast<std::size_t>(is.gcount()) != buf.size())
        throw IoError("short read of float64 payload");
    for (std::size_t i = 0; i < v.size(); ++i) {
        std::uint64_t bits = 0;
        for (int k = 0; k < 8; ++k)
            bits |= static_cast<std::uint64_t>(buf[i * 8 + k]) << (8 * k);
        v[i] = std::bit_cast<double>(bits);
    }
}

} // namespace detail

} // namespace shapeclust
