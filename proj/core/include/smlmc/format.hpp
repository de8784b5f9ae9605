#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

namespace smlmc {

/// Fixed-point decimal text. Negative zero is written without the sign.
std::string format_fixed(double value, int decimals);

/// Coordinates on disk: nanometres with four decimals.
inline constexpr int kCoordDecimals = 4;
std::string format_coord(double value);
void append_coord(std::string& out, double value);
void append_int(std::string& out, std::int64_t value);

/// The value a coordinate takes after a write/read cycle.
double quantize_coord(double value);

bool parse_int(std::string_view text, std::int64_t& out);
bool parse_double(std::string_view text, double& out);

/// Comma-separated fields, no quoting (none of our formats needs it).
std::vector<std::string_view> split_fields(std::string_view line);

class Sha256 {
public:
    Sha256();
    ~Sha256();
    Sha256(const Sha256&) = delete;
    Sha256& operator=(const Sha256&) = delete;

    void update(std::string_view bytes);
    std::string hex_digest();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

std::string sha256_file(const std::filesystem::path& path);

/// Reads a text file in blocks, hashing every byte and handing out lines
/// (without the terminator) with 1-based line numbers. A final line without
/// a newline is still delivered.
class HashingLineReader {
public:
    explicit HashingLineReader(const std::filesystem::path& path);

    bool next(std::string_view& line);
    std::size_t line_number() const noexcept { return line_no_; }
    /// Consumes the rest of the file and returns the digest of all bytes.
    std::string finish();

private:
    bool fill();

    std::filesystem::path path_;
    std::ifstream in_;
    Sha256 hash_;
    std::string buffer_;
    std::size_t pos_ = 0;
    std::string pending_;
    std::size_t line_no_ = 0;
    bool eof_ = false;
};

}  // namespace smlmc
