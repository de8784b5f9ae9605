#include "smlmc/format.hpp"

#include <openssl/evp.h>

#include <array>
#include <charconv>
#include <cmath>
#include <system_error>

#include "smlmc/errors.hpp"

namespace smlmc {

std::string format_fixed(double value, int decimals) {
    std::array<char, 64> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value,
                                   std::chars_format::fixed, decimals);
    if (ec != std::errc{}) {
        throw InvalidArgument("cannot format value " + std::to_string(value));
    }
    std::string text(buf.data(), ptr);
    if (text.front() == '-' && text.find_first_not_of("-0.") == std::string::npos) {
        text.erase(0, 1);
    }
    return text;
}

std::string format_coord(double value) { return format_fixed(value, kCoordDecimals); }

void append_coord(std::string& out, double value) { out += format_coord(value); }

void append_int(std::string& out, std::int64_t value) {
    std::array<char, 24> buf{};
    auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    out.append(buf.data(), ptr);
}

double quantize_coord(double value) {
    double out = 0.0;
    parse_double(format_coord(value), out);
    return out;
}

bool parse_int(std::string_view text, std::int64_t& out) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out);
    return ec == std::errc{} && ptr == text.data() + text.size();
}

bool parse_double(std::string_view text, double& out) {
    if (text.empty()) return false;
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), out,
                                     std::chars_format::fixed);
    return ec == std::errc{} && ptr == text.data() + text.size() && std::isfinite(out);
}

std::vector<std::string_view> split_fields(std::string_view line) {
    std::vector<std::string_view> fields;
    std::size_t start = 0;
    for (;;) {
        const std::size_t comma = line.find(',', start);
        if (comma == std::string_view::npos) {
            fields.push_back(line.substr(start));
            return fields;
        }
        fields.push_back(line.substr(start, comma - start));
        start = comma + 1;
    }
}

struct Sha256::Impl {
    EVP_MD_CTX* ctx = nullptr;
};

Sha256::Sha256() : impl_(std::make_unique<Impl>()) {
    impl_->ctx = EVP_MD_CTX_new();
    if (impl_->ctx == nullptr || EVP_DigestInit_ex(impl_->ctx, EVP_sha256(), nullptr) != 1) {
        throw Error("failed to initialise SHA-256");
    }
}

Sha256::~Sha256() {
    if (impl_ && impl_->ctx) EVP_MD_CTX_free(impl_->ctx);
}

void Sha256::update(std::string_view bytes) {
    if (!bytes.empty()) EVP_DigestUpdate(impl_->ctx, bytes.data(), bytes.size());
}

std::string Sha256::hex_digest() {
    std::array<unsigned char, EVP_MAX_MD_SIZE> md{};
    unsigned int len = 0;
    EVP_DigestFinal_ex(impl_->ctx, md.data(), &len);
    static constexpr char kHex[] = "0123456789abcdef";
    std::string hex;
    hex.reserve(len * 2);
    for (unsigned int i = 0; i < len; ++i) {
        hex.push_back(kHex[md[i] >> 4]);
        hex.push_back(kHex[md[i] & 0xF]);
    }
    return hex;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open " + path.string());
    Sha256 hash;
    std::string buf(1 << 20, '\0');
    while (in) {
        in.read(buf.data(), static_cast<std::streamsize>(buf.size()));
        hash.update(std::string_view(buf.data(), static_cast<std::size_t>(in.gcount())));
    }
    return hash.hex_digest();
}

HashingLineReader::HashingLineReader(const std::filesystem::path& path)
    : path_(path), in_(path, std::ios::binary) {
    if (!in_) throw IoError("cannot open " + path.string());
}

bool HashingLineReader::fill() {
    if (eof_) return false;
    buffer_.resize(1 << 20);
    in_.read(buffer_.data(), static_cast<std::streamsize>(buffer_.size()));
    buffer_.resize(static_cast<std::size_t>(in_.gcount()));
    pos_ = 0;
    if (buffer_.empty()) {
        eof_ = true;
        return false;
    }
    hash_.update(buffer_);
    return true;
}

bool HashingLineReader::next(std::string_view& line) {
    pending_.clear();
    bool carrying = false;
    for (;;) {
        if (pos_ >= buffer_.size() && !fill()) {
            if (!carrying) return false;
            ++line_no_;
            line = pending_;
            return true;
        }
        const std::size_t nl = buffer_.find('\n', pos_);
        if (nl == std::string::npos) {
            pending_.append(buffer_, pos_, std::string::npos);
            pos_ = buffer_.size();
            carrying = true;
            continue;
        }
        ++line_no_;
        if (carrying) {
            pending_.append(buffer_, pos_, nl - pos_);
            line = pending_;
        } else {
            line = std::string_view(buffer_).substr(pos_, nl - pos_);
        }
        pos_ = nl + 1;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        return true;
    }
}

std::string HashingLineReader::finish() {
    while (fill()) {
    }
    return hash_.hex_digest();
}

}  // namespace smlmc
