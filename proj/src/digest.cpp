#include "pairjudge/digest.hpp"

#include <openssl/evp.h>

#include <array>
#include <cstring>
#include <stdexcept>
#include <vector>

namespace pairjudge {

namespace {

std::string to_hex(const unsigned char* data, std::size_t len) {
    static const char* digits = "0123456789abcdef";
    std::string out(len * 2, '0');
    for (std::size_t i = 0; i < len; ++i) {
        out[2 * i] = digits[data[i] >> 4];
        out[2 * i + 1] = digits[data[i] & 0x0f];
    }
    return out;
}

std::array<unsigned char, 32> sha256_raw(std::string_view bytes) {
    std::array<unsigned char, 32> out{};
    unsigned int out_len = 0;
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr ||
        EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1 ||
        EVP_DigestUpdate(ctx, bytes.data(), bytes.size()) != 1 ||
        EVP_DigestFinal_ex(ctx, out.data(), &out_len) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256 digest failed");
    }
    EVP_MD_CTX_free(ctx);
    return out;
}

void append_framed(std::string& buffer, std::string_view field) {
    std::uint64_t len = field.size();
    for (int i = 0; i < 8; ++i) {
        buffer.push_back(static_cast<char>((len >> (8 * i)) & 0xff));
    }
    buffer.append(field.data(), field.size());
}

}  // namespace

std::string sha256_hex(std::string_view bytes) {
    auto raw = sha256_raw(bytes);
    return to_hex(raw.data(), raw.size());
}

std::string digest_fields(std::span<const std::string_view> fields) {
    std::string buffer;
    std::size_t total = 8 * fields.size();
    for (const auto& f : fields) total += f.size();
    buffer.reserve(total);
    for (const auto& f : fields) append_framed(buffer, f);
    return sha256_hex(buffer);
}

std::string digest_fields(std::initializer_list<std::string_view> fields) {
    return digest_fields(std::span<const std::string_view>(fields.begin(), fields.size()));
}

std::uint64_t digest_to_seed(std::string_view bytes) {
    auto raw = sha256_raw(bytes);
    std::uint64_t seed = 0;
    for (int i = 7; i >= 0; --i) {
        seed = (seed << 8) | raw[static_cast<std::size_t>(i)];
    }
    return seed;
}

}  // namespace pairjudge
