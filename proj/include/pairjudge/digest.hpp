#pragma once

#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <string_view>

namespace pairjudge {

/// Hex-encoded SHA-256 of raw bytes.
std::string sha256_hex(std::string_view bytes);

/// Digest of an ordered tuple of fields. Each field is length-framed before
/// hashing, so two different field sequences can never produce the same
/// byte stream; reordering fields changes the digest.
std::string digest_fields(std::span<const std::string_view> fields);
std::string digest_fields(std::initializer_list<std::string_view> fields);

/// First 8 bytes of sha256(bytes) as a little-endian u64. Used to derive
/// deterministic RNG streams from string labels.
std::uint64_t digest_to_seed(std::string_view bytes);

}  // namespace pairjudge
