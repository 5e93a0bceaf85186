#pragma once

#include <stegocap/models.hpp>
#include <stegocap/pipeline.hpp>

#include <string>
#include <vector>

namespace stegocap {

inline constexpr int kStegoFileVersion = 1;

/// Everything a receiver needs besides the model: backend, conditioning,
/// parameters and the emitted tokens. Stored as UTF-8 JSON.
struct StegoFile {
    int version = kStegoFileVersion;
    std::string backend;
    Conditioning conditioning;
    StegoParams params;
    std::vector<TokenId> tokens;
    std::vector<std::string> token_strings;  // informational only
};

std::string to_json(const StegoFile& file);

/// Unknown fields are ignored. Throws Error{InvalidStegoFile} on malformed
/// content or a version other than 1.
StegoFile stego_file_from_json(const std::string& text);

void write_stego_file(const std::string& path, const StegoFile& file);
StegoFile read_stego_file(const std::string& path);

}  // namespace stegocap
