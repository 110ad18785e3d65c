#pragma once

#include <array>
#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace htmlphish {

using Sha256 = std::array<std::uint8_t, 32>;

Sha256 sha256(std::string_view bytes);
Sha256 sha256_file(const std::filesystem::path& path);
std::string to_hex(const Sha256& digest);

}  // namespace htmlphish
