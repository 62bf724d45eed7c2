#pragma once

#include <string>

namespace fsl {

/// Lowercase hex SHA-256 of the bytes of `text`.
std::string sha256_hex(const std::string& text);

}  // namespace fsl
