#pragma once

#include <string>
#include <string_view>

namespace mergemend {

// Lowercase hex SHA-256 digest; used to key replay fixtures by prompt.
std::string sha256_hex(std::string_view data);

}  // namespace mergemend
