#pragma once

namespace erc {
inline constexpr const char* kVersion = "0.1.0";
}
