#pragma once

namespace eprifo {
inline constexpr const char* version = "0.1.0";
}
