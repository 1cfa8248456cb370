#pragma once

namespace decotopo {

inline constexpr const char* kVersion = "0.1.0";

}  // namespace decotopo
