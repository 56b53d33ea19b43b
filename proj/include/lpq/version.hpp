#pragma once

namespace lpq {
inline constexpr const char* version = "0.1.0";
}
