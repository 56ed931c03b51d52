#pragma once

namespace echolab {
inline constexpr const char* kEcholabVersion = "0.1.0";
}
