#pragma once

namespace ringres {

inline constexpr const char* kVersion = "0.1.0";

}
