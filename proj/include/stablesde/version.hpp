#pragma once

namespace stablesde {

inline constexpr const char* kLibraryVersion = "0.1.0";

}  // namespace stablesde
