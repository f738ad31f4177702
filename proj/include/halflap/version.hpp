#pragma once

namespace halflap {

inline constexpr const char* version_string = "halflap 0.1.0";

} // namespace halflap
