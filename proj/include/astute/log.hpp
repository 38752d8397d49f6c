#pragma once

#include <functional>
#include <iostream>
#include <string_view>

namespace astute {

using WarningSink = std::function<void(std::string_view)>;

/// Process-wide sink for non-fatal warnings (truncated files, degenerate
/// datasets). Defaults to stderr; tests swap it to capture messages.
inline WarningSink& warning_sink() {
  static WarningSink sink = [](std::string_view msg) { std::cerr << "warning: " << msg << '\n'; };
  return sink;
}

inline void warn(std::string_view msg) {
  if (auto& sink = warning_sink()) sink(msg);
}

}  // namespace astute
