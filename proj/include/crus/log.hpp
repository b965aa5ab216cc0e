#pragma once

#include <string_view>

namespace crus::log {

/// Warnings go to stderr unless silenced (tests silence them).
void warn(std::string_view message);
void set_quiet(bool quiet) noexcept;

}  // namespace crus::log
