#pragma once

#include <string_view>

namespace aid {

std::string_view version() noexcept;

}  // namespace aid
