#include "aid/version.hpp"

namespace aid {

std::string_view version() noexcept {
    return AID_VERSION_STRING;
}

}  // namespace aid
