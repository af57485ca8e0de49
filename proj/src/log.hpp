#pragma once

#include <spdlog/logger.h>

namespace ara::detail {

/// Shared stderr logger named "ara".
spdlog::logger& logger();

} // namespace ara::detail
