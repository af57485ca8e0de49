#include "log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace ara::detail {

spdlog::logger& logger() {
    static std::shared_ptr<spdlog::logger> instance = [] {
        auto existing = spdlog::get("ara");
        return existing ? existing : spdlog::stderr_color_mt("ara");
    }();
    return *instance;
}

} // namespace ara::detail
