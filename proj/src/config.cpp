#include "kronlap/config.hpp"

#include "kronlap/errors.hpp"

#include <cstdlib>
#include <string>

namespace kronlap {

Config Config::from_env()
{
    Config cfg;
    if (const char* raw = std::getenv("KRONLAP_DENSE_CAP"); raw != nullptr && *raw != '\0') {
        std::size_t used = 0;
        unsigned long long value = 0;
        try {
            value = std::stoull(raw, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        if (used != std::string(raw).size() || value == 0)
            throw ValidationError("KRONLAP_DENSE_CAP must be a positive integer, got '" + std::string(raw) + "'");
        cfg.dense_cap = static_cast<std::size_t>(value);
    }
    return cfg;
}

} // namespace kronlap
