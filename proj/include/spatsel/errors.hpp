#pragma once

#include <stdexcept>
#include <string>

namespace spatsel {

// Error taxonomy mirrored by CLI exit codes: config 2, data 3, numerical 4.
struct config_error : std::runtime_error {
  explicit config_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct data_error : std::runtime_error {
  explicit data_error(const std::string& msg) : std::runtime_error(msg) {}
};

struct numeric_error : std::runtime_error {
  explicit numeric_error(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace spatsel
