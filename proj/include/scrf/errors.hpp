#pragma once

#include <stdexcept>
#include <string>

namespace scrf {

/// File could not be opened or read.
struct io_error : std::runtime_error {
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

/// File exists but its contents are not a supported format.
struct format_error : std::runtime_error {
    explicit format_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace scrf
