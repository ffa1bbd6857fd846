#pragma once

#include <stdexcept>
#include <string>

namespace oammag {

// Numeric-domain failures: outside the invertible branch, degenerate
// correlation masks, missing root brackets, ambiguous symmetry peaks.
class domain_error : public std::runtime_error {
public:
    explicit domain_error(const std::string& what) : std::runtime_error(what) {}
};

// File-format failures (malformed headers, truncated payloads).
class io_error : public std::runtime_error {
public:
    explicit io_error(const std::string& what) : std::runtime_error(what) {}
};

} // namespace oammag
