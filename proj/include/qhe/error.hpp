// error.hpp: exception type shared by every module

#pragma once

#include <stdexcept>
#include <string>

namespace qhe {

enum class ErrorKind {
    InvalidConfig,
    NotAnEngine,
    RangeError,
    DegenerateWidth,
    DisconnectedNetwork,
    NonUniqueSteadyState,
    UnphysicalSteadyState,
    Timeout,
    InternalConsistency,
    ShapeMismatch,
    Io,
};

const char* to_string(ErrorKind kind) noexcept;

class Error : public std::runtime_error {
public:
    Error(ErrorKind kind, const std::string& what)
        : std::runtime_error(what), kind_(kind) {}

    ErrorKind kind() const noexcept { return kind_; }

private:
    ErrorKind kind_;
};

} // namespace qhe
