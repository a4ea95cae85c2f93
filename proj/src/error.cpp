#include "qhe/error.hpp"

namespace qhe {

const char* to_string(ErrorKind kind) noexcept {
    switch (kind) {
    case ErrorKind::InvalidConfig: return "invalid configuration";
    case ErrorKind::NotAnEngine: return "not an engine configuration";
    case ErrorKind::RangeError: return "range error";
    case ErrorKind::DegenerateWidth: return "degenerate width";
    case ErrorKind::DisconnectedNetwork: return "disconnected network";
    case ErrorKind::NonUniqueSteadyState: return "non-unique steady state";
    case ErrorKind::UnphysicalSteadyState: return "unphysical steady state";
    case ErrorKind::Timeout: return "timeout";
    case ErrorKind::InternalConsistency: return "internal-consistency error";
    case ErrorKind::ShapeMismatch: return "shape mismatch";
    case ErrorKind::Io: return "i/o error";
    }
    return "unknown error";
}

} // namespace qhe
