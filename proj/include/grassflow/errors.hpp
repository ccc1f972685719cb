#pragma once

#include <stdexcept>
#include <string>

namespace grassflow {

/// Machine-readable error categories; the CLI maps these to JSON error codes.
enum class errc {
    invalid_index,
    dimension_mismatch,
    degenerate_plane,
    singular_constraint,
    constraint_drift,
    ambiguous_projection,
    rank_collapse,
    degenerate_surface,
    invalid_argument,
    config,
    io,
};

const char* errc_name(errc c);

class Error : public std::runtime_error {
public:
    Error(errc code, const std::string& message)
        : std::runtime_error(message), code_(code) {}
    errc code() const { return code_; }

private:
    errc code_;
};

[[noreturn]] inline void fail(errc code, const std::string& message) {
    throw Error(code, message);
}

}  // namespace grassflow
