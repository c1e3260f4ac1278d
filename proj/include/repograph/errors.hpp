#pragma once

#include <stdexcept>
#include <string>

namespace repograph {

enum class Errc {
    node_not_found,
    invalid_argument,
    io_error,
    stale_manifest,
    missing_communities,
    sidecar_not_found,
    stale_sidecar,
    infeasible_spec,
    parse_error,
};

const char* to_string(Errc code);

// All recoverable failures surface as Error; the code selects the CLI exit path.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message);
    Errc code() const { return code_; }

private:
    Errc code_;
};

[[noreturn]] void raise(Errc code, const std::string& message);

} // namespace repograph
