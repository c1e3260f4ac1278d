#include "repograph/errors.hpp"

namespace repograph {

const char* to_string(Errc code) {
    switch (code) {
        case Errc::node_not_found: return "NodeNotFound";
        case Errc::invalid_argument: return "InvalidArgument";
        case Errc::io_error: return "IoError";
        case Errc::stale_manifest: return "StaleManifest";
        case Errc::missing_communities: return "MissingCommunities";
        case Errc::sidecar_not_found: return "SidecarNotFound";
        case Errc::stale_sidecar: return "StaleSidecar";
        case Errc::infeasible_spec: return "InfeasibleSpec";
        case Errc::parse_error: return "ParseError";
    }
    return "UnknownError";
}

Error::Error(Errc code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

void raise(Errc code, const std::string& message) {
    throw Error(code, message);
}

} // namespace repograph
