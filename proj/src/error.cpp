#include "facetnet/error.hpp"

namespace facetnet {

std::string_view to_string(Errc code) noexcept {
    switch (code) {
    case Errc::invalid_argument: return "invalid_argument";
    case Errc::unknown_facet: return "unknown_facet";
    case Errc::not_found: return "not_found";
    case Errc::parse_error: return "parse_error";
    case Errc::io_error: return "io_error";
    case Errc::corrupt_snapshot: return "corrupt_snapshot";
    case Errc::version_mismatch: return "version_mismatch";
    case Errc::http_error: return "http_error";
    case Errc::invalid_topology: return "invalid_topology";
    case Errc::invalid_selection: return "invalid_selection";
    case Errc::unsupported_format: return "unsupported_format";
    }
    return "unknown";
}

} // namespace facetnet
