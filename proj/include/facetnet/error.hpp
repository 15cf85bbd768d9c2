#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace facetnet {

enum class Errc {
    invalid_argument,
    unknown_facet,
    not_found,
    parse_error,
    io_error,
    corrupt_snapshot,
    version_mismatch,
    http_error,
    invalid_topology,
    invalid_selection,
    unsupported_format,
};

/// Machine-readable name, e.g. "unknown_facet".
std::string_view to_string(Errc code) noexcept;

/// The single exception type thrown by the library. The code is stable and
/// surfaces verbatim in API error bodies; the message is for humans.
class Error : public std::runtime_error {
public:
    Error(Errc code, const std::string& message) : std::runtime_error(message), code_(code) {}

    Errc code() const noexcept { return code_; }

private:
    Errc code_;
};

} // namespace facetnet
