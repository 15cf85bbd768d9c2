#pragma once

#include "facetnet/ingest.hpp"

#include <chrono>
#include <cstddef>
#include <limits>
#include <optional>
#include <string>

namespace facetnet {

/// Paged reader for a hub listing endpoint such as
/// https://huggingface.co/api/datasets?full=true.
///
/// Each page is requested with `limit` and `offset` query parameters. When a
/// response carries an RFC 8288 `Link: <...>; rel="next"` header that cursor is
/// followed instead of the offset. Paging stops at max_records, at an empty
/// or short page, or when a cursor-paged response has no next link.
struct HubClientOptions {
    std::string endpoint;
    std::size_t page_size = 100;
    std::size_t max_records = std::numeric_limits<std::size_t>::max();
    int max_retries = 3;
    std::chrono::milliseconds retry_backoff{500};
    /// Minimum spacing between consecutive requests.
    std::chrono::milliseconds min_interval{250};
    std::chrono::seconds timeout{30};
    /// Sent as a bearer token. When unset, the variable named by token_env is read.
    std::optional<std::string> auth_token;
    std::string token_env = "FACETNET_HUB_TOKEN";
};

/// Throws Error(invalid_argument) for a bad endpoint or zero page size,
/// Error(http_error) when a page still fails after the retries, and
/// Error(parse_error) when a page body is not a JSON array of cards. Bad
/// individual cards are reported in the batch issues.
CardBatch fetch_catalog(const HubClientOptions& options);

} // namespace facetnet
