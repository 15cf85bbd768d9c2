#pragma once

#include "facetnet/catalog.hpp"
#include "facetnet/netbuilder.hpp"

#include "json.hpp"

#include <optional>

namespace facetnet {

// Wire encodings shared by the HTTP API, the CLI and network export. Decoders
// throw Error(invalid_argument) naming the offending field.

/// {"clauses": {"facet": ["v", ...]}, "mode": "or" | "and"}
nlohmann::json to_json(const FilterSpec& filter);
/// A missing "mode" falls back to `default_mode`; a null document is match-all.
FilterSpec filter_from_json(const nlohmann::json& j, MatchMode default_mode = MatchMode::any);

/// {"source", "target", "link", "thematic" (string or null)}
nlohmann::json to_json(const TopologySpec& topology);
TopologySpec topology_from_json(const nlohmann::json& j);

nlohmann::json to_json(const FacetCount& count);
nlohmann::json to_json(const EdgeItem& item);
EdgeItem edge_item_from_json(const nlohmann::json& j);

/// Record as served by the API, with the external URL when a template is given.
nlohmann::json to_json(const DatasetRecord& record, const std::optional<std::string>& url_template = std::nullopt);

std::string_view to_string(MatchMode mode) noexcept;

} // namespace facetnet
