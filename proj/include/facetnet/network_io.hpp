#pragma once

#include "facetnet/netbuilder.hpp"

#include "json.hpp"

#include <optional>
#include <string>
#include <string_view>

namespace facetnet {

enum class ExportFormat { node_link_json, graphml };

/// Accepts "json", "node-link" and "graphml".
std::optional<ExportFormat> parse_export_format(std::string_view name);

/// Node-link document:
///   {"kind", "filter", "topology", "truncation",
///    "nodes": [{"id", "side", "size", "items": [...]}],
///    "edges": [{"source", "target", "items": [{"link_value", "records", "themes", "unthemed"}]}]}
nlohmann::json network_to_json(const Network& network);
Network network_from_json(const nlohmann::json& doc);

/// Deterministic: the same network always exports to the same bytes.
std::string export_network(const Network& network, ExportFormat format);
/// Inverse of export_network. Throws Error(parse_error) on a malformed document.
Network import_network(std::string_view document, ExportFormat format);

} // namespace facetnet
