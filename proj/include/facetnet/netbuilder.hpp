#pragma once

#include "facetnet/catalog.hpp"

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace facetnet {

/// Four-variable network recipe. Nodes are values of `source` and `target`;
/// values of `link` establish (bipartite) or are shared along (unipartite)
/// edges; `thematic` annotates the records behind each link value.
struct TopologySpec {
    std::string source;
    std::string target;
    std::string link;
    std::optional<std::string> thematic;

    bool operator==(const TopologySpec&) const = default;
};

enum class NetworkKind { bipartite, unipartite };

struct ValidatedTopology {
    TopologySpec spec;
    NetworkKind kind = NetworkKind::bipartite;
};

struct TopologyCheck {
    std::optional<ValidatedTopology> topology;
    std::vector<std::string> errors;

    bool ok() const noexcept { return topology.has_value(); }
};

/// Collects every violation rather than stopping at the first.
TopologyCheck validate_topology(const TopologySpec& spec, const FacetSchema& schema);
/// Throws Error(invalid_topology) listing all violations.
ValidatedTopology require_valid_topology(const TopologySpec& spec, const FacetSchema& schema);

enum class NodeSide { source, target, both };

/// One link value and the filtered records behind it. `themes` is the
/// multiset of thematic values drawn from those records, sorted; `unthemed`
/// counts records lacking the thematic facet (0 when there is no thematic).
struct EdgeItem {
    std::string link_value;
    std::vector<std::string> records;
    std::vector<std::string> themes;
    std::size_t unthemed = 0;

    bool operator==(const EdgeItem&) const = default;
};

/// `items` are the node's own link values: every link value co-occurring with
/// the node value in some filtered record. size == items.size().
struct Node {
    std::string id;
    NodeSide side = NodeSide::source;
    std::size_t size = 0;
    std::vector<EdgeItem> items;

    bool operator==(const Node&) const = default;
};

/// Bipartite edges run source value -> target value; unipartite edges have u < v.
struct Edge {
    std::string u;
    std::string v;
    std::vector<EdgeItem> items;

    bool operator==(const Edge&) const = default;
};

struct Truncation {
    bool truncated = false;
    std::size_t total_nodes = 0;
    std::size_t total_edges = 0;

    bool operator==(const Truncation&) const = default;
};

struct Network {
    NetworkKind kind = NetworkKind::bipartite;
    std::vector<Node> nodes; // sorted by id
    std::vector<Edge> edges; // sorted by (u, v)
    FilterSpec filter;
    TopologySpec topology;
    Truncation truncation;

    const Node* find_node(std::string_view id) const;
    /// Unipartite lookups accept either endpoint order.
    const Edge* find_edge(std::string_view u, std::string_view v) const;
    /// Every edge touching `id`, in edge order.
    std::vector<const Edge*> incident_edges(std::string_view id) const;

    bool operator==(const Network&) const = default;
};

struct BuildLimits {
    std::size_t max_nodes = 2000;
    std::size_t max_edges = 10000;
    bool hide_isolated = false;
};

/// Builds the co-occurrence network over the records matching `filter`.
///
/// source != target (bipartite): each record emits an edge s -> t for every
/// source value s and target value t (s != t) when it has link values; each
/// of its link values becomes an item on that edge with the record as a
/// contributor.
///
/// source == target (unipartite): node x possesses link value l when some
/// filtered record holds both. Nodes u < v are joined when they possess a
/// common link value; the item's contributors are the records establishing
/// either possession.
///
/// Nodes without edges are kept unless limits.hide_isolated is set. When a
/// ceiling is exceeded the largest nodes (then the edges with most items) are
/// kept and `truncation` records the totals.
Network build_network(const FacetIndex& index, const FilterSpec& filter, const TopologySpec& topology,
                      const BuildLimits& limits = {});

struct NodeSummary {
    std::size_t neighbor_count = 0;
    std::size_t distinct_item_count = 0;
    std::vector<std::string> link_values;
};

/// Throws Error(not_found).
NodeSummary node_summary(const Network& network, std::string_view node_id);

/// One unit per (item, contributing record, thematic value); records without
/// the thematic facet count under "(missing)", which sorts last. Throws
/// Error(invalid_argument) when the network has no thematic variable.
std::vector<FacetCount> thematic_breakdown(const Network& network, const Edge& edge);
std::vector<FacetCount> thematic_breakdown(const Network& network, std::span<const EdgeItem> items);

std::string_view to_string(NetworkKind kind) noexcept;
std::string_view to_string(NodeSide side) noexcept;

} // namespace facetnet
