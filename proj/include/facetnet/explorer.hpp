#pragma once

#include "facetnet/catalog.hpp"
#include "facetnet/netbuilder.hpp"
#include "facetnet/timestamp.hpp"

#include <cstddef>
#include <list>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace facetnet {

enum class ViewKind { graph, egocentric, listing, temporal };

std::string_view to_string(ViewKind kind) noexcept;
std::optional<ViewKind> parse_view_kind(std::string_view name);

/// What was picked in the parent view.
///   node: a graph node, or the center/a neighbor of an egocentric view
///   edge: a graph edge (u, v)
///   pair: an egocentric bar (center, neighbor); resolves to the graph edge(s)
///   item: a listing row, by link value
///   all:  the parent's whole subset
struct Selection {
    enum class Type { none, node, edge, pair, item, all };

    Type type = Type::none;
    std::string first;
    std::string second;

    static Selection node(std::string id) { return {Type::node, std::move(id), {}}; }
    static Selection edge(std::string u, std::string v) { return {Type::edge, std::move(u), std::move(v)}; }
    static Selection pair(std::string center, std::string neighbor) {
        return {Type::pair, std::move(center), std::move(neighbor)};
    }
    static Selection item(std::string link_value) { return {Type::item, std::move(link_value), {}}; }
    static Selection all() { return {Type::all, {}, {}}; }

    bool operator==(const Selection&) const = default;
};

struct EgocentricBar {
    std::string neighbor;
    /// Distinct link values shared with the center.
    std::size_t bar_total = 0;
    /// Thematic breakdown of the shared items; empty without a thematic variable.
    std::vector<FacetCount> segments;

    bool operator==(const EgocentricBar&) const = default;
};

struct EgocentricView {
    std::string center;
    std::vector<EgocentricBar> bars; // bar_total desc, then neighbor

    bool operator==(const EgocentricView&) const = default;
};

struct ListingRow {
    std::string link_value;
    std::vector<std::string> records;
    std::vector<std::string> themes;
    std::size_t unthemed = 0;
    std::optional<std::string> url;

    bool operator==(const ListingRow&) const = default;
};

struct ListingView {
    std::string link_facet;
    std::vector<ListingRow> rows; // by link value

    bool operator==(const ListingView&) const = default;
};

inline constexpr std::string_view kUnknownMonth = "(unknown)";

struct TemporalBucket {
    std::string month; // "YYYY-MM" or "(unknown)"
    std::size_t count = 0;

    bool operator==(const TemporalBucket&) const = default;
};

struct TemporalView {
    std::vector<TemporalBucket> buckets; // chronological, "(unknown)" last

    bool operator==(const TemporalView&) const = default;
};

using ViewPayload = std::variant<Network, EgocentricView, ListingView, TemporalView>;

struct ViewNode {
    std::string id;
    std::optional<std::string> parent;
    ViewKind kind = ViewKind::graph;
    Selection selection;
    ViewPayload payload;
    /// Record ids the view covers; always a subset of the parent's.
    std::vector<std::string> subset;
    std::vector<std::string> children;
};

struct ExplorerOptions {
    /// Link facet -> external URL template with one "{id}".
    std::map<std::string, std::string, std::less<>> url_templates;
    BuildLimits limits;
};

/// Provenance tree of chained views rooted at a graph view. Not thread-safe;
/// SessionStore serializes access per session.
class ExplorationSession {
public:
    /// Builds the root graph view. Throws whatever build_network throws.
    ExplorationSession(std::string id, std::shared_ptr<const FacetIndex> index, const FilterSpec& filter,
                       const TopologySpec& topology, ExplorerOptions options = {});

    const std::string& id() const noexcept { return id_; }
    Instant created_at() const noexcept { return created_at_; }
    const ViewNode& root() const { return views_.at(root_id_); }
    const Network& network() const { return std::get<Network>(root().payload); }
    /// Throws Error(not_found).
    const ViewNode& view(std::string_view view_id) const;
    const std::map<std::string, ViewNode, std::less<>>& views() const noexcept { return views_; }
    std::size_t size() const noexcept { return views_.size(); }

    /// Throws Error(invalid_selection) for a selection or parent kind the view
    /// cannot be derived from, Error(not_found) for unknown views or nodes.
    const ViewNode& spawn(ViewKind kind, std::string_view parent, const Selection& selection);
    const ViewNode& spawn_egocentric(std::string_view parent, std::string center);
    const ViewNode& spawn_listing(std::string_view parent, const Selection& selection);
    const ViewNode& spawn_temporal(std::string_view parent, const Selection& selection);

    /// Removes the view and its descendants; returns the removed ids.
    /// Throws Error(invalid_argument) for the root.
    std::vector<std::string> close_view(std::string_view view_id);

private:
    struct Focus {
        std::vector<EdgeItem> items;
        std::vector<std::string> records;
    };

    Focus resolve(const ViewNode& parent, const Selection& selection, bool allow_all_without_items) const;
    std::vector<EdgeItem> restrict_items(const std::vector<const EdgeItem*>& items,
                                         const std::vector<std::string>& subset) const;
    EgocentricView egocentric_payload(const ViewNode& parent, const std::string& center,
                                      std::vector<std::string>& subset) const;
    const ViewNode& attach(ViewNode node);

    std::string id_;
    Instant created_at_;
    std::shared_ptr<const FacetIndex> index_;
    ExplorerOptions options_;
    std::string root_id_;
    std::size_t next_view_ = 0;
    std::map<std::string, ViewNode, std::less<>> views_;
};

/// 128-bit random hex token.
std::string new_session_id();

/// Bounded session registry with least-recently-used eviction. Lookups are
/// concurrent; work on one session is serialized by its own mutex.
class SessionStore {
public:
    explicit SessionStore(std::size_t capacity);

    /// Builds the session outside the store lock, then registers it,
    /// evicting the least recently used session when full.
    std::string create(std::shared_ptr<const FacetIndex> index, const FilterSpec& filter, const TopologySpec& topology,
                       const ExplorerOptions& options);

    /// Runs fn(ExplorationSession&) under the session's lock.
    /// Throws Error(not_found) for unknown or evicted ids.
    template <class Fn>
    auto with_session(std::string_view id, Fn&& fn) {
        auto entry = acquire(id);
        std::lock_guard lock(entry->mutex);
        return fn(entry->session);
    }

    bool erase(std::string_view id);
    std::size_t size() const;
    std::size_t capacity() const noexcept { return capacity_; }

private:
    struct Entry {
        explicit Entry(ExplorationSession s) : session(std::move(s)) {}
        std::mutex mutex;
        ExplorationSession session;
    };

    std::shared_ptr<Entry> acquire(std::string_view id);

    std::size_t capacity_;
    mutable std::mutex mutex_;
    std::list<std::string> recency_; // front = most recent
    std::unordered_map<std::string, std::pair<std::shared_ptr<Entry>, std::list<std::string>::iterator>> entries_;
};

} // namespace facetnet
