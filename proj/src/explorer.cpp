#include "facetnet/explorer.hpp"

#include "facetnet/error.hpp"

#include <algorithm>
#include <iterator>
#include <random>
#include <set>

namespace facetnet {

std::string_view to_string(ViewKind kind) noexcept {
    switch (kind) {
    case ViewKind::graph: return "graph";
    case ViewKind::egocentric: return "egocentric";
    case ViewKind::listing: return "listing";
    case ViewKind::temporal: return "temporal";
    }
    return "graph";
}

std::optional<ViewKind> parse_view_kind(std::string_view name) {
    for (ViewKind kind : {ViewKind::graph, ViewKind::egocentric, ViewKind::listing, ViewKind::temporal}) {
        if (to_string(kind) == name)
            return kind;
    }
    return std::nullopt;
}

std::string new_session_id() {
    static thread_local std::mt19937_64 engine{[] {
        std::random_device rd;
        std::seed_seq seq{rd(), rd(), rd(), rd(), rd(), rd()};
        return std::mt19937_64(seq);
    }()};
    static constexpr char hex[] = "0123456789abcdef";
    std::string id;
    for (int word = 0; word < 2; ++word) {
        auto bits = engine();
        for (int i = 0; i < 16; ++i, bits >>= 4)
            id += hex[bits & 0xF];
    }
    return id;
}

namespace {

std::vector<std::string> union_records(const std::vector<EdgeItem>& items) {
    std::set<std::string> all;
    for (const auto& item : items)
        all.insert(item.records.begin(), item.records.end());
    return {all.begin(), all.end()};
}

[[noreturn]] void bad_selection(const std::string& message) {
    throw Error(Errc::invalid_selection, message);
}

} // namespace

ExplorationSession::ExplorationSession(std::string id, std::shared_ptr<const FacetIndex> index, const FilterSpec& filter,
                                       const TopologySpec& topology, ExplorerOptions options)
    : id_(std::move(id)),
      created_at_(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now())),
      index_(std::move(index)),
      options_(std::move(options)) {
    Network network = build_network(*index_, filter, topology, options_.limits);
    ViewNode root;
    root.kind = ViewKind::graph;
    for (Ordinal ord : index_->apply_filter(filter))
        root.subset.push_back(index_->record(ord).id);
    root.payload = std::move(network);
    root_id_ = attach(std::move(root)).id;
}

const ViewNode& ExplorationSession::view(std::string_view view_id) const {
    const auto it = views_.find(view_id);
    if (it == views_.end())
        throw Error(Errc::not_found, "no view '" + std::string(view_id) + "' in session " + id_);
    return it->second;
}

const ViewNode& ExplorationSession::attach(ViewNode node) {
    node.id = "v" + std::to_string(next_view_++);
    if (node.parent)
        views_.at(*node.parent).children.push_back(node.id);
    const auto [it, inserted] = views_.emplace(node.id, std::move(node));
    return it->second;
}

std::vector<EdgeItem> ExplorationSession::restrict_items(const std::vector<const EdgeItem*>& items,
                                                         const std::vector<std::string>& subset) const {
    std::map<std::string_view, std::set<std::string_view>> merged;
    for (const EdgeItem* item : items) {
        for (const auto& rec : item->records) {
            if (std::binary_search(subset.begin(), subset.end(), rec))
                merged[item->link_value].insert(rec);
        }
    }
    const auto& thematic = network().topology.thematic;
    std::vector<EdgeItem> out;
    out.reserve(merged.size());
    for (const auto& [link_value, records] : merged) {
        EdgeItem item;
        item.link_value = std::string(link_value);
        for (const auto rec : records) {
            item.records.emplace_back(rec);
            if (!thematic)
                continue;
            if (const ValueSet* themes = index_->record(rec).facet(*thematic))
                item.themes.insert(item.themes.end(), themes->begin(), themes->end());
            else
                ++item.unthemed;
        }
        std::sort(item.themes.begin(), item.themes.end());
        out.push_back(std::move(item));
    }
    return out;
}

ExplorationSession::Focus ExplorationSession::resolve(const ViewNode& parent, const Selection& selection,
                                                      bool allow_all_without_items) const {
    const Network& net = network();
    std::vector<const EdgeItem*> picked;
    auto take_node = [&](const std::string& node_id) {
        const Node* node = net.find_node(node_id);
        if (!node)
            throw Error(Errc::not_found, "no node '" + node_id + "' in the graph");
        for (const auto& item : node->items)
            picked.push_back(&item);
    };
    auto take_edges_between = [&](const std::string& a, const std::string& b) {
        bool found = false;
        for (const Edge* e : {net.find_edge(a, b), net.find_edge(b, a)}) {
            if (!e)
                continue;
            found = true;
            for (const auto& item : e->items)
                picked.push_back(&item);
            if (net.kind == NetworkKind::unipartite)
                break;
        }
        return found;
    };

    switch (parent.kind) {
    case ViewKind::graph:
        if (selection.type == Selection::Type::node) {
            take_node(selection.first);
        } else if (selection.type == Selection::Type::edge) {
            const Edge* e = net.find_edge(selection.first, selection.second);
            if (!e)
                bad_selection("no edge " + selection.first + " -- " + selection.second + " in the graph");
            for (const auto& item : e->items)
                picked.push_back(&item);
        } else if (selection.type == Selection::Type::all && allow_all_without_items) {
            return {{}, parent.subset};
        } else {
            bad_selection("a graph view accepts node or edge selections here");
        }
        break;
    case ViewKind::egocentric: {
        const auto& ego = std::get<EgocentricView>(parent.payload);
        auto is_neighbor = [&](const std::string& id) {
            return std::any_of(ego.bars.begin(), ego.bars.end(), [&](const auto& bar) { return bar.neighbor == id; });
        };
        if (selection.type == Selection::Type::pair) {
            if (selection.first != ego.center || !is_neighbor(selection.second))
                bad_selection("pair " + selection.first + " -- " + selection.second + " is not a bar of this view");
            take_edges_between(selection.first, selection.second);
        } else if (selection.type == Selection::Type::node) {
            if (selection.first != ego.center && !is_neighbor(selection.first))
                bad_selection("node '" + selection.first + "' is not shown in this view");
            take_node(selection.first);
        } else if (selection.type == Selection::Type::all) {
            for (const auto& bar : ego.bars)
                take_edges_between(ego.center, bar.neighbor);
        } else {
            bad_selection("an egocentric view accepts pair, node or all selections");
        }
        break;
    }
    case ViewKind::listing: {
        const auto& listing = std::get<ListingView>(parent.payload);
        std::vector<EdgeItem> rows;
        for (const auto& row : listing.rows) {
            if (selection.type == Selection::Type::all ||
                (selection.type == Selection::Type::item && row.link_value == selection.first))
                rows.push_back(EdgeItem{row.link_value, row.records, row.themes, row.unthemed});
        }
        if (selection.type == Selection::Type::item && rows.empty())
            bad_selection("listing has no row '" + selection.first + "'");
        if (selection.type != Selection::Type::item && selection.type != Selection::Type::all)
            bad_selection("a listing view accepts item or all selections");
        Focus focus;
        focus.items = std::move(rows);
        focus.records = union_records(focus.items);
        return focus;
    }
    case ViewKind::temporal:
        bad_selection("no view can be derived from a temporal view");
    }

    Focus focus;
    focus.items = restrict_items(picked, parent.subset);
    focus.records = union_records(focus.items);
    return focus;
}

EgocentricView ExplorationSession::egocentric_payload(const ViewNode& parent, const std::string& center,
                                                      std::vector<std::string>& subset) const {
    const Network& net = network();
    if (!net.find_node(center))
        throw Error(Errc::not_found, "no node '" + center + "' in the graph");

    std::map<std::string_view, std::vector<const EdgeItem*>> by_neighbor;
    for (const Edge* e : net.incident_edges(center)) {
        auto& items = by_neighbor[e->u == center ? e->v : e->u];
        for (const auto& item : e->items)
            items.push_back(&item);
    }

    EgocentricView view;
    view.center = center;
    std::set<std::string> covered;
    for (const auto& [neighbor, items] : by_neighbor) {
        const auto shared = restrict_items(items, parent.subset);
        if (shared.empty())
            continue;
        EgocentricBar bar;
        bar.neighbor = std::string(neighbor);
        bar.bar_total = shared.size();
        if (net.topology.thematic)
            bar.segments = thematic_breakdown(net, shared);
        for (const auto& item : shared)
            covered.insert(item.records.begin(), item.records.end());
        view.bars.push_back(std::move(bar));
    }
    std::stable_sort(view.bars.begin(), view.bars.end(),
                     [](const EgocentricBar& a, const EgocentricBar& b) { return a.bar_total > b.bar_total; });
    subset.assign(covered.begin(), covered.end());
    return view;
}

const ViewNode& ExplorationSession::spawn(ViewKind kind, std::string_view parent_id, const Selection& selection) {
    const ViewNode& parent = view(parent_id);
    ViewNode node;
    node.parent = parent.id;
    node.kind = kind;
    node.selection = selection;

    switch (kind) {
    case ViewKind::graph:
        bad_selection("graph views are only created with the session");
    case ViewKind::egocentric:
        if (parent.kind != ViewKind::graph)
            bad_selection("an egocentric view needs a graph parent, not " + std::string(to_string(parent.kind)));
        if (selection.type != Selection::Type::node)
            bad_selection("an egocentric view is centered on a node");
        node.payload = egocentric_payload(parent, selection.first, node.subset);
        break;
    case ViewKind::listing: {
        if (parent.kind != ViewKind::graph && parent.kind != ViewKind::egocentric)
            bad_selection("a listing view needs a graph or egocentric parent");
        Focus focus = resolve(parent, selection, false);
        ListingView listing;
        listing.link_facet = network().topology.link;
        const auto tmpl = options_.url_templates.find(listing.link_facet);
        for (auto& item : focus.items) {
            ListingRow row{std::move(item.link_value), std::move(item.records), std::move(item.themes), item.unthemed, {}};
            if (tmpl != options_.url_templates.end())
                row.url = external_url(row.link_value, tmpl->second);
            listing.rows.push_back(std::move(row));
        }
        node.subset = std::move(focus.records);
        node.payload = std::move(listing);
        break;
    }
    case ViewKind::temporal: {
        Focus focus = resolve(parent, selection, true);
        std::map<std::string, std::size_t> months;
        std::size_t unknown = 0;
        for (const auto& id : focus.records) {
            const auto created = index_->record(id).scalar_string("created_at");
            const auto instant = created ? parse_rfc3339(*created) : std::nullopt;
            if (instant)
                ++months[utc_month(*instant)];
            else
                ++unknown;
        }
        TemporalView temporal;
        for (auto& [month, count] : months)
            temporal.buckets.push_back({month, count});
        if (unknown > 0)
            temporal.buckets.push_back({std::string(kUnknownMonth), unknown});
        node.subset = std::move(focus.records);
        node.payload = std::move(temporal);
        break;
    }
    }
    return attach(std::move(node));
}

const ViewNode& ExplorationSession::spawn_egocentric(std::string_view parent, std::string center) {
    return spawn(ViewKind::egocentric, parent, Selection::node(std::move(center)));
}

const ViewNode& ExplorationSession::spawn_listing(std::string_view parent, const Selection& selection) {
    return spawn(ViewKind::listing, parent, selection);
}

const ViewNode& ExplorationSession::spawn_temporal(std::string_view parent, const Selection& selection) {
    return spawn(ViewKind::temporal, parent, selection);
}

std::vector<std::string> ExplorationSession::close_view(std::string_view view_id) {
    const ViewNode& target = view(view_id);
    if (!target.parent)
        throw Error(Errc::invalid_argument, "the root view cannot be closed");

    std::vector<std::string> removed{target.id};
    for (std::size_t i = 0; i < removed.size(); ++i) {
        const auto& children = views_.at(removed[i]).children;
        removed.insert(removed.end(), children.begin(), children.end());
    }
    auto& siblings = views_.at(*target.parent).children;
    std::erase(siblings, target.id);
    for (const auto& id : removed)
        views_.erase(id);
    return removed;
}

SessionStore::SessionStore(std::size_t capacity) : capacity_(capacity) {
    if (capacity_ == 0)
        throw Error(Errc::invalid_argument, "session capacity must be positive");
}

std::string SessionStore::create(std::shared_ptr<const FacetIndex> index, const FilterSpec& filter,
                                 const TopologySpec& topology, const ExplorerOptions& options) {
    auto entry = std::make_shared<Entry>(ExplorationSession(new_session_id(), std::move(index), filter, topology, options));
    const std::string id = entry->session.id();

    std::lock_guard lock(mutex_);
    while (entries_.size() >= capacity_) {
        entries_.erase(recency_.back());
        recency_.pop_back();
    }
    recency_.push_front(id);
    entries_.emplace(id, std::pair{std::move(entry), recency_.begin()});
    return id;
}

std::shared_ptr<SessionStore::Entry> SessionStore::acquire(std::string_view id) {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(std::string(id));
    if (it == entries_.end())
        throw Error(Errc::not_found, "no session '" + std::string(id) + "' (unknown or evicted)");
    recency_.splice(recency_.begin(), recency_, it->second.second);
    return it->second.first;
}

bool SessionStore::erase(std::string_view id) {
    std::lock_guard lock(mutex_);
    const auto it = entries_.find(std::string(id));
    if (it == entries_.end())
        return false;
    recency_.erase(it->second.second);
    entries_.erase(it);
    return true;
}

std::size_t SessionStore::size() const {
    std::lock_guard lock(mutex_);
    return entries_.size();
}

} // namespace facetnet
