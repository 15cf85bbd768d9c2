#include "facetnet/netbuilder.hpp"

#include "facetnet/error.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <tuple>

namespace facetnet {

std::string_view to_string(NetworkKind kind) noexcept {
    return kind == NetworkKind::bipartite ? "bipartite" : "unipartite";
}

std::string_view to_string(NodeSide side) noexcept {
    switch (side) {
    case NodeSide::source: return "source";
    case NodeSide::target: return "target";
    case NodeSide::both: return "both";
    }
    return "source";
}

TopologyCheck validate_topology(const TopologySpec& spec, const FacetSchema& schema) {
    TopologyCheck check;
    auto require_known = [&](const std::string& role, const std::string& facet) {
        if (facet.empty())
            check.errors.push_back(role + " variable is not set");
        else if (!schema.knows(facet))
            check.errors.push_back(role + " variable '" + facet + "' is not a known facet");
    };
    require_known("source", spec.source);
    require_known("target", spec.target);
    require_known("link", spec.link);
    if (spec.thematic)
        require_known("thematic", *spec.thematic);
    if (!spec.link.empty() && spec.link == spec.source)
        check.errors.push_back("link variable '" + spec.link + "' equals the source variable");
    if (!spec.link.empty() && spec.link == spec.target && spec.target != spec.source)
        check.errors.push_back("link variable '" + spec.link + "' equals the target variable");

    if (check.errors.empty())
        check.topology = ValidatedTopology{spec, spec.source == spec.target ? NetworkKind::unipartite : NetworkKind::bipartite};
    return check;
}

ValidatedTopology require_valid_topology(const TopologySpec& spec, const FacetSchema& schema) {
    auto check = validate_topology(spec, schema);
    if (!check.ok()) {
        std::string message = "invalid topology: ";
        for (std::size_t i = 0; i < check.errors.size(); ++i)
            message += (i ? "; " : "") + check.errors[i];
        throw Error(Errc::invalid_topology, message);
    }
    return *check.topology;
}

namespace {

using ItemMap = std::map<std::string_view, OrdinalSet>; // link value -> contributors

struct NodeAccumulator {
    bool as_source = false;
    bool as_target = false;
    ItemMap items;
};

void add_contributor(OrdinalSet& set, Ordinal ord) {
    if (set.empty() || set.back() != ord)
        set.push_back(ord);
}

class ItemMaterializer {
public:
    ItemMaterializer(const FacetIndex& index, const std::optional<std::string>& thematic)
        : index_(index), thematic_(thematic) {}

    std::vector<EdgeItem> operator()(const ItemMap& items) const {
        std::vector<EdgeItem> out;
        out.reserve(items.size());
        for (const auto& [link_value, contributors] : items) {
            EdgeItem item;
            item.link_value = std::string(link_value);
            item.records.reserve(contributors.size());
            for (Ordinal ord : contributors) {
                const auto& record = index_.record(ord);
                item.records.push_back(record.id);
                if (!thematic_)
                    continue;
                if (const ValueSet* themes = record.facet(*thematic_))
                    item.themes.insert(item.themes.end(), themes->begin(), themes->end());
                else
                    ++item.unthemed;
            }
            std::sort(item.themes.begin(), item.themes.end());
            out.push_back(std::move(item));
        }
        return out;
    }

private:
    const FacetIndex& index_;
    const std::optional<std::string>& thematic_;
};

void apply_limits(Network& net, const BuildLimits& limits) {
    net.truncation.total_nodes = net.nodes.size();
    net.truncation.total_edges = net.edges.size();

    auto drop_edges_without_nodes = [&net] {
        std::erase_if(net.edges, [&](const Edge& e) { return !net.find_node(e.u) || !net.find_node(e.v); });
    };

    if (limits.hide_isolated) {
        std::set<std::string_view> connected;
        for (const auto& e : net.edges) {
            connected.insert(e.u);
            connected.insert(e.v);
        }
        std::erase_if(net.nodes, [&](const Node& n) { return !connected.contains(n.id); });
    }
    if (net.nodes.size() > limits.max_nodes) {
        std::vector<Node> ranked = std::move(net.nodes);
        std::stable_sort(ranked.begin(), ranked.end(), [](const Node& a, const Node& b) {
            return a.size != b.size ? a.size > b.size : a.id < b.id;
        });
        ranked.resize(limits.max_nodes);
        std::sort(ranked.begin(), ranked.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
        net.nodes = std::move(ranked);
        drop_edges_without_nodes();
        net.truncation.truncated = true;
    }
    if (net.edges.size() > limits.max_edges) {
        std::stable_sort(net.edges.begin(), net.edges.end(), [](const Edge& a, const Edge& b) {
            if (a.items.size() != b.items.size())
                return a.items.size() > b.items.size();
            return std::tie(a.u, a.v) < std::tie(b.u, b.v);
        });
        net.edges.resize(limits.max_edges);
        std::sort(net.edges.begin(), net.edges.end(),
                  [](const Edge& a, const Edge& b) { return std::tie(a.u, a.v) < std::tie(b.u, b.v); });
        net.truncation.truncated = true;
    }
}

} // namespace

Network build_network(const FacetIndex& index, const FilterSpec& filter, const TopologySpec& topology,
                      const BuildLimits& limits) {
    const ValidatedTopology valid = require_valid_topology(topology, index.schema());
    const OrdinalSet matched = index.apply_filter(filter);
    const TopologySpec& spec = valid.spec;

    std::map<std::string_view, NodeAccumulator> nodes;
    std::map<std::pair<std::string_view, std::string_view>, ItemMap> edges;

    if (valid.kind == NetworkKind::bipartite) {
        for (Ordinal ord : matched) {
            const DatasetRecord& r = index.record(ord);
            const ValueSet* sources = r.facet(spec.source);
            const ValueSet* targets = r.facet(spec.target);
            const ValueSet* links = r.facet(spec.link);
            if (sources) {
                for (const auto& s : *sources) {
                    auto& node = nodes[s];
                    node.as_source = true;
                    if (links)
                        for (const auto& l : *links)
                            add_contributor(node.items[l], ord);
                }
            }
            if (targets) {
                for (const auto& t : *targets) {
                    auto& node = nodes[t];
                    node.as_target = true;
                    if (links)
                        for (const auto& l : *links)
                            add_contributor(node.items[l], ord);
                }
            }
            if (!sources || !targets || !links)
                continue;
            for (const auto& s : *sources) {
                for (const auto& t : *targets) {
                    if (s == t)
                        continue;
                    auto& items = edges[{s, t}];
                    for (const auto& l : *links)
                        items[l].push_back(ord);
                }
            }
        }
    } else {
        // link value -> node value -> records establishing the possession
        std::map<std::string_view, std::map<std::string_view, OrdinalSet>> possession;
        for (Ordinal ord : matched) {
            const DatasetRecord& r = index.record(ord);
            const ValueSet* values = r.facet(spec.source);
            if (!values)
                continue;
            const ValueSet* links = r.facet(spec.link);
            for (const auto& x : *values) {
                auto& node = nodes[x];
                node.as_source = node.as_target = true;
                if (!links)
                    continue;
                for (const auto& l : *links) {
                    add_contributor(node.items[l], ord);
                    possession[l][x].push_back(ord);
                }
            }
        }
        for (const auto& [l, holders] : possession) {
            for (auto u = holders.begin(); u != holders.end(); ++u) {
                for (auto v = std::next(u); v != holders.end(); ++v)
                    edges[{u->first, v->first}][l] = unite(u->second, v->second);
            }
        }
    }

    const ItemMaterializer materialize(index, spec.thematic);
    Network net;
    net.kind = valid.kind;
    net.filter = filter;
    net.topology = spec;
    net.nodes.reserve(nodes.size());
    for (const auto& [id, acc] : nodes) {
        Node node;
        node.id = std::string(id);
        node.side = acc.as_source && acc.as_target ? NodeSide::both : acc.as_source ? NodeSide::source : NodeSide::target;
        node.items = materialize(acc.items);
        node.size = node.items.size();
        net.nodes.push_back(std::move(node));
    }
    net.edges.reserve(edges.size());
    for (const auto& [key, items] : edges)
        net.edges.push_back(Edge{std::string(key.first), std::string(key.second), materialize(items)});

    apply_limits(net, limits);
    return net;
}

const Node* Network::find_node(std::string_view id) const {
    const auto it = std::lower_bound(nodes.begin(), nodes.end(), id,
                                     [](const Node& n, std::string_view key) { return n.id < key; });
    return it != nodes.end() && it->id == id ? &*it : nullptr;
}

const Edge* Network::find_edge(std::string_view u, std::string_view v) const {
    auto lookup = [this](std::string_view a, std::string_view b) -> const Edge* {
        const auto it = std::lower_bound(edges.begin(), edges.end(), std::pair{a, b}, [](const Edge& e, const auto& key) {
            return std::pair<std::string_view, std::string_view>{e.u, e.v} < key;
        });
        return it != edges.end() && it->u == a && it->v == b ? &*it : nullptr;
    };
    if (const Edge* e = lookup(u, v))
        return e;
    return kind == NetworkKind::unipartite ? lookup(v, u) : nullptr;
}

std::vector<const Edge*> Network::incident_edges(std::string_view id) const {
    std::vector<const Edge*> out;
    for (const auto& e : edges) {
        if (e.u == id || e.v == id)
            out.push_back(&e);
    }
    return out;
}

NodeSummary node_summary(const Network& network, std::string_view node_id) {
    const Node* node = network.find_node(node_id);
    if (!node)
        throw Error(Errc::not_found, "no node '" + std::string(node_id) + "' in the network");
    std::set<std::string_view> neighbors;
    for (const Edge* e : network.incident_edges(node_id))
        neighbors.insert(e->u == node_id ? e->v : e->u);

    NodeSummary summary;
    summary.neighbor_count = neighbors.size();
    summary.distinct_item_count = node->size;
    for (const auto& item : node->items)
        summary.link_values.push_back(item.link_value);
    return summary;
}

std::vector<FacetCount> thematic_breakdown(const Network& network, std::span<const EdgeItem> items) {
    if (!network.topology.thematic)
        throw Error(Errc::invalid_argument, "network was built without a thematic variable");
    std::map<std::string_view, std::size_t> counts;
    std::size_t missing = 0;
    for (const auto& item : items) {
        for (const auto& theme : item.themes)
            ++counts[theme];
        missing += item.unthemed;
    }
    std::vector<FacetCount> out;
    out.reserve(counts.size() + 1);
    for (const auto& [value, n] : counts)
        out.push_back({std::string(value), n});
    std::stable_sort(out.begin(), out.end(), [](const FacetCount& a, const FacetCount& b) { return a.count > b.count; });
    if (missing > 0)
        out.push_back({std::string(kMissingValue), missing});
    return out;
}

std::vector<FacetCount> thematic_breakdown(const Network& network, const Edge& edge) {
    return thematic_breakdown(network, std::span<const EdgeItem>(edge.items));
}

} // namespace facetnet
