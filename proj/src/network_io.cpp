#include "facetnet/network_io.hpp"

#include "facetnet/error.hpp"
#include "facetnet/json_codec.hpp"

#include <boost/property_tree/ptree.hpp>
#include <boost/property_tree/xml_parser.hpp>

#include <sstream>

namespace facetnet {

using nlohmann::json;

std::optional<ExportFormat> parse_export_format(std::string_view name) {
    if (name == "json" || name == "node-link" || name == "node-link-json")
        return ExportFormat::node_link_json;
    if (name == "graphml")
        return ExportFormat::graphml;
    return std::nullopt;
}

namespace {

json items_to_json(const std::vector<EdgeItem>& items) {
    json out = json::array();
    for (const auto& item : items)
        out.push_back(to_json(item));
    return out;
}

std::vector<EdgeItem> items_from_json(const json& j) {
    if (!j.is_array())
        throw Error(Errc::parse_error, "items must be an array");
    std::vector<EdgeItem> items;
    for (const auto& item : j)
        items.push_back(edge_item_from_json(item));
    return items;
}

NetworkKind kind_from_string(const std::string& text) {
    if (text == "bipartite")
        return NetworkKind::bipartite;
    if (text == "unipartite")
        return NetworkKind::unipartite;
    throw Error(Errc::parse_error, "unknown network kind '" + text + "'");
}

NodeSide side_from_string(const std::string& text) {
    if (text == "source")
        return NodeSide::source;
    if (text == "target")
        return NodeSide::target;
    if (text == "both")
        return NodeSide::both;
    throw Error(Errc::parse_error, "unknown node side '" + text + "'");
}

json truncation_to_json(const Truncation& t) {
    return {{"truncated", t.truncated}, {"total_nodes", t.total_nodes}, {"total_edges", t.total_edges}};
}

Truncation truncation_from_json(const json& j) {
    return {j.at("truncated").get<bool>(), j.at("total_nodes").get<std::size_t>(), j.at("total_edges").get<std::size_t>()};
}

std::string xml_escape(std::string_view text) {
    std::string out;
    out.reserve(text.size());
    for (char c : text) {
        switch (c) {
        case '&': out += "&amp;"; break;
        case '<': out += "&lt;"; break;
        case '>': out += "&gt;"; break;
        case '"': out += "&quot;"; break;
        case '\'': out += "&apos;"; break;
        default: out += c;
        }
    }
    return out;
}

std::string export_graphml(const Network& net) {
    std::ostringstream out;
    out << "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
           "<graphml xmlns=\"http://graphml.graphdrawing.org/xmlns\">\n"
           "  <key id=\"kind\" for=\"graph\" attr.name=\"kind\" attr.type=\"string\"/>\n"
           "  <key id=\"filter\" for=\"graph\" attr.name=\"filter\" attr.type=\"string\"/>\n"
           "  <key id=\"topology\" for=\"graph\" attr.name=\"topology\" attr.type=\"string\"/>\n"
           "  <key id=\"truncation\" for=\"graph\" attr.name=\"truncation\" attr.type=\"string\"/>\n"
           "  <key id=\"side\" for=\"node\" attr.name=\"side\" attr.type=\"string\"/>\n"
           "  <key id=\"size\" for=\"node\" attr.name=\"size\" attr.type=\"int\"/>\n"
           "  <key id=\"node_items\" for=\"node\" attr.name=\"items\" attr.type=\"string\"/>\n"
           "  <key id=\"item_count\" for=\"edge\" attr.name=\"item_count\" attr.type=\"int\"/>\n"
           "  <key id=\"edge_items\" for=\"edge\" attr.name=\"items\" attr.type=\"string\"/>\n"
           "  <graph id=\"G\" edgedefault=\"undirected\">\n";
    out << "    <data key=\"kind\">" << to_string(net.kind) << "</data>\n";
    out << "    <data key=\"filter\">" << xml_escape(to_json(net.filter).dump()) << "</data>\n";
    out << "    <data key=\"topology\">" << xml_escape(to_json(net.topology).dump()) << "</data>\n";
    out << "    <data key=\"truncation\">" << xml_escape(truncation_to_json(net.truncation).dump()) << "</data>\n";
    for (const auto& node : net.nodes) {
        out << "    <node id=\"" << xml_escape(node.id) << "\">\n"
            << "      <data key=\"side\">" << to_string(node.side) << "</data>\n"
            << "      <data key=\"size\">" << node.size << "</data>\n"
            << "      <data key=\"node_items\">" << xml_escape(items_to_json(node.items).dump()) << "</data>\n"
            << "    </node>\n";
    }
    std::size_t n = 0;
    for (const auto& edge : net.edges) {
        out << "    <edge id=\"e" << n++ << "\" source=\"" << xml_escape(edge.u) << "\" target=\"" << xml_escape(edge.v)
            << "\">\n"
            << "      <data key=\"item_count\">" << edge.items.size() << "</data>\n"
            << "      <data key=\"edge_items\">" << xml_escape(items_to_json(edge.items).dump()) << "</data>\n"
            << "    </edge>\n";
    }
    out << "  </graph>\n</graphml>\n";
    return out.str();
}

Network import_graphml(std::string_view document) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in{std::string(document)};
        pt::read_xml(in, tree);
    } catch (const pt::xml_parser_error& e) {
        throw Error(Errc::parse_error, std::string("malformed GraphML: ") + e.what());
    }

    const auto graph = tree.get_child_optional("graphml.graph");
    if (!graph)
        throw Error(Errc::parse_error, "GraphML document has no <graph>");

    auto data_of = [](const pt::ptree& element) {
        std::map<std::string, std::string> data;
        for (const auto& [tag, child] : element) {
            if (tag == "data")
                data[child.get<std::string>("<xmlattr>.key")] = child.data();
        }
        return data;
    };
    auto require = [](const std::map<std::string, std::string>& data, const std::string& key) -> const std::string& {
        const auto it = data.find(key);
        if (it == data.end())
            throw Error(Errc::parse_error, "GraphML element lacks <data key=\"" + key + "\">");
        return it->second;
    };

    Network net;
    try {
        const auto graph_data = data_of(*graph);
        net.kind = kind_from_string(require(graph_data, "kind"));
        net.filter = filter_from_json(json::parse(require(graph_data, "filter")));
        net.topology = topology_from_json(json::parse(require(graph_data, "topology")));
        net.truncation = truncation_from_json(json::parse(require(graph_data, "truncation")));
        for (const auto& [tag, child] : *graph) {
            if (tag == "node") {
                const auto data = data_of(child);
                Node node;
                node.id = child.get<std::string>("<xmlattr>.id");
                node.side = side_from_string(require(data, "side"));
                node.size = std::stoul(require(data, "size"));
                node.items = items_from_json(json::parse(require(data, "node_items")));
                net.nodes.push_back(std::move(node));
            } else if (tag == "edge") {
                const auto data = data_of(child);
                Edge edge;
                edge.u = child.get<std::string>("<xmlattr>.source");
                edge.v = child.get<std::string>("<xmlattr>.target");
                edge.items = items_from_json(json::parse(require(data, "edge_items")));
                net.edges.push_back(std::move(edge));
            }
        }
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, std::string("malformed GraphML payload: ") + e.what());
    } catch (const pt::ptree_error& e) {
        throw Error(Errc::parse_error, std::string("malformed GraphML element: ") + e.what());
    } catch (const std::logic_error& e) {
        throw Error(Errc::parse_error, std::string("malformed GraphML value: ") + e.what());
    } catch (const Error& e) {
        throw Error(Errc::parse_error, std::string("malformed GraphML payload: ") + e.what());
    }
    return net;
}

} // namespace

json network_to_json(const Network& network) {
    json nodes = json::array();
    for (const auto& node : network.nodes) {
        nodes.push_back({{"id", node.id}, {"side", to_string(node.side)}, {"size", node.size}, {"items", items_to_json(node.items)}});
    }
    json edges = json::array();
    for (const auto& edge : network.edges)
        edges.push_back({{"source", edge.u}, {"target", edge.v}, {"items", items_to_json(edge.items)}});
    return {{"kind", to_string(network.kind)},
            {"filter", to_json(network.filter)},
            {"topology", to_json(network.topology)},
            {"truncation", truncation_to_json(network.truncation)},
            {"nodes", std::move(nodes)},
            {"edges", std::move(edges)}};
}

Network network_from_json(const json& doc) {
    try {
        Network net;
        net.kind = kind_from_string(doc.at("kind").get<std::string>());
        net.filter = filter_from_json(doc.at("filter"));
        net.topology = topology_from_json(doc.at("topology"));
        net.truncation = truncation_from_json(doc.at("truncation"));
        for (const auto& n : doc.at("nodes")) {
            net.nodes.push_back(Node{n.at("id").get<std::string>(), side_from_string(n.at("side").get<std::string>()),
                                     n.at("size").get<std::size_t>(), items_from_json(n.at("items"))});
        }
        for (const auto& e : doc.at("edges")) {
            net.edges.push_back(
                Edge{e.at("source").get<std::string>(), e.at("target").get<std::string>(), items_from_json(e.at("items"))});
        }
        return net;
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, std::string("malformed node-link document: ") + e.what());
    } catch (const Error& e) {
        throw Error(Errc::parse_error, std::string("malformed node-link document: ") + e.what());
    }
}

std::string export_network(const Network& network, ExportFormat format) {
    switch (format) {
    case ExportFormat::node_link_json: return network_to_json(network).dump(2) + "\n";
    case ExportFormat::graphml: return export_graphml(network);
    }
    throw Error(Errc::unsupported_format, "unsupported export format");
}

Network import_network(std::string_view document, ExportFormat format) {
    switch (format) {
    case ExportFormat::node_link_json: {
        json doc;
        try {
            doc = json::parse(document);
        } catch (const json::exception& e) {
            throw Error(Errc::parse_error, std::string("malformed node-link document: ") + e.what());
        }
        return network_from_json(doc);
    }
    case ExportFormat::graphml: return import_graphml(document);
    }
    throw Error(Errc::unsupported_format, "unsupported import format");
}

} // namespace facetnet
