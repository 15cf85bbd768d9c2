#include "facetnet/service.hpp"

#include "facetnet/error.hpp"
#include "facetnet/json_codec.hpp"
#include "facetnet/network_io.hpp"
#include "facetnet/snapshot.hpp"

#include "httplib.h"

#include <spdlog/spdlog.h>

#include <charconv>
#include <cstdlib>
#include <fstream>

namespace facetnet {

using nlohmann::json;

void ServiceConfig::validate() const {
    if (port < 0 || port > 65535)
        throw Error(Errc::invalid_argument, "port must be within 0..65535");
    if (session_cap == 0)
        throw Error(Errc::invalid_argument, "session_cap must be positive");
    if (limits.max_nodes == 0 || limits.max_edges == 0)
        throw Error(Errc::invalid_argument, "network ceilings must be positive");
    for (const auto& [facet, tmpl] : url_templates) {
        if (!valid_url_template(tmpl))
            throw Error(Errc::invalid_argument, "URL template for '" + facet + "' must contain exactly one {id}");
    }
}

ServiceConfig load_config(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in)
        throw Error(Errc::io_error, "cannot open config '" + path.string() + "'");
    json j;
    try {
        j = json::parse(in);
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, "config '" + path.string() + "': " + e.what());
    }
    ServiceConfig config;
    try {
        if (j.contains("snapshot")) {
            std::filesystem::path snapshot = j.at("snapshot").get<std::string>();
            config.snapshot_path = snapshot.is_relative() ? path.parent_path() / snapshot : snapshot;
        }
        config.host = j.value("host", config.host);
        config.port = j.value("port", config.port);
        if (j.contains("url_templates")) {
            for (const auto& [facet, tmpl] : j.at("url_templates").items())
                config.url_templates[facet] = tmpl.get<std::string>();
        }
        config.session_cap = j.value("session_cap", config.session_cap);
        config.limits.max_nodes = j.value("max_nodes", config.limits.max_nodes);
        config.limits.max_edges = j.value("max_edges", config.limits.max_edges);
        config.limits.hide_isolated = j.value("hide_isolated", config.limits.hide_isolated);
        if (j.contains("within_facet_mode"))
            config.default_mode = filter_from_json(json{{"mode", j.at("within_facet_mode")}}).within_facet_mode;
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, "config '" + path.string() + "': " + e.what());
    }
    return config;
}

namespace {

std::optional<std::string> env(const char* name) {
    const char* value = std::getenv(name);
    if (!value || !*value)
        return std::nullopt;
    return std::string(value);
}

std::size_t env_count(const char* name, const std::string& text) {
    std::size_t n = 0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), n);
    if (ec != std::errc{} || ptr != text.data() + text.size())
        throw Error(Errc::invalid_argument, std::string(name) + " must be a non-negative integer");
    return n;
}

} // namespace

void apply_env_overrides(ServiceConfig& config) {
    if (auto v = env("FACETNET_SNAPSHOT"))
        config.snapshot_path = *v;
    if (auto v = env("FACETNET_HOST"))
        config.host = *v;
    if (auto v = env("FACETNET_PORT"))
        config.port = static_cast<int>(env_count("FACETNET_PORT", *v));
    if (auto v = env("FACETNET_SESSION_CAP"))
        config.session_cap = env_count("FACETNET_SESSION_CAP", *v);
    if (auto v = env("FACETNET_MAX_NODES"))
        config.limits.max_nodes = env_count("FACETNET_MAX_NODES", *v);
    if (auto v = env("FACETNET_MAX_EDGES"))
        config.limits.max_edges = env_count("FACETNET_MAX_EDGES", *v);
    if (auto v = env("FACETNET_FILTER_MODE"))
        config.default_mode = filter_from_json(json{{"mode", *v}}).within_facet_mode;
    if (auto v = env("FACETNET_DATASET_URL"))
        config.url_templates["dataset"] = *v;
    if (auto v = env("FACETNET_MODEL_URL"))
        config.url_templates["model"] = *v;
}

json selection_to_json(const Selection& s) {
    switch (s.type) {
    case Selection::Type::none: return {{"type", "none"}};
    case Selection::Type::node: return {{"type", "node"}, {"node", s.first}};
    case Selection::Type::edge: return {{"type", "edge"}, {"source", s.first}, {"target", s.second}};
    case Selection::Type::pair: return {{"type", "pair"}, {"center", s.first}, {"neighbor", s.second}};
    case Selection::Type::item: return {{"type", "item"}, {"link_value", s.first}};
    case Selection::Type::all: return {{"type", "all"}};
    }
    return {{"type", "none"}};
}

Selection selection_from_json(const json& j) {
    auto field = [&](const char* key) {
        const auto it = j.find(key);
        if (it == j.end() || !it->is_string())
            throw Error(Errc::invalid_argument, std::string("selection: field '") + key + "' must be a string");
        return it->get<std::string>();
    };
    if (!j.is_object())
        throw Error(Errc::invalid_argument, "selection must be an object");
    const std::string type = field("type");
    if (type == "node")
        return Selection::node(field("node"));
    if (type == "edge")
        return Selection::edge(field("source"), field("target"));
    if (type == "pair")
        return Selection::pair(field("center"), field("neighbor"));
    if (type == "item")
        return Selection::item(field("link_value"));
    if (type == "all")
        return Selection::all();
    throw Error(Errc::invalid_argument, "selection type must be node, edge, pair, item or all");
}

namespace {

json counts_to_json(const std::vector<FacetCount>& counts) {
    json out = json::array();
    for (const auto& c : counts)
        out.push_back(to_json(c));
    return out;
}

json payload_to_json(const ViewPayload& payload) {
    return std::visit(
        [](const auto& p) -> json {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Network>) {
                return network_to_json(p);
            } else if constexpr (std::is_same_v<T, EgocentricView>) {
                json bars = json::array();
                for (const auto& bar : p.bars)
                    bars.push_back({{"neighbor", bar.neighbor}, {"bar_total", bar.bar_total}, {"segments", counts_to_json(bar.segments)}});
                return {{"center", p.center}, {"bars", bars}};
            } else if constexpr (std::is_same_v<T, ListingView>) {
                json rows = json::array();
                for (const auto& row : p.rows) {
                    rows.push_back({{"link_value", row.link_value},
                                    {"records", row.records},
                                    {"themes", row.themes},
                                    {"unthemed", row.unthemed},
                                    {"url", row.url ? json(*row.url) : json(nullptr)}});
                }
                return {{"link_facet", p.link_facet}, {"rows", rows}};
            } else {
                json buckets = json::array();
                for (const auto& b : p.buckets)
                    buckets.push_back({{"month", b.month}, {"count", b.count}});
                return {{"buckets", buckets}};
            }
        },
        payload);
}

int status_for(Errc code) {
    switch (code) {
    case Errc::not_found: return 404;
    case Errc::invalid_argument:
    case Errc::unknown_facet:
    case Errc::parse_error:
    case Errc::invalid_topology:
    case Errc::invalid_selection:
    case Errc::unsupported_format: return 400;
    default: return 500;
    }
}

ApiResponse error_response(int status, std::string_view code, std::string_view message) {
    return {status, json{{"error", {{"code", code}, {"message", message}}}}.dump(), "application/json"};
}

ApiResponse ok(const json& body, int status = 200) {
    return {status, body.dump(), "application/json"};
}

json parse_body(std::string_view body) {
    if (body.empty())
        return json::object();
    try {
        json j = json::parse(body);
        if (!j.is_object())
            throw Error(Errc::invalid_argument, "request body must be a JSON object");
        return j;
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, std::string("request body is not valid JSON: ") + e.what());
    }
}

std::vector<std::string_view> split_path(std::string_view path) {
    std::vector<std::string_view> parts;
    while (!path.empty()) {
        if (path.front() == '/') {
            path.remove_prefix(1);
            continue;
        }
        const auto slash = path.find('/');
        parts.push_back(path.substr(0, slash));
        if (slash == std::string_view::npos)
            break;
        path.remove_prefix(slash);
    }
    return parts;
}

} // namespace

json view_to_json(const ViewNode& view) {
    return {{"id", view.id},
            {"parent", view.parent ? json(*view.parent) : json(nullptr)},
            {"kind", to_string(view.kind)},
            {"selection", selection_to_json(view.selection)},
            {"subset", view.subset},
            {"children", view.children},
            {"payload", payload_to_json(view.payload)}};
}

Api::Api(std::shared_ptr<const FacetIndex> index, ServiceConfig config)
    : index_(std::move(index)), config_(std::move(config)), sessions_(config_.session_cap) {
    config_.validate();
    explorer_options_.url_templates = config_.url_templates;
    explorer_options_.limits = config_.limits;
}

ApiResponse Api::handle(std::string_view method, std::string_view path, std::string_view body) {
    try {
        return route(method, path, body);
    } catch (const Error& e) {
        return error_response(status_for(e.code()), to_string(e.code()), e.what());
    } catch (const std::exception& e) {
        spdlog::error("unhandled error on {} {}: {}", method, path, e.what());
        return error_response(500, "internal", "internal error");
    }
}

ApiResponse Api::route(std::string_view method, std::string_view path, std::string_view body) {
    static constexpr std::string_view prefix = "/api/v1/";
    if (path.substr(0, prefix.size()) != prefix)
        return error_response(404, "not_found", "no route for " + std::string(path));

    // Record ids may contain '/', so the records route takes the raw remainder.
    constexpr std::string_view records_prefix = "/api/v1/records/";
    if (path.substr(0, records_prefix.size()) == records_prefix) {
        if (method != "GET")
            return error_response(405, "method_not_allowed", "records are read-only");
        const auto id = path.substr(records_prefix.size());
        const auto& record = index_->record(id);
        const auto tmpl = config_.url_templates.find(kDatasetFacet);
        return ok(to_json(record, tmpl == config_.url_templates.end() ? std::nullopt : std::optional(tmpl->second)));
    }

    const auto parts = split_path(path.substr(prefix.size()));
    auto method_not_allowed = [&] {
        return error_response(405, "method_not_allowed", std::string(method) + " is not allowed on " + std::string(path));
    };

    if (parts.size() == 1 && parts[0] == "health") {
        if (method != "GET")
            return method_not_allowed();
        return ok({{"status", "ok"},
                   {"records", index_->size()},
                   {"source_label", index_->source_label()},
                   {"built_at", index_->built_at()},
                   {"sessions", sessions_.size()}});
    }

    if (parts.size() == 1 && parts[0] == "facets") {
        if (method != "GET")
            return method_not_allowed();
        json facets = json::array();
        for (const auto& name : index_->facet_names()) {
            const auto origin = index_->schema().known_facets.find(name);
            facets.push_back({{"name", name},
                              {"origin", origin != index_->schema().known_facets.end() &&
                                                 origin->second == FacetOrigin::record_field
                                             ? "record_field"
                                             : "tag_prefix"},
                              {"distinct_values", index_->postings(name).size()},
                              {"missing", index_->missing(name).size()}});
        }
        return ok({{"facets", facets}});
    }

    if (parts.size() == 3 && parts[0] == "facets" && parts[2] == "values") {
        if (method != "POST")
            return method_not_allowed();
        const json request = parse_body(body);
        const FilterSpec filter = filter_from_json(request.value("filter", json(nullptr)), config_.default_mode);
        const std::string facet(parts[1]);
        return ok({{"facet", facet}, {"filter", to_json(filter)}, {"values", counts_to_json(index_->facet_values(facet, filter))}});
    }

    if (parts.size() == 1 && parts[0] == "network") {
        if (method != "POST")
            return method_not_allowed();
        const json request = parse_body(body);
        const FilterSpec filter = filter_from_json(request.value("filter", json(nullptr)), config_.default_mode);
        if (!request.contains("topology"))
            throw Error(Errc::invalid_argument, "request lacks 'topology'");
        const TopologySpec topology = topology_from_json(request.at("topology"));
        const std::string format_name = request.value("format", std::string("json"));
        const auto format = parse_export_format(format_name);
        if (!format)
            throw Error(Errc::unsupported_format, "unsupported format '" + format_name + "'");
        const Network network = build_network(*index_, filter, topology, config_.limits);
        if (*format == ExportFormat::graphml)
            return {200, export_network(network, ExportFormat::graphml), "application/graphml+xml"};
        return ok(network_to_json(network));
    }

    if (!parts.empty() && parts[0] == "sessions") {
        if (parts.size() == 1) {
            if (method != "POST")
                return method_not_allowed();
            const json request = parse_body(body);
            const FilterSpec filter = filter_from_json(request.value("filter", json(nullptr)), config_.default_mode);
            if (!request.contains("topology"))
                throw Error(Errc::invalid_argument, "request lacks 'topology'");
            const TopologySpec topology = topology_from_json(request.at("topology"));
            const std::string id = sessions_.create(index_, filter, topology, explorer_options_);
            return sessions_.with_session(id, [&](ExplorationSession& s) {
                return ok({{"session_id", s.id()},
                           {"created_at", format_rfc3339(s.created_at())},
                           {"root", view_to_json(s.root())}},
                          201);
            });
        }
        const std::string session_id(parts[1]);
        if (parts.size() == 2) {
            if (method == "DELETE") {
                if (!sessions_.erase(session_id))
                    throw Error(Errc::not_found, "no session '" + session_id + "'");
                return ok({{"deleted", session_id}});
            }
            if (method != "GET")
                return method_not_allowed();
            return sessions_.with_session(session_id, [&](ExplorationSession& s) {
                json views = json::array();
                for (const auto& [id, view] : s.views())
                    views.push_back(view_to_json(view));
                return ok({{"session_id", s.id()}, {"created_at", format_rfc3339(s.created_at())}, {"views", views}});
            });
        }
        if (parts.size() == 3 && parts[2] == "views") {
            if (method != "POST")
                return method_not_allowed();
            const json request = parse_body(body);
            const auto kind_name = request.value("kind", std::string());
            const auto kind = parse_view_kind(kind_name);
            if (!kind)
                throw Error(Errc::invalid_argument, "unknown view kind '" + kind_name + "'");
            const auto parent = request.value("parent", std::string());
            const Selection selection = selection_from_json(request.value("selection", json::object()));
            return sessions_.with_session(session_id, [&](ExplorationSession& s) {
                return ok(view_to_json(s.spawn(*kind, parent, selection)), 201);
            });
        }
        if (parts.size() == 4 && parts[2] == "views") {
            if (method != "DELETE")
                return method_not_allowed();
            const std::string view_id(parts[3]);
            return sessions_.with_session(session_id, [&](ExplorationSession& s) {
                return ok({{"removed", s.close_view(view_id)}});
            });
        }
    }
    return error_response(404, "not_found", "no route for " + std::string(path));
}

Server::Server(ServiceConfig config) : config_(std::move(config)) {
    config_.validate();
    auto index = std::make_shared<const FacetIndex>(load_snapshot(config_.snapshot_path));
    spdlog::info("loaded snapshot {} ({} records, source '{}')", config_.snapshot_path.string(), index->size(),
                 index->source_label());
    api_ = std::make_unique<Api>(std::move(index), config_);
    http_ = std::make_unique<httplib::Server>();

    auto dispatch = [this](const httplib::Request& req, httplib::Response& res) {
        const auto start = std::chrono::steady_clock::now();
        const ApiResponse response = api_->handle(req.method, req.path, req.body);
        res.status = response.status;
        res.set_content(response.body, response.content_type);
        const auto elapsed = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start);
        spdlog::info("{} {} -> {} ({:.1f} ms)", req.method, req.path, response.status, elapsed.count());
    };
    http_->Get(R"(/.*)", dispatch);
    http_->Post(R"(/.*)", dispatch);
    http_->Delete(R"(/.*)", dispatch);
}

Server::~Server() = default;

int Server::bind() {
    int port = config_.port;
    if (port == 0) {
        port = http_->bind_to_any_port(config_.host);
    } else if (!http_->bind_to_port(config_.host, port)) {
        port = -1;
    }
    if (port < 0)
        throw Error(Errc::io_error, "cannot bind " + config_.host + ":" + std::to_string(config_.port));
    spdlog::info("listening on {}:{}", config_.host, port);
    return port;
}

void Server::run() {
    http_->listen_after_bind();
}

void Server::stop() {
    http_->stop();
}

} // namespace facetnet
