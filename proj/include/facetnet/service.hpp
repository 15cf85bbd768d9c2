#pragma once

#include "facetnet/catalog.hpp"
#include "facetnet/explorer.hpp"
#include "facetnet/netbuilder.hpp"

#include "json.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <string>
#include <string_view>

namespace httplib {
class Server;
}

namespace facetnet {

struct ServiceConfig {
    std::filesystem::path snapshot_path;
    std::string host = "127.0.0.1";
    int port = 8080;
    /// Link facet -> URL template; "{id}" is replaced by the value.
    std::map<std::string, std::string, std::less<>> url_templates{
        {"dataset", "https://huggingface.co/datasets/{id}"},
        {"model", "https://huggingface.co/{id}"},
    };
    std::size_t session_cap = 64;
    BuildLimits limits;
    MatchMode default_mode = MatchMode::any;

    /// Throws Error(invalid_argument) for non-positive ceilings, caps or
    /// ports, or templates without exactly one "{id}".
    void validate() const;
};

/// Reads a JSON config file. Keys: snapshot, host, port, url_templates,
/// session_cap, max_nodes, max_edges, hide_isolated, within_facet_mode.
ServiceConfig load_config(const std::filesystem::path& path);

/// FACETNET_SNAPSHOT, FACETNET_HOST, FACETNET_PORT, FACETNET_SESSION_CAP,
/// FACETNET_MAX_NODES, FACETNET_MAX_EDGES, FACETNET_FILTER_MODE,
/// FACETNET_DATASET_URL, FACETNET_MODEL_URL.
void apply_env_overrides(ServiceConfig& config);

struct ApiResponse {
    int status = 200;
    std::string body;
    std::string content_type = "application/json";
};

/// Transport-independent handler for the /api/v1 routes:
///
///   GET    /api/v1/health
///   GET    /api/v1/facets
///   POST   /api/v1/facets/{name}/values        {filter}
///   POST   /api/v1/network                     {filter, topology, format?}
///   POST   /api/v1/sessions                    {filter, topology}
///   GET    /api/v1/sessions/{id}
///   POST   /api/v1/sessions/{id}/views         {parent, kind, selection}
///   DELETE /api/v1/sessions/{id}/views/{vid}
///   GET    /api/v1/records/{id}
///
/// Errors are {"error": {"code", "message"}} with a 4xx/5xx status.
class Api {
public:
    Api(std::shared_ptr<const FacetIndex> index, ServiceConfig config);

    ApiResponse handle(std::string_view method, std::string_view path, std::string_view body);

    const FacetIndex& index() const noexcept { return *index_; }
    const SessionStore& sessions() const noexcept { return sessions_; }

private:
    ApiResponse route(std::string_view method, std::string_view path, std::string_view body);

    std::shared_ptr<const FacetIndex> index_;
    ServiceConfig config_;
    ExplorerOptions explorer_options_;
    SessionStore sessions_;
};

class Server {
public:
    /// Loads the snapshot and builds the index. Throws on load failure.
    explicit Server(ServiceConfig config);
    ~Server();

    Server(const Server&) = delete;
    Server& operator=(const Server&) = delete;

    /// Binds host:port (port 0 picks a free port) and returns the bound port.
    /// Throws Error(io_error) on bind failure.
    int bind();
    /// Serves until stop(). Requires bind().
    void run();
    void stop();

    Api& api() noexcept { return *api_; }

private:
    ServiceConfig config_;
    std::unique_ptr<Api> api_;
    std::unique_ptr<httplib::Server> http_;
};

nlohmann::json view_to_json(const ViewNode& view);
nlohmann::json selection_to_json(const Selection& selection);
Selection selection_from_json(const nlohmann::json& j);

} // namespace facetnet
