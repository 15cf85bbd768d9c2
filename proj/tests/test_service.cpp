#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "fixtures.hpp"

#include "facetnet/error.hpp"
#include "facetnet/json_codec.hpp"
#include "facetnet/network_io.hpp"
#include "facetnet/service.hpp"
#include "facetnet/snapshot.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdlib>
#include <fstream>
#include <future>
#include <thread>

using namespace facetnet;
using namespace facetnet::testing;
using nlohmann::json;

namespace {

struct TempDir {
    std::filesystem::path path;
    TempDir() {
        path = std::filesystem::temp_directory_path() / ("facetnet-service-" + new_session_id().substr(0, 12));
        std::filesystem::create_directories(path);
    }
    ~TempDir() { std::filesystem::remove_all(path); }
};

Api f3_api(ServiceConfig config = {}) { return Api(f3_index(), std::move(config)); }

json body_of(const ApiResponse& r) { return json::parse(r.body); }

const json kTaskTopology = {{"source", "task_categories"}, {"target", "task_categories"}, {"link", "dataset"},
                            {"thematic", "license"}};

void check_error(const ApiResponse& r, int status, const std::string& code) {
    CHECK(r.status == status);
    const auto body = body_of(r);
    REQUIRE(body.contains("error"));
    CHECK(body["error"]["code"] == code);
    CHECK(body["error"]["message"].is_string());
}

} // namespace

TEST_CASE("health and facets") {
    auto api = f3_api();
    const auto health = api.handle("GET", "/api/v1/health", "");
    CHECK(health.status == 200);
    CHECK(body_of(health)["records"] == 3);
    CHECK(body_of(health)["status"] == "ok");

    const auto facets = body_of(api.handle("GET", "/api/v1/facets", ""))["facets"];
    bool saw_modality = false;
    for (const auto& f : facets) {
        if (f["name"] == "modality") {
            saw_modality = true;
            CHECK(f["distinct_values"] == 3);
            CHECK(f["missing"] == 0);
            CHECK(f["origin"] == "tag_prefix");
        }
        if (f["name"] == "dataset")
            CHECK(f["origin"] == "record_field");
    }
    CHECK(saw_modality);
}

TEST_CASE("facet values endpoint") {
    auto api = f3_api();
    const auto r = api.handle("POST", "/api/v1/facets/modality/values",
                              R"({"filter":{"clauses":{"task_categories":["qa"]}}})");
    REQUIRE(r.status == 200);
    CHECK(body_of(r)["values"] == json::parse(R"([{"value":"text","count":2},{"value":"tabular","count":1}])"));
    check_error(api.handle("POST", "/api/v1/facets/colour/values", "{}"), 400, "unknown_facet");
    check_error(api.handle("POST", "/api/v1/facets/modality/values", R"({"filter":{"clauses":{"modality":[]}}})"), 400,
                "invalid_argument");
    check_error(api.handle("POST", "/api/v1/facets/modality/values", "{not json"), 400, "parse_error");
    check_error(api.handle("GET", "/api/v1/facets/modality/values", ""), 405, "method_not_allowed");
}

TEST_CASE("network endpoint") {
    auto api = f3_api();
    const json request = {{"topology", kTaskTopology}};
    const auto r = api.handle("POST", "/api/v1/network", request.dump());
    REQUIRE(r.status == 200);
    const auto expected = build_network(*f3_index(), {}, topology_from_json(kTaskTopology));
    CHECK(network_from_json(body_of(r)) == expected);

    json graphml = request;
    graphml["format"] = "graphml";
    const auto g = api.handle("POST", "/api/v1/network", graphml.dump());
    CHECK(g.status == 200);
    CHECK(g.content_type == "application/graphml+xml");
    CHECK(import_network(g.body, ExportFormat::graphml) == expected);

    json bad_format = request;
    bad_format["format"] = "gexf";
    check_error(api.handle("POST", "/api/v1/network", bad_format.dump()), 400, "unsupported_format");
    check_error(api.handle("POST", "/api/v1/network", "{}"), 400, "invalid_argument");
    check_error(api.handle("POST", "/api/v1/network",
                           R"({"topology":{"source":"dataset","target":"modality","link":"modality"}})"),
                400, "invalid_topology");
}

TEST_CASE("session lifecycle") {
    auto api = f3_api();
    const auto created = api.handle("POST", "/api/v1/sessions", json{{"topology", kTaskTopology}}.dump());
    REQUIRE(created.status == 201);
    const auto body = body_of(created);
    const std::string id = body["session_id"];
    const std::string root = body["root"]["id"];
    CHECK(body["root"]["kind"] == "graph");
    CHECK(body["root"]["parent"].is_null());
    const std::string base = "/api/v1/sessions/" + id;

    const auto ego = api.handle("POST", base + "/views",
                                json{{"parent", root}, {"kind", "egocentric"}, {"selection", {{"type", "node"}, {"node", "qa"}}}}.dump());
    REQUIRE(ego.status == 201);
    const auto ego_body = body_of(ego);
    CHECK(ego_body["payload"]["bars"] ==
          json::parse(R"([{"neighbor":"summarization","bar_total":1,"segments":[{"value":"apache-2.0","count":1}]}])"));

    const auto listing = api.handle(
        "POST", base + "/views",
        json{{"parent", ego_body["id"]}, {"kind", "listing"},
             {"selection", {{"type", "pair"}, {"center", "qa"}, {"neighbor", "summarization"}}}}
            .dump());
    REQUIRE(listing.status == 201);
    CHECK(body_of(listing)["payload"]["rows"][0]["url"] == "https://huggingface.co/datasets/B");

    check_error(api.handle("POST", base + "/views",
                           json{{"parent", root}, {"kind", "listing"}, {"selection", {{"type", "item"}, {"link_value", "B"}}}}.dump()),
                400, "invalid_selection");
    check_error(api.handle("POST", base + "/views", json{{"parent", root}, {"kind", "pie"}}.dump()), 400,
                "invalid_argument");

    CHECK(body_of(api.handle("GET", base, ""))["views"].size() == 3);
    const auto removed = api.handle("DELETE", base + "/views/" + std::string(ego_body["id"]), "");
    CHECK(body_of(removed)["removed"].size() == 2);
    check_error(api.handle("DELETE", base + "/views/" + root, ""), 400, "invalid_argument");

    CHECK(api.handle("DELETE", base, "").status == 200);
    check_error(api.handle("GET", base, ""), 404, "not_found");
    check_error(api.handle("DELETE", base, ""), 404, "not_found");
}

TEST_CASE("records and unknown routes") {
    auto api = Api(sample_index(), ServiceConfig{});
    const auto r = api.handle("GET", "/api/v1/records/rajpurkar/squad", "");
    REQUIRE(r.status == 200);
    CHECK(body_of(r)["id"] == "rajpurkar/squad");
    CHECK(body_of(r)["url"] == "https://huggingface.co/datasets/rajpurkar/squad");
    check_error(api.handle("GET", "/api/v1/records/nobody/nothing", ""), 404, "not_found");
    check_error(api.handle("POST", "/api/v1/records/rajpurkar/squad", ""), 405, "method_not_allowed");
    check_error(api.handle("GET", "/api/v2/health", ""), 404, "not_found");
    check_error(api.handle("GET", "/api/v1/teapot", ""), 404, "not_found");
    check_error(api.handle("POST", "/api/v1/health", ""), 405, "method_not_allowed");
}

TEST_CASE("default within-facet mode comes from the config") {
    ServiceConfig config;
    config.default_mode = MatchMode::all;
    auto api = f3_api(config);
    const auto r = api.handle("POST", "/api/v1/facets/license/values",
                              R"({"filter":{"clauses":{"modality":["text","tabular"]}}})");
    CHECK(body_of(r)["values"] == json::parse(R"([{"value":"mit","count":1}])"));
}

TEST_CASE("config validation, file loading and environment overrides") {
    ServiceConfig config;
    CHECK_NOTHROW(config.validate());
    config.limits.max_nodes = 0;
    CHECK_THROWS_AS(config.validate(), Error);
    config = {};
    config.url_templates["model"] = "https://example.org/";
    CHECK_THROWS_AS(config.validate(), Error);
    config = {};
    config.session_cap = 0;
    CHECK_THROWS_AS(config.validate(), Error);

    TempDir dir;
    const auto path = dir.path / "config.json";
    std::ofstream(path) << R"({"snapshot": "f3.snap", "port": 9001, "session_cap": 5, "max_edges": 50,
                               "within_facet_mode": "and", "url_templates": {"model": "https://m.example/{id}"}})";
    auto loaded = load_config(path);
    CHECK(loaded.snapshot_path == dir.path / "f3.snap");
    CHECK(loaded.port == 9001);
    CHECK(loaded.session_cap == 5);
    CHECK(loaded.limits.max_edges == 50);
    CHECK(loaded.default_mode == MatchMode::all);
    CHECK(loaded.url_templates.at("model") == "https://m.example/{id}");
    CHECK(loaded.url_templates.at("dataset") == "https://huggingface.co/datasets/{id}");

    ::setenv("FACETNET_PORT", "9100", 1);
    ::setenv("FACETNET_MAX_NODES", "12", 1);
    ::setenv("FACETNET_FILTER_MODE", "or", 1);
    apply_env_overrides(loaded);
    CHECK(loaded.port == 9100);
    CHECK(loaded.limits.max_nodes == 12);
    CHECK(loaded.default_mode == MatchMode::any);
    ::setenv("FACETNET_PORT", "eighty", 1);
    CHECK_THROWS_AS(apply_env_overrides(loaded), Error);
    ::unsetenv("FACETNET_PORT");
    ::unsetenv("FACETNET_MAX_NODES");
    ::unsetenv("FACETNET_FILTER_MODE");

    std::ofstream(dir.path / "broken.json") << "{";
    CHECK_THROWS_AS(load_config(dir.path / "broken.json"), Error);
    CHECK_THROWS_AS(load_config(dir.path / "absent.json"), Error);
}

TEST_CASE("server refuses to start without a snapshot") {
    ServiceConfig config;
    config.snapshot_path = "/nonexistent/f3.snap";
    CHECK_THROWS_AS(Server{config}, Error);
}

TEST_CASE("HTTP server answers concurrent identical requests identically") {
    TempDir dir;
    save_snapshot(fixture_snapshot("f3.jsonl"), dir.path / "f3.snap");
    ServiceConfig config;
    config.snapshot_path = dir.path / "f3.snap";
    config.port = 0;
    Server server(config);
    const int port = server.bind();
    REQUIRE(port > 0);
    std::thread runner([&] { server.run(); });

    httplib::Client client("127.0.0.1", port);
    const auto health = client.Get("/api/v1/health");
    REQUIRE(health);
    CHECK(health->status == 200);
    CHECK(json::parse(health->body)["records"] == 3);

    const std::string request = json{{"topology", kTaskTopology}}.dump();
    std::vector<std::future<std::string>> replies;
    for (int i = 0; i < 8; ++i) {
        replies.push_back(std::async(std::launch::async, [&] {
            httplib::Client c("127.0.0.1", port);
            const auto r = c.Post("/api/v1/network", request, "application/json");
            return r && r->status == 200 ? r->body : std::string("failed");
        }));
    }
    std::vector<std::string> bodies;
    for (auto& f : replies)
        bodies.push_back(f.get());
    for (const auto& b : bodies) {
        CHECK(b != "failed");
        CHECK(b == bodies.front());
    }

    const auto missing = client.Get("/api/v1/records/nope");
    REQUIRE(missing);
    CHECK(missing->status == 404);
    CHECK(json::parse(missing->body)["error"]["code"] == "not_found");

    server.stop();
    runner.join();
}
