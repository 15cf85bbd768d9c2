#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "facetnet/error.hpp"
#include "facetnet/hub_client.hpp"

#include "httplib.h"
#include "json.hpp"

#include <atomic>
#include <thread>

using namespace facetnet;
using nlohmann::json;

namespace {

/// Serves `count` cards at /api/datasets with limit/offset paging.
class FixtureHub {
public:
    explicit FixtureHub(int count) : count_(count) {
        server_.Get("/api/datasets", [this](const httplib::Request& req, httplib::Response& res) {
            ++requests_;
            if (req.has_header("Authorization"))
                last_auth_ = req.get_header_value("Authorization");
            if (failures_left_ > 0) {
                --failures_left_;
                res.status = 503;
                return;
            }
            if (always_status_ != 0) {
                res.status = always_status_;
                return;
            }
            const int limit = req.has_param("limit") ? std::stoi(req.get_param_value("limit")) : 100;
            int offset = req.has_param("offset") ? std::stoi(req.get_param_value("offset")) : 0;
            if (req.has_param("cursor"))
                offset = std::stoi(req.get_param_value("cursor"));
            json page = json::array();
            for (int i = offset; i < std::min(count_, offset + limit); ++i) {
                page.push_back({{"id", "hub/ds-" + std::to_string(100 + i)},
                                {"createdAt", "2023-01-01T00:00:00.000Z"},
                                {"downloads", i},
                                {"tags", {"modality:text", "license:mit"}}});
            }
            if (use_cursor_ && offset + limit < count_) {
                res.set_header("Link", "</api/datasets?limit=" + std::to_string(limit) +
                                           "&cursor=" + std::to_string(offset + limit) + ">; rel=\"next\"");
            }
            res.set_content(page.dump(), "application/json");
        });
        port_ = server_.bind_to_any_port("127.0.0.1");
        thread_ = std::thread([this] { server_.listen_after_bind(); });
        server_.wait_until_ready();
    }

    ~FixtureHub() {
        server_.stop();
        thread_.join();
    }

    HubClientOptions options() const {
        HubClientOptions o;
        o.endpoint = "http://127.0.0.1:" + std::to_string(port_) + "/api/datasets";
        o.min_interval = std::chrono::milliseconds(0);
        o.retry_backoff = std::chrono::milliseconds(1);
        o.token_env.clear();
        return o;
    }

    std::atomic<int> requests_{0};
    std::atomic<int> failures_left_{0};
    std::atomic<int> always_status_{0};
    bool use_cursor_ = false;
    std::string last_auth_;

private:
    int count_;
    int port_ = 0;
    httplib::Server server_;
    std::thread thread_;
};

} // namespace

TEST_CASE("max_records caps the fetch") {
    FixtureHub hub(12);
    auto options = hub.options();
    options.max_records = 5;
    options.page_size = 2;
    const auto batch = fetch_catalog(options);
    CHECK(batch.cards.size() == 5);
    CHECK(batch.issues.empty());
    CHECK(batch.cards.front().id == "hub/ds-100");
    CHECK(batch.cards.back().id == "hub/ds-104");
    CHECK(batch.cards.front().created_at == "2023-01-01T00:00:00.000Z");
    CHECK(hub.requests_ == 3);
}

TEST_CASE("paging runs to exhaustion in source order") {
    FixtureHub hub(12);
    auto options = hub.options();
    options.page_size = 5;
    const auto batch = fetch_catalog(options);
    REQUIRE(batch.cards.size() == 12);
    for (int i = 0; i < 12; ++i)
        CHECK(batch.cards[i].id == "hub/ds-" + std::to_string(100 + i));
    CHECK(hub.requests_ == 3); // 5 + 5 + 2 (short page ends it)
}

TEST_CASE("exact multiple of the page size needs one empty page") {
    FixtureHub hub(10);
    auto options = hub.options();
    options.page_size = 5;
    CHECK(fetch_catalog(options).cards.size() == 10);
    CHECK(hub.requests_ == 3);
}

TEST_CASE("cursor pagination follows Link rel=next") {
    FixtureHub hub(12);
    hub.use_cursor_ = true;
    auto options = hub.options();
    options.page_size = 4;
    const auto batch = fetch_catalog(options);
    CHECK(batch.cards.size() == 12);
    CHECK(batch.cards.back().id == "hub/ds-111");
}

TEST_CASE("transient failures are retried") {
    FixtureHub hub(3);
    hub.failures_left_ = 2;
    auto options = hub.options();
    options.max_retries = 3;
    CHECK(fetch_catalog(options).cards.size() == 3);
    CHECK(hub.requests_ == 3);
}

TEST_CASE("persistent failure reports the page after bounded retries") {
    FixtureHub hub(3);
    hub.always_status_ = 500;
    auto options = hub.options();
    options.max_retries = 2;
    try {
        fetch_catalog(options);
        FAIL("expected http_error");
    } catch (const Error& e) {
        CHECK(e.code() == Errc::http_error);
        CHECK(std::string(e.what()).find("page 1") != std::string::npos);
        CHECK(std::string(e.what()).find("HTTP 500") != std::string::npos);
    }
    CHECK(hub.requests_ == 3);
}

TEST_CASE("client errors are not retried") {
    FixtureHub hub(3);
    hub.always_status_ = 404;
    auto options = hub.options();
    CHECK_THROWS_AS(fetch_catalog(options), Error);
    CHECK(hub.requests_ == 1);
}

TEST_CASE("bearer token comes from options or the environment") {
    FixtureHub hub(1);
    auto options = hub.options();
    options.auth_token = "secret";
    fetch_catalog(options);
    CHECK(hub.last_auth_ == "Bearer secret");

    options.auth_token.reset();
    options.token_env = "FACETNET_TEST_TOKEN";
    ::setenv("FACETNET_TEST_TOKEN", "from-env", 1);
    fetch_catalog(options);
    CHECK(hub.last_auth_ == "Bearer from-env");
    ::unsetenv("FACETNET_TEST_TOKEN");
}

TEST_CASE("requests are spaced by the minimum interval") {
    FixtureHub hub(6);
    auto options = hub.options();
    options.page_size = 2;
    options.min_interval = std::chrono::milliseconds(40);
    const auto start = std::chrono::steady_clock::now();
    fetch_catalog(options);
    const auto elapsed = std::chrono::steady_clock::now() - start;
    CHECK(hub.requests_ == 4);
    CHECK(elapsed >= std::chrono::milliseconds(120));
}

TEST_CASE("argument validation") {
    HubClientOptions options;
    options.endpoint = "ftp://nope";
    CHECK_THROWS_AS(fetch_catalog(options), Error);
    options.endpoint = "http://127.0.0.1:1/x";
    options.page_size = 0;
    CHECK_THROWS_AS(fetch_catalog(options), Error);
}
