#include "facetnet/hub_client.hpp"

#include "facetnet/error.hpp"

#include "httplib.h"
#include "json.hpp"

#include <cstdlib>
#include <regex>
#include <thread>

namespace facetnet {

namespace {

struct Url {
    std::string origin; // scheme://host[:port]
    std::string path;   // path + query
};

Url split_url(const std::string& url) {
    static const std::regex pattern(R"(^(https?://[^/?#]+)([^#]*)$)", std::regex::icase);
    std::smatch m;
    if (!std::regex_match(url, m, pattern))
        throw Error(Errc::invalid_argument, "endpoint '" + url + "' is not an http(s) URL");
    Url out{m[1].str(), m[2].str()};
    if (out.path.empty())
        out.path = "/";
    return out;
}

std::string with_query(std::string path, const std::string& key, std::size_t value) {
    path += path.find('?') == std::string::npos ? '?' : '&';
    return path + key + "=" + std::to_string(value);
}

std::optional<std::string> next_link(const httplib::Result& res) {
    if (!res->has_header("Link"))
        return std::nullopt;
    static const std::regex rel_next(R"(<([^>]+)>\s*;\s*rel="?next"?)");
    const auto header = res->get_header_value("Link");
    std::smatch m;
    if (std::regex_search(header, m, rel_next))
        return m[1].str();
    return std::nullopt;
}

class Pacer {
public:
    explicit Pacer(std::chrono::milliseconds interval) : interval_(interval) {}

    void wait() {
        const auto now = std::chrono::steady_clock::now();
        if (last_ && now - *last_ < interval_)
            std::this_thread::sleep_for(interval_ - (now - *last_));
        last_ = std::chrono::steady_clock::now();
    }

private:
    std::chrono::milliseconds interval_;
    std::optional<std::chrono::steady_clock::time_point> last_;
};

} // namespace

CardBatch fetch_catalog(const HubClientOptions& options) {
    if (options.page_size == 0)
        throw Error(Errc::invalid_argument, "page size must be positive");
    const Url base = split_url(options.endpoint);

    std::optional<std::string> token = options.auth_token;
    if (!token && !options.token_env.empty()) {
        if (const char* env = std::getenv(options.token_env.c_str()); env && *env)
            token = env;
    }

    CardBatch batch;
    Pacer pacer(options.min_interval);
    std::size_t offset = 0;
    std::size_t page = 0;
    std::optional<Url> cursor;

    while (batch.cards.size() < options.max_records) {
        ++page;
        const std::size_t want = std::min(options.page_size, options.max_records - batch.cards.size());
        const Url target = cursor ? *cursor : Url{base.origin, with_query(with_query(base.path, "limit", want), "offset", offset)};

        httplib::Client client(target.origin);
        client.set_follow_location(true);
        client.set_connection_timeout(options.timeout);
        client.set_read_timeout(options.timeout);
        if (token)
            client.set_bearer_token_auth(*token);

        httplib::Result res{nullptr, httplib::Error::Unknown};
        std::string failure;
        for (int attempt = 0; attempt <= options.max_retries; ++attempt) {
            if (attempt > 0)
                std::this_thread::sleep_for(options.retry_backoff * attempt);
            pacer.wait();
            res = client.Get(target.path);
            if (res && res->status >= 200 && res->status < 300)
                break;
            failure = res ? "HTTP " + std::to_string(res->status) : httplib::to_string(res.error());
            // Client errors other than throttling will not improve on retry.
            if (res && res->status >= 400 && res->status < 500 && res->status != 429)
                break;
        }
        if (!res || res->status < 200 || res->status >= 300)
            throw Error(Errc::http_error, "page " + std::to_string(page) + " (" + target.origin + target.path +
                                              "): " + failure + " after retries");

        nlohmann::json doc;
        try {
            doc = nlohmann::json::parse(res->body);
        } catch (const nlohmann::json::exception& e) {
            throw Error(Errc::parse_error, "page " + std::to_string(page) + ": malformed JSON: " + e.what());
        }
        if (!doc.is_array())
            throw Error(Errc::parse_error, "page " + std::to_string(page) + ": expected a JSON array of cards");

        std::size_t element = 0;
        for (const auto& item : doc) {
            ++element;
            if (batch.cards.size() >= options.max_records)
                break;
            try {
                batch.cards.push_back(card_from_json_text(item.dump()));
            } catch (const Error& e) {
                batch.issues.push_back({"page " + std::to_string(page) + " element " + std::to_string(element), e.what()});
            }
        }

        const auto next = next_link(res);
        if (next) {
            cursor = next->rfind("http", 0) == 0 ? split_url(*next) : Url{target.origin, *next};
        } else if (cursor || doc.size() < want) {
            break;
        }
        offset += doc.size();
        if (doc.empty())
            break;
    }
    dedupe_keep_last(batch, "fetch");
    return batch;
}

} // namespace facetnet
