#include "facetnet/ingest.hpp"

#include "facetnet/error.hpp"
#include "facetnet/timestamp.hpp"

#include "json.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>
#include <unordered_map>

namespace facetnet {

using nlohmann::json;

ParsedTag parse_tag(std::string_view tag, const FacetSchema& schema) {
    if (tag.empty())
        throw Error(Errc::parse_error, "empty tag");
    const auto sep = tag.find(':');
    if (sep == std::string_view::npos)
        return {schema.fallback_facet, std::string(tag)};
    if (sep == 0)
        throw Error(Errc::parse_error, "tag '" + std::string(tag) + "' has an empty facet name");

    ParsedTag parsed{std::string(tag.substr(0, sep)), std::string(tag.substr(sep + 1))};
    if (parsed.facet == kDatasetFacet)
        throw Error(Errc::unknown_facet, "tag '" + std::string(tag) + "' targets the reserved facet 'dataset'");
    if (!schema.open_schema && !schema.knows(parsed.facet))
        throw Error(Errc::unknown_facet, "unknown facet '" + parsed.facet + "' in tag '" + std::string(tag) + "'");
    return parsed;
}

NormalizedCard normalize_record(const RawCard& card, const FacetSchema& schema) {
    if (card.id.empty())
        throw Error(Errc::invalid_argument, "card has an empty id");

    NormalizedCard out;
    DatasetRecord& record = out.record;
    record.id = card.id;
    if (card.author)
        record.scalars.emplace("author", *card.author);
    if (card.created_at)
        record.scalars.emplace("created_at", *card.created_at);
    if (card.last_modified)
        record.scalars.emplace("last_modified", *card.last_modified);
    if (card.downloads)
        record.scalars.emplace("downloads", *card.downloads);
    if (card.likes)
        record.scalars.emplace("likes", *card.likes);
    if (card.paperswithcode_id)
        record.scalars.emplace("paperswithcode_id", *card.paperswithcode_id);
    record.description = card.description.value_or("");

    for (const auto& tag : card.tags) {
        try {
            auto parsed = parse_tag(tag, schema);
            record.facets[parsed.facet].insert(std::move(parsed.value));
            ++out.parsed_tags;
        } catch (const Error&) {
            out.skipped_tags.push_back(tag);
        }
    }
    record.facets[std::string(kDatasetFacet)] = ValueSet{card.id};
    return out;
}

RawCard to_raw_card(const DatasetRecord& record) {
    RawCard card;
    card.id = record.id;
    card.author = record.scalar_string("author");
    card.created_at = record.scalar_string("created_at");
    card.last_modified = record.scalar_string("last_modified");
    card.paperswithcode_id = record.scalar_string("paperswithcode_id");
    if (const auto it = record.scalars.find("downloads"); it != record.scalars.end())
        card.downloads = record.scalar_count("downloads");
    if (const auto it = record.scalars.find("likes"); it != record.scalars.end())
        card.likes = record.scalar_count("likes");
    if (!record.description.empty())
        card.description = record.description;
    for (const auto& [facet, values] : record.facets) {
        if (facet == kDatasetFacet)
            continue;
        for (const auto& value : values)
            card.tags.push_back(facet + ":" + value);
    }
    return card;
}

namespace {

std::optional<std::string> optional_string(const json& obj, std::initializer_list<const char*> keys) {
    for (const char* key : keys) {
        const auto it = obj.find(key);
        if (it == obj.end() || it->is_null())
            continue;
        if (!it->is_string())
            throw Error(Errc::parse_error, std::string("field '") + key + "' must be a string");
        return it->get<std::string>();
    }
    return std::nullopt;
}

std::optional<std::string> optional_timestamp(const json& obj, std::initializer_list<const char*> keys) {
    auto value = optional_string(obj, keys);
    if (value && !parse_rfc3339(*value))
        throw Error(Errc::parse_error, "invalid RFC3339 timestamp '" + *value + "'");
    return value;
}

std::optional<std::int64_t> optional_count(const json& obj, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end() || it->is_null())
        return std::nullopt;
    if (!it->is_number_integer() || it->get<std::int64_t>() < 0)
        throw Error(Errc::parse_error, std::string("field '") + key + "' must be a non-negative integer");
    return it->get<std::int64_t>();
}

RawCard card_from_json(const json& obj) {
    if (!obj.is_object())
        throw Error(Errc::parse_error, "card is not a JSON object");
    RawCard card;
    const auto id = optional_string(obj, {"id"});
    if (!id || id->empty())
        throw Error(Errc::parse_error, "card has no id");
    card.id = *id;
    card.author = optional_string(obj, {"author"});
    card.created_at = optional_timestamp(obj, {"created_at", "createdAt"});
    card.last_modified = optional_timestamp(obj, {"last_modified", "lastModified"});
    card.downloads = optional_count(obj, "downloads");
    card.likes = optional_count(obj, "likes");
    card.paperswithcode_id = optional_string(obj, {"paperswithcode_id"});
    card.description = optional_string(obj, {"description"});
    if (const auto it = obj.find("tags"); it != obj.end() && !it->is_null()) {
        if (!it->is_array())
            throw Error(Errc::parse_error, "field 'tags' must be an array");
        for (const auto& tag : *it) {
            if (!tag.is_string())
                throw Error(Errc::parse_error, "tags must be strings");
            card.tags.push_back(tag.get<std::string>());
        }
    }
    return card;
}

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos)
        return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

} // namespace

RawCard card_from_json_text(std::string_view json_text) {
    json obj;
    try {
        obj = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(Errc::parse_error, std::string("malformed JSON: ") + e.what());
    }
    return card_from_json(obj);
}

void dedupe_keep_last(CardBatch& batch, std::string_view origin) {
    std::unordered_map<std::string, std::size_t> last;
    for (std::size_t i = 0; i < batch.cards.size(); ++i)
        last[batch.cards[i].id] = i;
    if (last.size() == batch.cards.size())
        return;
    std::vector<RawCard> kept;
    kept.reserve(last.size());
    for (std::size_t i = 0; i < batch.cards.size(); ++i) {
        if (last[batch.cards[i].id] == i) {
            kept.push_back(std::move(batch.cards[i]));
        } else {
            batch.issues.push_back({std::string(origin), "duplicate id '" + batch.cards[i].id +
                                                             "'; earlier occurrence replaced"});
        }
    }
    batch.cards = std::move(kept);
}

CardBatch parse_cards(std::string_view text, std::string_view origin) {
    CardBatch batch;
    const auto body = trim(text);
    if (!body.empty() && body.front() == '[') {
        json doc;
        try {
            doc = json::parse(body);
        } catch (const json::exception& e) {
            throw Error(Errc::parse_error, std::string(origin) + ": malformed JSON array: " + e.what());
        }
        for (std::size_t i = 0; i < doc.size(); ++i) {
            try {
                batch.cards.push_back(card_from_json(doc[i]));
            } catch (const Error& e) {
                batch.issues.push_back({std::string(origin) + " element " + std::to_string(i + 1), e.what()});
            }
        }
    } else if (json whole = json::parse(body, nullptr, false); !whole.is_discarded() && whole.is_object()) {
        // A single (possibly pretty-printed) card document.
        try {
            batch.cards.push_back(card_from_json(whole));
        } catch (const Error& e) {
            batch.issues.push_back({std::string(origin), e.what()});
        }
    } else {
        std::size_t line_no = 0;
        std::size_t start = 0;
        while (start <= text.size()) {
            const auto end = std::min(text.find('\n', start), text.size());
            ++line_no;
            const auto line = trim(text.substr(start, end - start));
            if (!line.empty()) {
                try {
                    batch.cards.push_back(card_from_json_text(line));
                } catch (const Error& e) {
                    batch.issues.push_back({std::string(origin) + " line " + std::to_string(line_no), e.what()});
                }
            }
            start = end + 1;
        }
    }
    dedupe_keep_last(batch, origin);
    return batch;
}

CardBatch load_catalog(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io_error, "cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    if (in.bad())
        throw Error(Errc::io_error, "read failure on '" + path.string() + "'");
    return parse_cards(buffer.str(), path.filename().string());
}

CatalogSnapshot build_snapshot(std::span<const RawCard> cards, FacetSchema schema, std::string source_label,
                               std::string built_at, IngestReport* report) {
    CatalogSnapshot snapshot;
    snapshot.records.reserve(cards.size());
    for (const auto& card : cards) {
        auto normalized = normalize_record(card, schema);
        if (report) {
            ++report->cards;
            report->parsed_tags += normalized.parsed_tags;
            for (auto& tag : normalized.skipped_tags)
                report->skipped_tags.push_back({card.id, "skipped tag '" + tag + "'"});
        }
        for (const auto& [facet, values] : normalized.record.facets) {
            if (!schema.knows(facet))
                schema.known_facets.emplace(facet, FacetOrigin::tag_prefix);
        }
        snapshot.records.push_back(std::move(normalized.record));
    }
    std::sort(snapshot.records.begin(), snapshot.records.end(),
              [](const DatasetRecord& a, const DatasetRecord& b) { return a.id < b.id; });
    const auto dup = std::adjacent_find(snapshot.records.begin(), snapshot.records.end(),
                                        [](const auto& a, const auto& b) { return a.id == b.id; });
    if (dup != snapshot.records.end())
        throw Error(Errc::invalid_argument, "duplicate record id '" + dup->id + "'");
    snapshot.schema = std::move(schema);
    snapshot.source_label = std::move(source_label);
    snapshot.built_at = std::move(built_at);
    return snapshot;
}

} // namespace facetnet
