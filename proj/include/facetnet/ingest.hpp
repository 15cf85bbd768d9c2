#pragma once

#include "facetnet/record.hpp"

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace facetnet {

struct ParsedTag {
    std::string facet;
    std::string value;

    bool operator==(const ParsedTag&) const = default;
};

/// Splits on the first ':' only; everything after it is the value, verbatim.
/// Tags without ':' land in schema.fallback_facet. Throws Error(parse_error)
/// for an empty tag or empty facet name, Error(unknown_facet) for an unknown
/// prefix under a closed schema or for the reserved "dataset" facet.
ParsedTag parse_tag(std::string_view tag, const FacetSchema& schema);

struct NormalizedCard {
    DatasetRecord record;
    std::size_t parsed_tags = 0;
    std::vector<std::string> skipped_tags;
};

/// Tag failures are collected in skipped_tags, never thrown.
/// Throws Error(invalid_argument) only for an empty card id.
NormalizedCard normalize_record(const RawCard& card, const FacetSchema& schema);

/// Inverse view of a record as a card (tags in facet/value order).
RawCard to_raw_card(const DatasetRecord& record);

struct LoadIssue {
    std::string location; // "cards.jsonl line 4", "page 2 element 7"
    std::string message;
};

struct CardBatch {
    std::vector<RawCard> cards;
    std::vector<LoadIssue> issues;
};

/// Decodes one card object. Accepts the dump field names and the hub API's
/// camelCase spellings (createdAt, lastModified). Throws Error(parse_error).
RawCard card_from_json_text(std::string_view json_text);

/// Array-form ("[...]"), a single card object, or newline-delimited JSON. A malformed array document
/// throws; individual bad cards are skipped and reported. Duplicate ids keep
/// the last occurrence, at its own position.
CardBatch parse_cards(std::string_view text, std::string_view origin);

/// Throws Error(io_error) when the file cannot be read.
CardBatch load_catalog(const std::filesystem::path& path);

/// Removes earlier duplicates of an id, reporting each as an issue.
void dedupe_keep_last(CardBatch& batch, std::string_view origin);

struct IngestReport {
    std::size_t cards = 0;
    std::size_t parsed_tags = 0;
    std::vector<LoadIssue> skipped_tags;
};

/// Normalizes every card and extends the schema with facets discovered under
/// an open schema. Records come out sorted by id.
CatalogSnapshot build_snapshot(std::span<const RawCard> cards, FacetSchema schema, std::string source_label,
                               std::string built_at, IngestReport* report = nullptr);

} // namespace facetnet
