#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace facetnet {

/// Record-identity facet; every record holds exactly its own id here.
inline constexpr std::string_view kDatasetFacet = "dataset";
/// Default home for tags without a "facet:" prefix.
inline constexpr std::string_view kFallbackFacet = "tag";
/// Pseudo-value reported for records lacking a facet.
inline constexpr std::string_view kMissingValue = "(missing)";

/// Raw dataset card as delivered by a dump file or the hub API.
struct RawCard {
    std::string id;
    std::optional<std::string> author;
    std::optional<std::string> created_at;
    std::optional<std::string> last_modified;
    std::optional<std::int64_t> downloads;
    std::optional<std::int64_t> likes;
    std::optional<std::string> paperswithcode_id;
    std::vector<std::string> tags;
    std::optional<std::string> description;

    bool operator==(const RawCard&) const = default;
};

using ScalarValue = std::variant<std::int64_t, std::string>;
using ValueSet = std::set<std::string, std::less<>>;
using FacetMap = std::map<std::string, ValueSet, std::less<>>;

/// Normalized catalog entry. Facet value sets are never empty: an absent
/// facet has no key.
struct DatasetRecord {
    std::string id;
    std::map<std::string, ScalarValue, std::less<>> scalars;
    FacetMap facets;
    std::string description;

    /// nullptr when the record lacks the facet.
    const ValueSet* facet(std::string_view name) const;
    bool has_value(std::string_view facet_name, std::string_view value) const;

    std::optional<std::string> scalar_string(std::string_view name) const;
    /// Absent counts as 0; only meant for sorting.
    std::int64_t scalar_count(std::string_view name) const;

    bool operator==(const DatasetRecord&) const = default;
};

enum class FacetOrigin { tag_prefix, record_field };

struct FacetSchema {
    std::map<std::string, FacetOrigin, std::less<>> known_facets;
    bool open_schema = true;
    std::string fallback_facet{kFallbackFacet};

    /// Reserved "dataset" facet, the fallback facet, and every tag prefix used
    /// by hub dataset cards.
    static FacetSchema defaults();

    bool knows(std::string_view facet) const { return known_facets.contains(facet); }
    std::vector<std::string> facet_names() const;

    bool operator==(const FacetSchema&) const = default;
};

struct CatalogSnapshot {
    std::vector<DatasetRecord> records;
    FacetSchema schema;
    std::string source_label;
    std::string built_at;

    bool operator==(const CatalogSnapshot&) const = default;
};

} // namespace facetnet
