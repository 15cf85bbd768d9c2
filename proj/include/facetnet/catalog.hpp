#pragma once

#include "facetnet/record.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace facetnet {

using Ordinal = std::uint32_t;
/// Sorted, duplicate-free.
using OrdinalSet = std::vector<Ordinal>;

enum class MatchMode {
    any, ///< OR within a facet
    all, ///< AND within a facet
};

/// Clauses are conjoined across facets. An empty clause map matches all.
struct FilterSpec {
    std::map<std::string, ValueSet, std::less<>> clauses;
    MatchMode within_facet_mode = MatchMode::any;

    FilterSpec& require(std::string facet, std::string value) {
        clauses[std::move(facet)].insert(std::move(value));
        return *this;
    }

    bool operator==(const FilterSpec&) const = default;
};

struct FacetCount {
    std::string value;
    std::size_t count = 0;

    bool operator==(const FacetCount&) const = default;
};

/// Immutable inverted index over a catalog snapshot. Ordinals follow record id
/// order. For every indexed facet, the postings of its values together with
/// its missing set cover every record.
class FacetIndex {
public:
    using ValuePostings = std::map<std::string, OrdinalSet, std::less<>>;

    explicit FacetIndex(CatalogSnapshot snapshot);

    std::size_t size() const noexcept { return records_.size(); }
    const FacetSchema& schema() const noexcept { return schema_; }
    const std::string& source_label() const noexcept { return source_label_; }
    const std::string& built_at() const noexcept { return built_at_; }

    bool has_facet(std::string_view facet) const { return postings_.contains(facet); }
    std::vector<std::string> facet_names() const;

    const DatasetRecord& record(Ordinal ordinal) const { return records_.at(ordinal); }
    /// Throws Error(not_found).
    const DatasetRecord& record(std::string_view id) const;
    std::optional<Ordinal> find(std::string_view id) const;

    /// Throws Error(unknown_facet).
    const ValuePostings& postings(std::string_view facet) const;
    const OrdinalSet& missing(std::string_view facet) const;

    /// Records satisfying the filter, by ordinal. Throws Error(unknown_facet).
    OrdinalSet apply_filter(const FilterSpec& filter) const;

    /// Value counts for `facet` over the records matching `active` with the
    /// clause on `facet` itself removed. Sorted by count desc, then value, with
    /// a trailing "(missing)" entry when some matching records lack the facet.
    std::vector<FacetCount> facet_values(std::string_view facet, const FilterSpec& active) const;

private:
    OrdinalSet clause_matches(std::string_view facet, const ValueSet& values, MatchMode mode) const;

    std::vector<DatasetRecord> records_;
    FacetSchema schema_;
    std::string source_label_;
    std::string built_at_;
    std::map<std::string, ValuePostings, std::less<>> postings_;
    std::map<std::string, OrdinalSet, std::less<>> missing_;
};

inline constexpr std::string_view kIdPlaceholder = "{id}";

/// True when the template contains exactly one "{id}".
bool valid_url_template(std::string_view url_template);
/// Substitutes `id` for "{id}". Throws Error(invalid_argument) for a bad template.
std::string external_url(std::string_view id, std::string_view url_template);
inline std::string external_url(const DatasetRecord& record, std::string_view url_template) {
    return external_url(record.id, url_template);
}

OrdinalSet intersect(const OrdinalSet& a, const OrdinalSet& b);
OrdinalSet unite(const OrdinalSet& a, const OrdinalSet& b);

} // namespace facetnet
