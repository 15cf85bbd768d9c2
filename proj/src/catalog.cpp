#include "facetnet/catalog.hpp"

#include "facetnet/error.hpp"

#include <algorithm>
#include <iterator>
#include <numeric>

namespace facetnet {

OrdinalSet intersect(const OrdinalSet& a, const OrdinalSet& b) {
    OrdinalSet out;
    std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

OrdinalSet unite(const OrdinalSet& a, const OrdinalSet& b) {
    OrdinalSet out;
    out.reserve(a.size() + b.size());
    std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
    return out;
}

FacetIndex::FacetIndex(CatalogSnapshot snapshot)
    : records_(std::move(snapshot.records)),
      schema_(std::move(snapshot.schema)),
      source_label_(std::move(snapshot.source_label)),
      built_at_(std::move(snapshot.built_at)) {
    std::sort(records_.begin(), records_.end(), [](const auto& a, const auto& b) { return a.id < b.id; });
    for (const auto& r : records_) {
        for (const auto& [facet, values] : r.facets) {
            if (!schema_.knows(facet))
                schema_.known_facets.emplace(facet, FacetOrigin::tag_prefix);
        }
    }

    for (const auto& [name, origin] : schema_.known_facets)
        postings_[name];
    for (Ordinal ord = 0; ord < records_.size(); ++ord) {
        for (const auto& [facet, values] : records_[ord].facets) {
            auto& by_value = postings_[facet];
            for (const auto& value : values)
                by_value[value].push_back(ord);
        }
    }
    // Ordinals were appended in increasing order, so postings are already sorted.
    for (const auto& [facet, by_value] : postings_) {
        auto& missing = missing_[facet];
        for (Ordinal ord = 0; ord < records_.size(); ++ord) {
            if (!records_[ord].facets.contains(facet))
                missing.push_back(ord);
        }
    }
}

std::vector<std::string> FacetIndex::facet_names() const {
    std::vector<std::string> names;
    names.reserve(postings_.size());
    for (const auto& [name, values] : postings_)
        names.push_back(name);
    return names;
}

std::optional<Ordinal> FacetIndex::find(std::string_view id) const {
    const auto it = std::lower_bound(records_.begin(), records_.end(), id,
                                     [](const DatasetRecord& r, std::string_view key) { return r.id < key; });
    if (it == records_.end() || it->id != id)
        return std::nullopt;
    return static_cast<Ordinal>(it - records_.begin());
}

const DatasetRecord& FacetIndex::record(std::string_view id) const {
    const auto ord = find(id);
    if (!ord)
        throw Error(Errc::not_found, "no record with id '" + std::string(id) + "'");
    return records_[*ord];
}

const FacetIndex::ValuePostings& FacetIndex::postings(std::string_view facet) const {
    const auto it = postings_.find(facet);
    if (it == postings_.end())
        throw Error(Errc::unknown_facet, "unknown facet '" + std::string(facet) + "'");
    return it->second;
}

const OrdinalSet& FacetIndex::missing(std::string_view facet) const {
    const auto it = missing_.find(facet);
    if (it == missing_.end())
        throw Error(Errc::unknown_facet, "unknown facet '" + std::string(facet) + "'");
    return it->second;
}

OrdinalSet FacetIndex::clause_matches(std::string_view facet, const ValueSet& values, MatchMode mode) const {
    const auto& by_value = postings(facet);
    static const OrdinalSet empty;
    auto lookup = [&](const std::string& value) -> const OrdinalSet& {
        const auto it = by_value.find(value);
        return it == by_value.end() ? empty : it->second;
    };

    if (values.empty())
        return {};
    auto it = values.begin();
    OrdinalSet acc = lookup(*it);
    for (++it; it != values.end(); ++it) {
        if (mode == MatchMode::any) {
            acc = unite(acc, lookup(*it));
        } else {
            if (acc.empty())
                break;
            acc = intersect(acc, lookup(*it));
        }
    }
    return acc;
}

OrdinalSet FacetIndex::apply_filter(const FilterSpec& filter) const {
    for (const auto& [facet, values] : filter.clauses) {
        if (!has_facet(facet))
            throw Error(Errc::unknown_facet, "filter references unknown facet '" + facet + "'");
        if (values.empty())
            throw Error(Errc::invalid_argument, "filter clause for '" + facet + "' selects no values");
    }
    if (filter.clauses.empty()) {
        OrdinalSet all(records_.size());
        std::iota(all.begin(), all.end(), Ordinal{0});
        return all;
    }

    std::vector<OrdinalSet> per_clause;
    per_clause.reserve(filter.clauses.size());
    for (const auto& [facet, values] : filter.clauses)
        per_clause.push_back(clause_matches(facet, values, filter.within_facet_mode));
    std::sort(per_clause.begin(), per_clause.end(), [](const auto& a, const auto& b) { return a.size() < b.size(); });

    OrdinalSet result = std::move(per_clause.front());
    for (std::size_t i = 1; i < per_clause.size() && !result.empty(); ++i)
        result = intersect(result, per_clause[i]);
    return result;
}

std::vector<FacetCount> FacetIndex::facet_values(std::string_view facet, const FilterSpec& active) const {
    const auto& by_value = postings(facet);

    FilterSpec others = active;
    if (const auto it = others.clauses.find(facet); it != others.clauses.end())
        others.clauses.erase(it);

    std::vector<FacetCount> counts;
    counts.reserve(by_value.size());
    std::size_t missing_count = 0;
    if (others.clauses.empty()) {
        for (const auto& [value, ords] : by_value)
            counts.push_back({value, ords.size()});
        missing_count = missing(facet).size();
    } else {
        const OrdinalSet base = apply_filter(others);
        std::vector<unsigned char> in_base(records_.size(), 0);
        for (Ordinal ord : base)
            in_base[ord] = 1;
        for (const auto& [value, ords] : by_value) {
            std::size_t n = 0;
            for (Ordinal ord : ords)
                n += in_base[ord];
            if (n > 0)
                counts.push_back({value, n});
        }
        for (Ordinal ord : missing(facet))
            missing_count += in_base[ord];
    }

    std::sort(counts.begin(), counts.end(), [](const FacetCount& a, const FacetCount& b) {
        return a.count != b.count ? a.count > b.count : a.value < b.value;
    });
    if (missing_count > 0)
        counts.push_back({std::string(kMissingValue), missing_count});
    return counts;
}

bool valid_url_template(std::string_view url_template) {
    const auto first = url_template.find(kIdPlaceholder);
    return first != std::string_view::npos &&
           url_template.find(kIdPlaceholder, first + kIdPlaceholder.size()) == std::string_view::npos;
}

std::string external_url(std::string_view id, std::string_view url_template) {
    if (!valid_url_template(url_template))
        throw Error(Errc::invalid_argument,
                    "URL template '" + std::string(url_template) + "' must contain exactly one {id}");
    const auto pos = url_template.find(kIdPlaceholder);
    std::string url(url_template.substr(0, pos));
    url += id;
    url += url_template.substr(pos + kIdPlaceholder.size());
    return url;
}

} // namespace facetnet
