#include "facetnet/record.hpp"

namespace facetnet {

const ValueSet* DatasetRecord::facet(std::string_view name) const {
    const auto it = facets.find(name);
    return it == facets.end() ? nullptr : &it->second;
}

bool DatasetRecord::has_value(std::string_view facet_name, std::string_view value) const {
    const ValueSet* values = facet(facet_name);
    return values != nullptr && values->contains(value);
}

std::optional<std::string> DatasetRecord::scalar_string(std::string_view name) const {
    const auto it = scalars.find(name);
    if (it == scalars.end())
        return std::nullopt;
    if (const auto* s = std::get_if<std::string>(&it->second))
        return *s;
    return std::to_string(std::get<std::int64_t>(it->second));
}

std::int64_t DatasetRecord::scalar_count(std::string_view name) const {
    const auto it = scalars.find(name);
    if (it == scalars.end())
        return 0;
    if (const auto* n = std::get_if<std::int64_t>(&it->second))
        return *n;
    return 0;
}

FacetSchema FacetSchema::defaults() {
    FacetSchema schema;
    schema.known_facets.emplace(kDatasetFacet, FacetOrigin::record_field);
    schema.known_facets.emplace(kFallbackFacet, FacetOrigin::tag_prefix);
    for (const char* prefix : {"task_categories", "task_ids", "annotations_creators", "language_creators",
                               "multilinguality", "source_datasets", "language", "license", "size_categories",
                               "format", "modality", "library", "model", "region", "arxiv", "doi", "benchmark"}) {
        schema.known_facets.emplace(prefix, FacetOrigin::tag_prefix);
    }
    return schema;
}

std::vector<std::string> FacetSchema::facet_names() const {
    std::vector<std::string> names;
    names.reserve(known_facets.size());
    for (const auto& [name, origin] : known_facets)
        names.push_back(name);
    return names;
}

} // namespace facetnet
