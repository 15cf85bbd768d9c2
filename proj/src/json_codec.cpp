#include "facetnet/json_codec.hpp"

#include "facetnet/error.hpp"

namespace facetnet {

using nlohmann::json;

std::string_view to_string(MatchMode mode) noexcept {
    return mode == MatchMode::any ? "or" : "and";
}

namespace {

std::string string_field(const json& j, const char* key, const char* context) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_string())
        throw Error(Errc::invalid_argument, std::string(context) + ": field '" + key + "' must be a string");
    return it->get<std::string>();
}

std::vector<std::string> string_array(const json& j, const char* key, const char* context) {
    const auto it = j.find(key);
    if (it == j.end() || !it->is_array())
        throw Error(Errc::invalid_argument, std::string(context) + ": field '" + key + "' must be an array");
    std::vector<std::string> out;
    out.reserve(it->size());
    for (const auto& v : *it) {
        if (!v.is_string())
            throw Error(Errc::invalid_argument, std::string(context) + ": '" + key + "' must hold strings");
        out.push_back(v.get<std::string>());
    }
    return out;
}

} // namespace

json to_json(const FilterSpec& filter) {
    json clauses = json::object();
    for (const auto& [facet, values] : filter.clauses)
        clauses[facet] = json(std::vector<std::string>(values.begin(), values.end()));
    return {{"clauses", clauses}, {"mode", to_string(filter.within_facet_mode)}};
}

FilterSpec filter_from_json(const json& j, MatchMode default_mode) {
    FilterSpec filter;
    filter.within_facet_mode = default_mode;
    if (j.is_null())
        return filter;
    if (!j.is_object())
        throw Error(Errc::invalid_argument, "filter must be an object");
    if (const auto mode = j.find("mode"); mode != j.end() && !mode->is_null()) {
        const auto text = mode->is_string() ? mode->get<std::string>() : std::string();
        if (text == "or" || text == "any")
            filter.within_facet_mode = MatchMode::any;
        else if (text == "and" || text == "all")
            filter.within_facet_mode = MatchMode::all;
        else
            throw Error(Errc::invalid_argument, "filter mode must be \"or\" or \"and\"");
    }
    if (const auto clauses = j.find("clauses"); clauses != j.end() && !clauses->is_null()) {
        if (!clauses->is_object())
            throw Error(Errc::invalid_argument, "filter clauses must be an object of facet -> [values]");
        for (const auto& [facet, values] : clauses->items()) {
            if (!values.is_array() || values.empty())
                throw Error(Errc::invalid_argument, "filter clause '" + facet + "' must be a non-empty array");
            auto& set = filter.clauses[facet];
            for (const auto& v : values) {
                if (!v.is_string())
                    throw Error(Errc::invalid_argument, "filter clause '" + facet + "' must hold strings");
                set.insert(v.get<std::string>());
            }
        }
    }
    return filter;
}

json to_json(const TopologySpec& topology) {
    return {{"source", topology.source},
            {"target", topology.target},
            {"link", topology.link},
            {"thematic", topology.thematic ? json(*topology.thematic) : json(nullptr)}};
}

TopologySpec topology_from_json(const json& j) {
    if (!j.is_object())
        throw Error(Errc::invalid_argument, "topology must be an object");
    TopologySpec spec;
    spec.source = string_field(j, "source", "topology");
    spec.target = string_field(j, "target", "topology");
    spec.link = string_field(j, "link", "topology");
    if (const auto it = j.find("thematic"); it != j.end() && !it->is_null()) {
        if (!it->is_string())
            throw Error(Errc::invalid_argument, "topology: field 'thematic' must be a string or null");
        if (!it->get<std::string>().empty())
            spec.thematic = it->get<std::string>();
    }
    return spec;
}

json to_json(const FacetCount& count) {
    return {{"value", count.value}, {"count", count.count}};
}

json to_json(const EdgeItem& item) {
    return {{"link_value", item.link_value}, {"records", item.records}, {"themes", item.themes}, {"unthemed", item.unthemed}};
}

EdgeItem edge_item_from_json(const json& j) {
    if (!j.is_object())
        throw Error(Errc::invalid_argument, "item must be an object");
    EdgeItem item;
    item.link_value = string_field(j, "link_value", "item");
    item.records = string_array(j, "records", "item");
    item.themes = string_array(j, "themes", "item");
    const auto it = j.find("unthemed");
    if (it == j.end() || !it->is_number_unsigned())
        throw Error(Errc::invalid_argument, "item: field 'unthemed' must be a non-negative integer");
    item.unthemed = it->get<std::size_t>();
    return item;
}

json to_json(const DatasetRecord& record, const std::optional<std::string>& url_template) {
    json scalars = json::object();
    for (const auto& [name, value] : record.scalars)
        std::visit([&](const auto& v) { scalars[name] = v; }, value);
    json facets = json::object();
    for (const auto& [name, values] : record.facets)
        facets[name] = json(std::vector<std::string>(values.begin(), values.end()));
    json out = {{"id", record.id}, {"scalars", scalars}, {"facets", facets}, {"description", record.description}};
    if (url_template)
        out["url"] = external_url(record, *url_template);
    return out;
}

} // namespace facetnet
