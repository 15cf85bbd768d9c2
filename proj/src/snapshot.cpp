#include "facetnet/snapshot.hpp"

#include "facetnet/error.hpp"

#include "json.hpp"

#include <algorithm>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace facetnet {

using nlohmann::json;

namespace {

std::uint64_t fnv1a64(std::string_view bytes) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char c : bytes) {
        hash ^= c;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016" PRIx64, v);
    return buf;
}

json schema_to_json(const FacetSchema& schema) {
    json facets = json::object();
    for (const auto& [name, origin] : schema.known_facets)
        facets[name] = origin == FacetOrigin::record_field ? "record_field" : "tag_prefix";
    return {{"facets", facets}, {"open_schema", schema.open_schema}, {"fallback_facet", schema.fallback_facet}};
}

FacetSchema schema_from_json(const json& j) {
    FacetSchema schema;
    for (const auto& [name, origin] : j.at("facets").items()) {
        const auto text = origin.get<std::string>();
        if (text != "record_field" && text != "tag_prefix")
            throw Error(Errc::corrupt_snapshot, "unknown facet origin '" + text + "'");
        schema.known_facets.emplace(name, text == "record_field" ? FacetOrigin::record_field : FacetOrigin::tag_prefix);
    }
    schema.open_schema = j.at("open_schema").get<bool>();
    schema.fallback_facet = j.at("fallback_facet").get<std::string>();
    return schema;
}

json record_to_json(const DatasetRecord& record) {
    json scalars = json::object();
    for (const auto& [name, value] : record.scalars)
        std::visit([&](const auto& v) { scalars[name] = v; }, value);
    json facets = json::object();
    for (const auto& [name, values] : record.facets)
        facets[name] = json(std::vector<std::string>(values.begin(), values.end()));
    return {{"id", record.id}, {"scalars", scalars}, {"facets", facets}, {"description", record.description}};
}

DatasetRecord record_from_json(const json& j) {
    DatasetRecord record;
    record.id = j.at("id").get<std::string>();
    for (const auto& [name, value] : j.at("scalars").items()) {
        if (value.is_number_integer())
            record.scalars.emplace(name, value.get<std::int64_t>());
        else
            record.scalars.emplace(name, value.get<std::string>());
    }
    for (const auto& [name, values] : j.at("facets").items()) {
        ValueSet set;
        for (const auto& v : values)
            set.insert(v.get<std::string>());
        if (set.empty())
            throw Error(Errc::corrupt_snapshot, "record '" + record.id + "' has an empty facet '" + name + "'");
        record.facets.emplace(name, std::move(set));
    }
    record.description = j.at("description").get<std::string>();
    return record;
}

bool take_line(std::string_view& rest, std::string_view& line) {
    const auto nl = rest.find('\n');
    if (nl == std::string_view::npos)
        return false;
    line = rest.substr(0, nl);
    rest.remove_prefix(nl + 1);
    return true;
}

std::string_view header_value(std::string_view line, std::string_view key) {
    if (line.substr(0, key.size()) != key || line.substr(key.size(), 2) != ": ")
        throw Error(Errc::corrupt_snapshot, "expected header '" + std::string(key) + "'");
    return line.substr(key.size() + 2);
}

} // namespace

std::string encode_snapshot(const CatalogSnapshot& snapshot) {
    if (snapshot.records.empty())
        throw Error(Errc::invalid_argument, "refusing to save an empty snapshot");
    std::vector<const DatasetRecord*> order;
    order.reserve(snapshot.records.size());
    for (const auto& r : snapshot.records)
        order.push_back(&r);
    std::sort(order.begin(), order.end(), [](const auto* a, const auto* b) { return a->id < b->id; });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i - 1]->id == order[i]->id)
            throw Error(Errc::invalid_argument, "duplicate record id '" + order[i]->id + "'");
    }

    json records = json::array();
    for (const auto* r : order)
        records.push_back(record_to_json(*r));
    const json body_json = {{"source_label", snapshot.source_label},
                            {"built_at", snapshot.built_at},
                            {"schema", schema_to_json(snapshot.schema)},
                            {"records", std::move(records)}};
    const std::string body = body_json.dump() + "\n";

    std::string out;
    out.reserve(body.size() + 128);
    out += kSnapshotMagic;
    out += "\nformat-version: " + std::to_string(kSnapshotVersion);
    out += "\nbody-bytes: " + std::to_string(body.size());
    out += "\nbody-fnv1a64: " + hex64(fnv1a64(body));
    out += "\n\n";
    out += body;
    return out;
}

CatalogSnapshot decode_snapshot(std::string_view bytes) {
    std::string_view rest = bytes;
    std::string_view line;
    if (!take_line(rest, line) || line != kSnapshotMagic)
        throw Error(Errc::corrupt_snapshot, "missing snapshot magic header");
    if (!take_line(rest, line))
        throw Error(Errc::corrupt_snapshot, "truncated header");
    const auto version = header_value(line, "format-version");
    if (version != std::to_string(kSnapshotVersion))
        throw Error(Errc::version_mismatch, "snapshot format version " + std::string(version) +
                                                " is not supported (expected " + std::to_string(kSnapshotVersion) + ")");
    std::string_view length_text, hash_text, blank;
    if (!take_line(rest, line))
        throw Error(Errc::corrupt_snapshot, "truncated header");
    length_text = header_value(line, "body-bytes");
    if (!take_line(rest, line))
        throw Error(Errc::corrupt_snapshot, "truncated header");
    hash_text = header_value(line, "body-fnv1a64");
    if (!take_line(rest, blank) || !blank.empty())
        throw Error(Errc::corrupt_snapshot, "malformed header terminator");

    if (std::to_string(rest.size()) != length_text)
        throw Error(Errc::corrupt_snapshot, "body is " + std::to_string(rest.size()) + " bytes, header says " +
                                                std::string(length_text) + " (truncated file?)");
    if (hex64(fnv1a64(rest)) != hash_text)
        throw Error(Errc::corrupt_snapshot, "body checksum mismatch");

    try {
        const json body = json::parse(rest);
        CatalogSnapshot snapshot;
        snapshot.source_label = body.at("source_label").get<std::string>();
        snapshot.built_at = body.at("built_at").get<std::string>();
        snapshot.schema = schema_from_json(body.at("schema"));
        for (const auto& r : body.at("records"))
            snapshot.records.push_back(record_from_json(r));
        for (std::size_t i = 1; i < snapshot.records.size(); ++i) {
            if (!(snapshot.records[i - 1].id < snapshot.records[i].id))
                throw Error(Errc::corrupt_snapshot, "records are not sorted by unique id");
        }
        return snapshot;
    } catch (const json::exception& e) {
        throw Error(Errc::corrupt_snapshot, std::string("malformed snapshot body: ") + e.what());
    }
}

void save_snapshot(const CatalogSnapshot& snapshot, const std::filesystem::path& path) {
    const std::string bytes = encode_snapshot(snapshot);
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out)
        throw Error(Errc::io_error, "cannot open '" + path.string() + "' for writing");
    out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
    if (!out)
        throw Error(Errc::io_error, "write failure on '" + path.string() + "'");
}

CatalogSnapshot load_snapshot(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::io_error, "cannot open snapshot '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    try {
        return decode_snapshot(buffer.str());
    } catch (const Error& e) {
        throw Error(e.code(), path.string() + ": " + e.what());
    }
}

} // namespace facetnet
