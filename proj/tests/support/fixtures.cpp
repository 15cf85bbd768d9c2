#include "fixtures.hpp"

#include <algorithm>
#include <sstream>

namespace facetnet::testing {

std::filesystem::path data_path(const std::string& name) {
    return std::filesystem::path(FACETNET_TEST_DATA_DIR) / name;
}

CatalogSnapshot fixture_snapshot(const std::string& file) {
    const auto batch = load_catalog(data_path(file));
    return build_snapshot(batch.cards, FacetSchema::defaults(), file, "2025-01-01T00:00:00Z");
}

std::shared_ptr<const FacetIndex> fixture_index(const std::string& file) {
    return std::make_shared<const FacetIndex>(fixture_snapshot(file));
}

namespace {

const std::vector<std::string> kModalities{"text", "image", "audio", "tabular", "video"};
const std::vector<std::string> kTasks{"question-answering", "summarization", "translation", "asr",
                                      "text-classification", "vqa", "ner", "retrieval"};
const std::vector<std::string> kLicenses{"mit", "apache-2.0", "cc-by-4.0", "other"};
const std::vector<std::string> kLanguages{"en", "fr", "de", "zh", "pt"};

std::vector<std::string> pick(std::mt19937_64& rng, const std::vector<std::string>& pool, int lo, int hi) {
    std::uniform_int_distribution<int> count(lo, hi);
    std::uniform_int_distribution<std::size_t> index(0, pool.size() - 1);
    std::vector<std::string> out;
    for (int n = count(rng); n > 0; --n)
        out.push_back(pool[index(rng)]);
    return out;
}

} // namespace

CatalogSnapshot random_snapshot(std::mt19937_64& rng, std::size_t records) {
    std::vector<std::string> models;
    for (int i = 0; i < 15; ++i)
        models.push_back("org/model-" + std::to_string(i));
    std::uniform_int_distribution<int> month(1, 12), year(2021, 2024), coin(0, 9);

    std::vector<RawCard> cards;
    for (std::size_t i = 0; i < records; ++i) {
        RawCard card;
        char id[32];
        std::snprintf(id, sizeof id, "ds/%05zu", i);
        card.id = id;
        if (coin(rng) < 8) {
            char ts[40];
            std::snprintf(ts, sizeof ts, "%04d-%02d-15T12:00:00+00:00", year(rng), month(rng));
            card.created_at = ts;
        }
        for (const auto& v : pick(rng, kModalities, 0, 2))
            card.tags.push_back("modality:" + v);
        for (const auto& v : pick(rng, kTasks, 0, 3))
            card.tags.push_back("task_categories:" + v);
        for (const auto& v : pick(rng, kLicenses, 0, 1))
            card.tags.push_back("license:" + v);
        for (const auto& v : pick(rng, models, 0, 3))
            card.tags.push_back("model:" + v);
        for (const auto& v : pick(rng, kLanguages, 0, 2))
            card.tags.push_back("language:" + v);
        cards.push_back(std::move(card));
    }
    return build_snapshot(cards, FacetSchema::defaults(), "random", "2025-01-01T00:00:00Z");
}

FilterSpec random_filter(std::mt19937_64& rng, const FacetIndex& index, std::size_t max_clauses) {
    static const std::vector<std::string> facets{"modality", "task_categories", "license", "model", "language"};
    std::uniform_int_distribution<std::size_t> clause_count(0, max_clauses), facet_pick(0, facets.size() - 1);
    std::uniform_int_distribution<int> values(1, 3), mode(0, 1);
    FilterSpec filter;
    filter.within_facet_mode = mode(rng) ? MatchMode::all : MatchMode::any;
    for (std::size_t c = clause_count(rng); c > 0; --c) {
        const auto& facet = facets[facet_pick(rng)];
        const auto& postings = index.postings(facet);
        if (postings.empty())
            continue;
        std::uniform_int_distribution<std::size_t> value_pick(0, postings.size() - 1);
        for (int v = values(rng); v > 0; --v) {
            auto it = postings.begin();
            std::advance(it, value_pick(rng));
            filter.require(facet, it->first);
        }
    }
    return filter;
}

std::vector<TopologySpec> random_topologies() {
    return {
        {"dataset", "modality", "task_categories", std::nullopt},
        {"dataset", "modality", "task_categories", std::string("license")},
        {"modality", "language", "model", std::string("license")},
        {"task_categories", "task_categories", "dataset", std::string("license")},
        {"dataset", "dataset", "model", std::nullopt},
        {"modality", "modality", "model", std::string("language")},
        {"task_categories", "modality", "dataset", std::nullopt},
    };
}

namespace {

const ValueSet kEmpty;

const ValueSet& values_of(const DatasetRecord& r, const std::string& facet) {
    const auto it = r.facets.find(facet);
    return it == r.facets.end() ? kEmpty : it->second;
}

bool matches(const DatasetRecord& r, const FilterSpec& filter) {
    for (const auto& [facet, wanted] : filter.clauses) {
        const auto& have = values_of(r, facet);
        std::size_t hits = 0;
        for (const auto& v : wanted)
            hits += have.count(v);
        const bool ok = filter.within_facet_mode == MatchMode::any ? hits > 0 : hits == wanted.size();
        if (!ok)
            return false;
    }
    return true;
}

void add_contribution(ExpectedItem& item, const DatasetRecord& r, const std::optional<std::string>& thematic) {
    if (!item.records.insert(r.id).second)
        return;
    if (!thematic)
        return;
    const auto& themes = values_of(r, *thematic);
    if (themes.empty())
        ++item.unthemed;
    for (const auto& t : themes)
        item.themes.insert(t);
}

} // namespace

std::vector<std::string> naive_filter(const std::vector<DatasetRecord>& records, const FilterSpec& filter) {
    std::vector<std::string> out;
    for (const auto& r : records) {
        if (matches(r, filter))
            out.push_back(r.id);
    }
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<FacetCount> naive_facet_values(const std::vector<DatasetRecord>& records, const std::string& facet,
                                           const FilterSpec& active) {
    FilterSpec others = active;
    others.clauses.erase(facet);
    std::map<std::string, std::size_t> counts;
    std::size_t missing = 0;
    for (const auto& r : records) {
        if (!matches(r, others))
            continue;
        const auto& values = values_of(r, facet);
        if (values.empty())
            ++missing;
        for (const auto& v : values)
            ++counts[v];
    }
    std::vector<FacetCount> out;
    for (const auto& [v, n] : counts)
        out.push_back({v, n});
    std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) {
        return std::tie(b.count, a.value) < std::tie(a.count, b.value);
    });
    if (missing)
        out.push_back({std::string(kMissingValue), missing});
    return out;
}

ExpectedNetwork brute_force_network(const std::vector<DatasetRecord>& all, const FilterSpec& filter,
                                    const TopologySpec& topo) {
    std::vector<const DatasetRecord*> matched;
    for (const auto& r : all) {
        if (matches(r, filter))
            matched.push_back(&r);
    }

    ExpectedNetwork net;
    const bool bipartite = topo.source != topo.target;

    auto touch_node = [&](const std::string& id, NodeSide side) -> ExpectedItems& {
        auto [it, inserted] = net.nodes.try_emplace(id, side, ExpectedItems{});
        if (!inserted && it->second.first != side)
            it->second.first = NodeSide::both;
        return it->second.second;
    };

    for (const auto* r : matched) {
        if (bipartite) {
            for (const auto& s : values_of(*r, topo.source)) {
                auto& items = touch_node(s, NodeSide::source);
                for (const auto& l : values_of(*r, topo.link))
                    add_contribution(items[l], *r, topo.thematic);
            }
            for (const auto& t : values_of(*r, topo.target)) {
                auto& items = touch_node(t, NodeSide::target);
                for (const auto& l : values_of(*r, topo.link))
                    add_contribution(items[l], *r, topo.thematic);
            }
        } else {
            for (const auto& x : values_of(*r, topo.source)) {
                auto& items = touch_node(x, NodeSide::both);
                for (const auto& l : values_of(*r, topo.link))
                    add_contribution(items[l], *r, topo.thematic);
            }
        }
    }

    if (bipartite) {
        for (const auto* r : matched) {
            for (const auto& s : values_of(*r, topo.source)) {
                for (const auto& t : values_of(*r, topo.target)) {
                    if (s == t)
                        continue;
                    for (const auto& l : values_of(*r, topo.link))
                        add_contribution(net.edges[{s, t}][l], *r, topo.thematic);
                }
            }
        }
    } else {
        // Every ordered pair of records (including a record with itself):
        // u held by r1 and v held by r2 share l when both carry l.
        for (const auto* r1 : matched) {
            for (const auto* r2 : matched) {
                for (const auto& u : values_of(*r1, topo.source)) {
                    for (const auto& v : values_of(*r2, topo.source)) {
                        if (!(u < v))
                            continue;
                        for (const auto& l : values_of(*r1, topo.link)) {
                            if (!values_of(*r2, topo.link).contains(l))
                                continue;
                            auto& item = net.edges[{u, v}][l];
                            add_contribution(item, *r1, topo.thematic);
                            add_contribution(item, *r2, topo.thematic);
                        }
                    }
                }
            }
        }
    }
    for (const auto& [id, node] : net.nodes)
        net.sizes[id] = node.second.size();
    return net;
}

namespace {

ExpectedItems flatten_items(const std::vector<EdgeItem>& items) {
    ExpectedItems out;
    for (const auto& item : items) {
        auto& e = out[item.link_value];
        e.records.insert(item.records.begin(), item.records.end());
        e.themes.insert(item.themes.begin(), item.themes.end());
        e.unthemed = item.unthemed;
    }
    return out;
}

std::string describe_items(const ExpectedItems& a, const ExpectedItems& b) {
    for (const auto& [l, item] : a) {
        const auto it = b.find(l);
        if (it == b.end())
            return "item '" + l + "' missing";
        if (item.records != it->second.records)
            return "item '" + l + "' contributors differ";
        if (item.themes != it->second.themes)
            return "item '" + l + "' themes differ";
        if (item.unthemed != it->second.unthemed)
            return "item '" + l + "' unthemed count differs";
    }
    for (const auto& [l, item] : b) {
        if (!a.contains(l))
            return "unexpected item '" + l + "'";
    }
    return {};
}

} // namespace

ExpectedNetwork flatten(const Network& network) {
    ExpectedNetwork out;
    for (const auto& node : network.nodes) {
        out.nodes[node.id] = {node.side, flatten_items(node.items)};
        out.sizes[node.id] = node.size;
    }
    for (const auto& edge : network.edges)
        out.edges[{edge.u, edge.v}] = flatten_items(edge.items);
    return out;
}

std::string compare(const ExpectedNetwork& expected, const ExpectedNetwork& actual) {
    if (expected.nodes.size() != actual.nodes.size())
        return "node count " + std::to_string(actual.nodes.size()) + " != expected " + std::to_string(expected.nodes.size());
    for (const auto& [id, node] : expected.nodes) {
        const auto it = actual.nodes.find(id);
        if (it == actual.nodes.end())
            return "node '" + id + "' missing";
        if (it->second.first != node.first)
            return "node '" + id + "' side differs";
        if (auto d = describe_items(node.second, it->second.second); !d.empty())
            return "node '" + id + "': " + d;
    }
    for (const auto& [id, size] : expected.sizes) {
        if (actual.sizes.at(id) != size)
            return "node '" + id + "' size " + std::to_string(actual.sizes.at(id)) + " != expected " + std::to_string(size);
    }
    if (expected.edges.size() != actual.edges.size())
        return "edge count " + std::to_string(actual.edges.size()) + " != expected " + std::to_string(expected.edges.size());
    for (const auto& [key, items] : expected.edges) {
        const auto it = actual.edges.find(key);
        if (it == actual.edges.end())
            return "edge " + key.first + " -- " + key.second + " missing";
        if (auto d = describe_items(items, it->second); !d.empty())
            return "edge " + key.first + " -- " + key.second + ": " + d;
    }
    return {};
}

std::vector<DatasetRecord> records_of(const FacetIndex& index) {
    std::vector<DatasetRecord> out;
    for (Ordinal i = 0; i < index.size(); ++i)
        out.push_back(index.record(i));
    return out;
}

} // namespace facetnet::testing
