#pragma once

#include "facetnet/catalog.hpp"
#include "facetnet/ingest.hpp"
#include "facetnet/netbuilder.hpp"

#include <filesystem>
#include <map>
#include <memory>
#include <random>
#include <set>
#include <string>
#include <tuple>
#include <vector>

namespace facetnet::testing {

std::filesystem::path data_path(const std::string& name);

/// Snapshot built from a card file under tests/data.
CatalogSnapshot fixture_snapshot(const std::string& file);
std::shared_ptr<const FacetIndex> fixture_index(const std::string& file);

inline std::shared_ptr<const FacetIndex> f3_index() { return fixture_index("f3.jsonl"); }
inline std::shared_ptr<const FacetIndex> sample_index() { return fixture_index("hub_sample.jsonl"); }

/// Random corpus over small vocabularies so values collide often. Some
/// records lack modality, license or model; some lack created_at.
CatalogSnapshot random_snapshot(std::mt19937_64& rng, std::size_t records);

/// Non-empty clauses over facets of the random corpus, OR or AND mode.
FilterSpec random_filter(std::mt19937_64& rng, const FacetIndex& index, std::size_t max_clauses = 3);

/// Topologies for the random corpus: both rules, with and without thematic.
std::vector<TopologySpec> random_topologies();

// ---- oracles: straight per-record scans, independent of the index --------

std::vector<std::string> naive_filter(const std::vector<DatasetRecord>& records, const FilterSpec& filter);

std::vector<FacetCount> naive_facet_values(const std::vector<DatasetRecord>& records, const std::string& facet,
                                           const FilterSpec& active);

/// Expected network contents in plain containers.
struct ExpectedItem {
    std::set<std::string> records;
    std::multiset<std::string> themes;
    std::size_t unthemed = 0;
};
using ExpectedItems = std::map<std::string, ExpectedItem>; // link value -> item

struct ExpectedNetwork {
    std::map<std::string, std::pair<NodeSide, ExpectedItems>> nodes;
    std::map<std::pair<std::string, std::string>, ExpectedItems> edges;
    std::map<std::string, std::size_t> sizes;
};

/// Brute force: bipartite by records x source x target x link loops,
/// unipartite by pairwise record comparison (O(|R|^2 * values)).
ExpectedNetwork brute_force_network(const std::vector<DatasetRecord>& records, const FilterSpec& filter,
                                    const TopologySpec& topology);

/// Converts a built network to the same plain form.
ExpectedNetwork flatten(const Network& network);

/// Empty string when equal; otherwise a description of the first difference.
std::string compare(const ExpectedNetwork& expected, const ExpectedNetwork& actual);

std::vector<DatasetRecord> records_of(const FacetIndex& index);

} // namespace facetnet::testing
