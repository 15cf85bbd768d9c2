#pragma once

#include "facetnet/record.hpp"

#include <filesystem>
#include <string>
#include <string_view>

namespace facetnet {

/// Snapshot file layout (all header lines end in '\n'):
///
///     FACETNET-SNAPSHOT
///     format-version: 1
///     body-bytes: <decimal length of the body>
///     body-fnv1a64: <16 lowercase hex digits>
///     <empty line>
///     <body: one line of canonical JSON, keys sorted>
///
/// The body holds source_label, built_at, schema and records (sorted by id).
inline constexpr std::string_view kSnapshotMagic = "FACETNET-SNAPSHOT";
inline constexpr int kSnapshotVersion = 1;

/// Throws Error(invalid_argument) for an empty or duplicate-id record list.
std::string encode_snapshot(const CatalogSnapshot& snapshot);
/// Throws Error(version_mismatch) or Error(corrupt_snapshot).
CatalogSnapshot decode_snapshot(std::string_view bytes);

void save_snapshot(const CatalogSnapshot& snapshot, const std::filesystem::path& path);
CatalogSnapshot load_snapshot(const std::filesystem::path& path);

} // namespace facetnet
