#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace facetnet {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

/// Entry point for the `facetnet` tool. `args` excludes the program name.
///
///   ingest   --in FILE... --out SNAPSHOT [--label L] [--built-at TS] [--closed-schema]
///   fetch    --out SNAPSHOT [--endpoint URL] [--page-size N] [--max-records N] ...
///   facets   [NAME] --snapshot S [--filter facet=value]... [--mode or|and]
///   network  --snapshot S --source F --target F --link F [--thematic F]
///            [--filter facet=value]... [--format json|graphml] [--out FILE]
///   serve    [--config FILE] [--snapshot S] [--host H] [--port P]
///
/// Returns 0 on success, 2 on a usage error, 1 on a runtime error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace facetnet
