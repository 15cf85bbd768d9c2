#include "facetnet/cli.hpp"

#include "facetnet/catalog.hpp"
#include "facetnet/error.hpp"
#include "facetnet/hub_client.hpp"
#include "facetnet/ingest.hpp"
#include "facetnet/netbuilder.hpp"
#include "facetnet/network_io.hpp"
#include "facetnet/service.hpp"
#include "facetnet/snapshot.hpp"
#include "facetnet/timestamp.hpp"

#include "CLI11.hpp"

#include <csignal>
#include <fstream>
#include <iostream>

namespace facetnet {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

FilterSpec parse_filter_flags(const std::vector<std::string>& flags, const std::string& mode) {
    FilterSpec filter;
    if (mode == "and")
        filter.within_facet_mode = MatchMode::all;
    else if (mode != "or")
        throw UsageError("--mode must be 'or' or 'and'");
    for (const auto& flag : flags) {
        const auto eq = flag.find('=');
        if (eq == std::string::npos || eq == 0 || eq + 1 == flag.size())
            throw UsageError("--filter expects facet=value, got '" + flag + "'");
        filter.require(flag.substr(0, eq), flag.substr(eq + 1));
    }
    return filter;
}

std::string now_rfc3339() {
    return format_rfc3339(std::chrono::time_point_cast<std::chrono::seconds>(std::chrono::system_clock::now()));
}

void report_issues(const std::vector<LoadIssue>& issues, std::ostream& err) {
    for (const auto& issue : issues)
        err << "warning: " << issue.location << ": " << issue.message << "\n";
}

void write_snapshot(const std::vector<RawCard>& cards, bool closed_schema, const std::string& label,
                    const std::string& built_at, const std::string& out_path, std::ostream& out, std::ostream& err) {
    if (cards.empty())
        throw Error(Errc::invalid_argument, "no valid cards to ingest");
    FacetSchema schema = FacetSchema::defaults();
    schema.open_schema = !closed_schema;
    IngestReport report;
    const auto snapshot = build_snapshot(cards, std::move(schema), label, built_at, &report);
    report_issues(report.skipped_tags, err);
    save_snapshot(snapshot, out_path);
    out << "wrote " << snapshot.records.size() << " records (" << report.parsed_tags << " tags, "
        << report.skipped_tags.size() << " skipped) to " << out_path << "\n";
}

Server* active_server = nullptr;

extern "C" void handle_stop_signal(int) {
    if (active_server)
        active_server->stop();
}

} // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Faceted dataset discovery: ingest catalogs, count facets, build co-occurrence networks, serve the API"};
    app.name("facetnet");
    app.require_subcommand(1);

    // ingest
    auto* ingest = app.add_subcommand("ingest", "Normalize dataset cards into a snapshot");
    std::vector<std::string> ingest_inputs;
    std::string ingest_out, ingest_label, ingest_built_at;
    bool closed_schema = false;
    ingest->add_option("--in", ingest_inputs, "Card files (JSON array or JSON lines)")->required()->check(CLI::ExistingFile);
    ingest->add_option("--out", ingest_out, "Snapshot to write")->required();
    ingest->add_option("--label", ingest_label, "Source label stored in the snapshot");
    ingest->add_option("--built-at", ingest_built_at, "RFC3339 build timestamp (default: now)");
    ingest->add_flag("--closed-schema", closed_schema, "Skip tags whose prefix is not a known facet");

    // fetch
    auto* fetch = app.add_subcommand("fetch", "Download dataset cards from a hub API into a snapshot");
    HubClientOptions hub;
    hub.endpoint = "https://huggingface.co/api/datasets?full=true";
    std::string fetch_out, fetch_label, fetch_built_at;
    int rate_ms = static_cast<int>(hub.min_interval.count());
    fetch->add_option("--endpoint", hub.endpoint, "Listing endpoint")->capture_default_str();
    fetch->add_option("--page-size", hub.page_size, "Records per request")->check(CLI::PositiveNumber);
    fetch->add_option("--max-records", hub.max_records, "Stop after this many records");
    fetch->add_option("--retries", hub.max_retries, "Retries per page")->check(CLI::NonNegativeNumber);
    fetch->add_option("--rate-ms", rate_ms, "Minimum milliseconds between requests")->check(CLI::NonNegativeNumber);
    fetch->add_option("--out", fetch_out, "Snapshot to write")->required();
    fetch->add_option("--label", fetch_label, "Source label (default: endpoint)");
    fetch->add_option("--built-at", fetch_built_at, "RFC3339 build timestamp (default: now)");

    // facets
    auto* facets = app.add_subcommand("facets", "List facets, or one facet's values with dataset counts");
    std::string snapshot_path, facet_name, mode = "or";
    std::vector<std::string> filters;
    facets->add_option("name", facet_name, "Facet to enumerate");
    facets->add_option("--snapshot", snapshot_path, "Snapshot file")->envname("FACETNET_SNAPSHOT")->required();
    facets->add_option("--filter", filters, "facet=value clause (repeatable)");
    facets->add_option("--mode", mode, "Within-facet combination: or | and");

    // network
    auto* network = app.add_subcommand("network", "Build and export a co-occurrence network");
    TopologySpec topology;
    std::string thematic, format_name = "graphml", network_out;
    BuildLimits limits;
    network->add_option("--snapshot", snapshot_path, "Snapshot file")->envname("FACETNET_SNAPSHOT")->required();
    network->add_option("--source", topology.source, "Source node facet")->required();
    network->add_option("--target", topology.target, "Target node facet")->required();
    network->add_option("--link", topology.link, "Link facet")->required();
    network->add_option("--thematic", thematic, "Thematic facet");
    network->add_option("--filter", filters, "facet=value clause (repeatable)");
    network->add_option("--mode", mode, "Within-facet combination: or | and");
    network->add_option("--format", format_name, "graphml | json");
    network->add_option("--out", network_out, "Output file (default: stdout)");
    network->add_option("--max-nodes", limits.max_nodes, "Node ceiling")->check(CLI::PositiveNumber);
    network->add_option("--max-edges", limits.max_edges, "Edge ceiling")->check(CLI::PositiveNumber);
    network->add_flag("--hide-isolated", limits.hide_isolated, "Drop nodes without edges");

    // serve
    auto* serve = app.add_subcommand("serve", "Serve the HTTP API");
    std::string config_path, serve_snapshot, host;
    int port = -1;
    serve->add_option("--config", config_path, "JSON config file")->check(CLI::ExistingFile);
    serve->add_option("--snapshot", serve_snapshot, "Snapshot file (overrides config)");
    serve->add_option("--host", host, "Listen address");
    serve->add_option("--port", port, "Listen port")->check(CLI::Range(0, 65535));

    std::vector<std::string> argv_storage{"facetnet"};
    argv_storage.insert(argv_storage.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_storage)
        argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "usage error: " << e.what() << "\n";
        err << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return kExitUsage;
    }

    try {
        if (*ingest) {
            std::vector<RawCard> cards;
            for (const auto& path : ingest_inputs) {
                auto batch = load_catalog(path);
                report_issues(batch.issues, err);
                for (auto& c : batch.cards)
                    cards.push_back(std::move(c));
            }
            CardBatch merged{std::move(cards), {}};
            dedupe_keep_last(merged, "input");
            report_issues(merged.issues, err);
            if (!ingest_built_at.empty() && !parse_rfc3339(ingest_built_at))
                throw UsageError("--built-at must be an RFC3339 timestamp");
            write_snapshot(merged.cards, closed_schema, ingest_label.empty() ? ingest_inputs.front() : ingest_label,
                           ingest_built_at.empty() ? now_rfc3339() : ingest_built_at, ingest_out, out, err);
            return kExitOk;
        }
        if (*fetch) {
            if (!fetch_built_at.empty() && !parse_rfc3339(fetch_built_at))
                throw UsageError("--built-at must be an RFC3339 timestamp");
            hub.min_interval = std::chrono::milliseconds(rate_ms);
            auto batch = fetch_catalog(hub);
            report_issues(batch.issues, err);
            write_snapshot(batch.cards, false, fetch_label.empty() ? hub.endpoint : fetch_label,
                           fetch_built_at.empty() ? now_rfc3339() : fetch_built_at, fetch_out, out, err);
            return kExitOk;
        }
        if (*facets) {
            const FilterSpec filter = parse_filter_flags(filters, mode);
            const FacetIndex index(load_snapshot(snapshot_path));
            if (facet_name.empty()) {
                for (const auto& name : index.facet_names())
                    out << name << "\t" << index.postings(name).size() << "\n";
                return kExitOk;
            }
            for (const auto& [value, count] : index.facet_values(facet_name, filter))
                out << value << "\t" << count << "\n";
            return kExitOk;
        }
        if (*network) {
            if (!thematic.empty())
                topology.thematic = thematic;
            const FilterSpec filter = parse_filter_flags(filters, mode);
            const auto format = parse_export_format(format_name);
            if (!format)
                throw UsageError("--format must be graphml or json");
            if (topology.link == topology.source || topology.link == topology.target)
                throw UsageError("--link must differ from --source and --target");
            const FacetIndex index(load_snapshot(snapshot_path));
            const auto check = validate_topology(topology, index.schema());
            if (!check.ok()) {
                std::string message;
                for (const auto& e : check.errors)
                    message += (message.empty() ? "" : "; ") + e;
                throw UsageError(message);
            }
            const Network net = build_network(index, filter, topology, limits);
            const std::string document = export_network(net, *format);
            if (network_out.empty()) {
                out << document;
            } else {
                std::ofstream file(network_out, std::ios::binary | std::ios::trunc);
                if (!file || !file.write(document.data(), static_cast<std::streamsize>(document.size())))
                    throw Error(Errc::io_error, "cannot write '" + network_out + "'");
                out << "wrote " << net.nodes.size() << " nodes, " << net.edges.size() << " edges to " << network_out
                    << (net.truncation.truncated ? " (truncated)" : "") << "\n";
            }
            return kExitOk;
        }
        if (*serve) {
            ServiceConfig config = config_path.empty() ? ServiceConfig{} : load_config(config_path);
            apply_env_overrides(config);
            if (!serve_snapshot.empty())
                config.snapshot_path = serve_snapshot;
            if (!host.empty())
                config.host = host;
            if (port >= 0)
                config.port = port;
            if (config.snapshot_path.empty())
                throw UsageError("serve needs --snapshot, a config 'snapshot' entry or FACETNET_SNAPSHOT");
            Server server(config);
            const int bound = server.bind();
            out << "serving on " << config.host << ":" << bound << std::endl;
            active_server = &server;
            std::signal(SIGINT, handle_stop_signal);
            std::signal(SIGTERM, handle_stop_signal);
            server.run();
            active_server = nullptr;
            return kExitOk;
        }
    } catch (const UsageError& e) {
        err << "usage error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const Error& e) {
        err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
        return kExitRuntime;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return kExitRuntime;
    }
    return kExitUsage;
}

} // namespace facetnet
