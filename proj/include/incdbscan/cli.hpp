#pragma once

// Command-line front end: cluster, insert, bench and delta subcommands.
// run_cli takes its streams as arguments so tests can drive it in-process.

#include "incdbscan/batch.hpp"
#include "incdbscan/bench.hpp"
#include "incdbscan/incremental.hpp"
#include "incdbscan/io.hpp"
#include "incdbscan/policy.hpp"

#include <algorithm>
#include <ostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

namespace incdbscan {

/// Shortest decimal form that reads back to the same double ("25.0", "16.666666666666664").
inline std::string format_real(double v)
{
    return nlohmann::json(v).dump();
}

inline std::string describe(PointId id, const InsertOutcome& outcome)
{
    std::ostringstream os;
    os << id << ' ';
    std::visit(
        [&](const auto& o) {
            using T = std::decay_t<decltype(o)>;
            if constexpr (std::is_same_v<T, Assigned>)
                os << "assigned Cluster" << o.cluster_id << " core=" << o.nearest_core_id
                   << " distance=" << format_real(o.distance);
            else if constexpr (std::is_same_v<T, PooledOutlier>)
                os << "pooled_outlier pool";
            else
                os << "new_cluster_formed Cluster" << o.cluster_id << " size=" << o.members.size();
        },
        outcome);
    return os.str();
}

namespace detail {

inline std::vector<double> parse_percent_list(const std::string& text)
{
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        double v = 0.0;
        if (!parse_number(item, v))
            throw InvalidInput("invalid delta '" + item + "'");
        out.push_back(v / 100.0);
    }
    if (out.empty())
        throw InvalidInput("--deltas needs at least one value");
    return out;
}

} // namespace detail

/// `args` excludes the program name. Returns the process exit status.
inline int run_cli(std::vector<std::string> args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Batch and incremental DBSCAN clustering", "incdbscan"};
    app.require_subcommand(1);

    std::string input, output, model_path, base_path, report_path, metric_name = "manhattan", rule_name, deltas;
    double eps = 0.0;
    std::size_t min_pts = 1;
    std::size_t repeats = 5;
    std::uint64_t seed = 1;
    std::size_t old_size = 0, added = 0;
    double threshold = 0.0;

    auto* cluster = app.add_subcommand("cluster", "Run batch DBSCAN and write a model snapshot");
    cluster->add_option("--input", input, "Point CSV (id,c1,...,cd)")->required();
    cluster->add_option("--eps", eps, "Neighborhood radius")->required();
    cluster->add_option("--minpts", min_pts, "Minimum neighborhood size for a core point")->required();
    cluster->add_option("--metric", metric_name, "manhattan or euclidean")
        ->check(CLI::IsMember({"manhattan", "euclidean"}));
    cluster->add_option("--out", output, "Snapshot file to write")->required();

    auto* insert_cmd = app.add_subcommand("insert", "Insert points into a stored model");
    insert_cmd->add_option("--model", model_path, "Snapshot to update")->required();
    insert_cmd->add_option("--input", input, "Point CSV of new points")->required();
    insert_cmd->add_option("--outlier-rule", rule_name, "count_only or density")
        ->check(CLI::IsMember({"count_only", "density"}));
    insert_cmd->add_option("--out", output, "Snapshot file to write")->required();

    auto* bench = app.add_subcommand("bench", "Compare full reruns with incremental updates");
    bench->add_option("--base", base_path, "Base point CSV")->required();
    bench->add_option("--deltas", deltas, "Comma-separated delta percentages")->required();
    bench->add_option("--eps", eps, "Neighborhood radius")->required();
    bench->add_option("--minpts", min_pts, "Minimum neighborhood size for a core point")->required();
    bench->add_option("--repeats", repeats, "Timing repeats per delta")->check(CLI::PositiveNumber);
    bench->add_option("--seed", seed, "Seed for the addition stream");
    bench->add_option("--report", report_path, "Report CSV to write")->required();

    auto* delta = app.add_subcommand("delta", "Compute the delta change and the rerun decision");
    delta->add_option("--old", old_size, "Original dataset size")->required();
    delta->add_option("--added", added, "Number of added points")->required();
    auto* threshold_opt = delta->add_option("--threshold", threshold, "Rerun threshold x in percent");

    std::reverse(args.begin(), args.end());
    try {
        app.parse(args);
    } catch (const CLI::ParseError& e) {
        return app.exit(e, out, err);
    }

    try {
        if (*cluster) {
            Params params;
            params.eps = eps;
            params.min_pts = min_pts;
            params.metric = parse_metric(metric_name);
            params.validate();
            const Dataset ds = load_csv(input);
            if (ds.empty())
                throw InvalidInput(input + " contains no points");
            const ClusterModel model = dbscan(ds, params);
            save_model(model, output);
            out << "clusters: " << model.clusters.size() << "\n"
                << "outliers: " << model.outliers.size() << "\n";
        } else if (*insert_cmd) {
            ClusterModel model = load_model(model_path);
            if (!rule_name.empty())
                model.params.outlier_rule = parse_outlier_rule(rule_name);
            const Dataset ds = load_csv(input);
            std::vector<InsertOutcome> outcomes;
            try {
                outcomes = batch_insert(model, std::span<const Point>(ds.points()));
            } catch (const BatchInsertError& e) {
                for (std::size_t i = 0; i < e.applied().size(); ++i)
                    out << describe(ds[i].id, e.applied()[i]) << "\n";
                throw;
            }
            save_model(model, output);
            for (std::size_t i = 0; i < outcomes.size(); ++i)
                out << describe(ds[i].id, outcomes[i]) << "\n";
        } else if (*bench) {
            Params params;
            params.eps = eps;
            params.min_pts = min_pts;
            params.outlier_rule = OutlierRule::density;
            params.validate();
            const Dataset base = load_csv(base_path);
            AdditionSpec spec;
            spec.seed = seed;
            const BenchReport report = sweep(base, spec, params, detail::parse_percent_list(deltas), repeats);
            std::ostringstream csv;
            write_report_csv(csv, report);
            write_file_atomic(report_path, csv.str());
            out << "trials: " << report.trials.size() << "\n"
                << "crossover_x: " << (report.crossover_x ? format_real(*report.crossover_x) : "none") << "\n"
                << "recommended_x: " << (report.recommended_x ? format_real(*report.recommended_x) : "none")
                << "\n";
        } else if (*delta) {
            const DeltaStats stats = DeltaStats::of(old_size, added);
            out << "delta_percent=" << format_real(stats.delta_percent) << "\n";
            if (*threshold_opt) {
                if (!(threshold > 0.0))
                    throw InvalidInput("--threshold must be positive");
                out << "decision=" << to_string(should_rerun(stats, RerunPolicy{threshold})) << "\n";
            }
        }
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}

} // namespace incdbscan
