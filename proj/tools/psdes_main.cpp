#include <cstdint>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "psdes/experiment.hpp"
#include "psdes/post_selection.hpp"

namespace {

int run_command(const std::string& config_path, const std::string& out_override,
                bool seed_given, std::uint64_t seed_override, int jobs_override, bool quiet) {
    psdes::ExperimentConfig config = psdes::parse_config_file(config_path);
    if (!out_override.empty()) config.output_dir = out_override;
    if (seed_given) config.seed = seed_override;
    if (jobs_override > 0) config.jobs = jobs_override;

    const auto store = psdes::run_experiment(config, !quiet);
    std::filesystem::create_directories(config.output_dir);
    const auto raw_path = std::filesystem::path(config.output_dir) / "raw_scores.csv";
    store.save_csv(raw_path.string());

    psdes::ReportOptions options;
    options.alternative = config.wilcoxon_alternative;
    options.zero_policy = config.wilcoxon_zero_policy;
    const auto report = psdes::aggregate(store, options);
    psdes::write_reports(report, store, config.output_dir);

    if (!quiet) {
        std::cerr << "raw scores: " << raw_path.string() << "\n";
        for (const auto& note : report.notes) std::cerr << note << "\n";
        for (const auto& failure : store.failures) std::cerr << "failure: " << failure << "\n";
    }
    return store.records.empty() ? 1 : 0;
}

int stats_command(const std::string& results_path, const std::string& out_dir) {
    const auto store = psdes::ResultsStore::load_csv(results_path);
    const auto report = psdes::aggregate(store, psdes::ReportOptions{});
    psdes::write_reports(report, store, out_dir);
    for (const auto& note : report.notes) std::cerr << note << "\n";
    return 0;
}

int potential_command(const std::string& votes_text, const std::string& metric_name) {
    std::vector<int> votes;
    std::string item;
    std::stringstream ss(votes_text);
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) votes.push_back(std::stoi(item));
    }
    psdes::PotentialMetric metric;
    metric.kind = psdes::potential_kind_from_string(metric_name);
    if (metric.kind == psdes::PotentialKind::random) {
        throw std::invalid_argument("potential subcommand supports acc, f and mcc");
    }
    std::printf("%.6f\n", psdes::potential(votes, metric));
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Post-selection dynamic ensemble selection benchmark"};
    app.require_subcommand(1);

    std::string config_path, out_dir, results_path, votes_text, metric_name;
    std::uint64_t seed = 0;
    int jobs = 0;
    bool quiet = false;

    auto* run = app.add_subcommand("run", "Run the benchmark described by a config file");
    run->add_option("--config", config_path, "Config file path")->required();
    run->add_option("--out", out_dir, "Output directory (overrides config)");
    auto* seed_opt = run->add_option("--seed", seed, "Master seed (overrides config)");
    run->add_option("--jobs", jobs, "Parallel workers (overrides config)");
    run->add_flag("--quiet", quiet, "Suppress progress output");

    auto* stats = app.add_subcommand("stats", "Recompute reports from a raw scores CSV");
    stats->add_option("--results", results_path, "raw_scores.csv path")->required();
    std::string stats_out = "results";
    stats->add_option("--out", stats_out, "Output directory");

    auto* pot = app.add_subcommand("potential", "Score one vote list with a potential metric");
    pot->add_option("--votes", votes_text, "Comma-separated class indices")->required();
    pot->add_option("--metric", metric_name, "acc, f or mcc")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) {
            return run_command(config_path, out_dir, seed_opt->count() > 0, seed, jobs, quiet);
        }
        if (stats->parsed()) return stats_command(results_path, stats_out);
        if (pot->parsed()) return potential_command(votes_text, metric_name);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
