#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "psdes/classifiers.hpp"
#include "psdes/metrics.hpp"
#include "psdes/post_selection.hpp"
#include "psdes/selection.hpp"

namespace psdes {

enum class ScalerScope { train_only, full };

// Full benchmark configuration. parse_config reads the flat key=value file
// documented in the README; unknown keys are errors.
struct ExperimentConfig {
    std::vector<std::string> dataset_paths;
    std::array<double, 3> fractions{0.5, 0.25, 0.25};
    int replications = 30;
    std::uint64_t seed = 42;
    int bootstraps = 100;
    std::vector<ClassifierKind> base_classifiers{ClassifierKind::perceptron,
                                                 ClassifierKind::logistic_regression,
                                                 ClassifierKind::gaussian_nb};
    std::size_t k = 7;
    std::size_t kp_knop = 7;
    std::size_t kp_meta = 5;
    double h_c = 1.0;
    std::vector<DesTechnique> des_set{DesTechnique::knora_u, DesTechnique::knop,
                                      DesTechnique::des_p, DesTechnique::meta_des};
    std::vector<std::string> methods{"knora_u",    "knop",     "des_p",      "meta_des",
                                     "ps_des_acc", "ps_des_f", "ps_des_mcc", "ps_des_random"};
    FPositiveConvention f_convention = FPositiveConvention::majority_label;
    std::vector<std::string> metrics{"accuracy", "f_macro", "mcc"};
    std::string output_dir = "results";
    ScalerScope scaler_scope = ScalerScope::train_only;
    Alternative wilcoxon_alternative = Alternative::greater;
    ZeroPolicy wilcoxon_zero_policy = ZeroPolicy::drop;
    int jobs = 0;  // 0 = hardware concurrency

    void validate() const;
};

ExperimentConfig parse_config(std::istream& in);
ExperimentConfig parse_config_file(const std::string& path);
std::string config_hash(const ExperimentConfig& config);

struct ScoreRecord {
    std::string dataset;
    int replication = 0;
    std::string method;
    std::string metric;
    double value = 0.0;
};

struct ResultsStore {
    std::vector<ScoreRecord> records;
    std::string config_digest;
    std::uint64_t seed = 0;
    std::vector<std::string> failures;  // skipped datasets/cells with reasons

    void save_csv(std::ostream& out) const;
    void save_csv(const std::string& path) const;
    static ResultsStore load_csv(std::istream& in);
    static ResultsStore load_csv(const std::string& path);
};

// Runs the full protocol: per dataset and replication, a fresh stratified
// holdout, scaling, pool construction, and evaluation of every configured
// method under every metric on the test split. Deterministic for a given
// config and seed; cells run in parallel across `jobs` workers.
ResultsStore run_experiment(const ExperimentConfig& config, bool verbose = false);

// Per-dataset evaluation of one prepared cell, exposed for tests.
std::vector<ScoreRecord> evaluate_cell(const Dataset& dataset, const ExperimentConfig& config,
                                       int replication);

struct ControlStats {
    std::string control;
    std::string metric;
    std::vector<std::string> others;
    std::vector<WinTieLoss> wtl;
    std::vector<double> p_values;  // NaN when not computable
};

struct AggregateReport {
    std::vector<std::string> metrics;
    std::vector<ScoreTable> tables;           // parallel to metrics
    std::vector<std::vector<double>> ranks;   // parallel to metrics
    std::vector<ControlStats> control_stats;  // one per (control, metric)
    std::vector<std::string> notes;
};

struct ReportOptions {
    Alternative alternative = Alternative::greater;
    ZeroPolicy zero_policy = ZeroPolicy::drop;
    std::vector<std::string> controls{"ps_des_acc", "ps_des_f", "ps_des_mcc"};
};

AggregateReport aggregate(const ResultsStore& store, const ReportOptions& options);
void write_reports(const AggregateReport& report, const ResultsStore& store,
                   const std::string& out_dir);

}  // namespace psdes
