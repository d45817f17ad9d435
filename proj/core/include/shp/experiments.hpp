#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "shp/estimators.hpp"
#include "shp/simulate.hpp"

namespace shp {

/// The four ways of learning the infectivity matrix from a multi-source
/// suite.
enum class StrategyKind {
    SingleSourceHP,   // one model's sequences only
    MultiSourceHP,    // every sequence, source tags ignored
    MultiSourceMHP,   // joint fit, one mu per source
    SuperpositionHP,  // sequences merged per plan, single fit
};

enum class EstimatorKind { LeastSquares, MaxLikelihood };

const char* strategy_kind_name(StrategyKind s);
const char* estimator_kind_name(EstimatorKind e);
StrategyKind strategy_kind_from_name(const std::string& name);
EstimatorKind estimator_kind_from_name(const std::string& name);

struct ExperimentConfig {
    std::vector<int> model_counts{2, 5, 10};  // K
    std::vector<int> dims{5, 10};             // D
    int seqs_per_model = 20;
    double horizon = 100.0;
    int trials = 10;
    EstimatorKind estimator = EstimatorKind::LeastSquares;
    std::vector<StrategyKind> strategies{
        StrategyKind::SingleSourceHP, StrategyKind::MultiSourceHP,
        StrategyKind::MultiSourceMHP, StrategyKind::SuperpositionHP};
    std::uint64_t base_seed = 20180401;
    int threads = 0;
};

struct TrialRecord {
    EstimatorKind estimator{};
    StrategyKind strategy{};
    int model_count = 0;
    int dim_count = 0;
    int trial = 0;
    std::uint64_t seed = 0;
    double rel_error = 0.0;
    double seconds = 0.0;
    bool failed = false;
    std::string error;
};

struct StrategySummary {
    EstimatorKind estimator{};
    StrategyKind strategy{};
    int model_count = 0;
    int dim_count = 0;
    double mean_rel_error = 0.0;
    double std_rel_error = 0.0;
    double mean_seconds = 0.0;
    int trials = 0;
    int failures = 0;
};

struct ExperimentReport {
    ExperimentConfig config;
    std::vector<TrialRecord> records;       // deterministic order
    std::vector<StrategySummary> summaries;
};

/// || A_hat - A_star ||_F / || A_star ||_F. Throws DataError when A_star is
/// all zeros or shapes differ.
double relative_error(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& a_star);

struct SuperpositionPlan {
    std::vector<std::vector<std::pair<int, int>>> groups;  // (model, replicate)
    bool truncated = false;  // unequal per-model counts, paired up to the minimum
};

/// Group g holds replicate g of every model: with K models and n sequences
/// per model this yields n groups of K. Unequal counts pair up to the
/// minimum and set the truncated flag.
SuperpositionPlan superposition_plan(int model_count, int seqs_per_model);
SuperpositionPlan superposition_plan(const std::vector<int>& counts_per_model);

/// One synthetic trial: fit the requested strategy on the suite and return
/// the infectivity estimate.
Eigen::MatrixXd fit_strategy(const SyntheticSuite& suite, StrategyKind strategy,
                             EstimatorKind estimator);

/// Full synthetic comparison: fresh suite per trial, every configured
/// strategy fit on it, relative errors and runtimes aggregated. Trials run
/// in parallel on independent seed substreams; the report only depends on
/// the config.
ExperimentReport run_experiment(const ExperimentConfig& config);

/// Plot-ready outputs: one row per (strategy, K, D, trial) and a mean/std
/// summary.
void write_results_csv(const ExperimentReport& report, std::ostream& out);
void write_summary_csv(const ExperimentReport& report, std::ostream& out);

}  // namespace shp
