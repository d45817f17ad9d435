#include "shp/experiments.hpp"

#include <chrono>
#include <cmath>
#include <ostream>

#include "shp/design.hpp"
#include "shp/errors.hpp"
#include "shp/parallel.hpp"

namespace shp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::vector<int> per_model_counts(const SyntheticSuite& suite) {
    std::vector<int> counts;
    counts.reserve(suite.sequences.size());
    for (const auto& seqs : suite.sequences) counts.push_back(static_cast<int>(seqs.size()));
    return counts;
}

/// Plan groups translated to indices into flatten(suite)'s model-major order.
std::vector<std::vector<int>> plan_as_flat_indices(const SyntheticSuite& suite) {
    const std::vector<int> counts = per_model_counts(suite);
    std::vector<int> offsets(counts.size() + 1, 0);
    for (std::size_t k = 0; k < counts.size(); ++k) {
        offsets[k + 1] = offsets[k] + counts[k];
    }
    const SuperpositionPlan plan = superposition_plan(counts);
    std::vector<std::vector<int>> groups;
    groups.reserve(plan.groups.size());
    for (const auto& group : plan.groups) {
        std::vector<int> flat;
        flat.reserve(group.size());
        for (const auto& [model, replicate] : group) {
            flat.push_back(offsets[static_cast<std::size_t>(model)] + replicate);
        }
        groups.push_back(std::move(flat));
    }
    return groups;
}

std::vector<EventSequence> superposed_groups(const SyntheticSuite& suite) {
    const SuperpositionPlan plan = superposition_plan(per_model_counts(suite));
    std::vector<EventSequence> merged;
    merged.reserve(plan.groups.size());
    for (const auto& group : plan.groups) {
        std::vector<EventSequence> members;
        members.reserve(group.size());
        for (const auto& [model, replicate] : group) {
            members.push_back(suite.sequences[static_cast<std::size_t>(model)]
                                             [static_cast<std::size_t>(replicate)]);
        }
        merged.push_back(superpose(members));
    }
    return merged;
}

}  // namespace

const char* strategy_kind_name(StrategyKind s) {
    switch (s) {
        case StrategyKind::SingleSourceHP: return "single_source_hp";
        case StrategyKind::MultiSourceHP: return "multi_source_hp";
        case StrategyKind::MultiSourceMHP: return "multi_source_mhp";
        case StrategyKind::SuperpositionHP: return "superposition_hp";
    }
    return "?";
}

const char* estimator_kind_name(EstimatorKind e) {
    return e == EstimatorKind::LeastSquares ? "ls" : "mle";
}

StrategyKind strategy_kind_from_name(const std::string& name) {
    for (StrategyKind s : {StrategyKind::SingleSourceHP, StrategyKind::MultiSourceHP,
                           StrategyKind::MultiSourceMHP, StrategyKind::SuperpositionHP}) {
        if (name == strategy_kind_name(s)) return s;
    }
    throw DataError("unknown strategy '" + name + "'");
}

EstimatorKind estimator_kind_from_name(const std::string& name) {
    if (name == "ls") return EstimatorKind::LeastSquares;
    if (name == "mle") return EstimatorKind::MaxLikelihood;
    throw DataError("unknown estimator '" + name + "'");
}

double relative_error(const Eigen::MatrixXd& a_hat, const Eigen::MatrixXd& a_star) {
    if (a_hat.rows() != a_star.rows() || a_hat.cols() != a_star.cols()) {
        throw DataError("relative_error: shape mismatch");
    }
    const double denom = a_star.norm();
    if (denom == 0.0) throw DataError("relative_error: reference matrix is zero");
    return (a_hat - a_star).norm() / denom;
}

SuperpositionPlan superposition_plan(int model_count, int seqs_per_model) {
    if (model_count < 1 || seqs_per_model < 1) {
        throw DataError("superposition_plan: counts must be at least 1");
    }
    return superposition_plan(std::vector<int>(static_cast<std::size_t>(model_count),
                                               seqs_per_model));
}

SuperpositionPlan superposition_plan(const std::vector<int>& counts_per_model) {
    if (counts_per_model.empty()) throw DataError("superposition_plan: no models");
    int min_count = counts_per_model.front();
    int max_count = min_count;
    for (int c : counts_per_model) {
        if (c < 0) throw DataError("superposition_plan: negative count");
        min_count = std::min(min_count, c);
        max_count = std::max(max_count, c);
    }

    SuperpositionPlan plan;
    plan.truncated = min_count != max_count;
    plan.groups.reserve(static_cast<std::size_t>(min_count));
    for (int g = 0; g < min_count; ++g) {
        std::vector<std::pair<int, int>> group;
        group.reserve(counts_per_model.size());
        for (int k = 0; k < static_cast<int>(counts_per_model.size()); ++k) {
            group.emplace_back(k, g);
        }
        plan.groups.push_back(std::move(group));
    }
    return plan;
}

Eigen::MatrixXd fit_strategy(const SyntheticSuite& suite, StrategyKind strategy,
                             EstimatorKind estimator) {
    const double w = suite.models.front().w;
    const bool ls = estimator == EstimatorKind::LeastSquares;

    FitResult fit;
    switch (strategy) {
        case StrategyKind::SingleSourceHP: {
            const auto& data = suite.sequences.front();
            fit = ls ? fit_ls(build_single(data, w))
                     : fit_mle(data, w, MleLayout::Single);
            break;
        }
        case StrategyKind::MultiSourceHP: {
            std::vector<EventSequence> data = flatten(suite);
            for (auto& s : data) s.source.reset();  // one shared mu
            fit = ls ? fit_ls(build_single(data, w))
                     : fit_mle(data, w, MleLayout::Single);
            break;
        }
        case StrategyKind::MultiSourceMHP: {
            const std::vector<EventSequence> data = flatten(suite);
            fit = ls ? fit_ls(build_multi(data, w)) : fit_mle(data, w, MleLayout::Multi);
            break;
        }
        case StrategyKind::SuperpositionHP: {
            if (ls) {
                fit = fit_ls(build_super(flatten(suite), w, plan_as_flat_indices(suite)));
            } else {
                fit = fit_mle(superposed_groups(suite), w, MleLayout::Single);
                fit.strategy = Strategy::Super;
            }
            break;
        }
    }
    return fit.models.front().A;
}

ExperimentReport run_experiment(const ExperimentConfig& config) {
    if (config.trials < 1) throw DataError("run_experiment: trials must be at least 1");
    if (config.strategies.empty()) throw DataError("run_experiment: no strategies");

    struct Cell {
        int model_count;
        int dim_count;
        int trial;
    };
    std::vector<Cell> cells;
    for (int k : config.model_counts) {
        for (int d : config.dims) {
            for (int trial = 0; trial < config.trials; ++trial) {
                cells.push_back({k, d, trial});
            }
        }
    }

    std::vector<std::vector<TrialRecord>> slots(cells.size());
    parallel_for(cells.size(), config.threads, [&](std::size_t idx) {
        const Cell cell = cells[idx];
        const std::uint64_t seed =
            Rng::substream(config.base_seed, static_cast<std::uint64_t>(cell.model_count),
                           static_cast<std::uint64_t>(cell.dim_count),
                           static_cast<std::uint64_t>(cell.trial) + 1)
                .next_u64();
        const SyntheticSuite suite = make_synthetic_suite(
            cell.model_count, cell.dim_count, config.seqs_per_model, config.horizon, seed);
        const Eigen::MatrixXd& a_star = suite.models.front().A;

        for (StrategyKind strategy : config.strategies) {
            TrialRecord record;
            record.estimator = config.estimator;
            record.strategy = strategy;
            record.model_count = cell.model_count;
            record.dim_count = cell.dim_count;
            record.trial = cell.trial;
            record.seed = seed;
            const auto start = Clock::now();
            try {
                const Eigen::MatrixXd a_hat =
                    fit_strategy(suite, strategy, config.estimator);
                record.rel_error = relative_error(a_hat, a_star);
            } catch (const std::exception& e) {  // recorded, not fatal
                record.failed = true;
                record.error = e.what();
            }
            record.seconds = seconds_since(start);
            slots[idx].push_back(std::move(record));
        }
    });

    ExperimentReport report;
    report.config = config;
    for (auto& slot : slots) {
        for (auto& record : slot) report.records.push_back(std::move(record));
    }

    for (int k : config.model_counts) {
        for (int d : config.dims) {
            for (StrategyKind strategy : config.strategies) {
                StrategySummary summary;
                summary.estimator = config.estimator;
                summary.strategy = strategy;
                summary.model_count = k;
                summary.dim_count = d;
                double sum = 0.0, sum_sq = 0.0, time_sum = 0.0;
                int n = 0;
                for (const auto& record : report.records) {
                    if (record.strategy != strategy || record.model_count != k ||
                        record.dim_count != d) {
                        continue;
                    }
                    ++summary.trials;
                    if (record.failed) {
                        ++summary.failures;
                        continue;
                    }
                    sum += record.rel_error;
                    sum_sq += record.rel_error * record.rel_error;
                    time_sum += record.seconds;
                    ++n;
                }
                if (n > 0) {
                    summary.mean_rel_error = sum / n;
                    summary.mean_seconds = time_sum / n;
                    const double var =
                        std::max(0.0, sum_sq / n - summary.mean_rel_error *
                                                       summary.mean_rel_error);
                    summary.std_rel_error = std::sqrt(var);
                }
                report.summaries.push_back(summary);
            }
        }
    }
    return report;
}

void write_results_csv(const ExperimentReport& report, std::ostream& out) {
    out << "estimator,strategy,K,D,trial,rel_error,seconds\n";
    out.precision(17);
    for (const auto& r : report.records) {
        out << estimator_kind_name(r.estimator) << ',' << strategy_kind_name(r.strategy)
            << ',' << r.model_count << ',' << r.dim_count << ',' << r.trial << ',';
        if (r.failed) {
            out << "nan";
        } else {
            out << r.rel_error;
        }
        out << ',' << r.seconds << '\n';
    }
}

void write_summary_csv(const ExperimentReport& report, std::ostream& out) {
    out << "estimator,strategy,K,D,mean_rel_error,std_rel_error,mean_seconds,trials,"
           "failures\n";
    out.precision(17);
    for (const auto& s : report.summaries) {
        out << estimator_kind_name(s.estimator) << ',' << strategy_kind_name(s.strategy)
            << ',' << s.model_count << ',' << s.dim_count << ',' << s.mean_rel_error
            << ',' << s.std_rel_error << ',' << s.mean_seconds << ',' << s.trials << ','
            << s.failures << '\n';
    }
}

}  // namespace shp
