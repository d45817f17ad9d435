#pragma once

#include <Eigen/Dense>
#include <iosfwd>
#include <map>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "shp/estimators.hpp"
#include "shp/events.hpp"
#include "shp/experiments.hpp"

namespace shp {

/// One buying-and-rating record. Timestamps are days since the unix epoch.
struct RatingEvent {
    std::string user;
    std::string item;
    double day = 0.0;
    int rating = 0;
};

/// Day offset of an ISO date (YYYY-MM-DD) from the unix epoch.
double day_from_iso_date(const std::string& iso);

struct IngestParams {
    int min_item_ratings = 40;  // keep items rated at least this often
    int max_train_events = 3;   // cold-start cap on train-window behaviors
    int min_rating = 4;         // train-window scores must all reach this
    double train_start_day = 0.0;  // defaults set in make_default_windows()
    double train_end_day = 0.0;
    double test_start_day = 0.0;
    double test_end_day = 0.0;

    static IngestParams with_default_windows();
};

/// Cold-start dataset: an item vocabulary, one training sequence per user
/// over the train window (times in days from its start), and the set of
/// items each user actually bought in the test window.
struct RecDataset {
    std::vector<std::string> items;  // dimension -> item id
    std::unordered_map<std::string, int> item_dims;
    std::vector<std::string> users;
    std::vector<EventSequence> train;        // per user, horizon = train window length
    std::vector<std::vector<int>> truth;     // per user, sorted unique dimensions
    std::vector<int> popularity;             // train purchase count per dimension
    std::size_t skipped_rows = 0;

    int dim_count() const { return static_cast<int>(items.size()); }
    int user_count() const { return static_cast<int>(users.size()); }
};

/// Parses `user,item,rating,timestamp` rows; timestamps may be unix seconds
/// or ISO dates (auto-detected). Malformed rows are skipped and counted.
std::vector<RatingEvent> parse_ratings_csv(std::istream& in, std::size_t* skipped_rows);

/// Applies the cold-start filters: items below min_item_ratings dropped;
/// users kept when their train-window behaviors number between 1 and
/// max_train_events, all carry scores >= min_rating, and at least one test
/// window purchase exists. Throws DataError when nothing survives.
RecDataset ingest_and_filter(const std::vector<RatingEvent>& ratings,
                             const IngestParams& params);

/// Endogenous intensity of every item at query time t given a history:
///   score[d] = sum over history events of A(d, d_i) exp(-w (t - t_i)).
/// An empty history yields all-zero scores.
Eigen::VectorXd score_items(const Eigen::MatrixXd& a_hat, double w,
                            const EventSequence& history, double t);

/// Top-N dimensions by score, descending; ties broken by popularity then
/// item id; `exclude` entries are skipped. May return fewer than N.
/// All-zero scores degrade to the popularity ranking, which is exactly the
/// MostPopular fallback for cold users.
std::vector<int> recommend_topn(const Eigen::VectorXd& scores, int n,
                                const std::vector<int>& popularity,
                                const std::vector<std::string>& items,
                                const std::set<int>& exclude);

struct TopNMetrics {
    double precision = 0.0;  // percent
    double recall = 0.0;     // percent
    double f1 = 0.0;         // percent scale, averaged per user
};

/// Per-user precision, recall and F1 of the first N entries of each list,
/// averaged over users, in percent. A user with an empty list contributes
/// zeros; per-user F1 with P = R = 0 is defined as 0.
TopNMetrics evaluate(const std::vector<std::vector<int>>& recs,
                     const std::vector<std::vector<int>>& truth, int n);

/// The same train-popularity top-N list for every user.
std::vector<int> most_popular_baseline(const RecDataset& data, int n);

struct RecommendConfig {
    double w = 1.0;                    // kernel decay per day
    std::vector<int> top_ns{5, 10, 20};
    int group_size = 20;               // users per superposition batch
    EstimatorKind estimator = EstimatorKind::LeastSquares;
    bool exclude_bought = true;
    int threads = 0;
    LsOptions ls;
    MleOptions mle;
};

struct MethodResult {
    std::string name;
    std::map<int, TopNMetrics> metrics;       // keyed by N
    std::vector<std::vector<int>> recs;       // per user, ranked, max(top_ns) long
};

struct RecommendReport {
    std::vector<MethodResult> methods;  // superposition_hp, multi_source_mhp, most_popular
    Eigen::MatrixXd a_super;
    Eigen::MatrixXd a_mhp;
};

/// Learns the infectivity matrix with the superposition strategy (users
/// batched into ceil(M/group_size) superposed sequences) and with the
/// per-user multi-source strategy, scores every user at the train-window
/// end, and evaluates against the test-window purchases next to the
/// MostPopular baseline.
RecommendReport run_recommend(const RecDataset& data, const RecommendConfig& config);

void write_recs_jsonl(const RecDataset& data, const MethodResult& method, std::ostream& out);
void write_metrics_json(const RecommendReport& report, std::ostream& out);

}  // namespace shp
