#include "shp/recommend.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <json.hpp>
#include <numeric>
#include <ostream>
#include <sstream>

#include "shp/design.hpp"
#include "shp/errors.hpp"
#include "shp/parallel.hpp"

namespace shp {

namespace {

using nlohmann::json;

constexpr double kSecondsPerDay = 86400.0;

// Days since the unix epoch of a civil date (Gregorian, proleptic).
long days_from_civil(int y, int m, int d) {
    y -= m <= 2;
    const long era = (y >= 0 ? y : y - 399) / 400;
    const unsigned yoe = static_cast<unsigned>(y - era * 400);
    const unsigned doy = (153u * static_cast<unsigned>(m + (m > 2 ? -3 : 9)) + 2u) / 5u +
                         static_cast<unsigned>(d) - 1u;
    const unsigned doe = yoe * 365u + yoe / 4u - yoe / 100u + doy;
    return era * 146097L + static_cast<long>(doe) - 719468L;
}

bool parse_timestamp(const std::string& field, double* day) {
    if (field.size() == 10 && field[4] == '-' && field[7] == '-') {
        int y = 0, m = 0, d = 0;
        char dash1 = 0, dash2 = 0;
        std::istringstream in(field);
        if ((in >> y >> dash1 >> m >> dash2 >> d) && dash1 == '-' && dash2 == '-' &&
            m >= 1 && m <= 12 && d >= 1 && d <= 31) {
            *day = static_cast<double>(days_from_civil(y, m, d));
            return true;
        }
        return false;
    }
    try {
        std::size_t used = 0;
        const double seconds = std::stod(field, &used);
        if (used != field.size() || !std::isfinite(seconds)) return false;
        *day = seconds / kSecondsPerDay;
        return true;
    } catch (const std::exception&) {
        return false;
    }
}

std::vector<std::string> split_csv_row(const std::string& line) {
    std::vector<std::string> fields;
    std::string field;
    std::istringstream in(line);
    while (std::getline(in, field, ',')) fields.push_back(field);
    return fields;
}

}  // namespace

double day_from_iso_date(const std::string& iso) {
    double day = 0.0;
    if (!parse_timestamp(iso, &day) || iso.find('-') == std::string::npos) {
        throw DataError("expected ISO date YYYY-MM-DD, got '" + iso + "'");
    }
    return day;
}

IngestParams IngestParams::with_default_windows() {
    IngestParams params;
    params.train_start_day = day_from_iso_date("2014-01-01");
    params.train_end_day = day_from_iso_date("2014-04-01");
    params.test_start_day = day_from_iso_date("2014-04-01");
    params.test_end_day = day_from_iso_date("2014-08-01");
    return params;
}

std::vector<RatingEvent> parse_ratings_csv(std::istream& in, std::size_t* skipped_rows) {
    std::vector<RatingEvent> ratings;
    std::size_t skipped = 0;
    std::string line;
    bool first = true;
    while (std::getline(in, line)) {
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        if (first && line.rfind("user,", 0) == 0) {
            first = false;
            continue;  // header
        }
        first = false;
        const auto fields = split_csv_row(line);
        RatingEvent event;
        bool ok = fields.size() == 4 && !fields[0].empty() && !fields[1].empty();
        if (ok) {
            event.user = fields[0];
            event.item = fields[1];
            try {
                std::size_t used = 0;
                event.rating = std::stoi(fields[2], &used);
                ok = used == fields[2].size() && event.rating >= 1 && event.rating <= 5;
            } catch (const std::exception&) {
                ok = false;
            }
        }
        ok = ok && parse_timestamp(fields[3], &event.day);
        if (ok) {
            ratings.push_back(std::move(event));
        } else {
            ++skipped;
        }
    }
    if (skipped_rows != nullptr) *skipped_rows = skipped;
    return ratings;
}

RecDataset ingest_and_filter(const std::vector<RatingEvent>& ratings,
                             const IngestParams& params) {
    if (!(params.train_end_day > params.train_start_day) ||
        !(params.test_end_day > params.test_start_day)) {
        throw DataError("ingest_and_filter: empty train or test window");
    }

    // Item activity is counted over the whole stream.
    std::unordered_map<std::string, int> item_counts;
    for (const auto& r : ratings) ++item_counts[r.item];
    const auto item_ok = [&](const std::string& item) {
        return item_counts.at(item) >= params.min_item_ratings;
    };

    const auto in_train = [&](double day) {
        return day >= params.train_start_day && day < params.train_end_day;
    };
    const auto in_test = [&](double day) {
        return day >= params.test_start_day && day < params.test_end_day;
    };

    struct UserEvents {
        std::vector<const RatingEvent*> train;
        std::vector<const RatingEvent*> test;
    };
    std::map<std::string, UserEvents> by_user;  // ordered for determinism
    for (const auto& r : ratings) {
        if (!item_ok(r.item)) continue;
        if (in_train(r.day)) by_user[r.user].train.push_back(&r);
        if (in_test(r.day)) by_user[r.user].test.push_back(&r);
    }

    // Cold-start selection: between one and max_train_events train-window
    // behaviors, all rated at least min_rating, and something to predict.
    std::vector<std::pair<std::string, const UserEvents*>> selected;
    for (const auto& [user, events] : by_user) {
        if (events.train.empty() ||
            static_cast<int>(events.train.size()) > params.max_train_events) {
            continue;
        }
        const bool scores_ok =
            std::all_of(events.train.begin(), events.train.end(),
                        [&](const RatingEvent* e) { return e->rating >= params.min_rating; });
        if (!scores_ok || events.test.empty()) continue;
        selected.emplace_back(user, &events);
    }
    if (selected.empty()) {
        throw DataError("ingest_and_filter: no users survive the cold-start filters");
    }

    RecDataset data;
    std::set<std::string> vocabulary;
    for (const auto& [user, events] : selected) {
        for (const auto* e : events->train) vocabulary.insert(e->item);
        for (const auto* e : events->test) vocabulary.insert(e->item);
    }
    data.items.assign(vocabulary.begin(), vocabulary.end());
    for (int d = 0; d < static_cast<int>(data.items.size()); ++d) {
        data.item_dims[data.items[static_cast<std::size_t>(d)]] = d;
    }

    const double horizon = params.train_end_day - params.train_start_day;
    data.popularity.assign(data.items.size(), 0);
    for (const auto& [user, events] : selected) {
        data.users.push_back(user);

        std::vector<Event> train_events;
        train_events.reserve(events->train.size());
        for (const auto* e : events->train) {
            const double t = e->day - params.train_start_day;
            const int dim = data.item_dims.at(e->item);
            train_events.push_back({t == 0.0 ? 1e-9 * horizon : t, dim});
            ++data.popularity[static_cast<std::size_t>(dim)];
        }
        // Same-day purchases keep their input order before the tie perturbation.
        std::stable_sort(train_events.begin(), train_events.end(),
                         [](const Event& a, const Event& b) { return a.t < b.t; });
        enforce_strict_order(train_events, horizon);
        EventSequence seq{std::move(train_events), static_cast<int>(data.items.size()),
                          horizon, static_cast<int>(data.users.size()) - 1};
        data.train.push_back(std::move(seq));

        std::vector<int> truth;
        for (const auto* e : events->test) truth.push_back(data.item_dims.at(e->item));
        std::sort(truth.begin(), truth.end());
        truth.erase(std::unique(truth.begin(), truth.end()), truth.end());
        data.truth.push_back(std::move(truth));
    }
    return data;
}

Eigen::VectorXd score_items(const Eigen::MatrixXd& a_hat, double w,
                            const EventSequence& history, double t) {
    if (a_hat.rows() != history.dim_count || a_hat.cols() != history.dim_count) {
        throw DataError("score_items: infectivity shape mismatch");
    }
    Eigen::VectorXd scores = Eigen::VectorXd::Zero(history.dim_count);
    for (const auto& e : history.events) {
        if (e.t > t) break;
        scores += std::exp(-w * (t - e.t)) * a_hat.col(e.dim);
    }
    return scores;
}

std::vector<int> recommend_topn(const Eigen::VectorXd& scores, int n,
                                const std::vector<int>& popularity,
                                const std::vector<std::string>& items,
                                const std::set<int>& exclude) {
    if (n < 1) throw DataError("recommend_topn: N must be at least 1");
    const int d = static_cast<int>(scores.size());
    if (static_cast<int>(popularity.size()) != d || static_cast<int>(items.size()) != d) {
        throw DataError("recommend_topn: popularity/items size mismatch");
    }
    std::vector<int> candidates;
    candidates.reserve(static_cast<std::size_t>(d));
    for (int i = 0; i < d; ++i) {
        if (!exclude.contains(i)) candidates.push_back(i);
    }
    std::sort(candidates.begin(), candidates.end(), [&](int a, int b) {
        if (scores(a) != scores(b)) return scores(a) > scores(b);
        const auto pa = popularity[static_cast<std::size_t>(a)];
        const auto pb = popularity[static_cast<std::size_t>(b)];
        if (pa != pb) return pa > pb;
        return items[static_cast<std::size_t>(a)] < items[static_cast<std::size_t>(b)];
    });
    if (static_cast<int>(candidates.size()) > n) candidates.resize(static_cast<std::size_t>(n));
    return candidates;
}

TopNMetrics evaluate(const std::vector<std::vector<int>>& recs,
                     const std::vector<std::vector<int>>& truth, int n) {
    if (recs.size() != truth.size()) throw DataError("evaluate: user sets disagree");
    if (recs.empty()) throw DataError("evaluate: no users");

    TopNMetrics metrics;
    for (std::size_t u = 0; u < recs.size(); ++u) {
        const std::size_t len = std::min<std::size_t>(recs[u].size(),
                                                      static_cast<std::size_t>(n));
        int hits = 0;
        for (std::size_t i = 0; i < len; ++i) {
            if (std::binary_search(truth[u].begin(), truth[u].end(), recs[u][i])) ++hits;
        }
        const double precision = len > 0 ? 100.0 * hits / static_cast<double>(len) : 0.0;
        const double recall =
            truth[u].empty() ? 0.0 : 100.0 * hits / static_cast<double>(truth[u].size());
        const double f1 = precision + recall > 0.0
                              ? 2.0 * precision * recall / (precision + recall)
                              : 0.0;
        metrics.precision += precision;
        metrics.recall += recall;
        metrics.f1 += f1;
    }
    const auto m = static_cast<double>(recs.size());
    metrics.precision /= m;
    metrics.recall /= m;
    metrics.f1 /= m;
    return metrics;
}

std::vector<int> most_popular_baseline(const RecDataset& data, int n) {
    std::vector<int> dims(data.items.size());
    std::iota(dims.begin(), dims.end(), 0);
    std::sort(dims.begin(), dims.end(), [&](int a, int b) {
        const auto pa = data.popularity[static_cast<std::size_t>(a)];
        const auto pb = data.popularity[static_cast<std::size_t>(b)];
        if (pa != pb) return pa > pb;
        return data.items[static_cast<std::size_t>(a)] < data.items[static_cast<std::size_t>(b)];
    });
    if (static_cast<int>(dims.size()) > n) dims.resize(static_cast<std::size_t>(n));
    return dims;
}

namespace {

/// Contiguous user batches of at most group_size members.
std::vector<std::vector<int>> user_batches(int users, int group_size) {
    const int groups = (users + group_size - 1) / group_size;
    std::vector<std::vector<int>> batches(static_cast<std::size_t>(groups));
    for (int u = 0; u < users; ++u) {
        batches[static_cast<std::size_t>(u / group_size)].push_back(u);
    }
    return batches;
}

Eigen::MatrixXd fit_super(const RecDataset& data, const RecommendConfig& config) {
    const auto batches = user_batches(data.user_count(), config.group_size);
    if (config.estimator == EstimatorKind::LeastSquares) {
        return fit_ls(build_super(data.train, config.w, batches), config.ls)
            .models.front().A;
    }
    std::vector<EventSequence> merged;
    merged.reserve(batches.size());
    for (const auto& batch : batches) {
        std::vector<EventSequence> members;
        members.reserve(batch.size());
        for (int u : batch) members.push_back(data.train[static_cast<std::size_t>(u)]);
        merged.push_back(superpose(members));
    }
    return fit_mle(merged, config.w, MleLayout::Single, config.mle).models.front().A;
}

Eigen::MatrixXd fit_mhp(const RecDataset& data, const RecommendConfig& config) {
    if (config.estimator == EstimatorKind::LeastSquares) {
        return fit_ls(build_multi(data.train, config.w), config.ls).models.front().A;
    }
    return fit_mle(data.train, config.w, MleLayout::Multi, config.mle).models.front().A;
}

}  // namespace

RecommendReport run_recommend(const RecDataset& data, const RecommendConfig& config) {
    if (data.user_count() == 0 || data.dim_count() == 0) {
        throw DataError("run_recommend: empty dataset");
    }
    if (config.top_ns.empty()) throw DataError("run_recommend: no N values");
    if (config.group_size < 1) throw DataError("run_recommend: group size must be >= 1");

    RecommendReport report;
    report.a_super = fit_super(data, config);
    report.a_mhp = fit_mhp(data, config);

    const int max_n = *std::max_element(config.top_ns.begin(), config.top_ns.end());
    const std::vector<int> popular = most_popular_baseline(data, max_n);

    MethodResult super{"superposition_hp", {}, {}};
    MethodResult mhp{"multi_source_mhp", {}, {}};
    MethodResult baseline{"most_popular", {}, {}};
    super.recs.resize(data.train.size());
    mhp.recs.resize(data.train.size());
    baseline.recs.assign(data.train.size(), popular);

    parallel_for(data.train.size(), config.threads, [&](std::size_t u) {
        const EventSequence& history = data.train[u];
        std::set<int> exclude;
        if (config.exclude_bought) {
            for (const auto& e : history.events) exclude.insert(e.dim);
        }
        const double query_time = history.horizon;
        // Empty histories produce all-zero scores, which the tie-breaking
        // rule turns into the MostPopular ranking.
        super.recs[u] = recommend_topn(score_items(report.a_super, config.w, history,
                                                   query_time),
                                       max_n, data.popularity, data.items, exclude);
        mhp.recs[u] = recommend_topn(score_items(report.a_mhp, config.w, history,
                                                 query_time),
                                     max_n, data.popularity, data.items, exclude);
    });

    for (int n : config.top_ns) {
        super.metrics[n] = evaluate(super.recs, data.truth, n);
        mhp.metrics[n] = evaluate(mhp.recs, data.truth, n);
        baseline.metrics[n] = evaluate(baseline.recs, data.truth, n);
    }
    report.methods = {std::move(super), std::move(mhp), std::move(baseline)};
    return report;
}

void write_recs_jsonl(const RecDataset& data, const MethodResult& method,
                      std::ostream& out) {
    for (std::size_t u = 0; u < data.users.size(); ++u) {
        json items = json::array();
        for (int dim : method.recs[u]) {
            items.push_back(data.items[static_cast<std::size_t>(dim)]);
        }
        const json line{{"user", data.users[u]}, {"items", items}};
        out << line.dump() << '\n';
    }
}

void write_metrics_json(const RecommendReport& report, std::ostream& out) {
    json by_n;
    for (const auto& method : report.methods) {
        for (const auto& [n, metrics] : method.metrics) {
            by_n[std::to_string(n)][method.name] = {{"P@N", metrics.precision},
                                                    {"R@N", metrics.recall},
                                                    {"F1@N", metrics.f1}};
        }
    }
    out << by_n.dump(2) << '\n';
}

}  // namespace shp
