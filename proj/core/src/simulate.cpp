#include "shp/simulate.hpp"

#include <cmath>
#include <deque>

#include "shp/errors.hpp"

namespace shp {

namespace {

void require_simulable(const HawkesModel& model, double horizon) {
    const ModelValidation check = validate_model(model);
    if (!check.ok()) {
        throw DataError("simulate: invalid model: " + check.issues.front());
    }
    if (!check.stationary) {
        throw NumericalError("simulate: non-stationary model (spectral radius " +
                             std::to_string(check.spectral_radius) +
                             " >= 1), expected cluster size diverges");
    }
    if (!(horizon > 0.0)) throw DataError("simulate: horizon must be positive");
}

}  // namespace

std::vector<Event> spawn_children(const HawkesModel& model, double t, int d,
                                  double horizon, Rng& rng) {
    std::vector<Event> children;
    const int dims = model.dim();
    for (int target = 0; target < dims; ++target) {
        const double mean = model.A(target, d) / model.w;
        const std::uint64_t count = rng.poisson(mean);
        for (std::uint64_t k = 0; k < count; ++k) {
            const double child_t = t + rng.exponential(model.w);
            if (child_t <= horizon) children.push_back({child_t, target});
        }
    }
    return children;
}

EventSequence simulate_branching(const HawkesModel& model, double horizon,
                                 std::uint64_t seed) {
    require_simulable(model, horizon);
    Rng rng = Rng::substream(seed, 0x6272616e63ULL);  // branching stream

    std::vector<Event> events;
    std::deque<Event> frontier;
    for (int d = 0; d < model.dim(); ++d) {
        const std::uint64_t immigrants = rng.poisson(model.mu(d) * horizon);
        for (std::uint64_t k = 0; k < immigrants; ++k) {
            frontier.push_back({rng.uniform(0.0, horizon), d});
        }
    }
    while (!frontier.empty()) {
        const Event e = frontier.front();
        frontier.pop_front();
        events.push_back(e);
        for (const Event& child : spawn_children(model, e.t, e.dim, horizon, rng)) {
            frontier.push_back(child);
        }
    }
    return canonicalize(std::move(events), model.dim(), horizon);
}

EventSequence simulate_thinning(const HawkesModel& model, double horizon,
                                std::uint64_t seed) {
    require_simulable(model, horizon);
    Rng rng = Rng::substream(seed, 0x7468696eULL);  // thinning stream

    const int dims = model.dim();
    std::vector<Event> events;
    // Excitation state right after the last accepted/considered time: the
    // intensity between events only decays, so the value at the current
    // time is a valid upper bound ahead of it.
    Eigen::VectorXd excitation = Eigen::VectorXd::Zero(dims);
    double t = 0.0;
    while (true) {
        const double bound = model.mu.sum() + excitation.sum();
        if (bound <= 0.0) break;  // nothing can ever fire
        const double wait = rng.exponential(bound);
        const double candidate = t + wait;
        if (candidate > horizon) break;

        const double decay = std::exp(-model.w * (candidate - t));
        excitation *= decay;
        t = candidate;

        const double total = model.mu.sum() + excitation.sum();
        if (rng.uniform() * bound > total) continue;  // rejected candidate

        // Pick the dimension proportionally to its intensity share.
        double u = rng.uniform() * total;
        int dim = dims - 1;
        for (int d = 0; d < dims; ++d) {
            const double lambda_d = model.mu(d) + excitation(d);
            if (u < lambda_d) {
                dim = d;
                break;
            }
            u -= lambda_d;
        }
        events.push_back({t, dim});
        excitation += model.A.col(dim);
    }
    return canonicalize(std::move(events), dims, horizon);
}

SyntheticSuite make_synthetic_suite(int model_count, int dim_count, int seqs_per_model,
                                    double horizon, std::uint64_t seed) {
    if (model_count < 1 || dim_count < 1 || seqs_per_model < 1) {
        throw DataError("make_synthetic_suite: counts must be at least 1");
    }

    // One shared infectivity matrix: i.i.d. uniform entries rescaled to
    // spectral norm 0.5; decay fixed at 1.
    Rng rng = Rng::substream(seed, 0x73756974ULL);
    Eigen::MatrixXd a(dim_count, dim_count);
    for (int r = 0; r < dim_count; ++r) {
        for (int c = 0; c < dim_count; ++c) a(r, c) = rng.uniform();
    }
    a *= 0.5 / spectral_norm(a);

    SyntheticSuite suite;
    suite.models.reserve(static_cast<std::size_t>(model_count));
    suite.sequences.resize(static_cast<std::size_t>(model_count));
    for (int k = 0; k < model_count; ++k) {
        Eigen::VectorXd mu = Eigen::VectorXd::Zero(dim_count);
        mu(static_cast<int>(rng.below(static_cast<std::uint64_t>(dim_count)))) =
            rng.uniform();
        suite.models.push_back(HawkesModel{std::move(mu), a, 1.0});

        auto& seqs = suite.sequences[static_cast<std::size_t>(k)];
        seqs.reserve(static_cast<std::size_t>(seqs_per_model));
        for (int r = 0; r < seqs_per_model; ++r) {
            const std::uint64_t seq_seed =
                Rng::substream(seed, static_cast<std::uint64_t>(k) + 1,
                               static_cast<std::uint64_t>(r) + 1)
                    .next_u64();
            EventSequence seq =
                simulate_branching(suite.models.back(), horizon, seq_seed);
            seq.source = k;
            seqs.push_back(std::move(seq));
        }
    }
    return suite;
}

std::vector<EventSequence> flatten(const SyntheticSuite& suite) {
    std::vector<EventSequence> all;
    for (const auto& group : suite.sequences) {
        all.insert(all.end(), group.begin(), group.end());
    }
    return all;
}

}  // namespace shp
