#pragma once

#include <cstdint>
#include <vector>

#include "shp/events.hpp"
#include "shp/model.hpp"
#include "shp/rng.hpp"

namespace shp {

/// Direct offspring of an event at (t, d): for each target dimension a
/// Poisson(A(target, d) / w) count of children at t + Exp(w) delays,
/// children beyond the horizon dropped. Building block of the cluster
/// sampler, exposed for distribution checks.
std::vector<Event> spawn_children(const HawkesModel& model, double t, int d, double horizon,
                                  Rng& rng);

/// Cluster (branching) sampler: immigrants arrive per dimension as a
/// homogeneous Poisson process with rate mu[d] on (0, T]; every event
/// recursively spawns children until extinction. Requires a stationary
/// model, otherwise expected cluster size is infinite (NumericalError).
EventSequence simulate_branching(const HawkesModel& model, double horizon,
                                 std::uint64_t seed);

/// Thinning sampler: candidates from an upper-bound intensity, accepted
/// with probability lambda(t)/bound. Exact for the exponential kernel;
/// exists as an independent cross-check of simulate_branching.
EventSequence simulate_thinning(const HawkesModel& model, double horizon,
                                std::uint64_t seed);

struct SyntheticSuite {
    std::vector<HawkesModel> models;                    // shared A, distinct sparse mu
    std::vector<std::vector<EventSequence>> sequences;  // [model][replicate], tagged
};

/// K models sharing one random infectivity matrix rescaled to spectral norm
/// 0.5, decay w = 1, each mu a one-hot vector with a uniform [0,1] value at
/// a random position. seqs_per_model branching simulations per model on
/// (0, T], every sequence on its own (seed, model, replicate) substream.
SyntheticSuite make_synthetic_suite(int model_count, int dim_count, int seqs_per_model,
                                    double horizon, std::uint64_t seed);

/// All suite sequences in model-major order (matching the source tags).
std::vector<EventSequence> flatten(const SyntheticSuite& suite);

}  // namespace shp
