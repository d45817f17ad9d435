#pragma once

#include <optional>
#include <span>
#include <vector>

namespace shp {

/// One event: a timestamp and a 0-based dimension index.
/// External formats use 1-based dimensions; conversion happens at I/O.
struct Event {
    double t = 0.0;
    int dim = 0;
};

/// Time-ordered events on a horizon (0, T], optionally tagged with the
/// id of the process that generated them.
///
/// Invariant after canonicalization: timestamps strictly increasing,
/// every t in (0, T], every dim in [0, D). Instances are treated as
/// immutable once built.
struct EventSequence {
    std::vector<Event> events;
    int dim_count = 0;                // D
    double horizon = 0.0;             // T
    std::optional<int> source;        // generating process tag

    std::size_t size() const { return events.size(); }
    bool empty() const { return events.empty(); }
};

/// Bumps equal timestamps by the smallest representable increment so the
/// order given is preserved and strictly increasing, keeping times in
/// (0, horizon]. Assumes `events` is already in the desired order.
void enforce_strict_order(std::vector<Event>& events, double horizon);

/// Validates entries, shifts t == 0 to eps = 1e-9 * T, sorts by
/// (t, dim) and enforces strict ordering. Throws DataError on events
/// outside [0, T] or dimensions outside [0, D).
EventSequence canonicalize(std::vector<Event> events, int dim_count, double horizon,
                           std::optional<int> source = std::nullopt);

/// Merges sequences into one: the multiset union of all events,
/// time-ordered, with ties broken by (t, source tag, dim) and then
/// perturbed to strict order. The source tag of the result is cleared.
/// Throws DataError when horizons or dimension counts differ.
EventSequence superpose(std::span<const EventSequence> sequences);
EventSequence superpose(const std::vector<EventSequence>& sequences);

/// Per-dimension event counts at or before time t.
std::vector<int> counts_at(const EventSequence& seq, double t);

/// Sequence indices grouped by source tag, groups ordered by first
/// appearance; every untagged sequence forms its own group.
std::vector<std::vector<int>> group_by_source(const std::vector<EventSequence>& seqs);

}  // namespace shp
