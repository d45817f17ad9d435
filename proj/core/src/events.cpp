#include "shp/events.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <string>

#include "shp/errors.hpp"

namespace shp {

void enforce_strict_order(std::vector<Event>& events, double horizon) {
    for (std::size_t i = 1; i < events.size(); ++i) {
        if (events[i].t <= events[i - 1].t) {
            events[i].t = std::nextafter(events[i - 1].t,
                                         std::numeric_limits<double>::infinity());
        }
    }
    if (events.empty() || events.back().t <= horizon) return;

    // A tie run hit the horizon; push the run downward instead.
    events.back().t = horizon;
    for (std::size_t i = events.size() - 1; i-- > 0;) {
        if (events[i].t >= events[i + 1].t) {
            events[i].t = std::nextafter(events[i + 1].t, 0.0);
        }
    }
}

EventSequence canonicalize(std::vector<Event> events, int dim_count, double horizon,
                           std::optional<int> source) {
    if (dim_count < 1) throw DataError("canonicalize: dimension count must be >= 1");
    if (!(horizon > 0.0)) throw DataError("canonicalize: horizon must be positive");

    const double eps = 1e-9 * horizon;  // weight 1/t is undefined at t = 0
    for (auto& e : events) {
        if (!std::isfinite(e.t) || e.t < 0.0 || e.t > horizon) {
            throw DataError("canonicalize: event time " + std::to_string(e.t) +
                            " outside [0, " + std::to_string(horizon) + "]");
        }
        if (e.dim < 0 || e.dim >= dim_count) {
            throw DataError("canonicalize: dimension " + std::to_string(e.dim) +
                            " outside [0, " + std::to_string(dim_count) + ")");
        }
        if (e.t == 0.0) e.t = eps;
    }

    std::sort(events.begin(), events.end(), [](const Event& a, const Event& b) {
        return a.t != b.t ? a.t < b.t : a.dim < b.dim;
    });
    enforce_strict_order(events, horizon);
    return EventSequence{std::move(events), dim_count, horizon, source};
}

EventSequence superpose(std::span<const EventSequence> sequences) {
    if (sequences.empty()) throw DataError("superpose: no input sequences");

    const int d = sequences.front().dim_count;
    const double t = sequences.front().horizon;
    std::size_t total = 0;
    for (const auto& s : sequences) {
        if (s.dim_count != d) throw DataError("superpose: mismatched dimension counts");
        if (s.horizon != t) throw DataError("superpose: mismatched horizons");
        total += s.size();
    }

    struct Tagged {
        Event event;
        int tag;
    };
    std::vector<Tagged> merged;
    merged.reserve(total);
    for (std::size_t i = 0; i < sequences.size(); ++i) {
        const int tag = sequences[i].source.value_or(static_cast<int>(i));
        for (const auto& e : sequences[i].events) merged.push_back({e, tag});
    }
    std::sort(merged.begin(), merged.end(), [](const Tagged& a, const Tagged& b) {
        if (a.event.t != b.event.t) return a.event.t < b.event.t;
        if (a.tag != b.tag) return a.tag < b.tag;
        return a.event.dim < b.event.dim;
    });

    std::vector<Event> events;
    events.reserve(total);
    for (const auto& m : merged) events.push_back(m.event);
    enforce_strict_order(events, t);
    return EventSequence{std::move(events), d, t, std::nullopt};
}

EventSequence superpose(const std::vector<EventSequence>& sequences) {
    return superpose(std::span<const EventSequence>(sequences));
}

std::vector<int> counts_at(const EventSequence& seq, double t) {
    std::vector<int> counts(seq.dim_count, 0);
    for (const auto& e : seq.events) {
        if (e.t > t) break;
        ++counts[e.dim];
    }
    return counts;
}

std::vector<std::vector<int>> group_by_source(const std::vector<EventSequence>& seqs) {
    std::vector<std::vector<int>> groups;
    std::map<int, std::size_t> tagged;
    for (std::size_t i = 0; i < seqs.size(); ++i) {
        if (seqs[i].source.has_value()) {
            auto [it, inserted] = tagged.try_emplace(*seqs[i].source, groups.size());
            if (inserted) groups.emplace_back();
            groups[it->second].push_back(static_cast<int>(i));
        } else {
            groups.push_back({static_cast<int>(i)});
        }
    }
    return groups;
}

}  // namespace shp
