#include "shp/design.hpp"

#include <cmath>
#include <numeric>

#include "shp/errors.hpp"

namespace shp {

namespace {

void require_canonical(const EventSequence& seq) {
    double prev = 0.0;
    for (const auto& e : seq.events) {
        if (!(e.t > prev) || e.t > seq.horizon || e.dim < 0 || e.dim >= seq.dim_count) {
            throw DataError("design: sequence is not canonical (strictly increasing "
                            "times in (0, T], dims in range)");
        }
        prev = e.t;
    }
}

std::size_t total_events(const std::vector<EventSequence>& seqs) {
    std::size_t total = 0;
    for (const auto& s : seqs) total += s.size();
    return total;
}

/// Per-sequence source index under the group_by_source ordering.
std::vector<int> source_index_of(const std::vector<EventSequence>& seqs, int* num_sources) {
    const auto groups = group_by_source(seqs);
    std::vector<int> index(seqs.size());
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (int i : groups[g]) index[static_cast<std::size_t>(i)] = static_cast<int>(g);
    }
    *num_sources = static_cast<int>(groups.size());
    return index;
}

struct RowAccumulator {
    std::vector<Eigen::Triplet<double>> triplets;
    Eigen::VectorXd labels;
    Eigen::VectorXd weights;
    std::vector<BundleRow> rows;
    Eigen::Index next = 0;

    explicit RowAccumulator(std::size_t total) : labels(total), weights(total) {
        rows.reserve(total);
    }
};

/// Emits one regression row per event of `seq`. The endogenous kernel
/// integrals are accumulated pair by pair (the exact closed form of the
/// exponential kernel); cost is quadratic in the sequence length.
void append_sequence_rows(RowAccumulator& acc, const EventSequence& seq, double w,
                          double scale, int mu_col_offset, int a_block_offset,
                          int source, int seq_index) {
    const int d = seq.dim_count;
    const auto& ev = seq.events;
    std::vector<double> kernel_acc(static_cast<std::size_t>(d));
    std::vector<int> counts(static_cast<std::size_t>(d), 0);

    for (std::size_t i = 0; i < ev.size(); ++i) {
        const double t = ev[i].t;
        const int dim = ev[i].dim;
        std::fill(kernel_acc.begin(), kernel_acc.end(), 0.0);
        for (std::size_t j = 0; j < i; ++j) {
            kernel_acc[static_cast<std::size_t>(ev[j].dim)] +=
                -std::expm1(-w * (t - ev[j].t)) / w;
        }
        ++counts[static_cast<std::size_t>(dim)];

        const Eigen::Index row = acc.next++;
        acc.labels(row) = counts[static_cast<std::size_t>(dim)] * scale;
        acc.weights(row) = 1.0 / t;
        acc.rows.push_back({source, seq_index, static_cast<int>(i)});

        acc.triplets.emplace_back(row, mu_col_offset + dim, t * scale);
        for (int dj = 0; dj < d; ++dj) {
            if (kernel_acc[static_cast<std::size_t>(dj)] != 0.0) {
                // column-major vec(A): entry (dim, dj) sits at dj * D + dim
                acc.triplets.emplace_back(row, a_block_offset + dj * d + dim,
                                          kernel_acc[static_cast<std::size_t>(dj)] * scale);
            }
        }
    }
}

void validate_inputs(const std::vector<EventSequence>& seqs) {
    if (seqs.empty()) throw DataError("design: no sequences");
    const int d = seqs.front().dim_count;
    for (const auto& s : seqs) {
        if (s.dim_count != d) throw DataError("design: mismatched dimension counts");
        require_canonical(s);
    }
    if (total_events(seqs) == 0) throw DataError("design: no events in any sequence");
}

}  // namespace

Eigen::VectorXd kernel_integral_sums(const EventSequence& seq, double w, double t) {
    Eigen::VectorXd sums = Eigen::VectorXd::Zero(seq.dim_count);
    for (const auto& e : seq.events) {
        if (e.t >= t) break;
        sums(e.dim) += -std::expm1(-w * (t - e.t)) / w;
    }
    return sums;
}

Eigen::VectorXd compensator_features(const EventSequence& seq, double w, double t, int d) {
    if (!(t > 0.0)) throw DataError("compensator_features: t must be positive");
    if (d < 0 || d >= seq.dim_count) {
        throw DataError("compensator_features: dimension out of range");
    }
    const int dim = seq.dim_count;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(dim * (1 + dim));
    row(d) = t;
    const Eigen::VectorXd sums = kernel_integral_sums(seq, w, t);
    for (int dj = 0; dj < dim; ++dj) row(dim + dj * dim + d) = sums(dj);
    return row;
}

RegressionBundle build_single(const std::vector<EventSequence>& seqs, double w) {
    validate_inputs(seqs);
    const int d = seqs.front().dim_count;
    const std::size_t total = total_events(seqs);
    const double scale = 1.0 / std::sqrt(static_cast<double>(total));

    RowAccumulator acc(total);
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        append_sequence_rows(acc, seqs[s], w, scale, /*mu_col_offset=*/0,
                             /*a_block_offset=*/d, /*source=*/0, static_cast<int>(s));
    }

    RegressionBundle bundle;
    bundle.strategy = Strategy::Single;
    bundle.dim_count = d;
    bundle.num_sources = 1;
    bundle.decay = w;
    bundle.labels = std::move(acc.labels);
    bundle.weights = std::move(acc.weights);
    bundle.rows = std::move(acc.rows);
    bundle.design.resize(static_cast<Eigen::Index>(total), d * (1 + d));
    bundle.design.setFromTriplets(acc.triplets.begin(), acc.triplets.end());
    return bundle;
}

RegressionBundle build_multi(const std::vector<EventSequence>& seqs, double w) {
    validate_inputs(seqs);
    const int d = seqs.front().dim_count;
    int num_sources = 0;
    const std::vector<int> source_of = source_index_of(seqs, &num_sources);
    const std::size_t total = total_events(seqs);
    const double scale = 1.0 / std::sqrt(static_cast<double>(total));

    RowAccumulator acc(total);
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        append_sequence_rows(acc, seqs[s], w, scale,
                             /*mu_col_offset=*/d * source_of[s],
                             /*a_block_offset=*/d * num_sources, source_of[s],
                             static_cast<int>(s));
    }

    RegressionBundle bundle;
    bundle.strategy = Strategy::Multi;
    bundle.dim_count = d;
    bundle.num_sources = num_sources;
    bundle.decay = w;
    bundle.labels = std::move(acc.labels);
    bundle.weights = std::move(acc.weights);
    bundle.rows = std::move(acc.rows);
    bundle.design.resize(static_cast<Eigen::Index>(total), d * (num_sources + d));
    bundle.design.setFromTriplets(acc.triplets.begin(), acc.triplets.end());
    return bundle;
}

RegressionBundle build_super(const std::vector<EventSequence>& seqs, double w,
                             const std::vector<std::vector<int>>& groups) {
    validate_inputs(seqs);

    std::vector<std::vector<int>> plan = groups;
    if (plan.empty()) {
        plan.emplace_back(seqs.size());
        std::iota(plan.front().begin(), plan.front().end(), 0);
    }

    std::vector<EventSequence> merged;
    std::vector<double> group_size;
    merged.reserve(plan.size());
    for (const auto& group : plan) {
        if (group.empty()) throw DataError("build_super: empty group");
        std::vector<EventSequence> members;
        members.reserve(group.size());
        for (int idx : group) {
            if (idx < 0 || static_cast<std::size_t>(idx) >= seqs.size()) {
                throw DataError("build_super: group index out of range");
            }
            members.push_back(seqs[static_cast<std::size_t>(idx)]);
        }
        merged.push_back(superpose(members));
        group_size.push_back(static_cast<double>(group.size()));
    }

    RegressionBundle bundle = build_single(merged, w);
    bundle.strategy = Strategy::Super;
    // Fold the 1/M scaling of the superposition objective into the weights:
    // the merged counting process is about M times larger than a single one.
    for (Eigen::Index i = 0; i < bundle.size(); ++i) {
        bundle.weights(i) /= group_size[static_cast<std::size_t>(bundle.rows[i].seq)];
    }
    return bundle;
}

}  // namespace shp
