#pragma once

#include <Eigen/Dense>
#include <vector>

#include "shp/bundle.hpp"
#include "shp/events.hpp"

namespace shp {

/// Integrated kernel sums per source dimension: entry d' is
///   sum over events with t_j < t and dim j = d' of (1 - exp(-w (t - t_j))) / w,
/// the exact integral of the exponential kernel from t_j to t.
Eigen::VectorXd kernel_integral_sums(const EventSequence& seq, double w, double t);

/// Feature row of length D(1+D) whose dot product with [mu; vec(A)] is the
/// integrated intensity of dimension d over [0, t]: the exogenous block is
/// t * e_d, the endogenous block holds the kernel integrals at the (d, d')
/// positions of column-major vec(A). Throws DataError for t <= 0 or d out
/// of range.
Eigen::VectorXd compensator_features(const EventSequence& seq, double w, double t, int d);

/// One shared-parameter problem over all sequences: a single mu and A.
RegressionBundle build_single(const std::vector<EventSequence>& seqs, double w);

/// Joint problem with one mu per source and a shared A. Sources are the
/// distinct sequence tags, in order of first appearance; untagged sequences
/// each count as their own source. The endogenous block matches
/// build_single's; the exogenous block is sparse with one entry per row at
/// the row's (source, dimension) column.
RegressionBundle build_multi(const std::vector<EventSequence>& seqs, double w);

/// Superposes each group of sequences into one, builds the single-layout
/// problem on the merged sequences, and folds a 1/group-size factor into
/// the weights so the loss is the superposition objective. An empty
/// grouping means one group containing every sequence.
RegressionBundle build_super(const std::vector<EventSequence>& seqs, double w,
                             const std::vector<std::vector<int>>& groups = {});

}  // namespace shp
