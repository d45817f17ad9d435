#pragma once

#include <Eigen/Dense>
#include <vector>

#include "shp/bundle.hpp"
#include "shp/events.hpp"
#include "shp/fit_result.hpp"
#include "shp/nnls.hpp"

namespace shp {

/// Nonnegative weighted least squares on a bundle; one solver serves the
/// single, multi and super layouts. Set options.nonneg = false for the
/// unconstrained variant used in norm-ball experiments.
FitResult fit_ls(const RegressionBundle& bundle, const LsOptions& options = {});

struct SourceRecovery {
    std::vector<Eigen::VectorXd> mu;  // one per source, order of first appearance
    std::vector<bool> empty_source;   // true where the source had no events
};

/// Given a fixed infectivity estimate, recovers each source's exogenous
/// rates by a small per-source nonnegative LS with the endogenous
/// contribution moved to the label side. Sequences are grouped by source
/// tag the same way build_multi groups them.
SourceRecovery recover_sources(const Eigen::MatrixXd& a_hat,
                               const std::vector<EventSequence>& seqs, double w);

enum class MleLayout { Single, Multi };

struct MleOptions {
    int max_iters = 500;
    double tol = 1e-8;      // relative log-likelihood improvement
    double init_a = -1.0;   // initial A entries; negative means the 0.1/D default.
                            // Zero pins A at zero (an EM fixed point), which
                            // reduces the fit to the Poisson closed form.
};

/// EM fit of mu (shared or per-source) and A under the exponential kernel.
///
/// E-step: event i is explained by the background with responsibility
/// proportional to mu[d_i], or by an earlier event j with responsibility
/// proportional to A(d_i, d_j) exp(-w (t_i - t_j)). M-step: background
/// responsibilities divided by observed time give mu; pair responsibilities
/// divided by each trigger's integrated kernel give A. The log-likelihood
/// is non-decreasing across iterations.
FitResult fit_mle(const std::vector<EventSequence>& seqs, double w, MleLayout layout,
                  const MleOptions& options = {});

/// Log-likelihood of the sequences under (mu per source, A, w); mus must
/// hold one vector per source in first-appearance order (a single entry is
/// shared by all sources).
double log_likelihood(const std::vector<EventSequence>& seqs,
                      const std::vector<Eigen::VectorXd>& mus, const Eigen::MatrixXd& a,
                      double w);

}  // namespace shp
