#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>

namespace shp {

struct LsOptions {
    bool nonneg = true;        // project onto theta >= 0
    double tol = 1e-10;        // relative objective change stopping rule
    int max_iters = 10000;
    int dense_threshold = 4096;  // largest P solved through dense normal equations
};

struct LsSolution {
    Eigen::VectorXd x;
    double loss = 0.0;  // ||A x - b||^2
    int iterations = 0;
    bool converged = true;
    bool ridge_fallback = false;
    bool rank_deficient = false;
    std::vector<double> objective_trace;
};

/// Minimizes ||A x - b||^2, optionally subject to x >= 0.
///
/// Within the dense threshold the normal equations are formed once and the
/// constrained problem is solved by accelerated projected gradient followed
/// by active-set refinement, so interior solutions match the unconstrained
/// normal-equations solution. Rank-deficient systems switch to a flagged
/// ridge with lambda = 1e-8 trace(A^T A) / P, whose solution approaches the
/// minimum-norm one. Beyond the threshold the solver stays matrix-free
/// (projected gradient only).
LsSolution solve_ls(const Eigen::SparseMatrix<double, Eigen::RowMajor>& a,
                    const Eigen::VectorXd& b, const LsOptions& options = {});

}  // namespace shp
