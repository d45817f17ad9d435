#include "shp/nnls.hpp"

#include <Eigen/Cholesky>
#include <Eigen/IterativeLinearSolvers>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "shp/errors.hpp"

namespace shp {

namespace {

using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;
using Eigen::MatrixXd;
using Eigen::VectorXd;

double largest_eigenvalue(const MatrixXd& g) {
    VectorXd v = VectorXd::Ones(g.rows());
    v.normalize();
    double lambda = 0.0;
    for (int i = 0; i < 60; ++i) {
        VectorXd gv = g * v;
        const double norm = gv.norm();
        if (norm == 0.0) return 0.0;
        lambda = v.dot(gv);
        v = gv / norm;
    }
    return std::max(lambda, 0.0);
}

double largest_gram_eigenvalue(const SpMat& a) {
    VectorXd v = VectorXd::Ones(a.cols());
    v.normalize();
    double lambda = 0.0;
    for (int i = 0; i < 60; ++i) {
        VectorXd gv = a.transpose() * (a * v);
        const double norm = gv.norm();
        if (norm == 0.0) return 0.0;
        lambda = v.dot(gv);
        v = gv / norm;
    }
    return std::max(lambda, 0.0);
}

struct Quadratic {
    // f(x) = ||Ax - b||^2 = x'Gx - 2c'x + b2
    const MatrixXd& g;
    const VectorXd& c;
    double b2;

    double value(const VectorXd& x) const { return x.dot(g * x) - 2.0 * c.dot(x) + b2; }
};

/// Cholesky with the flagged ridge fallback on rank deficiency.
struct NormalSolver {
    Eigen::LDLT<MatrixXd> ldlt;
    bool rank_deficient = false;
    bool ridge_used = false;

    explicit NormalSolver(MatrixXd g, int p) {
        ldlt.compute(g);
        if (!usable()) {
            rank_deficient = true;
            ridge_used = true;
            // approaches the minimum-norm solution as the ridge vanishes
            const double lambda = 1e-8 * g.trace() / static_cast<double>(p);
            g.diagonal().array() += std::max(lambda, 1e-300);
            ldlt.compute(g);
        }
    }

    bool usable() const {
        if (ldlt.info() != Eigen::Success) return false;
        const VectorXd d = ldlt.vectorD();
        const double dmax = d.maxCoeff();
        return dmax > 0.0 && d.minCoeff() > 1e-12 * dmax;
    }
};

/// Accelerated projected gradient with a monotone safeguard; stops on
/// relative objective change below tol.
int fista_nonneg(const std::function<VectorXd(const VectorXd&)>& gradient,
                 const std::function<double(const VectorXd&)>& objective, double lipschitz,
                 double tol, int max_iters, VectorXd& x, std::vector<double>& trace,
                 bool* converged) {
    if (lipschitz <= 0.0) {  // zero operator: projection of nothing to do
        *converged = true;
        return 0;
    }
    const double step = 1.0 / lipschitz;
    VectorXd y = x;
    double t_acc = 1.0;
    double f_x = objective(x);
    trace.push_back(f_x);
    *converged = false;
    int iter = 0;
    for (; iter < max_iters; ++iter) {
        VectorXd x_new = (y - step * gradient(y)).cwiseMax(0.0);
        double f_new = objective(x_new);
        if (f_new > f_x) {  // acceleration overshot; restart from x
            x_new = (x - step * gradient(x)).cwiseMax(0.0);
            f_new = objective(x_new);
            t_acc = 1.0;
        }
        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t_acc * t_acc));
        y = x_new + ((t_acc - 1.0) / t_next) * (x_new - x);
        t_acc = t_next;

        const double change = std::abs(f_x - f_new);
        x = std::move(x_new);
        f_x = f_new;
        trace.push_back(f_x);
        if (change <= tol * std::max(1.0, std::abs(f_x))) {
            *converged = true;
            ++iter;
            break;
        }
    }
    return iter;
}

/// Lawson-Hanson style polish on the normal equations: exact solves on the
/// passive set plus dual-feasibility checks on the active set.
void active_set_refine(const MatrixXd& g, const VectorXd& c, VectorXd& x,
                       LsSolution& flags) {
    const int p = static_cast<int>(g.rows());
    const double kkt_tol = 1e-9 * std::max(1.0, c.cwiseAbs().maxCoeff());
    const int max_rounds = 3 * p + 30;

    std::vector<int> passive;
    passive.reserve(static_cast<std::size_t>(p));
    for (int j = 0; j < p; ++j) {
        if (x(j) > 0.0) passive.push_back(j);
    }

    for (int round = 0; round < max_rounds; ++round) {
        // Make x optimal on the current passive set.
        for (int inner = 0; inner < max_rounds; ++inner) {
            if (passive.empty()) break;
            const int f = static_cast<int>(passive.size());
            MatrixXd gff(f, f);
            VectorXd cf(f);
            for (int r = 0; r < f; ++r) {
                cf(r) = c(passive[static_cast<std::size_t>(r)]);
                for (int s = 0; s < f; ++s) {
                    gff(r, s) = g(passive[static_cast<std::size_t>(r)],
                                  passive[static_cast<std::size_t>(s)]);
                }
            }
            NormalSolver sub(gff, f);
            flags.rank_deficient |= sub.rank_deficient;
            flags.ridge_fallback |= sub.ridge_used;
            const VectorXd z = sub.ldlt.solve(cf);
            const double z_tol = 1e-12 * std::max(1.0, z.cwiseAbs().maxCoeff());

            if ((z.array() >= -z_tol).all()) {
                for (int r = 0; r < f; ++r) {
                    x(passive[static_cast<std::size_t>(r)]) = std::max(z(r), 0.0);
                }
                break;
            }
            // Step toward z until the first coordinate hits zero.
            double alpha = 1.0;
            for (int r = 0; r < f; ++r) {
                if (z(r) < -z_tol) {
                    const double xr = x(passive[static_cast<std::size_t>(r)]);
                    alpha = std::min(alpha, xr / (xr - z(r)));
                }
            }
            for (int r = 0; r < f; ++r) {
                const int j = passive[static_cast<std::size_t>(r)];
                x(j) += alpha * (z(r) - x(j));
            }
            std::erase_if(passive, [&](int j) {
                if (x(j) <= z_tol) {
                    x(j) = 0.0;
                    return true;
                }
                return false;
            });
            if (alpha <= 0.0) return;  // numerically stuck; keep current x
        }

        // Dual feasibility on the active set: w = c - Gx must be <= 0.
        const VectorXd w = c - g * x;
        int worst = -1;
        double worst_val = kkt_tol;
        for (int j = 0; j < p; ++j) {
            if (x(j) == 0.0 && w(j) > worst_val) {
                worst = j;
                worst_val = w(j);
            }
        }
        if (worst < 0) return;
        passive.push_back(worst);
    }
    flags.converged = false;
}

LsSolution solve_dense(const SpMat& a, const VectorXd& b, const LsOptions& options) {
    const int p = static_cast<int>(a.cols());
    LsSolution out;

    const MatrixXd g = MatrixXd(SpMat(a.transpose() * a));
    const VectorXd c = a.transpose() * b;
    const Quadratic quad{g, c, b.squaredNorm()};

    NormalSolver normal(g, p);
    out.rank_deficient = normal.rank_deficient;
    out.ridge_fallback = normal.ridge_used;
    VectorXd x = normal.ldlt.solve(c);

    if (!options.nonneg) {
        out.x = std::move(x);
        out.loss = quad.value(out.x);
        out.objective_trace.push_back(out.loss);
        return out;
    }

    x = x.cwiseMax(0.0);
    const double lipschitz = 2.0 * largest_eigenvalue(g);
    const auto gradient = [&](const VectorXd& v) { return VectorXd(2.0 * (g * v - c)); };
    const auto objective = [&](const VectorXd& v) { return quad.value(v); };
    out.iterations = fista_nonneg(gradient, objective, lipschitz, options.tol,
                                  options.max_iters, x, out.objective_trace, &out.converged);
    active_set_refine(g, c, x, out);

    out.x = x.cwiseMax(0.0);  // no negative leakage, exact zeros
    out.loss = quad.value(out.x);
    out.objective_trace.push_back(out.loss);
    return out;
}

LsSolution solve_matrix_free(const SpMat& a, const VectorXd& b, const LsOptions& options) {
    LsSolution out;
    if (!options.nonneg) {
        Eigen::LeastSquaresConjugateGradient<SpMat> cg(a);
        cg.setTolerance(1e-12);
        out.x = cg.solve(b);
        out.iterations = static_cast<int>(cg.iterations());
        out.converged = cg.info() == Eigen::Success;
        out.loss = (a * out.x - b).squaredNorm();
        out.objective_trace.push_back(out.loss);
        return out;
    }

    VectorXd x = VectorXd::Zero(a.cols());
    const double lipschitz = 2.0 * largest_gram_eigenvalue(a);
    const auto gradient = [&](const VectorXd& v) {
        return VectorXd(2.0 * (a.transpose() * (a * v - b)));
    };
    const auto objective = [&](const VectorXd& v) { return (a * v - b).squaredNorm(); };
    out.iterations = fista_nonneg(gradient, objective, lipschitz, options.tol,
                                  options.max_iters, x, out.objective_trace, &out.converged);
    out.x = x.cwiseMax(0.0);
    out.loss = objective(out.x);
    out.objective_trace.push_back(out.loss);
    return out;
}

}  // namespace

LsSolution solve_ls(const SpMat& a, const VectorXd& b, const LsOptions& options) {
    if (a.rows() != b.size()) throw DataError("solve_ls: row count mismatch");
    if (a.cols() == 0) throw DataError("solve_ls: empty system");
    if (a.cols() <= options.dense_threshold) return solve_dense(a, b, options);
    return solve_matrix_free(a, b, options);
}

}  // namespace shp
