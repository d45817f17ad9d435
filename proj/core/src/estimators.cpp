#include "shp/estimators.hpp"

#include <cmath>
#include <limits>
#include <numeric>

#include "shp/design.hpp"
#include "shp/errors.hpp"

namespace shp {

namespace {

using Eigen::MatrixXd;
using Eigen::VectorXd;
using SpMat = Eigen::SparseMatrix<double, Eigen::RowMajor>;

/// Weighted system: rows of the design scaled by their weight entries.
SpMat row_scaled(const SpMat& design, const VectorXd& weights) {
    SpMat scaled = design;
    for (Eigen::Index r = 0; r < scaled.outerSize(); ++r) {
        for (SpMat::InnerIterator it(scaled, r); it; ++it) {
            it.valueRef() *= weights(r);
        }
    }
    return scaled;
}

}  // namespace

FitResult fit_ls(const RegressionBundle& bundle, const LsOptions& options) {
    const SpMat scaled = row_scaled(bundle.design, bundle.weights);
    const VectorXd target = bundle.weights.cwiseProduct(bundle.labels);
    const LsSolution solution = solve_ls(scaled, target, options);

    FitResult fit;
    fit.strategy = bundle.strategy;
    fit.theta = solution.x;
    fit.models = theta_to_models(fit.theta, bundle.strategy, bundle.dim_count,
                                 bundle.num_sources, bundle.decay);
    fit.loss = solution.loss;
    fit.iterations = solution.iterations;
    fit.constrained = options.nonneg;
    fit.ridge_fallback = solution.ridge_fallback;
    fit.rank_deficient = solution.rank_deficient;
    fit.underdetermined = bundle.size() < bundle.params();
    fit.objective_trace = solution.objective_trace;
    fit.stationary = true;
    for (const auto& model : fit.models) {
        if (!(spectral_radius(model.A / model.w) < 1.0)) fit.stationary = false;
    }
    return fit;
}

SourceRecovery recover_sources(const MatrixXd& a_hat,
                               const std::vector<EventSequence>& seqs, double w) {
    if (seqs.empty()) throw DataError("recover_sources: no sequences");
    const int d = seqs.front().dim_count;
    if (a_hat.rows() != d || a_hat.cols() != d) {
        throw DataError("recover_sources: infectivity shape mismatch");
    }
    if ((a_hat.array() < 0.0).any()) {
        throw DataError("recover_sources: infectivity must be nonnegative");
    }

    const auto groups = group_by_source(seqs);
    SourceRecovery out;
    out.mu.reserve(groups.size());
    out.empty_source.assign(groups.size(), false);

    for (std::size_t g = 0; g < groups.size(); ++g) {
        std::size_t rows = 0;
        for (int idx : groups[g]) rows += seqs[static_cast<std::size_t>(idx)].size();
        if (rows == 0) {
            out.mu.push_back(VectorXd::Zero(d));
            out.empty_source[g] = true;
            continue;
        }

        // Weighted exogenous-only system; the endogenous part of the
        // compensator moves to the label side. Weighted design entries are
        // t_i / t_i = 1 at the event's dimension column.
        SpMat design(static_cast<Eigen::Index>(rows), d);
        VectorXd target(static_cast<Eigen::Index>(rows));
        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(rows);
        Eigen::Index row = 0;
        for (int idx : groups[g]) {
            const auto& seq = seqs[static_cast<std::size_t>(idx)];
            std::vector<int> counts(static_cast<std::size_t>(d), 0);
            for (std::size_t i = 0; i < seq.events.size(); ++i) {
                const auto& e = seq.events[i];
                ++counts[static_cast<std::size_t>(e.dim)];
                const VectorXd ksums = kernel_integral_sums(seq, w, e.t);
                const double endogenous = a_hat.row(e.dim).dot(ksums);
                target(row) = (counts[static_cast<std::size_t>(e.dim)] - endogenous) / e.t;
                triplets.emplace_back(row, e.dim, 1.0);
                ++row;
            }
        }
        design.setFromTriplets(triplets.begin(), triplets.end());
        out.mu.push_back(solve_ls(design, target).x);
    }
    return out;
}

namespace {

/// Per-sequence immutable EM quantities: kernel values of every (i, j)
/// pair and the integrated kernel tail of every event, both fixed for a
/// fixed decay.
struct SeqCache {
    const EventSequence* seq = nullptr;
    int source = 0;
    std::vector<std::size_t> pair_offset;  // pairs of event i at [offset[i], offset[i+1])
    std::vector<double> pair_kernel;       // exp(-w (t_i - t_j))
    std::vector<int> pair_dim;             // d_j
    VectorXd tail_by_dim;                  // sum over j with d_j = d of 1 - exp(-w (T - t_j))
};

SeqCache make_cache(const EventSequence& seq, int source, double w) {
    SeqCache cache;
    cache.seq = &seq;
    cache.source = source;
    const auto& ev = seq.events;
    const std::size_t n = ev.size();
    cache.pair_offset.assign(n + 1, 0);
    const std::size_t pairs = n > 1 ? n * (n - 1) / 2 : 0;
    cache.pair_kernel.reserve(pairs);
    cache.pair_dim.reserve(pairs);
    for (std::size_t i = 0; i < n; ++i) {
        cache.pair_offset[i] = cache.pair_kernel.size();
        for (std::size_t j = 0; j < i; ++j) {
            cache.pair_kernel.push_back(std::exp(-w * (ev[i].t - ev[j].t)));
            cache.pair_dim.push_back(ev[j].dim);
        }
    }
    cache.pair_offset[n] = cache.pair_kernel.size();
    cache.tail_by_dim = VectorXd::Zero(seq.dim_count);
    for (const auto& e : ev) {
        cache.tail_by_dim(e.dim) += -std::expm1(-w * (seq.horizon - e.t));
    }
    return cache;
}

}  // namespace

double log_likelihood(const std::vector<EventSequence>& seqs,
                      const std::vector<VectorXd>& mus, const MatrixXd& a, double w) {
    const auto groups = group_by_source(seqs);
    if (mus.size() != 1 && mus.size() != groups.size()) {
        throw DataError("log_likelihood: need one mu vector or one per source");
    }
    std::vector<int> source_of(seqs.size(), 0);
    for (std::size_t g = 0; g < groups.size(); ++g) {
        for (int idx : groups[g]) source_of[static_cast<std::size_t>(idx)] = static_cast<int>(g);
    }

    double ll = 0.0;
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        const auto& seq = seqs[s];
        const VectorXd& mu = mus.size() == 1 ? mus[0] : mus[static_cast<std::size_t>(source_of[s])];
        const auto& ev = seq.events;
        for (std::size_t i = 0; i < ev.size(); ++i) {
            double lambda = mu(ev[i].dim);
            for (std::size_t j = 0; j < i; ++j) {
                lambda += a(ev[i].dim, ev[j].dim) * std::exp(-w * (ev[i].t - ev[j].t));
            }
            ll += std::log(lambda);
        }
        ll -= mu.sum() * seq.horizon;
        for (const auto& e : ev) {
            ll -= a.col(e.dim).sum() * (-std::expm1(-w * (seq.horizon - e.t))) / w;
        }
    }
    return ll;
}

FitResult fit_mle(const std::vector<EventSequence>& seqs, double w, MleLayout layout,
                  const MleOptions& options) {
    if (seqs.empty()) throw DataError("fit_mle: no sequences");
    const int d = seqs.front().dim_count;
    for (const auto& s : seqs) {
        if (s.dim_count != d) throw DataError("fit_mle: mismatched dimension counts");
    }

    const auto groups = group_by_source(seqs);
    const int num_sources =
        layout == MleLayout::Multi ? static_cast<int>(groups.size()) : 1;

    std::vector<int> source_of(seqs.size(), 0);
    if (layout == MleLayout::Multi) {
        for (std::size_t g = 0; g < groups.size(); ++g) {
            for (int idx : groups[g]) {
                source_of[static_cast<std::size_t>(idx)] = static_cast<int>(g);
            }
        }
    }

    std::vector<SeqCache> caches;
    caches.reserve(seqs.size());
    for (std::size_t s = 0; s < seqs.size(); ++s) {
        caches.push_back(make_cache(seqs[s], source_of[s], w));
    }

    // Constants across iterations.
    VectorXd observed_time = VectorXd::Zero(num_sources);
    std::vector<VectorXd> event_counts(static_cast<std::size_t>(num_sources),
                                       VectorXd::Zero(d));
    VectorXd a_denominator = VectorXd::Zero(d);  // per trigger dimension
    for (const auto& cache : caches) {
        observed_time(cache.source) += cache.seq->horizon;
        for (const auto& e : cache.seq->events) {
            event_counts[static_cast<std::size_t>(cache.source)](e.dim) += 1.0;
        }
        a_denominator += cache.tail_by_dim;
    }

    // Positive, stationary start.
    std::vector<VectorXd> mu(static_cast<std::size_t>(num_sources));
    for (int m = 0; m < num_sources; ++m) {
        mu[static_cast<std::size_t>(m)] =
            0.5 * event_counts[static_cast<std::size_t>(m)] / observed_time(m);
    }
    MatrixXd a = MatrixXd::Constant(
        d, d, options.init_a >= 0.0 ? options.init_a : 0.1 / d);

    FitResult fit;
    fit.strategy = layout == MleLayout::Multi ? Strategy::Multi : Strategy::Single;
    double previous_ll = -std::numeric_limits<double>::infinity();
    VectorXd trigger_sums(d);

    for (int iter = 0; iter < options.max_iters; ++iter) {
        std::vector<VectorXd> mu_numer(static_cast<std::size_t>(num_sources),
                                       VectorXd::Zero(d));
        MatrixXd a_numer = MatrixXd::Zero(d, d);
        double ll = 0.0;

        for (const auto& cache : caches) {
            const auto& ev = cache.seq->events;
            const VectorXd& mu_m = mu[static_cast<std::size_t>(cache.source)];
            for (std::size_t i = 0; i < ev.size(); ++i) {
                trigger_sums.setZero();
                for (std::size_t p = cache.pair_offset[i]; p < cache.pair_offset[i + 1];
                     ++p) {
                    trigger_sums(cache.pair_dim[p]) += cache.pair_kernel[p];
                }
                const int di = ev[i].dim;
                const double background = mu_m(di);
                const double excitation = a.row(di).dot(trigger_sums);
                const double intensity = background + excitation;
                ll += std::log(intensity);
                mu_numer[static_cast<std::size_t>(cache.source)](di) +=
                    background / intensity;
                a_numer.row(di) +=
                    (a.row(di).array() * trigger_sums.transpose().array() / intensity)
                        .matrix();
            }
            ll -= mu_m.sum() * cache.seq->horizon;
            ll -= a.colwise().sum().dot(cache.tail_by_dim) / w;
        }

        fit.objective_trace.push_back(ll);
        fit.iterations = iter + 1;
        if (std::abs(ll - previous_ll) <= options.tol * std::max(1.0, std::abs(ll))) {
            break;
        }
        previous_ll = ll;

        for (int m = 0; m < num_sources; ++m) {
            mu[static_cast<std::size_t>(m)] =
                mu_numer[static_cast<std::size_t>(m)] / observed_time(m);
        }
        for (int dj = 0; dj < d; ++dj) {
            if (a_denominator(dj) > 0.0) {
                a.col(dj) = w * a_numer.col(dj) / a_denominator(dj);
            } else {
                a.col(dj).setZero();
            }
        }
    }

    fit.models.reserve(static_cast<std::size_t>(num_sources));
    for (int m = 0; m < num_sources; ++m) {
        fit.models.push_back(HawkesModel{mu[static_cast<std::size_t>(m)], a, w});
    }
    fit.theta = models_to_theta(fit.models, fit.strategy);
    fit.loss = -fit.objective_trace.back();
    fit.stationary = spectral_radius(a / w) < 1.0;
    fit.constrained = true;
    return fit;
}

}  // namespace shp
