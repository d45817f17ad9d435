#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <cstdint>
#include <vector>

#include "shp/events.hpp"
#include "shp/model.hpp"
#include "shp/rng.hpp"

namespace shp::test {

inline EventSequence sequence(std::vector<Event> events, int dims, double horizon) {
    return canonicalize(std::move(events), dims, horizon);
}

inline HawkesModel model_1d(double mu, double a, double w) {
    HawkesModel model;
    model.mu = Eigen::VectorXd::Constant(1, mu);
    model.A = Eigen::MatrixXd::Constant(1, 1, a);
    model.w = w;
    return model;
}

/// Random stationary model: uniform entries rescaled to the target
/// branching spectral radius.
inline HawkesModel random_model(int dims, double radius, double w, std::uint64_t seed) {
    Rng rng(seed);
    HawkesModel model;
    model.w = w;
    model.mu.resize(dims);
    for (int i = 0; i < dims; ++i) model.mu(i) = rng.uniform(0.1, 0.6);
    model.A.resize(dims, dims);
    for (int r = 0; r < dims; ++r) {
        for (int c = 0; c < dims; ++c) model.A(r, c) = rng.uniform();
    }
    model.A *= radius * w / spectral_radius(model.A);
    return model;
}

/// Independent spectral-radius oracle: power iteration on a strictly
/// positive matrix converges to the dominant eigenvalue.
inline double power_iteration_radius(const Eigen::MatrixXd& m, int iters = 20000) {
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows());
    v.normalize();
    double lambda = 0.0;
    for (int i = 0; i < iters; ++i) {
        Eigen::VectorXd next = m * v;
        lambda = next.norm();
        if (lambda == 0.0) return 0.0;
        v = next / lambda;
    }
    return lambda;
}

/// Two-sided two-sample Kolmogorov-Smirnov p-value (asymptotic).
inline double ks_two_sample_pvalue(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const auto na = static_cast<double>(a.size());
    const auto nb = static_cast<double>(b.size());
    double d = 0.0;
    std::size_t i = 0, j = 0;
    while (i < a.size() && j < b.size()) {
        const double x = std::min(a[i], b[j]);
        while (i < a.size() && a[i] <= x) ++i;
        while (j < b.size() && b[j] <= x) ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na -
                                 static_cast<double>(j) / nb));
    }
    const double en = std::sqrt(na * nb / (na + nb));
    const double lambda = (en + 0.12 + 0.11 / en) * d;
    double p = 0.0;
    for (int k = 1; k <= 100; ++k) {
        p += 2.0 * (k % 2 == 1 ? 1.0 : -1.0) * std::exp(-2.0 * k * k * lambda * lambda);
    }
    return std::clamp(p, 0.0, 1.0);
}

}  // namespace shp::test
