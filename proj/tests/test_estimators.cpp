#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "shp/design.hpp"
#include "shp/errors.hpp"
#include "shp/estimators.hpp"
#include "shp/rng.hpp"
#include "shp/simulate.hpp"
#include "test_support.hpp"

using namespace shp;

namespace {

/// Bundle with arbitrary content in the Single layout (D -> P = D(1+D)).
RegressionBundle random_bundle(int d, int rows, Rng& rng, bool noisy,
                               Eigen::VectorXd* truth = nullptr) {
    const int p = d * (1 + d);
    RegressionBundle bundle;
    bundle.strategy = Strategy::Single;
    bundle.dim_count = d;
    bundle.decay = 1.0;
    bundle.labels.resize(rows);
    bundle.weights.resize(rows);
    bundle.rows.assign(static_cast<std::size_t>(rows), BundleRow{});

    Eigen::MatrixXd dense(rows, p);
    for (int r = 0; r < rows; ++r) {
        for (int c = 0; c < p; ++c) dense(r, c) = rng.uniform(0.2, 1.2);
        bundle.weights(r) = rng.uniform(0.5, 2.0);
    }
    Eigen::VectorXd theta_star(p);
    for (int c = 0; c < p; ++c) theta_star(c) = rng.uniform(0.5, 1.5);
    bundle.labels = dense * theta_star;
    if (noisy) {
        for (int r = 0; r < rows; ++r) bundle.labels(r) += 0.01 * (rng.uniform() - 0.5);
    }
    bundle.design = dense.sparseView();
    if (truth != nullptr) *truth = theta_star;
    return bundle;
}

/// Independent oracle: QR solve of the weighted system.
Eigen::VectorXd weighted_normal_equations(const RegressionBundle& bundle) {
    const Eigen::MatrixXd x =
        bundle.weights.asDiagonal() * Eigen::MatrixXd(bundle.design);
    const Eigen::VectorXd y = bundle.weights.cwiseProduct(bundle.labels);
    return x.colPivHouseholderQr().solve(y);
}

}  // namespace

TEST_CASE("fit_ls recovers the exact solution of a zero-residual system") {
    Rng rng(7);
    Eigen::VectorXd theta_star;
    const auto bundle = random_bundle(2, 6, rng, /*noisy=*/false, &theta_star);
    const auto fit = fit_ls(bundle);
    CHECK((fit.theta - theta_star).cwiseAbs().maxCoeff() <= 1e-8);
    CHECK(fit.loss <= 1e-16);
    CHECK(fit.strategy == Strategy::Single);
    CHECK(fit.models.size() == 1);
}

TEST_CASE("fit_ls matches the weighted normal-equations oracle when the optimum is interior") {
    int checked = 0;
    for (std::uint64_t seed = 1; checked < 50 && seed < 500; ++seed) {
        Rng rng(seed);
        const auto bundle = random_bundle(2, 48, rng, /*noisy=*/true);
        const Eigen::VectorXd oracle = weighted_normal_equations(bundle);
        if (oracle.minCoeff() < 1e-6) continue;  // keep interior-optimum instances
        ++checked;
        const auto fit = fit_ls(bundle);
        CHECK((fit.theta - oracle).cwiseAbs().maxCoeff() <= 1e-8);
    }
    CHECK(checked == 50);
}

TEST_CASE("fit_ls: constrained solution beats zero and the ridge point") {
    Rng rng(13);
    auto bundle = random_bundle(2, 30, rng, /*noisy=*/true);
    // push the optimum toward the boundary so the constraint binds
    bundle.labels = -bundle.labels;
    const auto fit = fit_ls(bundle);
    CHECK(fit.theta.minCoeff() >= 0.0);

    CHECK(fit.loss <= bundle.loss(Eigen::VectorXd::Zero(bundle.params())) + 1e-12);

    const Eigen::MatrixXd x =
        bundle.weights.asDiagonal() * Eigen::MatrixXd(bundle.design);
    const Eigen::VectorXd y = bundle.weights.cwiseProduct(bundle.labels);
    Eigen::MatrixXd g = x.transpose() * x;
    const Eigen::VectorXd c = x.transpose() * y;
    g.diagonal().array() += 1e-8 * g.trace() / static_cast<double>(g.rows());
    const Eigen::VectorXd ridge = g.ldlt().solve(c).cwiseMax(0.0);
    CHECK(fit.loss <= bundle.loss(ridge) + 1e-12);
}

TEST_CASE("fit_ls: rank-deficient systems take the flagged ridge fallback") {
    Rng rng(19);
    auto bundle = random_bundle(1, 12, rng, /*noisy=*/false);
    Eigen::MatrixXd dense(bundle.design);
    dense.col(1) = dense.col(0);  // duplicated column
    bundle.design = dense.sparseView();
    const auto fit = fit_ls(bundle);
    CHECK(fit.rank_deficient);
    CHECK(fit.ridge_fallback);
    CHECK(fit.theta.minCoeff() >= 0.0);
}

TEST_CASE("fit_ls: unconstrained mode returns the plain normal-equations point") {
    Rng rng(23);
    auto bundle = random_bundle(2, 40, rng, /*noisy=*/true);
    bundle.labels = -bundle.labels;  // interior optimum is infeasible
    LsOptions options;
    options.nonneg = false;
    const auto fit = fit_ls(bundle, options);
    CHECK_FALSE(fit.constrained);
    CHECK(fit.theta.minCoeff() < 0.0);
    const Eigen::VectorXd oracle = weighted_normal_equations(bundle);
    CHECK((fit.theta - oracle).cwiseAbs().maxCoeff() <= 1e-8);
}

TEST_CASE("fit_ls: nonnegativity holds exactly on simulated bundles") {
    const auto model = test::random_model(3, 0.6, 1.0, 402);
    std::vector<EventSequence> seqs;
    for (std::uint64_t s = 0; s < 4; ++s) {
        seqs.push_back(simulate_branching(model, 60.0, 1000 + s));
    }
    const auto fit = fit_ls(build_single(seqs, model.w));
    CHECK(fit.theta.minCoeff() >= 0.0);
    CHECK(std::isfinite(fit.loss));
    CHECK(fit.models.front().A.minCoeff() >= 0.0);
}

TEST_CASE("recover_sources: pure Poisson reduction gives 1/t for one event") {
    const auto seq = test::sequence({{2.5, 0}}, 1, 5.0);
    const Eigen::MatrixXd a0 = Eigen::MatrixXd::Zero(1, 1);
    const auto recovery = recover_sources(a0, {seq}, 1.0);
    REQUIRE(recovery.mu.size() == 1);
    CHECK_FALSE(recovery.empty_source[0]);
    CHECK(recovery.mu[0](0) == doctest::Approx(1.0 / 2.5).epsilon(1e-10));
}

TEST_CASE("recover_sources: empty sequence yields a flagged zero vector") {
    const auto seq = test::sequence({}, 2, 5.0);
    const auto recovery = recover_sources(Eigen::MatrixXd::Zero(2, 2), {seq}, 1.0);
    CHECK(recovery.empty_source[0]);
    CHECK(recovery.mu[0].isZero(0.0));
}

TEST_CASE("recover_sources: true infectivity on long sequences recovers mu within 20%") {
    HawkesModel model = test::random_model(5, 0.5, 1.0, 77);
    model.mu << 0.45, 0.3, 0.5, 0.25, 0.4;
    const auto seq = simulate_branching(model, 1000.0, 31);
    const auto recovery = recover_sources(model.A, {seq}, model.w);
    for (int d = 0; d < 5; ++d) {
        CHECK(std::abs(recovery.mu[0](d) - model.mu(d)) / model.mu(d) <= 0.2);
    }
}

TEST_CASE("recover_sources: disjoint supports stay disjoint") {
    HawkesModel base = test::random_model(4, 0.4, 1.0, 91);
    HawkesModel first = base;
    first.mu << 0.6, 0.5, 0.0, 0.0;
    HawkesModel second = base;
    second.mu << 0.0, 0.0, 0.55, 0.65;

    std::vector<EventSequence> seqs;
    for (std::uint64_t s = 0; s < 6; ++s) {
        auto seq = simulate_branching(first, 400.0, 100 + s);
        seq.source = 0;
        seqs.push_back(std::move(seq));
        seq = simulate_branching(second, 400.0, 200 + s);
        seq.source = 1;
        seqs.push_back(std::move(seq));
    }
    const auto recovery = recover_sources(base.A, seqs, base.w);
    REQUIRE(recovery.mu.size() == 2);
    const double on0 = recovery.mu[0].head(2).minCoeff();
    const double off0 = recovery.mu[0].tail(2).maxCoeff();
    const double on1 = recovery.mu[1].tail(2).minCoeff();
    const double off1 = recovery.mu[1].head(2).maxCoeff();
    CHECK(off0 < 0.1 * on0);
    CHECK(off1 < 0.1 * on1);
}

TEST_CASE("fit_mle: excitation pinned to zero gives the Poisson closed form") {
    const auto seq_a = test::sequence({{1.0, 0}, {4.0, 0}, {7.5, 0}}, 1, 10.0);
    const auto seq_b = test::sequence({{2.0, 0}, {9.0, 0}}, 1, 10.0);
    MleOptions options;
    options.init_a = 0.0;
    const auto fit = fit_mle({seq_a, seq_b}, 1.0, MleLayout::Single, options);
    CHECK(fit.models.front().mu(0) == doctest::Approx(5.0 / 20.0).epsilon(1e-12));
    CHECK(fit.models.front().A(0, 0) == 0.0);
}

TEST_CASE("fit_mle: log-likelihood is non-decreasing every iteration") {
    const auto model = test::random_model(3, 0.55, 1.0, 55);
    std::vector<EventSequence> seqs;
    for (std::uint64_t s = 0; s < 5; ++s) {
        seqs.push_back(simulate_branching(model, 80.0, 500 + s));
    }
    const auto fit = fit_mle(seqs, model.w, MleLayout::Single);
    REQUIRE(fit.objective_trace.size() >= 2);
    for (std::size_t i = 1; i < fit.objective_trace.size(); ++i) {
        CHECK(fit.objective_trace[i] >=
              fit.objective_trace[i - 1] - 1e-9 * std::abs(fit.objective_trace[i - 1]));
    }
    CHECK(fit.loss == doctest::Approx(-fit.objective_trace.back()));
}

TEST_CASE("fit_mle: EM fixed point has vanishing gradient on interior coordinates") {
    const auto model = test::random_model(2, 0.5, 1.0, 66);
    std::vector<EventSequence> seqs;
    for (std::uint64_t s = 0; s < 4; ++s) {
        seqs.push_back(simulate_branching(model, 120.0, 900 + s));
    }
    MleOptions options;
    options.tol = 1e-13;
    options.max_iters = 20000;
    const auto fit = fit_mle(seqs, model.w, MleLayout::Single, options);

    const Eigen::VectorXd mu = fit.models.front().mu;
    const Eigen::MatrixXd a = fit.models.front().A;
    const double h = 1e-5;

    const auto ll_at = [&](const Eigen::VectorXd& m, const Eigen::MatrixXd& mat) {
        return log_likelihood(seqs, {m}, mat, model.w);
    };
    for (int d = 0; d < 2; ++d) {
        if (mu(d) <= 1e-3) continue;
        Eigen::VectorXd up = mu, down = mu;
        up(d) += h;
        down(d) -= h;
        const double grad = (ll_at(up, a) - ll_at(down, a)) / (2.0 * h);
        CHECK(std::abs(grad) <= 1e-4);
    }
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            if (a(r, c) <= 1e-3) continue;
            Eigen::MatrixXd up = a, down = a;
            up(r, c) += h;
            down(r, c) -= h;
            const double grad = (ll_at(mu, up) - ll_at(mu, down)) / (2.0 * h);
            CHECK(std::abs(grad) <= 1e-4);
        }
    }
}

TEST_CASE("fit_mle: multi layout keeps one mu per source with a shared A") {
    const auto model = test::random_model(2, 0.4, 1.0, 88);
    std::vector<EventSequence> seqs;
    for (std::uint64_t s = 0; s < 6; ++s) {
        auto seq = simulate_branching(model, 50.0, 700 + s);
        seq.source = static_cast<int>(s % 3);
        seqs.push_back(std::move(seq));
    }
    const auto fit = fit_mle(seqs, model.w, MleLayout::Multi);
    CHECK(fit.strategy == Strategy::Multi);
    REQUIRE(fit.models.size() == 3);
    for (const auto& m : fit.models) CHECK(m.A == fit.models.front().A);
    CHECK(fit.theta.size() == 2 * (3 + 2));
}
