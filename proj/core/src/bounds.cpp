#include "shp/bounds.hpp"

#include <cmath>

#include "shp/errors.hpp"

namespace shp {

namespace {

double capacity_term(double params, double samples) {
    return params * std::log1p(samples / params);
}

}  // namespace

const char* scenario_name(MuScenario s) {
    switch (s) {
        case MuScenario::Identical: return "identical";
        case MuScenario::Complementary: return "complementary";
        case MuScenario::General: return "general";
    }
    return "?";
}

BoundReport bound_expressions(double B_mu, double B_A, double B_sigma_mu, int D, int M,
                              long I) {
    if (B_mu < 0.0 || B_A < 0.0 || B_sigma_mu < 0.0) {
        throw DataError("bound_expressions: bounds must be nonnegative");
    }
    if (D < 1 || M < 1 || I < 1) {
        throw DataError("bound_expressions: D, M, I must be at least 1");
    }

    BoundReport report;
    report.B_mu = B_mu;
    report.B_A = B_A;
    report.B_sigma_mu = B_sigma_mu;
    report.D = D;
    report.M = M;
    report.I = I;

    const double samples = static_cast<double>(M) * static_cast<double>(I);
    const double dims_multi = static_cast<double>(D) * (M + D);
    const double dims_single = static_cast<double>(D) * (1 + D);

    report.bound_multi =
        (B_A + M * B_mu + B_mu * capacity_term(dims_multi, samples)) / samples;
    report.bound_super =
        (B_A + B_sigma_mu + B_mu * capacity_term(dims_single, samples)) / samples;
    report.bound_single =
        (B_A + B_mu + B_mu * capacity_term(dims_single, samples)) / samples;
    report.condition_holds = report.bound_super <= report.bound_multi;
    return report;
}

ScenarioReport classify_scenario(const std::vector<Eigen::VectorXd>& mus) {
    if (mus.empty()) throw DataError("classify_scenario: no vectors");
    const Eigen::Index d = mus.front().size();
    for (const auto& mu : mus) {
        if (mu.size() != d) throw DataError("classify_scenario: unequal lengths");
    }

    ScenarioReport report;
    Eigen::VectorXd total = Eigen::VectorXd::Zero(d);
    for (const auto& mu : mus) {
        total += mu;
        report.B_mu_max = std::max(report.B_mu_max, mu.squaredNorm());
    }
    report.B_sigma_mu = total.squaredNorm();

    bool identical = true;
    for (const auto& mu : mus) {
        if (mu != mus.front()) {
            identical = false;
            break;
        }
    }
    if (identical) {
        report.scenario = MuScenario::Identical;
        return report;
    }

    // Supports are pairwise disjoint exactly when no coordinate is nonzero
    // in more than one vector.
    bool complementary = true;
    for (Eigen::Index i = 0; i < d && complementary; ++i) {
        int holders = 0;
        for (const auto& mu : mus) {
            if (mu(i) != 0.0) ++holders;
        }
        if (holders > 1) complementary = false;
    }
    report.scenario = complementary ? MuScenario::Complementary : MuScenario::General;
    return report;
}

long effective_events_per_seq(const std::vector<EventSequence>& seqs) {
    if (seqs.empty()) throw DataError("effective_events_per_seq: no sequences");
    std::size_t total = 0;
    for (const auto& s : seqs) total += s.size();
    const auto m = static_cast<double>(seqs.size());
    return static_cast<long>(std::ceil(static_cast<double>(total) / m));
}

}  // namespace shp
