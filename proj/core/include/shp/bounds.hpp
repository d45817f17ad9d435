#pragma once

#include <Eigen/Dense>
#include <vector>

#include "shp/events.hpp"

namespace shp {

/// Excess-risk bound expressions for the three learning strategies and the
/// verdict on whether superposition tightens the multi-source bound.
/// Values are reported up to a universal constant (set to 1).
struct BoundReport {
    double B_mu = 0.0;        // bound on ||mu^m||^2
    double B_A = 0.0;         // bound on ||vec(A)||^2
    double B_sigma_mu = 0.0;  // bound on ||sum_m mu^m||^2
    int D = 0;
    int M = 0;
    long I = 0;

    double bound_single = 0.0;
    double bound_multi = 0.0;
    double bound_super = 0.0;
    bool condition_holds = false;  // bound_super <= bound_multi
};

/// Evaluates the three bound expressions, each divided by the sample count
/// M*I:
///   multi:  B_A + M B_mu     + D(M+D) B_mu log(1 + MI / (D(M+D)))
///   super:  B_A + B_sigma_mu + D(1+D) B_mu log(1 + MI / (D(1+D)))
///   single: B_A + B_mu       + D(1+D) B_mu log(1 + MI / (D(1+D)))
/// Throws DataError on negative bounds or sizes below 1.
BoundReport bound_expressions(double B_mu, double B_A, double B_sigma_mu, int D, int M,
                              long I);

enum class MuScenario { Identical, Complementary, General };

const char* scenario_name(MuScenario s);

struct ScenarioReport {
    MuScenario scenario = MuScenario::General;
    double B_sigma_mu = 0.0;  // exact ||sum_m mu^m||^2
    double B_mu_max = 0.0;    // max_m ||mu^m||^2, an empirical B_mu
};

/// Identical when all vectors are equal; complementary when supports are
/// pairwise disjoint; general otherwise.
ScenarioReport classify_scenario(const std::vector<Eigen::VectorXd>& mus);

/// Events-per-sequence parameter for the bound expressions: the mean event
/// count rounded up (sequence lengths need not be equal).
long effective_events_per_seq(const std::vector<EventSequence>& seqs);

}  // namespace shp
