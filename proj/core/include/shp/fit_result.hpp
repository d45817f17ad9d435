#pragma once

#include <Eigen/Dense>
#include <span>
#include <vector>

#include "shp/bundle.hpp"
#include "shp/model.hpp"

namespace shp {

/// Outcome of a least-squares or maximum-likelihood fit.
struct FitResult {
    Strategy strategy = Strategy::Single;
    Eigen::VectorXd theta;            // layout per Strategy, vec(A) column-major
    std::vector<HawkesModel> models;  // one, or M sharing A for Multi
    double loss = 0.0;                // weighted squared loss, or -loglik for MLE
    int iterations = 0;
    bool stationary = false;          // every reconstructed model stationary
    bool constrained = true;          // theta >= 0 enforced
    bool ridge_fallback = false;
    bool rank_deficient = false;
    bool underdetermined = false;     // fewer rows than parameters
    std::vector<double> objective_trace;
};

/// theta -> models for the given layout; Multi yields num_sources models
/// sharing A. Inverse of models_to_theta.
std::vector<HawkesModel> theta_to_models(const Eigen::VectorXd& theta, Strategy strategy,
                                         int dim_count, int num_sources, double w);

Eigen::VectorXd models_to_theta(std::span<const HawkesModel> models, Strategy strategy);

}  // namespace shp
