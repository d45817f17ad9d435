#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

namespace shp {

/// Parametric multivariate Hawkes model with exponential kernel.
///
/// Intensity of dimension d:
///   lambda_d(t) = mu[d] + sum over past events (t_j, d_j) of
///                 A(d, d_j) * exp(-w * (t - t_j))
///
/// mu is the vector of exogenous rates, A the nonnegative infectivity
/// matrix, and w > 0 the shared kernel decay. The branching matrix A / w
/// holds the expected offspring counts per event; its spectral radius
/// below 1 makes the process stationary.
struct HawkesModel {
    Eigen::VectorXd mu;   // exogenous rates, length D
    Eigen::MatrixXd A;    // infectivity weights, D x D
    double w = 1.0;       // kernel decay rate

    int dim() const { return static_cast<int>(mu.size()); }
};

struct ModelValidation {
    double spectral_radius = 0.0;  // of the branching matrix A / w
    bool stationary = false;
    std::vector<std::string> issues;  // nonstructural problems (negative entries, ...)

    bool ok() const { return issues.empty(); }
};

/// Checks structural consistency and stationarity of a model.
/// Throws DataError on dimension mismatch between mu and A; nonnegative-entry
/// violations and w <= 0 are reported as issues.
ModelValidation validate_model(const HawkesModel& model);

/// Spectral radius (largest eigenvalue magnitude) of a square matrix.
double spectral_radius(const Eigen::MatrixXd& m);

/// Largest singular value.
double spectral_norm(const Eigen::MatrixXd& m);

}  // namespace shp
