#include "shp/model.hpp"

#include <Eigen/Eigenvalues>
#include <Eigen/SVD>
#include <cmath>

#include "shp/errors.hpp"

namespace shp {

double spectral_radius(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::EigenSolver<Eigen::MatrixXd> solver(m, /*computeEigenvectors=*/false);
    return solver.eigenvalues().cwiseAbs().maxCoeff();
}

double spectral_norm(const Eigen::MatrixXd& m) {
    if (m.size() == 0) return 0.0;
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(m);
    return svd.singularValues()(0);
}

ModelValidation validate_model(const HawkesModel& model) {
    const int d = model.dim();
    if (model.A.rows() != d || model.A.cols() != d) {
        throw DataError("validate_model: mu has length " + std::to_string(d) +
                        " but A is " + std::to_string(model.A.rows()) + "x" +
                        std::to_string(model.A.cols()));
    }

    ModelValidation report;
    if (!(model.w > 0.0) || !std::isfinite(model.w)) {
        report.issues.push_back("decay rate w must be positive and finite");
    }
    if ((model.mu.array() < 0.0).any() || !model.mu.allFinite()) {
        report.issues.push_back("mu must be nonnegative and finite");
    }
    if ((model.A.array() < 0.0).any() || !model.A.allFinite()) {
        report.issues.push_back("A must be nonnegative and finite");
    }

    if (model.w > 0.0 && d > 0) {
        report.spectral_radius = spectral_radius(model.A / model.w);
        report.stationary = report.spectral_radius < 1.0;
    }
    return report;
}

}  // namespace shp
