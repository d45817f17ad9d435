#include "shp/fit_result.hpp"

#include "shp/errors.hpp"

namespace shp {

std::vector<HawkesModel> theta_to_models(const Eigen::VectorXd& theta, Strategy strategy,
                                         int dim_count, int num_sources, double w) {
    const int d = dim_count;
    const int m = strategy == Strategy::Multi ? num_sources : 1;
    if (theta.size() != d * (m + d)) {
        throw DataError("theta_to_models: theta length " + std::to_string(theta.size()) +
                        " does not match layout " + std::to_string(d * (m + d)));
    }
    Eigen::MatrixXd a(d, d);
    for (int col = 0; col < d; ++col) {
        a.col(col) = theta.segment(d * m + col * d, d);  // column-major vec(A)
    }
    std::vector<HawkesModel> models;
    models.reserve(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        models.push_back(HawkesModel{theta.segment(d * i, d), a, w});
    }
    return models;
}

Eigen::VectorXd models_to_theta(std::span<const HawkesModel> models, Strategy strategy) {
    if (models.empty()) throw DataError("models_to_theta: no models");
    const int d = models.front().dim();
    const int m = strategy == Strategy::Multi ? static_cast<int>(models.size()) : 1;
    if (strategy != Strategy::Multi && models.size() != 1) {
        throw DataError("models_to_theta: single/super layouts take one model");
    }
    Eigen::VectorXd theta(d * (m + d));
    for (int i = 0; i < m; ++i) {
        if (models[static_cast<std::size_t>(i)].dim() != d) {
            throw DataError("models_to_theta: mismatched dimensions");
        }
        theta.segment(d * i, d) = models[static_cast<std::size_t>(i)].mu;
    }
    const Eigen::MatrixXd& a = models.front().A;
    for (int col = 0; col < d; ++col) theta.segment(d * m + col * d, d) = a.col(col);
    return theta;
}

}  // namespace shp
