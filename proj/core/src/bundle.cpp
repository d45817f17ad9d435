#include "shp/bundle.hpp"

#include <ostream>

#include "shp/errors.hpp"

namespace shp {

const char* strategy_name(Strategy s) {
    switch (s) {
        case Strategy::Single: return "single";
        case Strategy::Multi: return "multi";
        case Strategy::Super: return "super";
    }
    return "?";
}

Strategy strategy_from_name(const std::string& name) {
    if (name == "single") return Strategy::Single;
    if (name == "multi") return Strategy::Multi;
    if (name == "super") return Strategy::Super;
    throw DataError("unknown strategy '" + name + "'");
}

double RegressionBundle::loss(const Eigen::VectorXd& theta) const {
    if (theta.size() != params()) {
        throw DataError("bundle loss: theta has " + std::to_string(theta.size()) +
                        " entries, layout needs " + std::to_string(params()));
    }
    const Eigen::VectorXd residual = labels - design * theta;
    return (weights.array() * residual.array()).matrix().squaredNorm();
}

void RegressionBundle::write_text(std::ostream& out) const {
    out << "# regression bundle\n";
    out << "strategy " << strategy_name(strategy) << "\n";
    out << "D " << dim_count << " M " << num_sources << " w " << decay << " rows "
        << size() << " cols " << params() << "\n";
    out << "# source seq event label weight design...\n";
    out.precision(17);
    const Eigen::Index p = params();
    for (Eigen::Index i = 0; i < size(); ++i) {
        const auto& r = rows[static_cast<std::size_t>(i)];
        out << r.source << " " << r.seq << " " << r.event << " " << labels(i) << " "
            << weights(i);
        const Eigen::VectorXd dense_row = design.row(i);
        for (Eigen::Index j = 0; j < p; ++j) out << " " << dense_row(j);
        out << "\n";
    }
}

}  // namespace shp
