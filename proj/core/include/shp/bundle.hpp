#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <iosfwd>
#include <vector>

namespace shp {

/// How sequences are turned into one regression problem.
enum class Strategy { Single, Multi, Super };

const char* strategy_name(Strategy s);
Strategy strategy_from_name(const std::string& name);

/// Maps a regression row back to (source, sequence, event).
struct BundleRow {
    int source = 0;
    int seq = 0;
    int event = 0;
};

/// Weighted least-squares problem assembled from event sequences.
///
/// Row i corresponds to one observed event: the label is the same-dimension
/// event count at that time, the design row the integrated intensity
/// features, and the weight 1 / t_i (counting-process variance grows with
/// t, so residuals are rescaled to comparable magnitude). Labels and design
/// carry a 1/sqrt(L) normalization, L being the total event count, which
/// keeps the loss an average over rows.
///
/// Column layout (vec(A) is column-major, asserted by round-trip tests):
///   Single/Super: [mu (D) | vec(A) (D^2)],  P = D(1+D)
///   Multi:        [mu^1 .. mu^M | vec(A)],  P = D(M+D)
///
/// For the Super strategy the weight entries additionally carry 1/M_g,
/// M_g being the number of sequences superposed into the row's group, so
/// loss() reports the superposition objective directly.
struct RegressionBundle {
    Strategy strategy = Strategy::Single;
    int dim_count = 0;    // D
    int num_sources = 1;  // M (1 for Single and Super layouts)
    double decay = 1.0;   // kernel decay w used for the features

    Eigen::VectorXd labels;
    Eigen::SparseMatrix<double, Eigen::RowMajor> design;
    Eigen::VectorXd weights;
    std::vector<BundleRow> rows;

    Eigen::Index size() const { return labels.size(); }
    int params() const {
        const int m = strategy == Strategy::Multi ? num_sources : 1;
        return dim_count * (m + dim_count);
    }

    /// || diag(weights) * (labels - design * theta) ||^2
    double loss(const Eigen::VectorXd& theta) const;

    /// Plain-text dump (debugging only; format documented in the README).
    void write_text(std::ostream& out) const;
};

}  // namespace shp
