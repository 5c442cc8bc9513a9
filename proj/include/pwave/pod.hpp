#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <span>
#include <vector>

#include "pwave/assembly.hpp"

namespace pwave {

/// A snapshot is a dof x samples matrix; static snapshots have one column,
/// trajectory snapshots one column per retained time sample.
using Snapshot = Eigen::MatrixXd;

enum class InnerProductKind { euclidean, l2, h1, time_h1 };

/// Inner product on snapshots: columnwise spatial Gram matrix (identity,
/// sparse, or dense), optionally contracted in time with quadrature
/// weights. Static snapshots use an empty weight vector.
class SnapshotSpace {
public:
    static SnapshotSpace euclidean();
    static SnapshotSpace weighted(Eigen::SparseMatrix<double> gram, InnerProductKind kind);
    static SnapshotSpace weighted_dense(Eigen::MatrixXd gram, InnerProductKind kind);

    /// Attaches trapezoid-style time weights (one per sample column).
    SnapshotSpace with_time_weights(Eigen::VectorXd weights) const;

    /// Gram matrix applied column by column.
    Snapshot apply(const Snapshot& y) const;
    /// (a, b)_X; applied_b must be apply(b).
    double inner_pre(const Snapshot& a, const Snapshot& applied_b) const;
    double inner(const Snapshot& a, const Snapshot& b) const { return inner_pre(a, apply(b)); }
    double norm(const Snapshot& a) const;

    InnerProductKind kind() const { return kind_; }

private:
    enum class GramForm { identity, sparse, dense };
    GramForm form_ = GramForm::identity;
    Eigen::SparseMatrix<double> sparse_;
    Eigen::MatrixXd dense_;
    Eigen::VectorXd time_weights_;
    InnerProductKind kind_ = InnerProductKind::euclidean;
};

/// Correlation matrix (1/n) (y_j, y_i)_X. Throws std::invalid_argument on
/// an empty list, inconsistent shapes, or an all-zero snapshot set.
Eigen::MatrixXd correlation_matrix(std::span<const Snapshot> snapshots,
                                   const SnapshotSpace& space);

struct PodResult {
    Eigen::VectorXd eigenvalues;  ///< all positive eigenvalues, descending
    std::vector<Snapshot> basis;  ///< first `rank` modes, X-orthonormal
    double zeta = 0.0;            ///< achieved tail ratio at the chosen rank
    InnerProductKind kind = InnerProductKind::euclidean;

    int rank() const { return static_cast<int>(basis.size()); }
    int spectrum_size() const { return static_cast<int>(eigenvalues.size()); }
    double tail(int ell) const; ///< sum of eigenvalues beyond ell
};

/// Extracts the rank-ell basis from the correlation eigendecomposition.
/// Exactly one of ell (>0) or zeta (in (0,1)) selects the rank: an explicit
/// ell must not exceed the numerical rank; a zeta picks the smallest ell
/// whose eigenvalue tail ratio drops to zeta. Eigenvalues below
/// 1e-12 * lambda_1 are treated as numerical zeros.
PodResult pod_basis(const Eigen::MatrixXd& correlation, std::span<const Snapshot> snapshots,
                    const SnapshotSpace& space, int ell, double zeta = -1.0);

/// Expansion coefficients of v in the POD basis (X-orthonormal, so these
/// are plain inner products).
Eigen::VectorXd ritz_project(const Snapshot& v, const PodResult& pod, const SnapshotSpace& space);

/// Static snapshots from a basis set, one column each.
std::vector<Snapshot> basis_snapshots(const BasisSet& basis);

/// Trajectory snapshot families from per-layer states (dim x (N+1), layer
/// k = 0..K): the solutions themselves, their second time-difference
/// quotients, and the z-difference of the first time-difference quotients;
/// 3K+2 families total, sampled on the interior time range n = 1..N-1.
/// Returns the families and the matching trapezoid time weights.
struct TrajectorySnapshots {
    std::vector<Snapshot> families;
    Eigen::VectorXd time_weights;
};
TrajectorySnapshots trajectory_snapshots(std::span<const Eigen::MatrixXd> layer_states,
                                         double dt, double dz);

/// POD result as a serializable basis set (static snapshots only).
BasisSet to_basis_set(const PodResult& pod);

} // namespace pwave
