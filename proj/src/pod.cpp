#include "pwave/pod.hpp"

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>

namespace pwave {

SnapshotSpace SnapshotSpace::euclidean() { return SnapshotSpace{}; }

SnapshotSpace SnapshotSpace::weighted(Eigen::SparseMatrix<double> gram, InnerProductKind kind) {
    SnapshotSpace space;
    space.form_ = GramForm::sparse;
    space.sparse_ = std::move(gram);
    space.kind_ = kind;
    return space;
}

SnapshotSpace SnapshotSpace::weighted_dense(Eigen::MatrixXd gram, InnerProductKind kind) {
    SnapshotSpace space;
    space.form_ = GramForm::dense;
    space.dense_ = std::move(gram);
    space.kind_ = kind;
    return space;
}

SnapshotSpace SnapshotSpace::with_time_weights(Eigen::VectorXd weights) const {
    SnapshotSpace space = *this;
    space.time_weights_ = std::move(weights);
    space.kind_ = InnerProductKind::time_h1;
    return space;
}

Snapshot SnapshotSpace::apply(const Snapshot& y) const {
    switch (form_) {
        case GramForm::identity: return y;
        case GramForm::sparse: return sparse_ * y;
        case GramForm::dense: return dense_ * y;
    }
    return y;
}

double SnapshotSpace::inner_pre(const Snapshot& a, const Snapshot& applied_b) const {
    if (a.rows() != applied_b.rows() || a.cols() != applied_b.cols())
        throw std::invalid_argument("SnapshotSpace: snapshot shape mismatch");
    if (time_weights_.size() == 0) {
        if (a.cols() != 1)
            throw std::invalid_argument("SnapshotSpace: time weights required for trajectory snapshots");
        return a.col(0).dot(applied_b.col(0));
    }
    if (time_weights_.size() != a.cols())
        throw std::invalid_argument("SnapshotSpace: time weight count mismatch");
    double sum = 0.0;
    for (Eigen::Index t = 0; t < a.cols(); ++t)
        sum += time_weights_[t] * a.col(t).dot(applied_b.col(t));
    return sum;
}

double SnapshotSpace::norm(const Snapshot& a) const { return std::sqrt(inner(a, a)); }

Eigen::MatrixXd correlation_matrix(std::span<const Snapshot> snapshots,
                                   const SnapshotSpace& space) {
    const int n = static_cast<int>(snapshots.size());
    if (n == 0) throw std::invalid_argument("correlation_matrix: no snapshots");

    std::vector<Snapshot> applied;
    applied.reserve(snapshots.size());
    for (const Snapshot& y : snapshots) applied.push_back(space.apply(y));

    Eigen::MatrixXd corr(n, n);
    for (int j = 0; j < n; ++j) {
        for (int i = j; i < n; ++i) {
            const double v = space.inner_pre(snapshots[static_cast<std::size_t>(i)],
                                             applied[static_cast<std::size_t>(j)]) / n;
            corr(i, j) = v;
            corr(j, i) = v;
        }
    }
    if (corr.diagonal().maxCoeff() <= 0.0)
        throw std::invalid_argument("correlation_matrix: all snapshots zero");
    return corr;
}

double PodResult::tail(int ell) const {
    double sum = 0.0;
    for (int k = ell; k < spectrum_size(); ++k) sum += eigenvalues[k];
    return sum;
}

PodResult pod_basis(const Eigen::MatrixXd& correlation, std::span<const Snapshot> snapshots,
                    const SnapshotSpace& space, int ell, double zeta) {
    const int n = static_cast<int>(snapshots.size());
    if (correlation.rows() != n || correlation.cols() != n)
        throw std::invalid_argument("pod_basis: correlation size mismatch");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(correlation);
    if (solver.info() != Eigen::Success) throw std::runtime_error("pod_basis: eigensolver failed");

    // Descending order, numerical zeros dropped.
    Eigen::VectorXd values = solver.eigenvalues().reverse();
    Eigen::MatrixXd vectors = solver.eigenvectors().rowwise().reverse();
    const double cutoff = 1e-12 * std::max(values[0], 0.0);
    int rank = 0;
    while (rank < n && values[rank] > cutoff) ++rank;
    if (rank == 0) throw std::invalid_argument("pod_basis: all snapshots zero");
    values.conservativeResize(rank);
    const double total = values.sum();

    if (ell <= 0) {
        if (!(zeta > 0.0 && zeta < 1.0))
            throw std::invalid_argument("pod_basis: need rank or zeta in (0,1)");
        double tail = total;
        ell = rank;
        for (int k = 1; k <= rank; ++k) {
            tail -= values[k - 1];
            if (tail <= zeta * total) {
                ell = k;
                break;
            }
        }
    } else if (ell > rank) {
        throw std::invalid_argument("pod_basis: requested rank exceeds numerical rank");
    }

    PodResult pod;
    pod.eigenvalues = values;
    pod.kind = space.kind();

    // phi_k = sum_j (v_k)_j y_j / sqrt(n lambda_k); the scaling makes the
    // modes X-orthonormal.
    pod.basis.reserve(static_cast<std::size_t>(ell));
    for (int k = 0; k < ell; ++k) {
        Snapshot phi = Snapshot::Zero(snapshots[0].rows(), snapshots[0].cols());
        for (int j = 0; j < n; ++j) phi += vectors(j, k) * snapshots[static_cast<std::size_t>(j)];
        phi /= std::sqrt(n * values[k]);
        pod.basis.push_back(std::move(phi));
    }

    // One modified Gram-Schmidt sweep scrubs the rounding left by the
    // eigenvector route; it is triangular, so span{phi_1..phi_l} is
    // unchanged for every l.
    std::vector<Snapshot> applied;
    applied.reserve(pod.basis.size());
    for (std::size_t k = 0; k < pod.basis.size(); ++k) {
        for (std::size_t j = 0; j < k; ++j)
            pod.basis[k] -= space.inner_pre(pod.basis[k], applied[j]) * pod.basis[j];
        const double nrm = space.norm(pod.basis[k]);
        if (!(nrm > 0.0)) throw std::runtime_error("pod_basis: basis degenerated");
        pod.basis[k] /= nrm;
        applied.push_back(space.apply(pod.basis[k]));
    }

    // Deterministic sign.
    for (Snapshot& phi : pod.basis) {
        Eigen::Index r = 0, c = 0;
        phi.cwiseAbs().maxCoeff(&r, &c);
        if (phi(r, c) < 0.0) phi = -phi;
    }

    pod.zeta = total > 0.0 ? pod.tail(ell) / total : 0.0;
    return pod;
}

Eigen::VectorXd ritz_project(const Snapshot& v, const PodResult& pod, const SnapshotSpace& space) {
    Eigen::VectorXd coeffs(pod.rank());
    const Snapshot applied = space.apply(v);
    for (int k = 0; k < pod.rank(); ++k)
        coeffs[k] = space.inner_pre(pod.basis[static_cast<std::size_t>(k)], applied);
    return coeffs;
}

std::vector<Snapshot> basis_snapshots(const BasisSet& basis) {
    if (basis.count() == 0) throw std::invalid_argument("basis_snapshots: empty basis");
    std::vector<Snapshot> snapshots;
    snapshots.reserve(static_cast<std::size_t>(basis.count()));
    for (const Eigen::VectorXd& v : basis.vectors) snapshots.push_back(v);
    return snapshots;
}

TrajectorySnapshots trajectory_snapshots(std::span<const Eigen::MatrixXd> layer_states,
                                         double dt, double dz) {
    if (layer_states.size() < 2)
        throw std::invalid_argument("trajectory_snapshots: need layers 0..K with K >= 1");
    const Eigen::Index cols = layer_states[0].cols();
    if (cols < 3) throw std::invalid_argument("trajectory_snapshots: need at least 3 time levels");
    for (const auto& s : layer_states)
        if (s.cols() != cols || s.rows() != layer_states[0].rows())
            throw std::invalid_argument("trajectory_snapshots: inconsistent trajectory shapes");

    const Eigen::Index nt = cols - 2; // interior samples n = 1..N-1
    const int big_k = static_cast<int>(layer_states.size()) - 1;

    TrajectorySnapshots out;
    out.families.reserve(static_cast<std::size_t>(3 * big_k + 2));

    for (int j = 0; j <= big_k; ++j)
        out.families.push_back(layer_states[static_cast<std::size_t>(j)].middleCols(1, nt));
    for (int j = 0; j <= big_k; ++j) {
        const Eigen::MatrixXd& s = layer_states[static_cast<std::size_t>(j)];
        Snapshot acc(s.rows(), nt);
        for (Eigen::Index n = 1; n + 1 < cols; ++n)
            acc.col(n - 1) = (s.col(n + 1) - 2.0 * s.col(n) + s.col(n - 1)) / (dt * dt);
        out.families.push_back(std::move(acc));
    }
    auto velocity = [&](int j) {
        const Eigen::MatrixXd& s = layer_states[static_cast<std::size_t>(j)];
        Snapshot vel(s.rows(), nt);
        for (Eigen::Index n = 1; n + 1 < cols; ++n) vel.col(n - 1) = (s.col(n + 1) - s.col(n - 1)) / (2.0 * dt);
        return vel;
    };
    Snapshot prev = velocity(0);
    for (int j = 1; j <= big_k; ++j) {
        Snapshot cur = velocity(j);
        out.families.push_back((cur - prev) / dz);
        prev = std::move(cur);
    }

    double max_norm = 0.0;
    for (const Snapshot& y : out.families) max_norm = std::max(max_norm, y.cwiseAbs().maxCoeff());
    if (max_norm == 0.0) throw std::invalid_argument("trajectory_snapshots: all snapshots zero");

    out.time_weights = Eigen::VectorXd::Constant(nt, dt);
    out.time_weights[0] = 0.5 * dt;
    out.time_weights[nt - 1] = 0.5 * dt;
    return out;
}

BasisSet to_basis_set(const PodResult& pod) {
    BasisSet basis;
    basis.tag = BasisTag::pod;
    basis.pod_spectrum = pod.eigenvalues;
    basis.pod_zeta = pod.zeta;
    for (const Snapshot& phi : pod.basis) {
        if (phi.cols() != 1)
            throw std::invalid_argument("to_basis_set: trajectory-mode modes are not fine-grid vectors");
        basis.vectors.push_back(phi.col(0));
        basis.meta.push_back({});
    }
    return basis;
}

} // namespace pwave
