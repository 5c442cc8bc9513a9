#include "pwave/cem.hpp"

#include <Eigen/Dense>
#include <Eigen/SparseCholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <unordered_map>

#include "pwave/util.hpp"

namespace pwave {

LocalForms local_forms(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                       const Eigen::VectorXd& kappa, int element) {
    if (element < 0 || element >= grid.n_elements())
        throw std::out_of_range("local_forms: element index out of range");
    if (cells.size() != grid.n_fine_cells() || kappa.size() != grid.n_fine_cells())
        throw std::invalid_argument("local_forms: weight size mismatch");

    LocalForms forms;
    std::unordered_map<int, int> local_of;
    for (int node : grid.element_nodes(element)) {
        if (grid.node_on_boundary(node)) continue;
        local_of.emplace(node, static_cast<int>(forms.nodes.size()));
        forms.nodes.push_back(node);
    }
    const int n = static_cast<int>(forms.nodes.size());
    forms.energy = Eigen::MatrixXd::Zero(n, n);
    forms.spectral_mass = Eigen::MatrixXd::Zero(n, n);

    const Eigen::Matrix4d ke = q1_stiffness(grid.fine_step());
    const Eigen::Matrix4d me = q1_mass(grid.fine_step());
    for (int cell : grid.element_cells(element)) {
        const auto nodes = grid.cell_nodes(cell);
        int loc[4];
        for (int a = 0; a < 4; ++a) {
            auto it = local_of.find(nodes[a]);
            loc[a] = it == local_of.end() ? -1 : it->second;
        }
        for (int a = 0; a < 4; ++a) {
            if (loc[a] < 0) continue;
            for (int b = 0; b < 4; ++b) {
                if (loc[b] < 0) continue;
                forms.energy(loc[a], loc[b]) += cells[cell] * ke(a, b);
                forms.spectral_mass(loc[a], loc[b]) += kappa[cell] * me(a, b);
            }
        }
    }
    return forms;
}

namespace {

struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors; // s-normalized columns
};

EigenPairs dense_smallest(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s, int count) {
    Eigen::GeneralizedSelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, s);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("local_spectral: dense generalized eigensolver failed");
    EigenPairs out;
    out.values = solver.eigenvalues().head(count);
    out.vectors = solver.eigenvectors().leftCols(count); // already s-orthonormal
    return out;
}

/// Block inverse iteration on (a + shift s) with s-orthonormalization and
/// Rayleigh-Ritz, for the smallest eigenpairs of a x = sigma s x.
EigenPairs iterative_smallest(const Eigen::MatrixXd& a, const Eigen::MatrixXd& s, int count) {
    const int n = static_cast<int>(a.rows());
    const int block = std::min(n, count + std::max(4, count / 2));
    const double shift = 1e-8 * a.trace() / s.trace();

    Eigen::SparseMatrix<double> b = (a + shift * s).sparseView(1.0, 1e-300);
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(b);
    if (factor.info() != Eigen::Success)
        throw std::runtime_error("local_spectral: shifted factorization failed");

    Rng rng(0x5eedULL + static_cast<std::uint64_t>(n));
    Eigen::MatrixXd x(n, block);
    for (int j = 0; j < block; ++j)
        for (int i = 0; i < n; ++i) x(i, j) = rng.uniform() - 0.5;

    Eigen::VectorXd prev = Eigen::VectorXd::Constant(count, 1e300);
    EigenPairs out;
    for (int it = 0; it < 200; ++it) {
        x = factor.solve(s * x);
        // s-orthonormalize via the small Gram factor.
        Eigen::MatrixXd gram = x.transpose() * s * x;
        Eigen::LLT<Eigen::MatrixXd> llt(gram);
        if (llt.info() != Eigen::Success) {
            // Restart a degenerate block with fresh randomness.
            for (int j = 0; j < block; ++j)
                for (int i = 0; i < n; ++i) x(i, j) += 1e-8 * (rng.uniform() - 0.5);
            continue;
        }
        x = llt.matrixU().triangularView<Eigen::Upper>().solve<Eigen::OnTheRight>(x);
        // Rayleigh-Ritz in the block.
        Eigen::MatrixXd ar = x.transpose() * a * x;
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> small(ar);
        x = x * small.eigenvectors();
        Eigen::VectorXd vals = small.eigenvalues().head(count);
        if (((vals - prev).cwiseAbs().array() <= 1e-12 * (vals.cwiseAbs().array() + 1.0)).all()) {
            out.values = vals;
            out.vectors = x.leftCols(count);
            // Residual check: ||a phi - sigma s phi|| <= tol * scale.
            for (int j = 0; j < count; ++j) {
                Eigen::VectorXd r = a * out.vectors.col(j) - out.values[j] * (s * out.vectors.col(j));
                double scale = (a * out.vectors.col(j)).norm() + std::abs(out.values[j]);
                if (r.norm() > 1e-8 * (scale + 1.0))
                    throw std::runtime_error("local_spectral: iteration residual too large: " +
                                             std::to_string(r.norm()));
            }
            return out;
        }
        prev = vals;
    }
    throw std::runtime_error("local_spectral: block inverse iteration did not converge");
}

} // namespace

SpectralResult local_spectral(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                              const Eigen::VectorXd& kappa, int element, int layer,
                              int count, int dense_threshold) {
    LocalForms forms = local_forms(grid, cells, kappa, element);
    const int n = static_cast<int>(forms.nodes.size());
    if (count < 1 || count > n)
        throw std::invalid_argument("local_spectral: invalid eigenpair count");

    // One extra pair exposes the spectral gap above the retained set.
    const int want = std::min(n, count + 1);
    EigenPairs pairs = n < dense_threshold
                           ? dense_smallest(forms.energy, forms.spectral_mass, want)
                           : iterative_smallest(forms.energy, forms.spectral_mass, want);

    SpectralResult result;
    result.element = element;
    result.layer = layer;
    result.nodes = std::move(forms.nodes);
    result.eigenvalues = pairs.values.head(count);
    result.eigenvectors = pairs.vectors.leftCols(count);
    result.next_eigenvalue = want > count ? pairs.values[count] : -1.0;

    // Deterministic sign: largest-magnitude entry positive.
    for (int j = 0; j < count; ++j) {
        int idx = 0;
        result.eigenvectors.col(j).cwiseAbs().maxCoeff(&idx);
        if (result.eigenvectors(idx, j) < 0.0) result.eigenvectors.col(j) = -result.eigenvectors.col(j);
    }
    result.s_weights = forms.spectral_mass * result.eigenvectors;
    return result;
}

std::vector<SpectralResult> layer_spectral(const GridHierarchy& grid,
                                           const Eigen::VectorXd& cells,
                                           const Eigen::VectorXd& kappa, int layer,
                                           int count_per_element, int dense_threshold) {
    std::vector<SpectralResult> results(grid.n_elements());
    parallel_for(results.size(), [&](std::size_t e) {
        results[e] = local_spectral(grid, cells, kappa, static_cast<int>(e), layer,
                                    count_per_element, dense_threshold);
    });
    return results;
}

std::vector<Eigen::VectorXd> aux_coefficients(const GridHierarchy& grid,
                                              std::span<const SpectralResult> spectral,
                                              const Eigen::VectorXd& interior_vec) {
    const auto& interior = grid.interior_of_node();
    std::vector<Eigen::VectorXd> coeffs;
    coeffs.reserve(spectral.size());
    for (const SpectralResult& sr : spectral) {
        Eigen::VectorXd local(sr.nodes.size());
        for (std::size_t j = 0; j < sr.nodes.size(); ++j) {
            const int dof = interior[sr.nodes[j]];
            local[static_cast<Eigen::Index>(j)] = dof >= 0 ? interior_vec[dof] : 0.0;
        }
        coeffs.push_back(sr.s_weights.transpose() * local);
    }
    return coeffs;
}

BasisSet cem_basis(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                   std::span<const SpectralResult> spectral, int m) {
    if (spectral.size() != static_cast<std::size_t>(grid.n_elements()))
        throw std::invalid_argument("cem_basis: need spectral results for every element");
    if (m < 0) throw std::invalid_argument("cem_basis: m must be >= 0");

    const int layer = spectral.empty() ? -1 : spectral.front().layer;
    const Eigen::Matrix4d ke = q1_stiffness(grid.fine_step());
    const auto& interior = grid.interior_of_node();

    std::vector<std::vector<Eigen::VectorXd>> per_element(grid.n_elements());
    parallel_for(static_cast<std::size_t>(grid.n_elements()), [&](std::size_t ei) {
        const int i = static_cast<int>(ei);
        const OversampleRegion region = oversample(grid, i, m);

        std::vector<int> patch_of(grid.n_fine_nodes(), -1);
        for (std::size_t p = 0; p < region.interior_fine_nodes.size(); ++p)
            patch_of[region.interior_fine_nodes[p]] = static_cast<int>(p);
        const int np = static_cast<int>(region.interior_fine_nodes.size());

        std::vector<Eigen::Triplet<double>> triplets;
        triplets.reserve(region.elements.size() * (16 * grid.refine * grid.refine + 8000));
        for (int e : region.elements) {
            for (int cell : grid.element_cells(e)) {
                const auto nodes = grid.cell_nodes(cell);
                for (int a = 0; a < 4; ++a) {
                    const int pa = patch_of[nodes[a]];
                    if (pa < 0) continue;
                    for (int b = 0; b < 4; ++b) {
                        const int pb = patch_of[nodes[b]];
                        if (pb < 0) continue;
                        triplets.emplace_back(pa, pb, cells[cell] * ke(a, b));
                    }
                }
            }
            // Penalty block of this element: outer product of its auxiliary
            // weight vectors, restricted to patch dofs.
            const SpectralResult& sr = spectral[static_cast<std::size_t>(e)];
            const int nl = static_cast<int>(sr.nodes.size());
            std::vector<int> pl(nl);
            for (int a = 0; a < nl; ++a) pl[a] = patch_of[sr.nodes[static_cast<std::size_t>(a)]];
            for (int a = 0; a < nl; ++a) {
                if (pl[a] < 0) continue;
                for (int b = 0; b < nl; ++b) {
                    if (pl[b] < 0) continue;
                    const double v = sr.s_weights.row(a).dot(sr.s_weights.row(b));
                    triplets.emplace_back(pl[a], pl[b], v);
                }
            }
        }
        Eigen::SparseMatrix<double> system(np, np);
        system.setFromTriplets(triplets.begin(), triplets.end());
        system.makeCompressed();
        Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> factor(system);
        if (factor.info() != Eigen::Success)
            throw std::runtime_error("cem_basis: patch factorization failed");

        const SpectralResult& own = spectral[static_cast<std::size_t>(i)];
        const int count = static_cast<int>(own.eigenvalues.size());
        per_element[ei].reserve(count);
        for (int j = 0; j < count; ++j) {
            Eigen::VectorXd rhs = Eigen::VectorXd::Zero(np);
            for (std::size_t a = 0; a < own.nodes.size(); ++a) {
                const int p = patch_of[own.nodes[a]];
                if (p >= 0) rhs[p] = own.s_weights(static_cast<Eigen::Index>(a), j);
            }
            Eigen::VectorXd sol = factor.solve(rhs);
            Eigen::VectorXd psi = Eigen::VectorXd::Zero(grid.n_interior_nodes());
            for (int p = 0; p < np; ++p)
                psi[interior[region.interior_fine_nodes[static_cast<std::size_t>(p)]]] = sol[p];
            per_element[ei].push_back(std::move(psi));
        }
    });

    BasisSet basis;
    basis.tag = BasisTag::cem;
    basis.oversample = m;
    for (int i = 0; i < grid.n_elements(); ++i) {
        const SpectralResult& sr = spectral[static_cast<std::size_t>(i)];
        for (std::size_t j = 0; j < per_element[static_cast<std::size_t>(i)].size(); ++j) {
            basis.vectors.push_back(std::move(per_element[static_cast<std::size_t>(i)][j]));
            basis.meta.push_back({layer, i, sr.eigenvalues[static_cast<Eigen::Index>(j)]});
        }
    }
    return basis;
}

BasisSet build_vcem(std::span<const BasisSet> layer_sets) {
    if (layer_sets.empty()) throw std::invalid_argument("build_vcem: no layer sets");
    BasisSet all;
    all.tag = BasisTag::cem;
    all.oversample = layer_sets.front().oversample;
    for (const BasisSet& set : layer_sets) {
        if (set.count() == 0) throw std::invalid_argument("build_vcem: empty layer set");
        for (int j = 0; j < set.count(); ++j) {
            all.vectors.push_back(set.vectors[static_cast<std::size_t>(j)]);
            all.meta.push_back(set.meta[static_cast<std::size_t>(j)]);
        }
    }
    return all;
}

} // namespace pwave
