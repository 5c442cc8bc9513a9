#pragma once

#include <Eigen/Core>
#include <span>
#include <vector>

#include "pwave/assembly.hpp"
#include "pwave/grid.hpp"

namespace pwave {

/// Local bilinear forms of one coarse element: energy form (weight c) and
/// spectral mass form (weight kappa), both restricted to the element's fine
/// nodes excluding Dirichlet boundary nodes of the domain.
struct LocalForms {
    std::vector<int> nodes; ///< global fine-node ids, lexicographic
    Eigen::MatrixXd energy; ///< integrals over the element only
    Eigen::MatrixXd spectral_mass;
};

LocalForms local_forms(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                       const Eigen::VectorXd& kappa, int element);

/// Smallest eigenpairs of the element problem  energy * phi = sigma *
/// spectral_mass * phi, eigenvalues ascending and eigenvectors normalized to
/// unit spectral mass.
struct SpectralResult {
    int element = -1;
    int layer = -1;
    std::vector<int> nodes;      ///< as in LocalForms
    Eigen::VectorXd eigenvalues; ///< ascending, size = retained count
    Eigen::MatrixXd eigenvectors; ///< n_loc x count
    Eigen::MatrixXd s_weights;    ///< spectral_mass * eigenvectors
    double next_eigenvalue = -1.0; ///< sigma_{count+1}, -1 if exhausted
};

/// Computes the generalized eigenproblem. A dense solver handles elements
/// below dense_threshold dofs; larger ones use shifted block inverse
/// iteration with the sparse forms. Throws std::runtime_error if the
/// iteration fails to reach tolerance.
SpectralResult local_spectral(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                              const Eigen::VectorXd& kappa, int element, int layer,
                              int count, int dense_threshold = 2000);

/// local_spectral over all elements of a layer, parallel over elements.
std::vector<SpectralResult> layer_spectral(const GridHierarchy& grid,
                                           const Eigen::VectorXd& cells,
                                           const Eigen::VectorXd& kappa, int layer,
                                           int count_per_element,
                                           int dense_threshold = 2000);

/// Auxiliary-space coefficients of an interior-dof vector: per element, the
/// spectral-mass products against that element's eigenfunctions. This is
/// the matrix of the projection onto the auxiliary space.
std::vector<Eigen::VectorXd> aux_coefficients(const GridHierarchy& grid,
                                              std::span<const SpectralResult> spectral,
                                              const Eigen::VectorXd& interior_vec);

/// Multiscale basis for one layer: for every element i and retained
/// eigenfunction j, solves on the interior of the oversampled patch
///   energy(psi, v) + penalty(psi, v) = s_i(phi_j, v)   for all patch v,
/// where the penalty is the spectral-mass product of the auxiliary
/// projections. Each solution is extended by zero and stored over interior
/// dofs.
BasisSet cem_basis(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                   std::span<const SpectralResult> spectral, int m);

/// Concatenates per-layer basis sets; metadata is preserved and no
/// orthogonalization happens here. Throws std::invalid_argument when empty.
BasisSet build_vcem(std::span<const BasisSet> layer_sets);

} // namespace pwave
