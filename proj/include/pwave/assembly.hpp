#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <limits>
#include <string>
#include <vector>

#include "pwave/grid.hpp"

namespace pwave {

/// 4x4 bilinear (Q1) element matrices on a square cell of side h, exact
/// integrals, corner order (0,0),(1,0),(0,1),(1,1). Cell-constant
/// coefficients multiply these from outside.
Eigen::Matrix4d q1_stiffness(double h);
Eigen::Matrix4d q1_mass(double h);

/// All fine-grid bilinear forms of one z-layer, restricted to interior
/// (non-Dirichlet) dofs by symmetric row/column elimination.
struct LayerOperators {
    int layer = -1;
    Eigen::SparseMatrix<double> stiffness;  ///< weight c
    Eigen::SparseMatrix<double> mass_cinv;  ///< weight 1/c
    Eigen::SparseMatrix<double> mass;       ///< weight 1
    Eigen::SparseMatrix<double> mass_kappa; ///< weight kappa (empty until kappa_tilde runs)
    Eigen::VectorXd kappa;                  ///< per-cell spectral weight
};

/// Assembles stiffness and the two mass forms for one layer. The kappa
/// weight is filled later by kappa_tilde. Throws std::invalid_argument on a
/// size mismatch or non-positive coefficient.
LayerOperators assemble_layer(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                              int layer = -1);

/// Coefficient-adapted partition of unity: for every coarse node (boundary
/// nodes included) the nodal hat data on each patch element boundary is
/// extended harmonically with weight c into the element interiors.
/// Vectors live on all fine nodes; entries carry the hat boundary data on
/// the coarse skeleton.
struct PartitionOfUnity {
    std::vector<Eigen::VectorXd> chi; ///< one per coarse node, size n_fine_nodes
};

PartitionOfUnity msfem_partition(const GridHierarchy& grid, const Eigen::VectorXd& cells);

/// Per-cell spectral weight sum_j c |grad chi_j|^2 with the gradient taken
/// at cell centers, and the associated weighted mass matrix. By default the
/// sum runs over interior coarse nodes only; include_boundary_nodes adds the
/// boundary-node hats.
void kappa_tilde(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                 const PartitionOfUnity& pou, LayerOperators& ops,
                 bool include_boundary_nodes = false);

/// Unweighted H1 matrix (stiffness + mass with c = 1) on interior dofs;
/// layer independent.
Eigen::SparseMatrix<double> h1_matrix(const GridHierarchy& grid);

/// Generic weighted mass / stiffness assembly on interior dofs.
Eigen::SparseMatrix<double> assemble_mass(const GridHierarchy& grid, const Eigen::VectorXd& cell_weights);
Eigen::SparseMatrix<double> assemble_stiffness(const GridHierarchy& grid, const Eigen::VectorXd& cell_weights);

enum class BasisTag { msfem, auxiliary, cem, pod };

struct BasisVectorMeta {
    int layer = -1;
    int element = -1;
    double eigenvalue = std::numeric_limits<double>::quiet_NaN();
};

/// Ordered set of fine-grid coefficient vectors over interior dofs.
struct BasisSet {
    BasisTag tag = BasisTag::cem;
    std::vector<Eigen::VectorXd> vectors;
    std::vector<BasisVectorMeta> meta;
    int oversample = -1; ///< m used for cem construction, if applicable

    // pod extras
    Eigen::VectorXd pod_spectrum;
    double pod_zeta = std::numeric_limits<double>::quiet_NaN();

    int count() const { return static_cast<int>(vectors.size()); }
    int dim() const { return vectors.empty() ? 0 : static_cast<int>(vectors.front().size()); }
    Eigen::MatrixXd as_matrix() const;
};

const char* to_string(BasisTag tag);

/// Coordinate-format text dump (row col value per line), for debugging.
void dump_matrix(const std::string& path, const Eigen::SparseMatrix<double>& m);
Eigen::SparseMatrix<double> read_matrix_dump(const std::string& path);

} // namespace pwave
