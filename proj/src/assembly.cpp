#include "pwave/assembly.hpp"

#include <Eigen/Dense>
#include <fstream>
#include <stdexcept>

namespace pwave {

Eigen::Matrix4d q1_stiffness(double /*h*/) {
    // k1 x m1 + m1 x k1 with 1D factors k1 = (1/h)[[1,-1],[-1,1]],
    // m1 = (h/6)[[2,1],[1,2]]; the h factors cancel on squares.
    Eigen::Matrix2d k1, m1;
    k1 << 1, -1, -1, 1;
    m1 << 2, 1, 1, 2;
    m1 /= 6.0;
    Eigen::Matrix4d ke;
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
            for (int ey = 0; ey < 2; ++ey)
                for (int ex = 0; ex < 2; ++ex)
                    ke(dy * 2 + dx, ey * 2 + ex) = k1(dx, ex) * m1(dy, ey) + m1(dx, ex) * k1(dy, ey);
    return ke;
}

Eigen::Matrix4d q1_mass(double h) {
    Eigen::Matrix2d m1;
    m1 << 2, 1, 1, 2;
    m1 *= h / 6.0;
    Eigen::Matrix4d me;
    for (int dy = 0; dy < 2; ++dy)
        for (int dx = 0; dx < 2; ++dx)
            for (int ey = 0; ey < 2; ++ey)
                for (int ex = 0; ex < 2; ++ex)
                    me(dy * 2 + dx, ey * 2 + ex) = m1(dx, ex) * m1(dy, ey);
    return me;
}

namespace {

Eigen::SparseMatrix<double> assemble_interior(const GridHierarchy& grid,
                                              const Eigen::VectorXd& cell_weights,
                                              const Eigen::Matrix4d& element_matrix) {
    if (cell_weights.size() != grid.n_fine_cells())
        throw std::invalid_argument("assembly: cell weight count does not match grid");
    const auto& interior = grid.interior_of_node();
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(static_cast<std::size_t>(grid.n_fine_cells()) * 16);
    for (int cell = 0; cell < grid.n_fine_cells(); ++cell) {
        const double w = cell_weights[cell];
        const auto nodes = grid.cell_nodes(cell);
        for (int a = 0; a < 4; ++a) {
            const int ia = interior[nodes[a]];
            if (ia < 0) continue;
            for (int b = 0; b < 4; ++b) {
                const int ib = interior[nodes[b]];
                if (ib < 0) continue;
                triplets.emplace_back(ia, ib, w * element_matrix(a, b));
            }
        }
    }
    Eigen::SparseMatrix<double> m(grid.n_interior_nodes(), grid.n_interior_nodes());
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

} // namespace

Eigen::SparseMatrix<double> assemble_mass(const GridHierarchy& grid, const Eigen::VectorXd& cell_weights) {
    return assemble_interior(grid, cell_weights, q1_mass(grid.fine_step()));
}

Eigen::SparseMatrix<double> assemble_stiffness(const GridHierarchy& grid, const Eigen::VectorXd& cell_weights) {
    return assemble_interior(grid, cell_weights, q1_stiffness(grid.fine_step()));
}

LayerOperators assemble_layer(const GridHierarchy& grid, const Eigen::VectorXd& cells, int layer) {
    if (cells.size() != grid.n_fine_cells())
        throw std::invalid_argument("assemble_layer: coefficient count does not match grid");
    if (cells.minCoeff() <= 0.0)
        throw std::invalid_argument("assemble_layer: coefficients must be positive");
    LayerOperators ops;
    ops.layer = layer;
    ops.stiffness = assemble_stiffness(grid, cells);
    ops.mass_cinv = assemble_mass(grid, cells.cwiseInverse());
    ops.mass = assemble_mass(grid, Eigen::VectorXd::Ones(grid.n_fine_cells()));
    return ops;
}

Eigen::SparseMatrix<double> h1_matrix(const GridHierarchy& grid) {
    Eigen::VectorXd ones = Eigen::VectorXd::Ones(grid.n_fine_cells());
    Eigen::SparseMatrix<double> g = assemble_stiffness(grid, ones);
    g += assemble_mass(grid, ones);
    g.makeCompressed();
    return g;
}

PartitionOfUnity msfem_partition(const GridHierarchy& grid, const Eigen::VectorXd& cells) {
    if (cells.size() != grid.n_fine_cells())
        throw std::invalid_argument("msfem_partition: coefficient count does not match grid");
    if (cells.minCoeff() <= 0.0)
        throw std::invalid_argument("msfem_partition: coefficients must be positive");

    const int r = grid.refine;
    const int n_loc = (r + 1) * (r + 1);
    const Eigen::Matrix4d ke = q1_stiffness(grid.fine_step());

    PartitionOfUnity pou;
    pou.chi.assign(grid.n_coarse_nodes(), Eigen::VectorXd::Zero(grid.n_fine_nodes()));

    auto local_node = [r](int lx, int ly) { return lx * (r + 1) + ly; };

    // One factorization per element serves the hats of its four corners.
    for (int e = 0; e < grid.n_elements(); ++e) {
        auto [ex, ey] = grid.element_coords(e);

        Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n_loc, n_loc);
        for (int cx = 0; cx < r; ++cx)
            for (int cy = 0; cy < r; ++cy) {
                const double w = cells[grid.cell_index(ex * r + cx, ey * r + cy)];
                const int corner[4] = {local_node(cx, cy), local_node(cx + 1, cy),
                                       local_node(cx, cy + 1), local_node(cx + 1, cy + 1)};
                for (int i = 0; i < 4; ++i)
                    for (int j = 0; j < 4; ++j)
                        a(corner[i], corner[j]) += w * ke(i, j);
            }

        std::vector<int> inner, edge;
        inner.reserve((r - 1) * (r - 1));
        for (int lx = 0; lx <= r; ++lx)
            for (int ly = 0; ly <= r; ++ly)
                (lx == 0 || ly == 0 || lx == r || ly == r ? edge : inner).push_back(local_node(lx, ly));

        Eigen::MatrixXd a_ii(inner.size(), inner.size());
        Eigen::MatrixXd a_ie(inner.size(), edge.size());
        for (std::size_t i = 0; i < inner.size(); ++i) {
            for (std::size_t j = 0; j < inner.size(); ++j) a_ii(i, j) = a(inner[i], inner[j]);
            for (std::size_t j = 0; j < edge.size(); ++j) a_ie(i, j) = a(inner[i], edge[j]);
        }
        Eigen::PartialPivLU<Eigen::MatrixXd> lu(a_ii);

        for (int dx = 0; dx < 2; ++dx)
            for (int dy = 0; dy < 2; ++dy) {
                const int cnode = grid.coarse_node_index(ex + dx, ey + dy);
                // Hat of the (dx, dy) corner on this element, bilinear along
                // the boundary.
                Eigen::VectorXd g(edge.size());
                for (std::size_t j = 0; j < edge.size(); ++j) {
                    const int lx = edge[j] / (r + 1), ly = edge[j] % (r + 1);
                    const double fx = static_cast<double>(lx) / r;
                    const double fy = static_cast<double>(ly) / r;
                    g[j] = (dx ? fx : 1.0 - fx) * (dy ? fy : 1.0 - fy);
                }
                Eigen::VectorXd u = lu.solve(-a_ie * g);

                Eigen::VectorXd& chi = pou.chi[cnode];
                for (std::size_t j = 0; j < inner.size(); ++j) {
                    const int lx = inner[j] / (r + 1), ly = inner[j] % (r + 1);
                    chi[grid.node_index(ex * r + lx, ey * r + ly)] = u[j];
                }
                for (std::size_t j = 0; j < edge.size(); ++j) {
                    const int lx = edge[j] / (r + 1), ly = edge[j] % (r + 1);
                    chi[grid.node_index(ex * r + lx, ey * r + ly)] = g[j];
                }
            }
    }
    return pou;
}

void kappa_tilde(const GridHierarchy& grid, const Eigen::VectorXd& cells,
                 const PartitionOfUnity& pou, LayerOperators& ops,
                 bool include_boundary_nodes) {
    if (pou.chi.size() != static_cast<std::size_t>(grid.n_coarse_nodes()))
        throw std::invalid_argument("kappa_tilde: partition of unity incomplete");
    if (cells.size() != grid.n_fine_cells())
        throw std::invalid_argument("kappa_tilde: coefficient count does not match grid");

    const double h = grid.fine_step();
    const int nc = grid.n_coarse;
    Eigen::VectorXd kappa = Eigen::VectorXd::Zero(grid.n_fine_cells());
    for (int cell = 0; cell < grid.n_fine_cells(); ++cell) {
        const auto nodes = grid.cell_nodes(cell);
        auto [ex, ey] = grid.element_coords(grid.element_of_cell(cell));
        double sum = 0.0;
        // Only the hats of this element's corners are nonzero on the cell.
        for (int dx = 0; dx < 2; ++dx)
            for (int dy = 0; dy < 2; ++dy) {
                const int gx = ex + dx, gy = ey + dy;
                if (!include_boundary_nodes && (gx == 0 || gy == 0 || gx == nc || gy == nc))
                    continue;
                const Eigen::VectorXd& chi = pou.chi[grid.coarse_node_index(gx, gy)];
                const double v00 = chi[nodes[0]], v10 = chi[nodes[1]];
                const double v01 = chi[nodes[2]], v11 = chi[nodes[3]];
                const double gx_c = ((v10 - v00) + (v11 - v01)) / (2.0 * h);
                const double gy_c = ((v01 - v00) + (v11 - v10)) / (2.0 * h);
                sum += gx_c * gx_c + gy_c * gy_c;
            }
        kappa[cell] = cells[cell] * sum;
    }
    ops.kappa = std::move(kappa);
    ops.mass_kappa = assemble_mass(grid, ops.kappa);
}

Eigen::MatrixXd BasisSet::as_matrix() const {
    Eigen::MatrixXd m(dim(), count());
    for (int j = 0; j < count(); ++j) m.col(j) = vectors[static_cast<std::size_t>(j)];
    return m;
}

const char* to_string(BasisTag tag) {
    switch (tag) {
        case BasisTag::msfem: return "msfem";
        case BasisTag::auxiliary: return "auxiliary";
        case BasisTag::cem: return "cem";
        case BasisTag::pod: return "pod";
    }
    return "?";
}

void dump_matrix(const std::string& path, const Eigen::SparseMatrix<double>& m) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("dump_matrix: cannot open " + path);
    out.precision(17);
    out << m.rows() << " " << m.cols() << " " << m.nonZeros() << "\n";
    for (int k = 0; k < m.outerSize(); ++k)
        for (Eigen::SparseMatrix<double>::InnerIterator it(m, k); it; ++it)
            out << it.row() << " " << it.col() << " " << it.value() << "\n";
}

Eigen::SparseMatrix<double> read_matrix_dump(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_matrix_dump: cannot open " + path);
    int rows = 0, cols = 0;
    std::size_t nnz = 0;
    if (!(in >> rows >> cols >> nnz)) throw std::runtime_error("read_matrix_dump: bad header");
    std::vector<Eigen::Triplet<double>> triplets;
    triplets.reserve(nnz);
    int r = 0, c = 0;
    double v = 0;
    while (in >> r >> c >> v) triplets.emplace_back(r, c, v);
    if (triplets.size() != nnz) throw std::runtime_error("read_matrix_dump: truncated data");
    Eigen::SparseMatrix<double> m(rows, cols);
    m.setFromTriplets(triplets.begin(), triplets.end());
    m.makeCompressed();
    return m;
}

} // namespace pwave
