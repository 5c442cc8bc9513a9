#pragma once

#include <array>
#include <cmath>
#include <vector>

namespace pwave {

/// Nested coarse/fine partition of the unit square (0,1)^2 into uniform
/// quadrilaterals.
///
/// Numbering is lexicographic by (x1, x2): index = ix * stride + iy, with
/// x2 varying fastest. This applies uniformly to fine nodes, fine cells,
/// coarse nodes and coarse elements, so all artifacts are reproducible
/// across runs.
///
/// Mesh sizes follow the diagonal convention: H = sqrt(2)/n_coarse is the
/// largest point distance within a coarse element, likewise h on cells.
class GridHierarchy {
public:
    GridHierarchy() = default;

    int n_coarse = 0; ///< coarse elements per side
    int refine = 0;   ///< fine cells per coarse element side

    int fine_per_side() const { return n_coarse * refine; }
    int n_elements() const { return n_coarse * n_coarse; }
    int n_coarse_nodes() const { return (n_coarse + 1) * (n_coarse + 1); }
    int n_interior_coarse_nodes() const { return (n_coarse - 1) * (n_coarse - 1); }
    int n_fine_nodes() const { int m = fine_per_side() + 1; return m * m; }
    int n_fine_cells() const { int m = fine_per_side(); return m * m; }
    int n_interior_nodes() const { int m = fine_per_side() - 1; return m * m; }

    double coarse_step() const { return 1.0 / n_coarse; }       ///< element side length
    double fine_step() const { return 1.0 / fine_per_side(); }  ///< cell side length
    double H() const { return std::sqrt(2.0) / n_coarse; }
    double h() const { return std::sqrt(2.0) / fine_per_side(); }

    int node_index(int ix, int iy) const { return ix * (fine_per_side() + 1) + iy; }
    int cell_index(int cx, int cy) const { return cx * fine_per_side() + cy; }
    int element_index(int ex, int ey) const { return ex * n_coarse + ey; }
    int coarse_node_index(int gx, int gy) const { return gx * (n_coarse + 1) + gy; }

    std::array<int, 2> node_coords(int node) const {
        int m = fine_per_side() + 1;
        return {node / m, node % m};
    }
    std::array<int, 2> cell_coords(int cell) const {
        int m = fine_per_side();
        return {cell / m, cell % m};
    }
    std::array<int, 2> element_coords(int e) const { return {e / n_coarse, e % n_coarse}; }
    std::array<int, 2> coarse_node_coords(int g) const {
        int m = n_coarse + 1;
        return {g / m, g % m};
    }

    std::array<double, 2> node_position(int node) const {
        auto [ix, iy] = node_coords(node);
        double s = fine_step();
        return {ix * s, iy * s};
    }
    std::array<double, 2> cell_center(int cell) const {
        auto [cx, cy] = cell_coords(cell);
        double s = fine_step();
        return {(cx + 0.5) * s, (cy + 0.5) * s};
    }

    bool node_on_boundary(int node) const {
        auto [ix, iy] = node_coords(node);
        int m = fine_per_side();
        return ix == 0 || iy == 0 || ix == m || iy == m;
    }

    /// Corner nodes of a fine cell in tensor order (0,0),(1,0),(0,1),(1,1),
    /// matching the local element matrices in assembly.
    std::array<int, 4> cell_nodes(int cell) const {
        auto [cx, cy] = cell_coords(cell);
        return {node_index(cx, cy), node_index(cx + 1, cy),
                node_index(cx, cy + 1), node_index(cx + 1, cy + 1)};
    }

    /// Fine cells contained in a coarse element.
    std::vector<int> element_cells(int e) const;
    /// Fine nodes in the closure of a coarse element (lexicographic order).
    std::vector<int> element_nodes(int e) const;
    /// Coarse element containing a fine cell.
    int element_of_cell(int cell) const {
        auto [cx, cy] = cell_coords(cell);
        return element_index(cx / refine, cy / refine);
    }

    /// Interior (non-Dirichlet) dof numbering: interior_of_node[node] is the
    /// interior index, or -1 for boundary nodes.
    const std::vector<int>& interior_of_node() const { return interior_of_node_; }
    const std::vector<int>& node_of_interior() const { return node_of_interior_; }

    friend GridHierarchy build_grids(int n_coarse, int refine);

private:
    std::vector<int> interior_of_node_;
    std::vector<int> node_of_interior_;
};

/// Coarse element K_i grown by m rings of point-adjacent coarse elements,
/// clipped to the domain. The region is a coarse-element box.
struct OversampleRegion {
    int center = -1; ///< center element index
    int layers = 0;  ///< m
    int ex0 = 0, ex1 = 0, ey0 = 0, ey1 = 0; ///< inclusive coarse-element box

    std::vector<int> elements;           ///< member coarse elements
    std::vector<int> fine_nodes;         ///< fine nodes in the closure
    std::vector<int> interior_fine_nodes; ///< fine nodes strictly inside the box

    bool contains_element(int e, const GridHierarchy& grid) const {
        auto [ex, ey] = grid.element_coords(e);
        return ex >= ex0 && ex <= ex1 && ey >= ey0 && ey <= ey1;
    }
};

/// Builds the hierarchy. Throws std::invalid_argument unless
/// n_coarse >= 2 and refine >= 2.
GridHierarchy build_grids(int n_coarse, int refine);

/// Builds the oversampling region around element i (0-based) with m rings.
/// Throws std::out_of_range on a bad element index, std::invalid_argument
/// on m < 0.
OversampleRegion oversample(const GridHierarchy& grid, int element, int m);

} // namespace pwave
