#include "pwave/grid.hpp"

#include <algorithm>
#include <stdexcept>

namespace pwave {

std::vector<int> GridHierarchy::element_cells(int e) const {
    auto [ex, ey] = element_coords(e);
    std::vector<int> cells;
    cells.reserve(refine * refine);
    for (int cx = ex * refine; cx < (ex + 1) * refine; ++cx)
        for (int cy = ey * refine; cy < (ey + 1) * refine; ++cy)
            cells.push_back(cell_index(cx, cy));
    return cells;
}

std::vector<int> GridHierarchy::element_nodes(int e) const {
    auto [ex, ey] = element_coords(e);
    std::vector<int> nodes;
    nodes.reserve((refine + 1) * (refine + 1));
    for (int ix = ex * refine; ix <= (ex + 1) * refine; ++ix)
        for (int iy = ey * refine; iy <= (ey + 1) * refine; ++iy)
            nodes.push_back(node_index(ix, iy));
    return nodes;
}

GridHierarchy build_grids(int n_coarse, int refine) {
    if (n_coarse < 2) throw std::invalid_argument("build_grids: n_coarse must be >= 2");
    if (refine < 2) throw std::invalid_argument("build_grids: refine must be >= 2");

    GridHierarchy grid;
    grid.n_coarse = n_coarse;
    grid.refine = refine;

    const int n = grid.n_fine_nodes();
    grid.interior_of_node_.assign(n, -1);
    grid.node_of_interior_.reserve(grid.n_interior_nodes());
    for (int node = 0; node < n; ++node) {
        if (!grid.node_on_boundary(node)) {
            grid.interior_of_node_[node] = static_cast<int>(grid.node_of_interior_.size());
            grid.node_of_interior_.push_back(node);
        }
    }
    return grid;
}

OversampleRegion oversample(const GridHierarchy& grid, int element, int m) {
    if (element < 0 || element >= grid.n_elements())
        throw std::out_of_range("oversample: element index out of range");
    if (m < 0) throw std::invalid_argument("oversample: m must be >= 0");

    OversampleRegion region;
    region.center = element;
    region.layers = m;

    auto [ex, ey] = grid.element_coords(element);
    region.ex0 = std::max(0, ex - m);
    region.ex1 = std::min(grid.n_coarse - 1, ex + m);
    region.ey0 = std::max(0, ey - m);
    region.ey1 = std::min(grid.n_coarse - 1, ey + m);

    for (int x = region.ex0; x <= region.ex1; ++x)
        for (int y = region.ey0; y <= region.ey1; ++y)
            region.elements.push_back(grid.element_index(x, y));

    const int r = grid.refine;
    const int nx0 = region.ex0 * r, nx1 = (region.ex1 + 1) * r;
    const int ny0 = region.ey0 * r, ny1 = (region.ey1 + 1) * r;
    for (int ix = nx0; ix <= nx1; ++ix)
        for (int iy = ny0; iy <= ny1; ++iy) {
            int node = grid.node_index(ix, iy);
            region.fine_nodes.push_back(node);
            if (ix > nx0 && ix < nx1 && iy > ny0 && iy < ny1)
                region.interior_fine_nodes.push_back(node);
        }
    return region;
}

} // namespace pwave
