#include "pwave/media.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include "pwave/util.hpp"

namespace pwave {

MediumField::MediumField(std::vector<Eigen::VectorXd> layers, double dz, double z_origin)
    : layers_(std::move(layers)), dz_(dz), z_origin_(z_origin) {
    if (layers_.empty()) throw std::invalid_argument("MediumField: no layers");
    c_max_ = 0.0;
    for (const auto& layer : layers_) {
        if (layer.size() != layers_.front().size())
            throw std::invalid_argument("MediumField: inconsistent layer sizes");
        if (layer.size() == 0 || layer.minCoeff() <= 0.0)
            throw std::invalid_argument("MediumField: coefficients must be positive");
        c_max_ = std::max(c_max_, layer.maxCoeff());
    }
}

const Eigen::VectorXd& MediumField::layer(int k) const {
    if (k < 0 || k >= layer_count())
        throw std::out_of_range("MediumField::layer: index out of range");
    return layers_[static_cast<std::size_t>(k)];
}

MediumField layered_field(const GridHierarchy& grid, const CellPattern& pattern,
                          const std::vector<double>& contrasts,
                          const std::vector<int>& band_ends, double background,
                          double dz, double z_origin) {
    if (pattern.size() != static_cast<std::size_t>(grid.n_fine_cells()))
        throw std::invalid_argument("layered_field: pattern size mismatch");
    if (contrasts.size() != band_ends.size())
        throw std::invalid_argument("layered_field: one contrast per band required");
    if (background <= 0.0) throw std::invalid_argument("layered_field: background must be positive");
    for (double c : contrasts)
        if (c <= 0.0) throw std::invalid_argument("layered_field: contrasts must be positive");
    int prev = 0;
    for (int end : band_ends) {
        if (end <= prev) throw std::invalid_argument("layered_field: band_ends must be strictly increasing");
        prev = end;
    }

    const int n_levels = band_ends.back();
    std::vector<Eigen::VectorXd> layers;
    layers.reserve(n_levels);
    std::size_t band = 0;
    for (int k = 0; k < n_levels; ++k) {
        while (k >= band_ends[band]) ++band;
        Eigen::VectorXd cells(grid.n_fine_cells());
        for (int c = 0; c < grid.n_fine_cells(); ++c)
            cells[c] = pattern[c] ? contrasts[band] : background;
        layers.push_back(std::move(cells));
    }
    return MediumField(std::move(layers), dz, z_origin);
}

Raster read_raster(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("read_raster: cannot open " + path);
    Raster raster;
    if (!(in >> raster.rows >> raster.cols) || raster.rows <= 0 || raster.cols <= 0)
        throw std::runtime_error("read_raster: bad header in " + path);
    raster.values.resize(static_cast<std::size_t>(raster.rows) * raster.cols);
    for (auto& v : raster.values) {
        if (!(in >> v)) throw std::runtime_error("read_raster: truncated data in " + path);
        if (v <= 0.0) throw std::runtime_error("read_raster: non-positive value in " + path);
    }
    return raster;
}

void write_raster(const std::string& path, const Raster& raster) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("write_raster: cannot open " + path);
    out << raster.rows << " " << raster.cols << "\n";
    out.precision(17);
    for (int r = 0; r < raster.rows; ++r) {
        for (int c = 0; c < raster.cols; ++c)
            out << raster.at(r, c) << (c + 1 == raster.cols ? '\n' : ' ');
    }
}

MediumField subsample_raster(const Raster& raster, const GridHierarchy& grid,
                             std::uint64_t seed, int layer_count, double dz,
                             bool fresh_per_layer, double z_origin) {
    const int nf = grid.fine_per_side();
    if (layer_count < 1) throw std::invalid_argument("subsample_raster: need at least one layer");
    if (raster.rows % nf != 0 || raster.cols % nf != 0)
        throw std::invalid_argument("subsample_raster: raster size not divisible by fine resolution");
    const int bx = raster.cols / nf; // block extent along x1
    const int by = raster.rows / nf; // block extent along x2

    std::vector<Eigen::VectorXd> layers;
    layers.reserve(layer_count);
    for (int k = 0; k < layer_count; ++k) {
        if (k > 0 && !fresh_per_layer) {
            layers.push_back(layers.front());
            continue;
        }
        Rng rng(seed + static_cast<std::uint64_t>(k));
        Eigen::VectorXd cells(grid.n_fine_cells());
        for (int cx = 0; cx < nf; ++cx) {
            for (int cy = 0; cy < nf; ++cy) {
                // Raster row 0 is the top of the image; cell (cx, cy) with
                // cy = 0 is the bottom of the domain.
                const int pick = static_cast<int>(rng.uniform_int(static_cast<std::uint64_t>(bx) * by));
                const int dx = pick % bx;
                const int dy = pick / bx;
                const int col = cx * bx + dx;
                const int row = (nf - 1 - cy) * by + dy;
                cells[grid.cell_index(cx, cy)] = raster.at(row, col);
            }
        }
        layers.push_back(std::move(cells));
    }
    return MediumField(std::move(layers), dz, z_origin);
}

MediumField load_raster(const std::string& path, int source_rows, int source_cols,
                        const GridHierarchy& grid, std::uint64_t seed, int layer_count,
                        double dz, bool fresh_per_layer, double z_origin) {
    Raster raster = read_raster(path);
    if (raster.rows != source_rows || raster.cols != source_cols)
        throw std::runtime_error("load_raster: raster size does not match declared source size");
    return subsample_raster(raster, grid, seed, layer_count, dz, fresh_per_layer, z_origin);
}

CellPattern builtin_pattern(const GridHierarchy& grid) {
    struct Box {
        double x0, x1, y0, y1;
    };
    // Two horizontal bars, one vertical bar, and four blocks.
    static const Box boxes[] = {
        {0.10, 0.90, 0.26, 0.34}, {0.08, 0.72, 0.62, 0.70}, {0.46, 0.54, 0.10, 0.88},
        {0.12, 0.22, 0.78, 0.88}, {0.76, 0.88, 0.76, 0.86}, {0.70, 0.90, 0.46, 0.54},
        {0.14, 0.26, 0.08, 0.18},
    };
    CellPattern pattern(grid.n_fine_cells(), 0);
    for (int c = 0; c < grid.n_fine_cells(); ++c) {
        auto [x, y] = grid.cell_center(c);
        for (const Box& b : boxes) {
            if (x > b.x0 && x < b.x1 && y > b.y0 && y < b.y1) {
                pattern[c] = 1;
                break;
            }
        }
    }
    return pattern;
}

Raster synthetic_marmousi(int rows, int cols, std::uint64_t seed) {
    if (rows <= 0 || cols <= 0) throw std::invalid_argument("synthetic_marmousi: bad size");
    Rng rng(seed);

    // Interval values alternate between slow and fast ranges so adjacent
    // strata contrast; thicknesses are uneven.
    const int n_strata = 14;
    std::vector<double> thickness(n_strata), value(n_strata);
    double total = 0.0;
    for (int s = 0; s < n_strata; ++s) {
        thickness[s] = 0.4 + rng.uniform();
        total += thickness[s];
        const double lo = (s % 2 == 0) ? 1.0 : 2.4;
        const double hi = (s % 2 == 0) ? 1.9 : 4.2;
        value[s] = lo + (hi - lo) * rng.uniform();
    }
    std::vector<double> top(n_strata + 1, 0.0);
    for (int s = 0; s < n_strata; ++s) top[s + 1] = top[s] + thickness[s] / total;

    const double dip = 0.12 + 0.10 * rng.uniform();
    const double fold_amp = 0.015 + 0.02 * rng.uniform();
    const double fold_freq = 2.0 + 2.0 * rng.uniform();
    const double fold_phase = 6.28318530717958648 * rng.uniform();
    const double fault_x = 0.3 + 0.4 * rng.uniform();
    const double fault_throw = 0.04 + 0.04 * rng.uniform();
    const double lens_x = 0.25 + 0.5 * rng.uniform();
    const double lens_y = 0.45 + 0.25 * rng.uniform();

    Raster raster;
    raster.rows = rows;
    raster.cols = cols;
    raster.values.resize(static_cast<std::size_t>(rows) * cols);
    for (int r = 0; r < rows; ++r) {
        const double depth = (r + 0.5) / rows; // 0 at top
        for (int c = 0; c < cols; ++c) {
            const double x = (c + 0.5) / cols;
            double d = depth + dip * (x - 0.5) + fold_amp * std::sin(6.28318530717958648 * fold_freq * x + fold_phase);
            if (x > fault_x) d += fault_throw;
            d = std::clamp(d, 0.0, 1.0 - 1e-12);
            int s = static_cast<int>(std::upper_bound(top.begin(), top.end(), d) - top.begin()) - 1;
            s = std::clamp(s, 0, n_strata - 1);
            double v = value[s] * (1.0 + 0.35 * depth);
            const double ex = (x - lens_x) / 0.16, ey = (depth - lens_y) / 0.06;
            if (ex * ex + ey * ey < 1.0) v *= 1.7;
            raster.values[static_cast<std::size_t>(r) * cols + c] = v;
        }
    }
    return raster;
}

} // namespace pwave
