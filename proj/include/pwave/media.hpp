#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <string>
#include <vector>

#include "pwave/grid.hpp"

namespace pwave {

/// Layer-dependent coefficient field c(z_k, x), piecewise constant per fine
/// cell. Layers k = 0..K live at z_k = z_origin + k*dz.
class MediumField {
public:
    MediumField() = default;
    MediumField(std::vector<Eigen::VectorXd> layers, double dz, double z_origin = 0.0);

    int layer_count() const { return static_cast<int>(layers_.size()); } ///< K+1
    int last_layer() const { return layer_count() - 1; }                 ///< K
    double dz() const { return dz_; }
    double z(int k) const { return z_origin_ + k * dz_; }
    double c_max() const { return c_max_; }

    /// Read-only per-cell coefficients for layer k. Throws std::out_of_range
    /// on a bad layer index.
    const Eigen::VectorXd& layer(int k) const;

private:
    std::vector<Eigen::VectorXd> layers_;
    double dz_ = 0.0;
    double z_origin_ = 0.0;
    double c_max_ = 0.0;
};

/// Binary inclusion mask over fine cells, shared by all layers of a
/// band-structured medium.
using CellPattern = std::vector<std::uint8_t>;

/// Band-structured field: z-levels are split into bands by cumulative
/// band_ends (strictly increasing, last entry = number of z-levels); within
/// band j, cells with pattern = 1 take contrasts[j], the rest take
/// background. The pattern is identical across layers.
MediumField layered_field(const GridHierarchy& grid, const CellPattern& pattern,
                          const std::vector<double>& contrasts,
                          const std::vector<int>& band_ends, double background,
                          double dz, double z_origin = 0.0);

/// Dense positive raster, row-major, rows x cols.
struct Raster {
    int rows = 0;
    int cols = 0;
    std::vector<double> values; ///< values[r * cols + c]

    double at(int r, int c) const { return values[static_cast<std::size_t>(r) * cols + c]; }
};

/// Reads a raster from a text file: header line "rows cols", then rows*cols
/// whitespace-separated positive floats in row-major order.
Raster read_raster(const std::string& path);
void write_raster(const std::string& path, const Raster& raster);

/// Subsamples a raster to the fine-cell resolution of the grid: the raster
/// is partitioned into blocks (one per fine cell; sizes must divide evenly)
/// and one raster value per block is drawn uniformly with the seeded
/// generator. With fresh_per_layer, each layer draws independently (seed
/// offset by layer index); otherwise all layers share the k = 0 draw.
MediumField subsample_raster(const Raster& raster, const GridHierarchy& grid,
                             std::uint64_t seed, int layer_count, double dz,
                             bool fresh_per_layer = true, double z_origin = 0.0);

/// read_raster + subsample_raster, with a size check against source_rows/cols.
MediumField load_raster(const std::string& path, int source_rows, int source_cols,
                        const GridHierarchy& grid, std::uint64_t seed, int layer_count,
                        double dz, bool fresh_per_layer = true, double z_origin = 0.0);

/// Built-in inclusion mask: high-contrast bars and blocks placed in relative
/// coordinates, so the same geometry appears at any fine resolution.
CellPattern builtin_pattern(const GridHierarchy& grid);

/// Synthetic stratigraphic velocity raster: dipping, gently folded strata
/// with contrasting interval values, a velocity trend with depth, and a
/// high-contrast lens. Values lie in roughly [1, 5].
Raster synthetic_marmousi(int rows, int cols, std::uint64_t seed);

} // namespace pwave
