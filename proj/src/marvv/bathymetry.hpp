#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <vector>

#include "marvv/geometry.hpp"

namespace marvv {

/// Depth raster, positive down. Row 0 is the southern-most row; cell (r, c) has its
/// centre at origin + ((c + 0.5) * cell_size, (r + 0.5) * cell_size).
struct DepthGrid {
    Vec2 origin;  // lower-left corner
    double cell_size = 1.0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> depths;  // row-major
    double nodata = -9999.0;

    DepthGrid() = default;
    DepthGrid(Vec2 origin, double cell_size, std::size_t rows, std::size_t cols, double fill, double nodata = -9999.0);

    double& at(std::size_t r, std::size_t c) { return depths[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return depths[r * cols + c]; }
    bool is_nodata(double v) const { return std::isnan(v) || v == nodata; }
    bool is_nodata(std::size_t r, std::size_t c) const { return is_nodata(at(r, c)); }

    double width() const { return static_cast<double>(cols) * cell_size; }
    double height() const { return static_cast<double>(rows) * cell_size; }
    Vec2 cell_center(std::size_t r, std::size_t c) const;
    bool contains(Vec2 p) const;

    /// Throws validation error if geometry or values break the invariants.
    void validate() const;

    friend bool operator==(const DepthGrid&, const DepthGrid&) = default;
};

enum class RasterFormat { ascii_grid, raw16 };

/// Reads an ESRI-style text grid or a raw16 heightmap with its `.hdr` sidecar.
DepthGrid load_raster(const std::filesystem::path& path, RasterFormat format);

/// Writes an ESRI-style text grid (northern row first, as the format requires).
void write_ascii_grid(const DepthGrid& grid, const std::filesystem::path& path);

struct TilePlacement {
    std::size_t tile_row = 0;  // 0 = southern-most tile row
    std::size_t tile_col = 0;
    DepthGrid grid;
};

using TileSet = std::vector<TilePlacement>;

/// Merges tiles placed by their georeferenced origins; where tiles overlap, the
/// first tile in (tile_row, tile_col) order wins.
DepthGrid stitch_tiles(const TileSet& tiles);

/// Test and tooling helper: cuts a grid into tile_rows x tile_cols exact tiles.
TileSet split_grid(const DepthGrid& grid, std::size_t tile_rows, std::size_t tile_cols);

/// Bilinear interpolation between cell centres. Positions between the outer cell
/// centres and the grid edge clamp to the edge row/column. If any interpolation
/// corner is nodata, the nearest valid cell centre is used instead.
double depth_at(const DepthGrid& grid, Vec2 position);

struct HeightmapInfo {
    double min_depth = 0.0;
    double max_depth = 0.0;
    bool degenerate = false;  // uniform grid, every sample is 0
};

/// Linear [min, max] -> [0, 65535] little-endian row-major (southern row first)
/// plus a `<out>.hdr` text sidecar with geometry, range and the nodata mask.
HeightmapInfo export_heightmap(const DepthGrid& grid, const std::filesystem::path& out_path);

enum class UkcMode { fixed, fraction_of_draft };

struct UkcPolicy {
    UkcMode mode = UkcMode::fixed;
    double value = 1.0;  // metres for fixed, fraction of draft otherwise

    double clearance(double draft) const { return mode == UkcMode::fixed ? value : value * draft; }
};

struct Cell {
    std::size_t row = 0;
    std::size_t col = 0;
    friend bool operator==(Cell, Cell) = default;
};

/// Navigability raster sharing the source grid's geometry; true = blocked.
struct OccupancyGrid {
    Vec2 origin;
    double cell_size = 1.0;
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<std::uint8_t> blocked;
    double threshold = 0.0;

    bool is_blocked(std::size_t r, std::size_t c) const { return blocked[r * cols + c] != 0; }
    bool is_blocked(Cell c) const { return is_blocked(c.row, c.col); }
    std::optional<Cell> cell_of(Vec2 p) const;
    Vec2 cell_center(Cell c) const;
    /// Outside the grid counts as blocked.
    bool navigable(Vec2 p) const;
    std::size_t blocked_count() const;
};

OccupancyGrid build_occupancy(const DepthGrid& grid, double draft, double ukc);
OccupancyGrid build_occupancy(const DepthGrid& grid, double draft, const UkcPolicy& policy);

/// Exhaustive cell walk: true iff every cell the segment touches is navigable.
bool segment_navigable(const OccupancyGrid& occ, Vec2 a, Vec2 b);

/// Cells touched by the segment (supercover traversal), in order from a to b.
std::vector<Cell> cells_on_segment(const OccupancyGrid& occ, Vec2 a, Vec2 b);

void write_occupancy(const OccupancyGrid& occ, const std::filesystem::path& path);

}  // namespace marvv
