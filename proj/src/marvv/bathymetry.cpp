#include "marvv/bathymetry.hpp"

#include <algorithm>
#include <array>
#include <bit>
#include <cctype>
#include <fstream>
#include <limits>
#include <map>
#include <sstream>
#include <string>

#include "marvv/error.hpp"
#include "marvv/format.hpp"

namespace marvv {

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

std::string read_file(const std::filesystem::path& path, std::ios::openmode mode = {}) {
    std::ifstream in(path, std::ios::in | mode);
    if (!in) {
        fail(ErrorCode::io, "cannot open '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    if (in.bad()) {
        fail(ErrorCode::io, "error reading '" + path.string() + "'");
    }
    return ss.str();
}

double header_number(const std::map<std::string, std::string>& hdr, const std::string& key,
                     const std::filesystem::path& path) {
    auto it = hdr.find(key);
    if (it == hdr.end()) {
        fail(ErrorCode::parse, "'" + path.string() + "': header is missing '" + key + "'");
    }
    double v = 0.0;
    if (!parse_double(it->second, v) || !std::isfinite(v)) {
        fail(ErrorCode::parse, "'" + path.string() + "': header value for '" + key + "' is not a number");
    }
    return v;
}

std::size_t header_count(const std::map<std::string, std::string>& hdr, const std::string& key,
                         const std::filesystem::path& path) {
    const double v = header_number(hdr, key, path);
    if (!(v >= 1.0) || v != std::floor(v) || v > 1e9) {
        fail(ErrorCode::parse, "'" + path.string() + "': header '" + key + "' must be a positive integer");
    }
    return static_cast<std::size_t>(v);
}

DepthGrid grid_from_header(const std::map<std::string, std::string>& hdr, const std::filesystem::path& path) {
    DepthGrid g;
    g.cols = header_count(hdr, "ncols", path);
    g.rows = header_count(hdr, "nrows", path);
    g.cell_size = header_number(hdr, "cellsize", path);
    if (!(g.cell_size > 0.0)) {
        fail(ErrorCode::parse, "'" + path.string() + "': cellsize must be positive");
    }
    if (hdr.contains("xllcenter") || hdr.contains("yllcenter")) {
        g.origin = {header_number(hdr, "xllcenter", path) - 0.5 * g.cell_size,
                    header_number(hdr, "yllcenter", path) - 0.5 * g.cell_size};
    } else {
        g.origin = {header_number(hdr, "xllcorner", path), header_number(hdr, "yllcorner", path)};
    }
    g.nodata = hdr.contains("nodata_value") ? header_number(hdr, "nodata_value", path) : -9999.0;
    return g;
}

DepthGrid load_ascii(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::map<std::string, std::string> hdr;
    std::vector<std::string> tokens;
    std::string line;
    bool in_header = true;
    while (std::getline(in, line)) {
        std::istringstream ls(line);
        std::string first;
        if (!(ls >> first)) {
            continue;
        }
        if (in_header && std::isalpha(static_cast<unsigned char>(first.front()))) {
            std::string value;
            if (!(ls >> value)) {
                fail(ErrorCode::parse, "'" + path.string() + "': header key '" + first + "' has no value");
            }
            hdr[lower(first)] = value;
            continue;
        }
        in_header = false;
        tokens.push_back(first);
        std::string tok;
        while (ls >> tok) {
            tokens.push_back(tok);
        }
    }
    DepthGrid g = grid_from_header(hdr, path);
    if (tokens.size() != g.rows * g.cols) {
        std::ostringstream os;
        os << "'" << path.string() << "': header declares " << g.rows << "x" << g.cols << " = " << g.rows * g.cols
           << " values but the file holds " << tokens.size();
        fail(ErrorCode::dimension_mismatch, os.str());
    }
    g.depths.resize(tokens.size());
    // The text format lists the northern row first.
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        double v = 0.0;
        if (!parse_double(tokens[i], v)) {
            fail(ErrorCode::parse, "'" + path.string() + "': bad value '" + tokens[i] + "'");
        }
        const std::size_t file_row = i / g.cols;
        g.at(g.rows - 1 - file_row, i % g.cols) = v;
    }
    return g;
}

std::map<std::string, std::string> read_sidecar(const std::filesystem::path& path) {
    const std::string text = read_file(path);
    std::istringstream in(text);
    std::map<std::string, std::string> hdr;
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty() || line.front() == '#') {
            continue;
        }
        std::istringstream ls(line);
        std::string key, value;
        if (!(ls >> key)) {
            continue;
        }
        std::getline(ls >> std::ws, value);
        hdr[lower(key)] = value;
    }
    return hdr;
}

std::filesystem::path sidecar_path(const std::filesystem::path& p) {
    auto s = p;
    s += ".hdr";
    return s;
}

DepthGrid load_raw16(const std::filesystem::path& path) {
    const auto side = sidecar_path(path);
    const auto hdr = read_sidecar(side);
    DepthGrid g = grid_from_header(hdr, side);
    const double lo = header_number(hdr, "min_depth", side);
    const double hi = header_number(hdr, "max_depth", side);
    if (hi < lo) {
        fail(ErrorCode::parse, "'" + side.string() + "': max_depth < min_depth");
    }
    const std::string bytes = read_file(path, std::ios::binary);
    if (bytes.size() != g.rows * g.cols * 2) {
        std::ostringstream os;
        os << "'" << path.string() << "': expected " << g.rows * g.cols * 2 << " bytes for " << g.rows << "x" << g.cols
           << " samples, found " << bytes.size();
        fail(ErrorCode::dimension_mismatch, os.str());
    }
    g.depths.resize(g.rows * g.cols);
    for (std::size_t i = 0; i < g.depths.size(); ++i) {
        const auto b0 = static_cast<unsigned char>(bytes[2 * i]);
        const auto b1 = static_cast<unsigned char>(bytes[2 * i + 1]);
        const unsigned v = b0 | (b1 << 8U);
        g.depths[i] = lo + (hi - lo) * (static_cast<double>(v) / 65535.0);
    }
    if (auto it = hdr.find("nodata_runs"); it != hdr.end()) {
        std::istringstream runs(it->second);
        std::string run;
        while (runs >> run) {
            const auto colon = run.find(':');
            double start = 0.0, len = 0.0;
            if (colon == std::string::npos || !parse_double(run.substr(0, colon), start) ||
                !parse_double(run.substr(colon + 1), len) || start < 0 || len < 1 ||
                start + len > static_cast<double>(g.depths.size())) {
                fail(ErrorCode::parse, "'" + side.string() + "': bad nodata run '" + run + "'");
            }
            std::fill_n(g.depths.begin() + static_cast<std::ptrdiff_t>(start), static_cast<std::size_t>(len), g.nodata);
        }
    }
    return g;
}

std::size_t clamp_index(double v, std::size_t n) {
    if (v <= 0.0) return 0;
    const auto i = static_cast<std::size_t>(v);
    return std::min(i, n - 1);
}

}  // namespace

DepthGrid::DepthGrid(Vec2 origin_, double cell_size_, std::size_t rows_, std::size_t cols_, double fill,
                     double nodata_)
    : origin(origin_), cell_size(cell_size_), rows(rows_), cols(cols_), depths(rows_ * cols_, fill), nodata(nodata_) {}

Vec2 DepthGrid::cell_center(std::size_t r, std::size_t c) const {
    return origin + Vec2{(static_cast<double>(c) + 0.5) * cell_size, (static_cast<double>(r) + 0.5) * cell_size};
}

bool DepthGrid::contains(Vec2 p) const {
    return p.x >= origin.x && p.y >= origin.y && p.x <= origin.x + width() && p.y <= origin.y + height();
}

void DepthGrid::validate() const {
    require(cell_size > 0.0 && std::isfinite(cell_size), ErrorCode::validation, "depth grid cell size must be positive");
    require(rows > 0 && cols > 0, ErrorCode::validation, "depth grid must have at least one cell");
    require(depths.size() == rows * cols, ErrorCode::dimension_mismatch, "depth grid matrix does not match rows x cols");
    for (double d : depths) {
        require(std::isfinite(d) || is_nodata(d), ErrorCode::validation, "depth grid holds a non-finite depth");
    }
}

DepthGrid load_raster(const std::filesystem::path& path, RasterFormat format) {
    DepthGrid g = format == RasterFormat::ascii_grid ? load_ascii(path) : load_raw16(path);
    g.validate();
    return g;
}

void write_ascii_grid(const DepthGrid& grid, const std::filesystem::path& path) {
    std::string out;
    out += "ncols " + std::to_string(grid.cols) + "\n";
    out += "nrows " + std::to_string(grid.rows) + "\n";
    out += "xllcorner " + fmt_double(grid.origin.x) + "\n";
    out += "yllcorner " + fmt_double(grid.origin.y) + "\n";
    out += "cellsize " + fmt_double(grid.cell_size) + "\n";
    out += "nodata_value " + fmt_double(grid.nodata) + "\n";
    for (std::size_t fr = 0; fr < grid.rows; ++fr) {
        const std::size_t r = grid.rows - 1 - fr;
        for (std::size_t c = 0; c < grid.cols; ++c) {
            if (c) out += ' ';
            append_double(out, grid.is_nodata(r, c) ? grid.nodata : grid.at(r, c));
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << out)) {
        fail(ErrorCode::io, "cannot write '" + path.string() + "'");
    }
}

DepthGrid stitch_tiles(const TileSet& tiles) {
    require(!tiles.empty(), ErrorCode::invalid_argument, "tile set is empty");
    std::vector<const TilePlacement*> order;
    std::size_t n_rows = 0, n_cols = 0;
    for (const auto& t : tiles) {
        t.grid.validate();
        order.push_back(&t);
        n_rows = std::max(n_rows, t.tile_row + 1);
        n_cols = std::max(n_cols, t.tile_col + 1);
    }
    std::sort(order.begin(), order.end(), [](const TilePlacement* a, const TilePlacement* b) {
        return std::pair(a->tile_row, a->tile_col) < std::pair(b->tile_row, b->tile_col);
    });
    for (std::size_t i = 1; i < order.size(); ++i) {
        if (order[i]->tile_row == order[i - 1]->tile_row && order[i]->tile_col == order[i - 1]->tile_col) {
            fail(ErrorCode::validation, "two tiles share placement index (" + std::to_string(order[i]->tile_row) + ", " +
                                            std::to_string(order[i]->tile_col) + ")");
        }
    }
    if (order.size() != n_rows * n_cols) {
        fail(ErrorCode::validation, "tile placements do not form a dense " + std::to_string(n_rows) + "x" +
                                        std::to_string(n_cols) + " rectangle (missing tile)");
    }

    const DepthGrid& base = order.front()->grid;
    const double cs = base.cell_size;
    // Offsets of each tile on the shared cell lattice.
    struct Placed {
        const DepthGrid* g;
        long r0, c0;
    };
    std::vector<Placed> placed;
    long min_r = 0, min_c = 0, max_r = 0, max_c = 0;
    for (const auto* t : order) {
        const DepthGrid& g = t->grid;
        if (std::abs(g.cell_size - cs) > 1e-9 * cs) {
            fail(ErrorCode::validation, "tile cell sizes differ");
        }
        if (std::abs(g.nodata - base.nodata) > 0.0 && !(std::isnan(g.nodata) && std::isnan(base.nodata))) {
            fail(ErrorCode::validation, "tile nodata markers differ");
        }
        const double fc = (g.origin.x - base.origin.x) / cs;
        const double fr = (g.origin.y - base.origin.y) / cs;
        const double rc = std::round(fc), rr = std::round(fr);
        if (std::abs(fc - rc) > 1e-6 || std::abs(fr - rr) > 1e-6) {
            fail(ErrorCode::validation, "tile origin is not aligned to the shared cell lattice");
        }
        Placed p{&g, static_cast<long>(rr), static_cast<long>(rc)};
        min_r = std::min(min_r, p.r0);
        min_c = std::min(min_c, p.c0);
        max_r = std::max(max_r, p.r0 + static_cast<long>(g.rows));
        max_c = std::max(max_c, p.c0 + static_cast<long>(g.cols));
        placed.push_back(p);
    }
    // Placement indices must agree with geography: a tile to the east/north starts no earlier.
    for (std::size_t i = 0; i < order.size(); ++i) {
        for (std::size_t j = 0; j < order.size(); ++j) {
            if (order[i]->tile_row == order[j]->tile_row && order[i]->tile_col + 1 == order[j]->tile_col &&
                placed[j].c0 <= placed[i].c0) {
                fail(ErrorCode::validation, "tile column placement contradicts tile origins");
            }
            if (order[i]->tile_col == order[j]->tile_col && order[i]->tile_row + 1 == order[j]->tile_row &&
                placed[j].r0 <= placed[i].r0) {
                fail(ErrorCode::validation, "tile row placement contradicts tile origins");
            }
        }
    }

    DepthGrid out;
    out.cell_size = cs;
    out.nodata = base.nodata;
    out.rows = static_cast<std::size_t>(max_r - min_r);
    out.cols = static_cast<std::size_t>(max_c - min_c);
    out.origin = base.origin + Vec2{static_cast<double>(min_c) * cs, static_cast<double>(min_r) * cs};
    out.depths.assign(out.rows * out.cols, std::numeric_limits<double>::quiet_NaN());
    std::vector<std::uint8_t> filled(out.rows * out.cols, 0);
    for (const auto& p : placed) {
        for (std::size_t r = 0; r < p.g->rows; ++r) {
            for (std::size_t c = 0; c < p.g->cols; ++c) {
                const std::size_t orow = static_cast<std::size_t>(p.r0 - min_r) + r;
                const std::size_t ocol = static_cast<std::size_t>(p.c0 - min_c) + c;
                const std::size_t idx = orow * out.cols + ocol;
                if (!filled[idx]) {
                    filled[idx] = 1;
                    out.depths[idx] = p.g->at(r, c);
                }
            }
        }
    }
    if (std::find(filled.begin(), filled.end(), 0) != filled.end()) {
        fail(ErrorCode::validation, "tiles leave a gap in the stitched rectangle");
    }
    return out;
}

TileSet split_grid(const DepthGrid& grid, std::size_t tile_rows, std::size_t tile_cols) {
    require(tile_rows >= 1 && tile_cols >= 1 && tile_rows <= grid.rows && tile_cols <= grid.cols,
            ErrorCode::invalid_argument, "invalid tile layout for split");
    TileSet out;
    auto bounds = [](std::size_t n, std::size_t parts, std::size_t i) { return n * i / parts; };
    for (std::size_t tr = 0; tr < tile_rows; ++tr) {
        const std::size_t r0 = bounds(grid.rows, tile_rows, tr), r1 = bounds(grid.rows, tile_rows, tr + 1);
        for (std::size_t tc = 0; tc < tile_cols; ++tc) {
            const std::size_t c0 = bounds(grid.cols, tile_cols, tc), c1 = bounds(grid.cols, tile_cols, tc + 1);
            DepthGrid g(grid.origin + Vec2{static_cast<double>(c0) * grid.cell_size,
                                           static_cast<double>(r0) * grid.cell_size},
                        grid.cell_size, r1 - r0, c1 - c0, 0.0, grid.nodata);
            for (std::size_t r = r0; r < r1; ++r) {
                for (std::size_t c = c0; c < c1; ++c) {
                    g.at(r - r0, c - c0) = grid.at(r, c);
                }
            }
            out.push_back({tr, tc, std::move(g)});
        }
    }
    return out;
}

double depth_at(const DepthGrid& grid, Vec2 position) {
    if (!grid.contains(position)) {
        std::ostringstream os;
        os << "depth query (" << position.x << ", " << position.y << ") is outside the grid extent";
        fail(ErrorCode::out_of_bounds, os.str());
    }
    // Continuous index with cell centres at integers.
    const double gx = std::clamp((position.x - grid.origin.x) / grid.cell_size - 0.5, 0.0,
                                 static_cast<double>(grid.cols - 1));
    const double gy = std::clamp((position.y - grid.origin.y) / grid.cell_size - 0.5, 0.0,
                                 static_cast<double>(grid.rows - 1));
    const std::size_t c0 = std::min(static_cast<std::size_t>(gx), grid.cols > 1 ? grid.cols - 2 : 0);
    const std::size_t r0 = std::min(static_cast<std::size_t>(gy), grid.rows > 1 ? grid.rows - 2 : 0);
    const std::size_t c1 = std::min(c0 + 1, grid.cols - 1);
    const std::size_t r1 = std::min(r0 + 1, grid.rows - 1);
    const double fx = gx - static_cast<double>(c0);
    const double fy = gy - static_cast<double>(r0);

    const double v00 = grid.at(r0, c0), v01 = grid.at(r0, c1), v10 = grid.at(r1, c0), v11 = grid.at(r1, c1);
    if (!grid.is_nodata(v00) && !grid.is_nodata(v01) && !grid.is_nodata(v10) && !grid.is_nodata(v11)) {
        return (1 - fy) * ((1 - fx) * v00 + fx * v01) + fy * ((1 - fx) * v10 + fx * v11);
    }
    // Nearest valid cell centre, searching outward ring by ring.
    const std::size_t cr = clamp_index(gy + 0.5, grid.rows);
    const std::size_t cc = clamp_index(gx + 0.5, grid.cols);
    const std::size_t max_ring = std::max(grid.rows, grid.cols);
    for (std::size_t ring = 0; ring <= max_ring; ++ring) {
        double best = std::numeric_limits<double>::infinity();
        double value = 0.0;
        const long rlo = static_cast<long>(cr) - static_cast<long>(ring), rhi = static_cast<long>(cr + ring);
        const long clo = static_cast<long>(cc) - static_cast<long>(ring), chi = static_cast<long>(cc + ring);
        for (long r = rlo; r <= rhi; ++r) {
            for (long c = clo; c <= chi; ++c) {
                if (r < 0 || c < 0 || r >= static_cast<long>(grid.rows) || c >= static_cast<long>(grid.cols)) continue;
                if (std::max(std::labs(r - static_cast<long>(cr)), std::labs(c - static_cast<long>(cc))) !=
                    static_cast<long>(ring)) continue;
                const double v = grid.at(static_cast<std::size_t>(r), static_cast<std::size_t>(c));
                if (grid.is_nodata(v)) continue;
                const double d = norm2(grid.cell_center(static_cast<std::size_t>(r), static_cast<std::size_t>(c)) - position);
                if (d < best) {
                    best = d;
                    value = v;
                }
            }
        }
        if (std::isfinite(best)) {
            return value;
        }
    }
    fail(ErrorCode::validation, "depth grid has no valid cells");
}

HeightmapInfo export_heightmap(const DepthGrid& grid, const std::filesystem::path& out_path) {
    grid.validate();
    HeightmapInfo info;
    info.min_depth = std::numeric_limits<double>::infinity();
    info.max_depth = -std::numeric_limits<double>::infinity();
    for (double d : grid.depths) {
        if (!grid.is_nodata(d)) {
            info.min_depth = std::min(info.min_depth, d);
            info.max_depth = std::max(info.max_depth, d);
        }
    }
    require(std::isfinite(info.min_depth), ErrorCode::validation, "cannot export a heightmap from an all-nodata grid");
    info.degenerate = !(info.max_depth > info.min_depth);
    const double span = info.max_depth - info.min_depth;

    std::string bytes(grid.depths.size() * 2, '\0');
    std::string runs;
    std::size_t run_start = 0, run_len = 0;
    auto flush_run = [&] {
        if (run_len) {
            runs += (runs.empty() ? "" : " ") + std::to_string(run_start) + ":" + std::to_string(run_len);
            run_len = 0;
        }
    };
    for (std::size_t i = 0; i < grid.depths.size(); ++i) {
        const double d = grid.depths[i];
        std::uint16_t v = 0;
        if (grid.is_nodata(d)) {
            if (run_len == 0) run_start = i;
            ++run_len;
        } else {
            flush_run();
            if (!info.degenerate) {
                v = static_cast<std::uint16_t>(std::lround(std::clamp((d - info.min_depth) / span, 0.0, 1.0) * 65535.0));
            }
        }
        bytes[2 * i] = static_cast<char>(v & 0xFFU);
        bytes[2 * i + 1] = static_cast<char>(v >> 8U);
    }
    flush_run();

    {
        std::ofstream f(out_path, std::ios::binary);
        if (!f || !f.write(bytes.data(), static_cast<std::streamsize>(bytes.size()))) {
            fail(ErrorCode::io, "cannot write '" + out_path.string() + "'");
        }
    }
    std::string side;
    side += "# raw16 heightmap sidecar, version 1\n";
    side += "# samples: uint16 little-endian, row-major, southern row first\n";
    side += "# depth = min_depth + sample / 65535 * (max_depth - min_depth)\n";
    side += "ncols " + std::to_string(grid.cols) + "\n";
    side += "nrows " + std::to_string(grid.rows) + "\n";
    side += "xllcorner " + fmt_double(grid.origin.x) + "\n";
    side += "yllcorner " + fmt_double(grid.origin.y) + "\n";
    side += "cellsize " + fmt_double(grid.cell_size) + "\n";
    side += "nodata_value " + fmt_double(grid.nodata) + "\n";
    side += "min_depth " + fmt_double(info.min_depth) + "\n";
    side += "max_depth " + fmt_double(info.max_depth) + "\n";
    side += std::string("degenerate ") + (info.degenerate ? "1" : "0") + "\n";
    if (!runs.empty()) {
        side += "nodata_runs " + runs + "\n";
    }
    std::ofstream f(sidecar_path(out_path), std::ios::binary);
    if (!f || !(f << side)) {
        fail(ErrorCode::io, "cannot write '" + sidecar_path(out_path).string() + "'");
    }
    return info;
}

std::optional<Cell> OccupancyGrid::cell_of(Vec2 p) const {
    const double gx = (p.x - origin.x) / cell_size;
    const double gy = (p.y - origin.y) / cell_size;
    if (!(gx >= 0.0 && gy >= 0.0 && gx <= static_cast<double>(cols) && gy <= static_cast<double>(rows))) {
        return std::nullopt;
    }
    return Cell{std::min(static_cast<std::size_t>(gy), rows - 1), std::min(static_cast<std::size_t>(gx), cols - 1)};
}

Vec2 OccupancyGrid::cell_center(Cell c) const {
    return origin + Vec2{(static_cast<double>(c.col) + 0.5) * cell_size, (static_cast<double>(c.row) + 0.5) * cell_size};
}

bool OccupancyGrid::navigable(Vec2 p) const {
    const auto c = cell_of(p);
    return c && !is_blocked(*c);
}

std::size_t OccupancyGrid::blocked_count() const {
    return static_cast<std::size_t>(std::count(blocked.begin(), blocked.end(), std::uint8_t{1}));
}

OccupancyGrid build_occupancy(const DepthGrid& grid, double draft, double ukc) {
    require(std::isfinite(draft) && draft > 0.0, ErrorCode::invalid_argument, "draft must be positive");
    require(std::isfinite(ukc) && ukc >= 0.0, ErrorCode::invalid_argument, "under-keel clearance must be non-negative");
    grid.validate();
    OccupancyGrid occ;
    occ.origin = grid.origin;
    occ.cell_size = grid.cell_size;
    occ.rows = grid.rows;
    occ.cols = grid.cols;
    occ.threshold = draft + ukc;
    occ.blocked.resize(grid.depths.size());
    for (std::size_t i = 0; i < grid.depths.size(); ++i) {
        const double d = grid.depths[i];
        occ.blocked[i] = (grid.is_nodata(d) || d < occ.threshold) ? 1 : 0;
    }
    return occ;
}

OccupancyGrid build_occupancy(const DepthGrid& grid, double draft, const UkcPolicy& policy) {
    return build_occupancy(grid, draft, policy.clearance(draft));
}

namespace {

// Visits every cell the segment touches; returns false as soon as the visitor does
// or the segment leaves the grid.
template <typename Visit>
bool walk_segment(const OccupancyGrid& occ, Vec2 a, Vec2 b, Visit&& visit) {
    const double ax = (a.x - occ.origin.x) / occ.cell_size, ay = (a.y - occ.origin.y) / occ.cell_size;
    const double bx = (b.x - occ.origin.x) / occ.cell_size, by = (b.y - occ.origin.y) / occ.cell_size;
    const long cols = static_cast<long>(occ.cols), rows = static_cast<long>(occ.rows);
    auto inside = [&](long c, long r) { return c >= 0 && r >= 0 && c < cols && r < rows; };
    auto emit = [&](long c, long r) {
        if (!inside(c, r)) return false;
        return visit(Cell{static_cast<std::size_t>(r), static_cast<std::size_t>(c)});
    };
    auto to_cell = [](double g, long n) {
        long i = static_cast<long>(std::floor(g));
        if (i == n && g == static_cast<double>(n)) i = n - 1;  // far edge belongs to the last cell
        return i;
    };
    long cx = to_cell(ax, cols), cy = to_cell(ay, rows);
    const long ex = to_cell(bx, cols), ey = to_cell(by, rows);
    if (!emit(cx, cy)) return false;

    const double dx = bx - ax, dy = by - ay;
    const long sx = dx > 0 ? 1 : (dx < 0 ? -1 : 0);
    const long sy = dy > 0 ? 1 : (dy < 0 ? -1 : 0);
    const double inf = std::numeric_limits<double>::infinity();
    const double tdx = sx ? std::abs(1.0 / dx) : inf;
    const double tdy = sy ? std::abs(1.0 / dy) : inf;
    double tmx = sx > 0 ? (std::floor(ax) + 1.0 - ax) * tdx : (sx < 0 ? (ax - std::floor(ax)) * tdx : inf);
    double tmy = sy > 0 ? (std::floor(ay) + 1.0 - ay) * tdy : (sy < 0 ? (ay - std::floor(ay)) * tdy : inf);
    if (sx < 0 && ax == std::floor(ax)) tmx = 0.0;
    if (sy < 0 && ay == std::floor(ay)) tmy = 0.0;

    const long max_steps = std::labs(ex - cx) + std::labs(ey - cy) + 4;
    for (long step = 0; step < max_steps && (cx != ex || cy != ey); ++step) {
        const double t = std::min(tmx, tmy);
        if (t > 1.0) break;
        if (std::abs(tmx - tmy) <= 1e-12) {
            // Passing through a lattice corner: both side cells count as touched.
            if (!emit(cx + sx, cy) || !emit(cx, cy + sy)) return false;
            cx += sx;
            cy += sy;
            tmx += tdx;
            tmy += tdy;
        } else if (tmx < tmy) {
            cx += sx;
            tmx += tdx;
        } else {
            cy += sy;
            tmy += tdy;
        }
        if (!emit(cx, cy)) return false;
    }
    return true;
}

}  // namespace

bool segment_navigable(const OccupancyGrid& occ, Vec2 a, Vec2 b) {
    return walk_segment(occ, a, b, [&](Cell c) { return !occ.is_blocked(c); });
}

std::vector<Cell> cells_on_segment(const OccupancyGrid& occ, Vec2 a, Vec2 b) {
    std::vector<Cell> out;
    walk_segment(occ, a, b, [&](Cell c) {
        if (out.empty() || !(out.back() == c)) out.push_back(c);
        return true;
    });
    return out;
}

void write_occupancy(const OccupancyGrid& occ, const std::filesystem::path& path) {
    std::string out;
    out += "ncols " + std::to_string(occ.cols) + "\n";
    out += "nrows " + std::to_string(occ.rows) + "\n";
    out += "xllcorner " + fmt_double(occ.origin.x) + "\n";
    out += "yllcorner " + fmt_double(occ.origin.y) + "\n";
    out += "cellsize " + fmt_double(occ.cell_size) + "\n";
    out += "nodata_value -1\n";
    for (std::size_t fr = 0; fr < occ.rows; ++fr) {
        const std::size_t r = occ.rows - 1 - fr;
        for (std::size_t c = 0; c < occ.cols; ++c) {
            if (c) out += ' ';
            out += occ.is_blocked(r, c) ? '1' : '0';
        }
        out += '\n';
    }
    std::ofstream f(path, std::ios::binary);
    if (!f || !(f << out)) {
        fail(ErrorCode::io, "cannot write '" + path.string() + "'");
    }
}

}  // namespace marvv
