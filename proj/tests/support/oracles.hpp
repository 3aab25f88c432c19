// Independent reference implementations used by the unit and acceptance tests.
// None of these call into the code they check.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <queue>
#include <random>
#include <utility>
#include <vector>

#include "marvv/bathymetry.hpp"
#include "marvv/geometry.hpp"

namespace oracle {

inline constexpr double c0 = 299792458.0;
inline constexpr double kB = 1.380649e-23;
inline constexpr double pi = 3.14159265358979323846;

// Monostatic radar equation written out as one expression.
inline double snr_db(double pt, double gain_db, double freq, double rcs, double range, double temp, double bw,
                     double nf_db, double loss_db) {
    const double lambda = c0 / freq;
    return 10.0 * std::log10(pt * std::pow(10.0, gain_db / 10.0) * std::pow(10.0, gain_db / 10.0) * lambda * lambda *
                             rcs /
                             (std::pow(4.0 * pi, 3) * std::pow(range, 4) * kB * temp * bw *
                              std::pow(10.0, nf_db / 10.0) * std::pow(10.0, loss_db / 10.0)));
}

// Liquid-water attenuation coefficient with the older single-formula constants
// (eps1 = 5.48, eps2 = 3.51, fs = 590 - 1500(theta - 1)); a separately published curve.
inline double liquid_water_kl_old(double f_ghz, double temp_k) {
    const double theta = 300.0 / temp_k;
    const double e0 = 77.6 + 103.3 * (theta - 1.0);
    const double e1 = 5.48, e2 = 3.51;
    const double fp = 20.09 - 142.0 * (theta - 1.0) + 294.0 * (theta - 1.0) * (theta - 1.0);
    const double fs = 590.0 - 1500.0 * (theta - 1.0);
    const double im = f_ghz * (e0 - e1) / (fp * (1 + (f_ghz / fp) * (f_ghz / fp))) +
                      f_ghz * (e1 - e2) / (fs * (1 + (f_ghz / fs) * (f_ghz / fs)));
    const double re = (e0 - e1) / (1 + (f_ghz / fp) * (f_ghz / fp)) + (e1 - e2) / (1 + (f_ghz / fs) * (f_ghz / fs)) + e2;
    const double eta = (2 + re) / im;
    return 0.819 * f_ghz / (im * (1 + eta * eta));
}

struct BruteCpa {
    double dcpa = 0.0;
    double tcpa = 0.0;
    double resolution = 0.0;  // worst-case distance overshoot of the sampling grid
};

// Minimum of |p + v t| over `samples` evenly spaced instants in [0, t_end].
inline BruteCpa brute_force_cpa(marvv::Vec2 p, marvv::Vec2 v, double t_end, int samples = 10000) {
    BruteCpa best{std::numeric_limits<double>::infinity(), 0.0, 0.0};
    for (int i = 0; i < samples; ++i) {
        const double t = t_end * i / (samples - 1);
        const double d = std::hypot(p.x + v.x * t, p.y + v.y * t);
        if (d < best.dcpa) {
            best.dcpa = d;
            best.tcpa = t;
        }
    }
    const double half_step = 0.5 * t_end / (samples - 1) * std::hypot(v.x, v.y);
    best.resolution = std::sqrt(best.dcpa * best.dcpa + half_step * half_step) - best.dcpa + 1e-9;
    return best;
}

// Does the segment pass through the open interior of the axis-aligned box? (Liang-Barsky clip.)
inline bool segment_enters_box(marvv::Vec2 a, marvv::Vec2 b, double x0, double y0, double x1, double y1) {
    double t0 = 0.0, t1 = 1.0;
    const double dx = b.x - a.x, dy = b.y - a.y;
    const double p[4] = {-dx, dx, -dy, dy};
    const double q[4] = {a.x - x0, x1 - a.x, a.y - y0, y1 - a.y};
    for (int i = 0; i < 4; ++i) {
        if (p[i] == 0.0) {
            if (q[i] <= 0.0) return false;
            continue;
        }
        const double r = q[i] / p[i];
        if (p[i] < 0.0) t0 = std::max(t0, r);
        else t1 = std::min(t1, r);
    }
    return t1 - t0 > 1e-12;
}

// Exhaustive check of every blocked cell against the segment.
inline bool segment_clear(const marvv::OccupancyGrid& occ, marvv::Vec2 a, marvv::Vec2 b) {
    const double eps = 1e-9 * occ.cell_size;
    for (std::size_t r = 0; r < occ.rows; ++r) {
        for (std::size_t c = 0; c < occ.cols; ++c) {
            if (!occ.is_blocked(r, c)) continue;
            const double x0 = occ.origin.x + static_cast<double>(c) * occ.cell_size + eps;
            const double y0 = occ.origin.y + static_cast<double>(r) * occ.cell_size + eps;
            if (segment_enters_box(a, b, x0, y0, x0 + occ.cell_size - 2 * eps, y0 + occ.cell_size - 2 * eps)) {
                return false;
            }
        }
    }
    const double xmax = occ.origin.x + static_cast<double>(occ.cols) * occ.cell_size;
    const double ymax = occ.origin.y + static_cast<double>(occ.rows) * occ.cell_size;
    auto inside = [&](marvv::Vec2 p) { return p.x >= occ.origin.x && p.y >= occ.origin.y && p.x <= xmax && p.y <= ymax; };
    return inside(a) && inside(b);
}

// Uniform-cost search on the 8-connected grid without corner cutting, in cell units.
inline double grid_shortest_path(const marvv::OccupancyGrid& occ, marvv::Cell s, marvv::Cell g) {
    const long rows = static_cast<long>(occ.rows), cols = static_cast<long>(occ.cols);
    std::vector<double> dist(occ.rows * occ.cols, std::numeric_limits<double>::infinity());
    using E = std::pair<double, long>;
    std::priority_queue<E, std::vector<E>, std::greater<>> q;
    const long si = static_cast<long>(s.row) * cols + static_cast<long>(s.col);
    dist[si] = 0.0;
    q.emplace(0.0, si);
    auto blocked = [&](long r, long c) { return occ.is_blocked(static_cast<std::size_t>(r), static_cast<std::size_t>(c)); };
    while (!q.empty()) {
        auto [d, i] = q.top();
        q.pop();
        if (d > dist[i]) continue;
        const long r = i / cols, c = i % cols;
        for (long dr = -1; dr <= 1; ++dr) {
            for (long dc = -1; dc <= 1; ++dc) {
                if (!dr && !dc) continue;
                const long nr = r + dr, nc = c + dc;
                if (nr < 0 || nc < 0 || nr >= rows || nc >= cols || blocked(nr, nc)) continue;
                if (dr && dc && (blocked(r, nc) || blocked(nr, c))) continue;
                const double nd = d + ((dr && dc) ? std::sqrt(2.0) : 1.0);
                if (nd < dist[nr * cols + nc]) {
                    dist[nr * cols + nc] = nd;
                    q.emplace(nd, nr * cols + nc);
                }
            }
        }
    }
    return dist[static_cast<long>(g.row) * cols + static_cast<long>(g.col)];
}

// Depth grid with a few random shallow blobs over deep water.
inline marvv::DepthGrid random_blob_grid(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double cell,
                                         int blobs) {
    marvv::DepthGrid g({0.0, 0.0}, cell, rows, cols, 30.0);
    std::uniform_real_distribution<double> ux(0.0, static_cast<double>(cols) * cell);
    std::uniform_real_distribution<double> uy(0.0, static_cast<double>(rows) * cell);
    std::uniform_real_distribution<double> ur(1.5 * cell, 5.0 * cell);
    for (int b = 0; b < blobs; ++b) {
        const double cx = ux(gen), cy = uy(gen), rad = ur(gen);
        for (std::size_t r = 0; r < rows; ++r) {
            for (std::size_t c = 0; c < cols; ++c) {
                const auto p = g.cell_center(r, c);
                if (std::hypot(p.x - cx, p.y - cy) < rad) g.at(r, c) = 4.0;
            }
        }
    }
    return g;
}

inline marvv::DepthGrid random_depth_grid(std::mt19937_64& gen, std::size_t rows, std::size_t cols, double nodata_frac) {
    std::uniform_real_distribution<double> ud(0.5, 250.0), u01(0.0, 1.0), uo(-5000.0, 5000.0);
    marvv::DepthGrid g({uo(gen), uo(gen)}, 25.0, rows, cols, 0.0);
    for (auto& d : g.depths) d = u01(gen) < nodata_frac ? g.nodata : ud(gen);
    if (g.is_nodata(g.depths.front())) g.depths.front() = 12.5;
    return g;
}

}  // namespace oracle
