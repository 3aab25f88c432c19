#include "marvv/marvv.h"

#include <algorithm>
#include <cstring>
#include <vector>
#include <string>

#include "marvv/error.hpp"
#include "marvv/metrics.hpp"
#include "marvv/simulation.hpp"

struct marvv_scenario {
    marvv::Scenario s;
};
struct marvv_log {
    marvv::SimulationLog log;
};
struct marvv_report {
    marvv::PIReport r;
};
struct marvv_grid {
    marvv::DepthGrid g;
};

namespace {

thread_local std::string g_last_error;

marvv_status to_status(marvv::ErrorCode c) { return static_cast<marvv_status>(static_cast<int>(c)); }

template <class F>
marvv_status guarded(F&& f) {
    g_last_error.clear();
    try {
        f();
        return MARVV_OK;
    } catch (const marvv::Error& e) {
        g_last_error = e.what();
        return to_status(e.code());
    } catch (const std::bad_alloc&) {
        g_last_error = "out of memory";
        return MARVV_ERR_INTERNAL;
    } catch (const std::exception& e) {
        g_last_error = e.what();
        return MARVV_ERR_INTERNAL;
    } catch (...) {
        g_last_error = "unknown error";
        return MARVV_ERR_INTERNAL;
    }
}

void need(const void* p, const char* what) {
    if (!p) marvv::fail(marvv::ErrorCode::invalid_argument, std::string(what) + " must not be null");
}

void copy_out(const std::string& text, char* buf, size_t cap, size_t* needed) {
    if (needed) *needed = text.size() + 1;
    if (!buf || cap == 0) return;
    const size_t n = std::min(cap - 1, text.size());
    std::memcpy(buf, text.data(), n);
    buf[n] = '\0';
    if (cap < text.size() + 1) {
        marvv::fail(marvv::ErrorCode::invalid_argument, "buffer too small; see the needed size");
    }
}

}  // namespace

extern "C" {

const char* marvv_version(void) { return MARVV_VERSION; }

const char* marvv_last_error(void) { return g_last_error.c_str(); }

marvv_status marvv_scenario_load(const char* path, marvv_scenario** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        *out = new marvv_scenario{marvv::load_scenario(path)};
    });
}

marvv_status marvv_scenario_parse(const char* json_text, const char* base_dir, marvv_scenario** out) {
    return guarded([&] {
        need(json_text, "json_text");
        need(out, "out");
        *out = new marvv_scenario{marvv::parse_scenario(json_text, base_dir ? base_dir : "")};
    });
}

marvv_status marvv_scenario_reference(marvv_scenario** out) {
    return guarded([&] {
        need(out, "out");
        *out = new marvv_scenario{marvv::build_reference_scenario()};
    });
}

marvv_status marvv_scenario_set_seed(marvv_scenario* s, uint64_t seed) {
    return guarded([&] {
        need(s, "scenario");
        s->s.seed = seed;
    });
}

marvv_status marvv_scenario_set_weather_preset(marvv_scenario* s, const char* name) {
    return guarded([&] {
        need(s, "scenario");
        need(name, "name");
        s->s.weather = marvv::weather_preset(name);
    });
}

marvv_status marvv_scenario_set_weather(marvv_scenario* s, double rain, double fog, double sea) {
    return guarded([&] {
        need(s, "scenario");
        const marvv::WeatherSeverity w{rain, fog, sea};
        marvv::validate(w);
        s->s.weather = w;
    });
}

marvv_status marvv_scenario_set_radar_preset(marvv_scenario* s, const char* name) {
    return guarded([&] {
        need(s, "scenario");
        need(name, "name");
        auto cfg = marvv::radar_preset(name);
        // Keep scenario-level tracking settings.
        cfg.update_rate = s->s.radar.update_rate;
        cfg.track_window = s->s.radar.track_window;
        cfg.max_range = s->s.radar.max_range;
        s->s.radar = cfg;
        s->s.radar_preset = name;
    });
}

marvv_status marvv_scenario_write(const marvv_scenario* s, const char* path) {
    return guarded([&] {
        need(s, "scenario");
        need(path, "path");
        std::FILE* f = std::fopen(path, "wb");
        if (!f) marvv::fail(marvv::ErrorCode::io, std::string("cannot write '") + path + "'");
        const std::string text = marvv::scenario_to_json(s->s) + "\n";
        const bool ok = std::fwrite(text.data(), 1, text.size(), f) == text.size();
        std::fclose(f);
        if (!ok) marvv::fail(marvv::ErrorCode::io, std::string("write failed for '") + path + "'");
    });
}

marvv_status marvv_scenario_to_json(const marvv_scenario* s, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        need(s, "scenario");
        copy_out(marvv::scenario_to_json(s->s), buf, cap, needed);
    });
}

marvv_status marvv_scenario_hash(const marvv_scenario* s, uint64_t* out) {
    return guarded([&] {
        need(s, "scenario");
        need(out, "out");
        *out = marvv::scenario_hash(s->s);
    });
}

void marvv_scenario_free(marvv_scenario* s) { delete s; }

marvv_status marvv_run(const marvv_scenario* s, marvv_log** out) {
    return guarded([&] {
        need(s, "scenario");
        need(out, "out");
        *out = new marvv_log{marvv::run(s->s)};
    });
}

marvv_status marvv_log_load(const char* csv_path, marvv_log** out) {
    return guarded([&] {
        need(csv_path, "csv_path");
        need(out, "out");
        *out = new marvv_log{marvv::read_log(csv_path)};
    });
}

marvv_status marvv_log_write(const marvv_log* log, const char* csv_path) {
    return guarded([&] {
        need(log, "log");
        need(csv_path, "csv_path");
        marvv::write_log(log->log, csv_path);
    });
}

marvv_status marvv_log_tick_count(const marvv_log* log, size_t* out) {
    return guarded([&] {
        need(log, "log");
        need(out, "out");
        *out = log->log.ticks.size();
    });
}

marvv_status marvv_log_target_count(const marvv_log* log, size_t* out) {
    return guarded([&] {
        need(log, "log");
        need(out, "out");
        *out = log->log.header.target_ids.size();
    });
}

marvv_status marvv_log_target_id(const marvv_log* log, size_t index, const char** out) {
    return guarded([&] {
        need(log, "log");
        need(out, "out");
        const auto& ids = log->log.header.target_ids;
        if (index >= ids.size()) marvv::fail(marvv::ErrorCode::out_of_bounds, "target index out of range");
        *out = ids[index].c_str();
    });
}

void marvv_log_free(marvv_log* log) { delete log; }

marvv_status marvv_report_compute(const marvv_log* log, marvv_report** out) {
    return guarded([&] {
        need(log, "log");
        need(out, "out");
        *out = new marvv_report{marvv::compute_pis(log->log)};
    });
}

marvv_status marvv_report_mpd(const marvv_report* r, const char* target_id, double* out) {
    return guarded([&] {
        need(r, "report");
        need(target_id, "target_id");
        need(out, "out");
        *out = r->r.mpd(target_id);
    });
}

marvv_status marvv_report_rmse_speed(const marvv_report* r, double* out) {
    return guarded([&] {
        need(r, "report");
        need(out, "out");
        *out = r->r.rmse_speed;
    });
}

marvv_status marvv_report_rmse_heading(const marvv_report* r, double* out) {
    return guarded([&] {
        need(r, "report");
        need(out, "out");
        *out = r->r.rmse_heading;
    });
}

marvv_status marvv_report_trigger_transitions(const marvv_report* r, size_t* out) {
    return guarded([&] {
        need(r, "report");
        need(out, "out");
        *out = r->r.trigger_transitions;
    });
}

marvv_status marvv_report_transitions_before_sustained(const marvv_report* r, size_t* out) {
    return guarded([&] {
        need(r, "report");
        need(out, "out");
        *out = r->r.transitions_before_sustained;
    });
}

marvv_status marvv_report_grounded(const marvv_report* r, int* out) {
    return guarded([&] {
        need(r, "report");
        need(out, "out");
        *out = r->r.grounded ? 1 : 0;
    });
}

marvv_status marvv_report_to_json(const marvv_report* r, char* buf, size_t cap, size_t* needed) {
    return guarded([&] {
        need(r, "report");
        copy_out(marvv::report_to_json(r->r), buf, cap, needed);
    });
}

marvv_status marvv_export(const marvv_log* log, const marvv_report* r, const char* out_dir) {
    return guarded([&] {
        need(log, "log");
        need(r, "report");
        need(out_dir, "out_dir");
        marvv::export_artifacts(log->log, r->r, out_dir);
    });
}

void marvv_report_free(marvv_report* r) { delete r; }

marvv_status marvv_grid_load(const char* path, marvv_raster_format format, marvv_grid** out) {
    return guarded([&] {
        need(path, "path");
        need(out, "out");
        if (format != MARVV_RASTER_ASCII_GRID && format != MARVV_RASTER_RAW16) {
            marvv::fail(marvv::ErrorCode::invalid_argument, "unknown raster format");
        }
        const auto f = format == MARVV_RASTER_ASCII_GRID ? marvv::RasterFormat::ascii_grid : marvv::RasterFormat::raw16;
        *out = new marvv_grid{marvv::load_raster(path, f)};
    });
}

marvv_status marvv_grid_stitch(const marvv_grid* const* tiles, size_t count, marvv_grid** out) {
    return guarded([&] {
        need(tiles, "tiles");
        need(out, "out");
        if (count == 0) marvv::fail(marvv::ErrorCode::invalid_argument, "stitch needs at least one tile");
        // Tile indices are the ranks of the distinct origin coordinates.
        std::vector<double> xs, ys;
        for (size_t i = 0; i < count; ++i) {
            need(tiles[i], "tile");
            xs.push_back(tiles[i]->g.origin.x);
            ys.push_back(tiles[i]->g.origin.y);
        }
        auto ranks = [](std::vector<double> v) {
            std::sort(v.begin(), v.end());
            v.erase(std::unique(v.begin(), v.end()), v.end());
            return v;
        };
        const auto ux = ranks(xs), uy = ranks(ys);
        marvv::TileSet set;
        for (size_t i = 0; i < count; ++i) {
            const auto& g = tiles[i]->g;
            const auto r = static_cast<size_t>(std::lower_bound(uy.begin(), uy.end(), g.origin.y) - uy.begin());
            const auto c = static_cast<size_t>(std::lower_bound(ux.begin(), ux.end(), g.origin.x) - ux.begin());
            set.push_back({r, c, g});
        }
        *out = new marvv_grid{marvv::stitch_tiles(set)};
    });
}

marvv_status marvv_grid_dims(const marvv_grid* g, size_t* rows, size_t* cols, double* cell_size) {
    return guarded([&] {
        need(g, "grid");
        if (rows) *rows = g->g.rows;
        if (cols) *cols = g->g.cols;
        if (cell_size) *cell_size = g->g.cell_size;
    });
}

marvv_status marvv_grid_depth_at(const marvv_grid* g, double x, double y, double* out) {
    return guarded([&] {
        need(g, "grid");
        need(out, "out");
        *out = marvv::depth_at(g->g, {x, y});
    });
}

marvv_status marvv_grid_write_ascii(const marvv_grid* g, const char* path) {
    return guarded([&] {
        need(g, "grid");
        need(path, "path");
        marvv::write_ascii_grid(g->g, path);
    });
}

marvv_status marvv_grid_export_heightmap(const marvv_grid* g, const char* path, double* min_depth, double* max_depth) {
    return guarded([&] {
        need(g, "grid");
        need(path, "path");
        const auto info = marvv::export_heightmap(g->g, path);
        if (min_depth) *min_depth = info.min_depth;
        if (max_depth) *max_depth = info.max_depth;
    });
}

marvv_status marvv_grid_write_occupancy(const marvv_grid* g, double draft, double ukc, const char* path,
                                        size_t* blocked_cells) {
    return guarded([&] {
        need(g, "grid");
        need(path, "path");
        const auto occ = marvv::build_occupancy(g->g, draft, ukc);
        marvv::write_occupancy(occ, path);
        if (blocked_cells) *blocked_cells = occ.blocked_count();
    });
}

void marvv_grid_free(marvv_grid* g) { delete g; }

}  // extern "C"
