// Command-line front end; talks to the simulator only through the C API.
#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <memory>
#include <mutex>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include <CLI11.hpp>

#include "marvv/marvv.h"

namespace fs = std::filesystem;

namespace {

struct Failure {
    marvv_status status;
    std::string message;
};

void check(marvv_status st) {
    if (st != MARVV_OK) throw Failure{st, marvv_last_error()};
}

struct ScenarioDel {
    void operator()(marvv_scenario* p) const { marvv_scenario_free(p); }
};
struct LogDel {
    void operator()(marvv_log* p) const { marvv_log_free(p); }
};
struct ReportDel {
    void operator()(marvv_report* p) const { marvv_report_free(p); }
};
struct GridDel {
    void operator()(marvv_grid* p) const { marvv_grid_free(p); }
};
using ScenarioPtr = std::unique_ptr<marvv_scenario, ScenarioDel>;
using LogPtr = std::unique_ptr<marvv_log, LogDel>;
using ReportPtr = std::unique_ptr<marvv_report, ReportDel>;
using GridPtr = std::unique_ptr<marvv_grid, GridDel>;

ScenarioPtr load_scenario(const std::string& path) {
    marvv_scenario* s = nullptr;
    if (path.empty() || path == "reference") {
        check(marvv_scenario_reference(&s));
    } else {
        check(marvv_scenario_load(path.c_str(), &s));
    }
    return ScenarioPtr(s);
}

std::string report_json(const marvv_report* r) {
    size_t needed = 0;
    check(marvv_report_to_json(r, nullptr, 0, &needed));
    std::string buf(needed, '\0');
    check(marvv_report_to_json(r, buf.data(), buf.size(), &needed));
    buf.resize(needed - 1);
    return buf;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

struct RunResult {
    std::string scenario;
    std::string weather;
    std::string radar;
    uint64_t seed = 0;
    std::vector<std::pair<std::string, double>> mpd;
    double rmse_speed = 0.0;
    double rmse_heading = 0.0;
    size_t transitions = 0;
    size_t before_sustained = 0;
    int grounded = 0;
    std::string error;
};

RunResult run_one(const std::string& scenario_path, const std::string& weather, const std::string& radar, uint64_t seed,
                  const std::string& out_dir) {
    RunResult res{scenario_path, weather, radar, seed, {}, 0, 0, 0, 0, 0, {}};
    try {
        auto sc = load_scenario(scenario_path);
        check(marvv_scenario_set_seed(sc.get(), seed));
        if (!weather.empty()) check(marvv_scenario_set_weather_preset(sc.get(), weather.c_str()));
        if (!radar.empty()) check(marvv_scenario_set_radar_preset(sc.get(), radar.c_str()));
        marvv_log* lp = nullptr;
        check(marvv_run(sc.get(), &lp));
        LogPtr log(lp);
        marvv_report* rp = nullptr;
        check(marvv_report_compute(log.get(), &rp));
        ReportPtr rep(rp);
        size_t nt = 0;
        check(marvv_log_target_count(log.get(), &nt));
        for (size_t k = 0; k < nt; ++k) {
            const char* id = nullptr;
            check(marvv_log_target_id(log.get(), k, &id));
            double m = 0.0;
            check(marvv_report_mpd(rep.get(), id, &m));
            res.mpd.emplace_back(id, m);
        }
        check(marvv_report_rmse_speed(rep.get(), &res.rmse_speed));
        check(marvv_report_rmse_heading(rep.get(), &res.rmse_heading));
        check(marvv_report_trigger_transitions(rep.get(), &res.transitions));
        check(marvv_report_transitions_before_sustained(rep.get(), &res.before_sustained));
        check(marvv_report_grounded(rep.get(), &res.grounded));
        if (!out_dir.empty()) check(marvv_export(log.get(), rep.get(), out_dir.c_str()));
    } catch (const Failure& f) {
        res.error = f.message;
    }
    return res;
}

template <class Job>
void parallel_for(size_t n, unsigned jobs, Job&& job) {
    jobs = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(n)));
    std::atomic<size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned t = 0; t < jobs; ++t) {
        pool.emplace_back([&] {
            for (size_t i = next++; i < n; i = next++) job(i);
        });
    }
    for (auto& th : pool) th.join();
}

std::string fmt(double v, int prec) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", prec, v);
    return buf;
}

void write_runs_csv(const std::vector<RunResult>& runs, const fs::path& path) {
    std::ofstream out(path);
    if (!out) throw Failure{MARVV_ERR_IO, "cannot write '" + path.string() + "'"};
    out << "scenario,weather,radar,seed,target,mpd_m,rmse_speed_mps,rmse_speed_knots,rmse_heading_deg,"
           "trigger_transitions,transitions_before_sustained,grounded,error\n";
    for (const auto& r : runs) {
        auto row = [&](const std::string& id, double mpd) {
            out << r.scenario << ',' << r.weather << ',' << r.radar << ',' << r.seed << ',' << id << ',' << fmt(mpd, 3)
                << ',' << fmt(r.rmse_speed, 6) << ',' << fmt(r.rmse_speed * 3600.0 / 1852.0, 6) << ','
                << fmt(r.rmse_heading, 6) << ',' << r.transitions << ',' << r.before_sustained << ',' << r.grounded
                << ',' << r.error << '\n';
        };
        if (r.mpd.empty()) row("", std::nan(""));
        for (const auto& [id, m] : r.mpd) row(id, m);
    }
}

int cmd_run(const std::string& scenario, uint64_t seed, bool seed_set, const std::string& weather,
            const std::string& radar, const std::string& out) {
    auto sc = load_scenario(scenario);
    if (seed_set) check(marvv_scenario_set_seed(sc.get(), seed));
    if (!weather.empty()) check(marvv_scenario_set_weather_preset(sc.get(), weather.c_str()));
    if (!radar.empty()) check(marvv_scenario_set_radar_preset(sc.get(), radar.c_str()));
    marvv_log* lp = nullptr;
    check(marvv_run(sc.get(), &lp));
    LogPtr log(lp);
    marvv_report* rp = nullptr;
    check(marvv_report_compute(log.get(), &rp));
    ReportPtr rep(rp);
    check(marvv_export(log.get(), rep.get(), out.c_str()));
    std::fputs(report_json(rep.get()).c_str(), stdout);
    return 0;
}

int cmd_batch(const std::string& dir, int seeds, const std::string& out, unsigned jobs) {
    std::vector<std::string> files;
    std::error_code ec;
    for (const auto& e : fs::directory_iterator(dir, ec)) {
        if (e.is_regular_file() && e.path().extension() == ".json") files.push_back(e.path().string());
    }
    if (ec) throw Failure{MARVV_ERR_IO, "cannot list '" + dir + "': " + ec.message()};
    std::sort(files.begin(), files.end());
    if (files.empty()) throw Failure{MARVV_ERR_INVALID_ARGUMENT, "no *.json scenarios in '" + dir + "'"};
    std::vector<RunResult> runs(files.size() * static_cast<size_t>(seeds));
    parallel_for(runs.size(), jobs, [&](size_t i) {
        const auto& f = files[i / seeds];
        const uint64_t seed = i % seeds + 1;
        const auto run_dir = fs::path(out) / fs::path(f).stem() / ("seed_" + std::to_string(seed));
        runs[i] = run_one(f, "", "", seed, run_dir.string());
    });
    fs::create_directories(out);
    write_runs_csv(runs, fs::path(out) / "batch.csv");
    int failures = 0;
    for (const auto& r : runs) {
        std::printf("%-40s seed %3llu  ", fs::path(r.scenario).filename().string().c_str(),
                    static_cast<unsigned long long>(r.seed));
        if (!r.error.empty()) {
            ++failures;
            std::printf("ERROR %s\n", r.error.c_str());
            continue;
        }
        for (const auto& [id, m] : r.mpd) std::printf("MPD_%s %8.1f m  ", id.c_str(), m);
        std::printf("RMSE_V %.3f m/s  RMSE_psi %.3f deg  transitions %zu\n", r.rmse_speed, r.rmse_heading, r.transitions);
    }
    return failures ? 1 : 0;
}

struct CellStats {
    double rmse_v = 0, rmse_psi = 0;
    std::vector<std::pair<std::string, double>> mpd;  // mean per target
    double min_mpd = INFINITY;
    size_t n = 0, errors = 0, grounded = 0, osc = 0, max1 = 0;
};

CellStats summarize(const std::vector<RunResult>& runs, const std::string& w, const std::string& r) {
    CellStats c;
    for (const auto& run : runs) {
        if (run.weather != w || run.radar != r) continue;
        if (!run.error.empty()) {
            ++c.errors;
            continue;
        }
        ++c.n;
        c.rmse_v += run.rmse_speed;
        c.rmse_psi += run.rmse_heading;
        c.grounded += run.grounded ? 1 : 0;
        c.osc += run.before_sustained >= 3 ? 1 : 0;
        c.max1 += run.transitions <= 1 ? 1 : 0;
        if (c.mpd.empty()) {
            for (const auto& [id, m] : run.mpd) c.mpd.emplace_back(id, 0.0);
        }
        for (size_t k = 0; k < run.mpd.size() && k < c.mpd.size(); ++k) {
            c.mpd[k].second += run.mpd[k].second;
            c.min_mpd = std::min(c.min_mpd, run.mpd[k].second);
        }
    }
    if (c.n) {
        c.rmse_v /= static_cast<double>(c.n);
        c.rmse_psi /= static_cast<double>(c.n);
        for (auto& [id, m] : c.mpd) m /= static_cast<double>(c.n);
    }
    return c;
}

void print_table(const char* title, const std::vector<RunResult>& runs,
                 const std::vector<std::pair<std::string, std::string>>& cells, int label) {
    std::printf("\n%s\n", title);
    std::printf("%-16s", label == 0 ? "weather" : label == 1 ? "radar" : "weather/radar");
    auto first = summarize(runs, cells.front().first, cells.front().second);
    for (const auto& [id, m] : first.mpd) std::printf("  MPD_%-6s", id.c_str());
    std::printf("  RMSE_V m/s (kn)   RMSE_psi deg  osc>=3  trans<=1  min MPD  n\n");
    for (const auto& [w, r] : cells) {
        const auto c = summarize(runs, w, r);
        std::printf("%-16s", (label == 0 ? w : label == 1 ? r : w + "/" + r).c_str());
        for (const auto& [id, m] : c.mpd) std::printf("  %8.1f m", m);
        std::printf("  %6.3f (%5.3f)   %12.3f  %6zu  %8zu  %7.1f  %zu%s\n", c.rmse_v, c.rmse_v * 3600.0 / 1852.0,
                    c.rmse_psi, c.osc, c.max1, c.min_mpd, c.n, c.errors ? " (errors)" : "");
    }
}

int cmd_sweep(const std::string& scenario, const std::string& weathers, const std::string& radars, int seeds,
              const std::string& out, unsigned jobs) {
    const auto ws = split_list(weathers), rs = split_list(radars);
    if (ws.empty() || rs.empty()) throw Failure{MARVV_ERR_INVALID_ARGUMENT, "empty --weather or --radar list"};
    std::vector<RunResult> runs(ws.size() * rs.size() * static_cast<size_t>(seeds));
    parallel_for(runs.size(), jobs, [&](size_t i) {
        const size_t cell = i / seeds;
        const auto& w = ws[cell / rs.size()];
        const auto& r = rs[cell % rs.size()];
        runs[i] = run_one(scenario, w, r, i % seeds + 1, "");
    });
    if (!out.empty()) {
        fs::create_directories(out);
        write_runs_csv(runs, fs::path(out) / "sweep.csv");
    }
    std::vector<std::pair<std::string, std::string>> all;
    for (const auto& w : ws)
        for (const auto& r : rs) all.emplace_back(w, r);
    print_table("Study matrix (seed means)", runs, all, 2);
    const std::string ref_radar = std::find(rs.begin(), rs.end(), "nominal") != rs.end() ? "nominal" : rs.front();
    const std::string ref_weather = std::find(ws.begin(), ws.end(), "severe") != ws.end() ? "severe" : ws.back();
    std::vector<std::pair<std::string, std::string>> t1, t2;
    for (const auto& w : ws) t1.emplace_back(w, ref_radar);
    for (const auto& r : rs) t2.emplace_back(ref_weather, r);
    print_table(("Weather study, " + ref_radar + " radar").c_str(), runs, t1, 0);
    print_table(("Radar study, " + ref_weather + " weather").c_str(), runs, t2, 1);
    bool errors = false;
    for (const auto& r : runs) errors = errors || !r.error.empty();
    return errors ? 1 : 0;
}

int cmd_metrics(const std::string& log_path) {
    marvv_log* lp = nullptr;
    check(marvv_log_load(log_path.c_str(), &lp));
    LogPtr log(lp);
    marvv_report* rp = nullptr;
    check(marvv_report_compute(log.get(), &rp));
    ReportPtr rep(rp);
    std::fputs(report_json(rep.get()).c_str(), stdout);
    return 0;
}

marvv_raster_format parse_format(const std::string& s) {
    if (s == "ascii" || s == "ascii_grid") return MARVV_RASTER_ASCII_GRID;
    if (s == "raw16") return MARVV_RASTER_RAW16;
    throw Failure{MARVV_ERR_INVALID_ARGUMENT, "unknown raster format '" + s + "' (ascii or raw16)"};
}

GridPtr load_grid(const std::string& path, const std::string& format) {
    marvv_grid* g = nullptr;
    check(marvv_grid_load(path.c_str(), parse_format(format), &g));
    return GridPtr(g);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"marvv: seeded maritime autonomy V&V simulator"};
    app.set_version_flag("--version", std::string(marvv_version()));
    app.require_subcommand(1);
    const unsigned hw = std::max(1u, std::thread::hardware_concurrency());

    std::string scenario, weather, radar, out = "out";
    uint64_t seed = 1;
    auto* run = app.add_subcommand("run", "Run one scenario and export its log, report and plot CSVs");
    run->add_option("scenario", scenario, "Scenario JSON, or 'reference'")->required();
    auto* seed_opt = run->add_option("--seed", seed, "Override the scenario seed");
    run->add_option("--weather", weather, "Weather preset: ideal, moderate, severe");
    run->add_option("--radar", radar, "Radar preset: high, nominal, low");
    run->add_option("--out", out, "Output directory");

    std::string dir;
    int seeds = 10;
    unsigned jobs = hw;
    auto* batch = app.add_subcommand("batch", "Run every scenario in a directory over seeds 1..N");
    batch->add_option("dir", dir, "Directory of scenario JSON files")->required()->check(CLI::ExistingDirectory);
    batch->add_option("--seeds", seeds, "Number of seeds")->check(CLI::PositiveNumber);
    batch->add_option("--out", out, "Output directory");
    batch->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    std::string weathers = "ideal,moderate,severe", radars = "high,nominal,low", sweep_out, sweep_scenario = "reference";
    auto* sweep = app.add_subcommand("sweep", "Weather x radar study matrix with weather and radar summaries");
    sweep->add_option("--scenario", sweep_scenario, "Base scenario (default: reference)");
    sweep->add_option("--weather", weathers, "Comma-separated weather presets");
    sweep->add_option("--radar", radars, "Comma-separated radar presets");
    sweep->add_option("--seeds", seeds, "Seeds per cell")->check(CLI::PositiveNumber);
    sweep->add_option("--out", sweep_out, "Write per-run results to <out>/sweep.csv");
    sweep->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);

    std::string log_path;
    auto* metrics = app.add_subcommand("metrics", "Recompute performance indicators from a log CSV");
    metrics->add_option("log", log_path, "log.csv (its .header.json must sit next to it)")->required();

    auto* bathy = app.add_subcommand("bathy", "Bathymetry tools");
    bathy->require_subcommand(1);
    std::string in_path, out_path, format = "ascii";
    std::vector<std::string> tiles;
    double draft = 9.5, ukc = 1.0;
    auto* info = bathy->add_subcommand("info", "Print grid geometry and depth range");
    info->add_option("input", in_path)->required();
    info->add_option("--format", format, "ascii or raw16");
    auto* stitch = bathy->add_subcommand("stitch", "Merge georeferenced ASCII tiles into one grid");
    stitch->add_option("output", out_path, "Output ASCII grid")->required();
    stitch->add_option("tiles", tiles, "Tile files")->required();
    stitch->add_option("--format", format, "Tile format: ascii or raw16");
    auto* exp = bathy->add_subcommand("export", "Export a 16-bit heightmap with .hdr sidecar");
    exp->add_option("input", in_path)->required();
    exp->add_option("output", out_path)->required();
    exp->add_option("--format", format, "Input format: ascii or raw16");
    auto* occ = bathy->add_subcommand("occupancy", "Write the navigability raster for a draft and UKC");
    occ->add_option("input", in_path)->required();
    occ->add_option("output", out_path)->required();
    occ->add_option("--format", format, "Input format: ascii or raw16");
    occ->add_option("--draft", draft, "Vessel draft, m");
    occ->add_option("--ukc", ukc, "Under-keel clearance, m");

    auto* scen = app.add_subcommand("scenario", "Scenario file helpers");
    scen->require_subcommand(1);
    auto* ref = scen->add_subcommand("reference", "Write the reference encounter scenario");
    ref->add_option("output", out_path)->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(scenario, seed, seed_opt->count() > 0, weather, radar, out);
        if (*batch) return cmd_batch(dir, seeds, out, jobs);
        if (*sweep) return cmd_sweep(sweep_scenario, weathers, radars, seeds, sweep_out, jobs);
        if (*metrics) return cmd_metrics(log_path);
        if (*info) {
            auto g = load_grid(in_path, format);
            size_t rows = 0, cols = 0;
            double cs = 0;
            check(marvv_grid_dims(g.get(), &rows, &cols, &cs));
            std::printf("rows %zu\ncols %zu\ncell_size %g\n", rows, cols, cs);
            return 0;
        }
        if (*stitch) {
            std::vector<GridPtr> owned;
            std::vector<const marvv_grid*> raw;
            for (const auto& t : tiles) {
                owned.push_back(load_grid(t, format));
                raw.push_back(owned.back().get());
            }
            marvv_grid* g = nullptr;
            check(marvv_grid_stitch(raw.data(), raw.size(), &g));
            GridPtr merged(g);
            check(marvv_grid_write_ascii(merged.get(), out_path.c_str()));
            return 0;
        }
        if (*exp) {
            auto g = load_grid(in_path, format);
            double lo = 0, hi = 0;
            check(marvv_grid_export_heightmap(g.get(), out_path.c_str(), &lo, &hi));
            std::printf("depth range %g .. %g m\n", lo, hi);
            return 0;
        }
        if (*occ) {
            auto g = load_grid(in_path, format);
            size_t blocked = 0;
            check(marvv_grid_write_occupancy(g.get(), draft, ukc, out_path.c_str(), &blocked));
            std::printf("blocked cells %zu\n", blocked);
            return 0;
        }
        if (*ref) {
            auto sc = load_scenario("reference");
            check(marvv_scenario_write(sc.get(), out_path.c_str()));
            return 0;
        }
    } catch (const Failure& f) {
        std::fprintf(stderr, "marvv: error %d: %s\n", static_cast<int>(f.status), f.message.c_str());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "marvv: %s\n", e.what());
        return 2;
    }
    return 0;
}
