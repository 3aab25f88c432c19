#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>
#include <thread>
#include <vector>

#include "marvv/marvv.h"

namespace fs = std::filesystem;

namespace {

fs::path scratch() {
    const auto d = fs::temp_directory_path() / "marvv_capi_test";
    fs::create_directories(d);
    return d;
}

marvv_scenario* short_reference(double duration_s) {
    marvv_scenario* s = nullptr;
    REQUIRE(marvv_scenario_reference(&s) == MARVV_OK);
    size_t needed = 0;
    REQUIRE(marvv_scenario_to_json(s, nullptr, 0, &needed) == MARVV_OK);
    std::string text(needed, '\0');
    REQUIRE(marvv_scenario_to_json(s, text.data(), text.size(), &needed) == MARVV_OK);
    text.resize(needed - 1);
    marvv_scenario_free(s);
    const auto pos = text.find("\"duration\": 600.0");
    REQUIRE(pos != std::string::npos);
    text.replace(pos, 17, "\"duration\": " + std::to_string(duration_s));
    marvv_scenario* out = nullptr;
    REQUIRE(marvv_scenario_parse(text.c_str(), nullptr, &out) == MARVV_OK);
    return out;
}

}  // namespace

TEST_CASE("version and error reporting") {
    CHECK(std::string(marvv_version()).size() > 0);
    marvv_scenario* s = nullptr;
    CHECK(marvv_scenario_load("/nonexistent/x.json", &s) == MARVV_ERR_IO);
    CHECK(s == nullptr);
    CHECK(std::string(marvv_last_error()).find("/nonexistent/x.json") != std::string::npos);
    CHECK(marvv_scenario_parse("{", nullptr, &s) == MARVV_ERR_PARSE);
    CHECK(marvv_scenario_parse("{}", nullptr, &s) == MARVV_ERR_VALIDATION);
    CHECK(marvv_scenario_reference(nullptr) == MARVV_ERR_INVALID_ARGUMENT);
    CHECK(marvv_run(nullptr, nullptr) == MARVV_ERR_INVALID_ARGUMENT);
    marvv_scenario_free(nullptr);
    marvv_log_free(nullptr);
    marvv_report_free(nullptr);
    marvv_grid_free(nullptr);
}

TEST_CASE("scenario handle") {
    marvv_scenario* s = nullptr;
    REQUIRE(marvv_scenario_reference(&s) == MARVV_OK);
    uint64_t h1 = 0, h2 = 0;
    CHECK(marvv_scenario_hash(s, &h1) == MARVV_OK);
    CHECK(marvv_scenario_set_seed(s, 5) == MARVV_OK);
    CHECK(marvv_scenario_hash(s, &h2) == MARVV_OK);
    CHECK(h1 == h2);
    CHECK(marvv_scenario_set_weather_preset(s, "severe") == MARVV_OK);
    CHECK(marvv_scenario_hash(s, &h2) == MARVV_OK);
    CHECK(h1 != h2);
    CHECK(marvv_scenario_set_weather_preset(s, "stormy") == MARVV_ERR_INVALID_ARGUMENT);
    CHECK(marvv_scenario_set_weather(s, 11, 0, 0) == MARVV_ERR_VALIDATION);
    CHECK(marvv_scenario_set_radar_preset(s, "low") == MARVV_OK);
    CHECK(marvv_scenario_set_radar_preset(s, "x") != MARVV_OK);

    char tiny[4];
    size_t needed = 0;
    CHECK(marvv_scenario_to_json(s, tiny, sizeof tiny, &needed) == MARVV_ERR_INVALID_ARGUMENT);
    CHECK(needed > sizeof tiny);

    CHECK(marvv_scenario_hash(s, &h2) == MARVV_OK);
    const auto path = scratch() / "scenario.json";
    CHECK(marvv_scenario_write(s, path.string().c_str()) == MARVV_OK);
    marvv_scenario* back = nullptr;
    REQUIRE(marvv_scenario_load(path.string().c_str(), &back) == MARVV_OK);
    uint64_t h3 = 0;
    marvv_scenario_hash(back, &h3);
    CHECK(h3 == h2);
    marvv_scenario_free(back);
    marvv_scenario_free(s);
}

TEST_CASE("run, report, export, reload") {
    marvv_scenario* s = short_reference(60);
    marvv_log* log = nullptr;
    REQUIRE(marvv_run(s, &log) == MARVV_OK);
    size_t ticks = 0, targets = 0;
    CHECK(marvv_log_tick_count(log, &ticks) == MARVV_OK);
    CHECK(ticks == 1201);
    CHECK(marvv_log_target_count(log, &targets) == MARVV_OK);
    CHECK(targets == 2);
    const char* id = nullptr;
    CHECK(marvv_log_target_id(log, 1, &id) == MARVV_OK);
    CHECK(std::string(id) == "V2");
    CHECK(marvv_log_target_id(log, 2, &id) == MARVV_ERR_OUT_OF_BOUNDS);

    marvv_report* r = nullptr;
    REQUIRE(marvv_report_compute(log, &r) == MARVV_OK);
    double mpd = 0, rv = -1, rpsi = -1;
    CHECK(marvv_report_mpd(r, "V2", &mpd) == MARVV_OK);
    CHECK(mpd > 0);
    CHECK(marvv_report_mpd(r, "V9", &mpd) != MARVV_OK);
    CHECK(marvv_report_rmse_speed(r, &rv) == MARVV_OK);
    CHECK(marvv_report_rmse_heading(r, &rpsi) == MARVV_OK);
    CHECK(rv >= 0);
    CHECK(rpsi >= 0);
    int grounded = -1;
    CHECK(marvv_report_grounded(r, &grounded) == MARVV_OK);
    CHECK(grounded == 0);

    const auto dir = scratch() / "export";
    fs::remove_all(dir);
    CHECK(marvv_export(log, r, dir.string().c_str()) == MARVV_OK);
    CHECK(fs::exists(dir / "report.json"));
    marvv_log* back = nullptr;
    REQUIRE(marvv_log_load((dir / "log.csv").string().c_str(), &back) == MARVV_OK);
    marvv_report* r2 = nullptr;
    REQUIRE(marvv_report_compute(back, &r2) == MARVV_OK);
    size_t n1 = 0, n2 = 0;
    CHECK(marvv_report_to_json(r, nullptr, 0, &n1) == MARVV_OK);
    CHECK(marvv_report_to_json(r2, nullptr, 0, &n2) == MARVV_OK);
    std::string j1(n1, '\0'), j2(n2, '\0');
    marvv_report_to_json(r, j1.data(), n1, &n1);
    marvv_report_to_json(r2, j2.data(), n2, &n2);
    CHECK(j1 == j2);
    marvv_report_free(r2);
    marvv_log_free(back);
    marvv_report_free(r);
    marvv_log_free(log);
    marvv_scenario_free(s);
}

TEST_CASE("concurrent runs are independent") {
    marvv_scenario* s = short_reference(20);
    std::vector<std::string> out(4);
    std::vector<std::thread> pool;
    for (int i = 0; i < 4; ++i) {
        pool.emplace_back([&, i] {
            marvv_log* log = nullptr;
            if (marvv_run(s, &log) != MARVV_OK) return;
            const auto p = scratch() / ("thread" + std::to_string(i) + ".csv");
            marvv_log_write(log, p.string().c_str());
            std::ifstream in(p);
            out[i].assign(std::istreambuf_iterator<char>(in), {});
            marvv_log_free(log);
        });
    }
    for (auto& t : pool) t.join();
    CHECK(!out[0].empty());
    for (int i = 1; i < 4; ++i) CHECK(out[i] == out[0]);
    marvv_scenario_free(s);
}

TEST_CASE("grid handles") {
    const auto dir = scratch();
    const auto a = dir / "tile_a.asc", b = dir / "tile_b.asc";
    std::ofstream(a) << "ncols 2\nnrows 2\nxllcorner 0\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n1 2\n3 4\n";
    std::ofstream(b) << "ncols 3\nnrows 2\nxllcorner 20\nyllcorner 0\ncellsize 10\nNODATA_value -9999\n5 6 7\n8 9 10\n";
    marvv_grid* ga = nullptr;
    marvv_grid* gb = nullptr;
    REQUIRE(marvv_grid_load(a.string().c_str(), MARVV_RASTER_ASCII_GRID, &ga) == MARVV_OK);
    REQUIRE(marvv_grid_load(b.string().c_str(), MARVV_RASTER_ASCII_GRID, &gb) == MARVV_OK);
    const marvv_grid* tiles[] = {gb, ga};  // order does not matter
    marvv_grid* merged = nullptr;
    REQUIRE(marvv_grid_stitch(tiles, 2, &merged) == MARVV_OK);
    size_t rows = 0, cols = 0;
    double cs = 0;
    CHECK(marvv_grid_dims(merged, &rows, &cols, &cs) == MARVV_OK);
    CHECK(rows == 2);
    CHECK(cols == 5);
    CHECK(cs == 10.0);
    double d = 0;
    CHECK(marvv_grid_depth_at(merged, 45, 5, &d) == MARVV_OK);
    CHECK(d == doctest::Approx(10.0));
    CHECK(marvv_grid_depth_at(merged, 500, 5, &d) == MARVV_ERR_OUT_OF_BOUNDS);

    double lo = 0, hi = 0;
    const auto raw = dir / "merged.raw16";
    CHECK(marvv_grid_export_heightmap(merged, raw.string().c_str(), &lo, &hi) == MARVV_OK);
    CHECK(lo == 1.0);
    CHECK(hi == 10.0);
    marvv_grid* reread = nullptr;
    REQUIRE(marvv_grid_load(raw.string().c_str(), MARVV_RASTER_RAW16, &reread) == MARVV_OK);
    CHECK(marvv_grid_depth_at(reread, 45, 5, &d) == MARVV_OK);
    CHECK(std::abs(d - 10.0) <= 9.0 / 65535.0);
    size_t blocked = 0;
    CHECK(marvv_grid_write_occupancy(merged, 4.0, 1.0, (dir / "occ.asc").string().c_str(), &blocked) == MARVV_OK);
    CHECK(blocked == 4);
    CHECK(marvv_grid_write_occupancy(merged, 0.0, 1.0, (dir / "occ.asc").string().c_str(), &blocked) != MARVV_OK);
    CHECK(marvv_grid_stitch(tiles, 0, &merged) == MARVV_ERR_INVALID_ARGUMENT);
    marvv_grid_free(reread);
    marvv_grid_free(merged);
    marvv_grid_free(ga);
    marvv_grid_free(gb);
}
