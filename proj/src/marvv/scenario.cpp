#include "marvv/scenario.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "marvv/error.hpp"

namespace marvv {

using nlohmann::json;

namespace {

constexpr double kEarthRadius = 6371008.8;

// Cursor over one JSON object that tracks consumed keys so unknown ones can be
// reported with their full path.
class Node {
public:
    Node(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) {
            fail(ErrorCode::validation, "scenario " + where() + ": expected an object");
        }
    }

    bool has(const std::string& key) const { return j_.contains(key); }

    Node child(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) {
            fail(ErrorCode::validation, "scenario " + path_ + "/" + key + ": required field is missing");
        }
        return Node(j_.at(key), path_ + "/" + key);
    }

    const json& raw(const std::string& key) {
        used_.insert(key);
        if (!j_.contains(key)) {
            fail(ErrorCode::validation, "scenario " + path_ + "/" + key + ": required field is missing");
        }
        return j_.at(key);
    }

    double num(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number()) {
            fail(ErrorCode::validation, "scenario " + path_ + "/" + key + ": expected a number");
        }
        const double d = v.get<double>();
        if (!std::isfinite(d)) {
            fail(ErrorCode::validation, "scenario " + path_ + "/" + key + ": must be finite");
        }
        return d;
    }

    double num(const std::string& key, double def) { return has(key) ? num(key) : (used_.insert(key), def); }

    std::string str(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_string()) {
            fail(ErrorCode::validation, "scenario " + path_ + "/" + key + ": expected a string");
        }
        return v.get<std::string>();
    }

    std::string str(const std::string& key, const std::string& def) { return has(key) ? str(key) : (used_.insert(key), def); }

    std::uint64_t u64(const std::string& key) {
        const json& v = raw(key);
        if (!v.is_number_unsigned() && !(v.is_number_integer() && v.get<long long>() >= 0)) {
            fail(ErrorCode::validation, "scenario " + path_ + "/" + key + ": expected a non-negative integer");
        }
        return v.get<std::uint64_t>();
    }

    std::string path(const std::string& key) const { return path_ + "/" + key; }
    std::string where() const { return path_.empty() ? "/" : path_; }

    void finish() const {
        for (const auto& [k, v] : j_.items()) {
            if (!used_.contains(k)) {
                fail(ErrorCode::validation, "scenario " + path_ + "/" + k + ": unknown field");
            }
        }
    }

private:
    const json& j_;
    std::string path_;
    std::set<std::string> used_;
};

Vec2 read_xy(const json& v, const std::string& path) {
    if (!v.is_array() || v.size() != 2 || !v[0].is_number() || !v[1].is_number()) {
        fail(ErrorCode::validation, "scenario " + path + ": expected [x, y]");
    }
    return {v[0].get<double>(), v[1].get<double>()};
}

std::vector<Vec2> read_points(const json& v, const std::string& path) {
    if (!v.is_array()) {
        fail(ErrorCode::validation, "scenario " + path + ": expected an array of [x, y]");
    }
    std::vector<Vec2> pts;
    for (std::size_t i = 0; i < v.size(); ++i) {
        pts.push_back(read_xy(v[i], path + "/" + std::to_string(i)));
    }
    return pts;
}

json xy(Vec2 p) { return json::array({p.x, p.y}); }

PiecewiseLinear read_pwl(const json& v, const std::string& path) {
    if (!v.is_array() || v.empty()) {
        fail(ErrorCode::validation, "scenario " + path + ": expected an array of [severity, value] knots");
    }
    std::vector<std::pair<double, double>> knots;
    for (std::size_t i = 0; i < v.size(); ++i) {
        const Vec2 k = read_xy(v[i], path + "/" + std::to_string(i));
        knots.emplace_back(k.x, k.y);
    }
    try {
        return PiecewiseLinear(std::move(knots));
    } catch (const Error& e) {
        fail(ErrorCode::validation, "scenario " + path + ": " + e.what());
    }
}

json pwl(const PiecewiseLinear& f) {
    json a = json::array();
    for (const auto& [x, y] : f.knots()) a.push_back({x, y});
    return a;
}

const char* kind_name(ObstacleKind k) {
    switch (k) {
        case ObstacleKind::vessel: return "vessel";
        case ObstacleKind::terrain: return "terrain";
        case ObstacleKind::infrastructure: return "infrastructure";
    }
    return "terrain";
}

ObstacleKind parse_kind(const std::string& s, const std::string& path) {
    if (s == "vessel") return ObstacleKind::vessel;
    if (s == "terrain") return ObstacleKind::terrain;
    if (s == "infrastructure") return ObstacleKind::infrastructure;
    fail(ErrorCode::validation, "scenario " + path + ": unknown obstacle kind '" + s + "'");
}

void read_vessel_params(Node n, VesselParams& p) {
    p.length = n.num("length", p.length);
    p.beam = n.num("beam", p.beam);
    p.draft = n.num("draft", p.draft);
    p.nomoto_gain = n.num("nomoto_gain", p.nomoto_gain);
    p.nomoto_time_constant = n.num("nomoto_time_constant", p.nomoto_time_constant);
    p.speed_time_constant = n.num("speed_time_constant", p.speed_time_constant);
    p.sway_time_constant = n.num("sway_time_constant", p.sway_time_constant);
    p.max_speed = n.num("max_speed", p.max_speed);
    p.max_rudder = deg2rad(n.num("max_rudder_deg", rad2deg(p.max_rudder)));
    p.rudder_rate_limit = deg2rad(n.num("rudder_rate_deg_s", rad2deg(p.rudder_rate_limit)));
    p.wave_force_gain = n.num("wave_force_gain", p.wave_force_gain);
    n.finish();
}

json vessel_params_json(const VesselParams& p) {
    return {{"length", p.length},
            {"beam", p.beam},
            {"draft", p.draft},
            {"nomoto_gain", p.nomoto_gain},
            {"nomoto_time_constant", p.nomoto_time_constant},
            {"speed_time_constant", p.speed_time_constant},
            {"sway_time_constant", p.sway_time_constant},
            {"max_speed", p.max_speed},
            {"max_rudder_deg", rad2deg(p.max_rudder)},
            {"rudder_rate_deg_s", rad2deg(p.rudder_rate_limit)},
            {"wave_force_gain", p.wave_force_gain}};
}

void read_radar(Node n, Scenario& s) {
    s.radar_preset = n.str("preset", s.radar_preset);
    try {
        s.radar = radar_preset(s.radar_preset);
    } catch (const Error& e) {
        fail(ErrorCode::validation, "scenario " + n.path("preset") + ": " + e.what());
    }
    RadarConfig& r = s.radar;
    r.frequency = n.num("frequency_hz", r.frequency);
    r.transmit_power = n.num("transmit_power_w", r.transmit_power);
    r.antenna_gain_db = n.num("antenna_gain_db", r.antenna_gain_db);
    r.bandwidth = n.num("bandwidth_hz", r.bandwidth);
    r.dwell_time = n.num("dwell_time_s", r.dwell_time);
    r.noise_figure_db = n.num("noise_figure_db", r.noise_figure_db);
    r.system_temperature = n.num("system_temperature_k", r.system_temperature);
    r.max_range = n.num("max_range_m", r.max_range);
    r.update_rate = n.num("update_rate_hz", r.update_rate);
    r.track_window = n.num("track_window_s", r.track_window);
    const std::string pol = n.str("polarization", r.polarization == Polarization::horizontal ? "horizontal" : "vertical");
    if (pol == "horizontal") r.polarization = Polarization::horizontal;
    else if (pol == "vertical") r.polarization = Polarization::vertical;
    else fail(ErrorCode::validation, "scenario " + n.path("polarization") + ": expected horizontal or vertical");
    const std::string mode = n.str("path_mode", r.path_mode == PathMode::round_trip ? "round_trip" : "one_way");
    if (mode == "round_trip") r.path_mode = PathMode::round_trip;
    else if (mode == "one_way") r.path_mode = PathMode::one_way;
    else fail(ErrorCode::validation, "scenario " + n.path("path_mode") + ": expected round_trip or one_way");
    if (n.has("snr_floor_db")) {
        const json& v = n.raw("snr_floor_db");
        if (!v.is_null()) r.snr_floor_db = n.num("snr_floor_db");
    }
    n.finish();
}

json radar_json(const Scenario& s) {
    const RadarConfig& r = s.radar;
    return {{"preset", s.radar_preset},
            {"frequency_hz", r.frequency},
            {"transmit_power_w", r.transmit_power},
            {"antenna_gain_db", r.antenna_gain_db},
            {"bandwidth_hz", r.bandwidth},
            {"dwell_time_s", r.dwell_time},
            {"noise_figure_db", r.noise_figure_db},
            {"system_temperature_k", r.system_temperature},
            {"max_range_m", r.max_range},
            {"update_rate_hz", r.update_rate},
            {"track_window_s", r.track_window},
            {"polarization", r.polarization == Polarization::horizontal ? "horizontal" : "vertical"},
            {"path_mode", r.path_mode == PathMode::round_trip ? "round_trip" : "one_way"},
            {"snr_floor_db", r.snr_floor_db ? json(*r.snr_floor_db) : json(nullptr)}};
}

void read_autonomy(Node n, AutonomyConfig& a) {
    if (n.has("fusion")) {
        Node f = n.child("fusion");
        a.fusion.alpha = f.num("alpha", a.fusion.alpha);
        a.fusion.beta = f.num("beta", a.fusion.beta);
        f.finish();
    }
    if (n.has("thresholds")) {
        Node t = n.child("thresholds");
        a.thresholds.distance = t.num("dcpa_m", a.thresholds.distance);
        a.thresholds.time = t.num("tcpa_s", a.thresholds.time);
        t.finish();
    }
    a.trigger_release_delay = n.num("trigger_release_delay_s", a.trigger_release_delay);
    if (n.has("cdca")) {
        Node c = n.child("cdca");
        a.cdca.heading_span = deg2rad(c.num("heading_span_deg", rad2deg(a.cdca.heading_span)));
        a.cdca.heading_step = deg2rad(c.num("heading_step_deg", rad2deg(a.cdca.heading_step)));
        if (c.has("speed_factors")) {
            const json& v = c.raw("speed_factors");
            if (!v.is_array() || v.empty()) {
                fail(ErrorCode::validation, "scenario " + c.path("speed_factors") + ": expected a non-empty array");
            }
            a.cdca.speed_factors.clear();
            for (const auto& f : v) {
                if (!f.is_number()) fail(ErrorCode::validation, "scenario " + c.path("speed_factors") + ": expected numbers");
                a.cdca.speed_factors.push_back(f.get<double>());
            }
        }
        a.cdca.safety_radius = c.num("safety_radius_m", a.cdca.safety_radius);
        a.cdca.clearance_margin = c.num("clearance_margin_m", a.cdca.clearance_margin);
        a.cdca.uncertainty_gain = c.num("uncertainty_gain", a.cdca.uncertainty_gain);
        a.cdca.horizon = c.num("horizon_s", a.cdca.horizon);
        a.cdca.lead_time = c.num("lead_time_s", a.cdca.lead_time);
        a.cdca.rejoin_ahead = c.num("rejoin_ahead_m", a.cdca.rejoin_ahead);
        c.finish();
    }
    if (n.has("guidance")) {
        Node g = n.child("guidance");
        a.guidance.lookahead = g.num("lookahead_m", a.guidance.lookahead);
        a.guidance.accept_radius = g.num("accept_radius_m", a.guidance.accept_radius);
        g.finish();
    }
    if (n.has("control")) {
        Node c = n.child("control");
        a.control.heading_kp = c.num("heading_kp", a.control.heading_kp);
        a.control.heading_ki = c.num("heading_ki", a.control.heading_ki);
        a.control.heading_kd = c.num("heading_kd", a.control.heading_kd);
        a.control.speed_kp = c.num("speed_kp", a.control.speed_kp);
        a.control.speed_ki = c.num("speed_ki", a.control.speed_ki);
        c.finish();
    }
    if (n.has("ukc")) {
        Node u = n.child("ukc");
        const std::string mode = u.str("mode", a.ukc.mode == UkcMode::fixed ? "fixed" : "fraction_of_draft");
        if (mode == "fixed") a.ukc.mode = UkcMode::fixed;
        else if (mode == "fraction_of_draft") a.ukc.mode = UkcMode::fraction_of_draft;
        else fail(ErrorCode::validation, "scenario " + u.path("mode") + ": expected fixed or fraction_of_draft");
        a.ukc.value = u.num("value", a.ukc.value);
        u.finish();
    }
    n.finish();
}

json autonomy_json(const AutonomyConfig& a) {
    return {{"fusion", {{"alpha", a.fusion.alpha}, {"beta", a.fusion.beta}}},
            {"thresholds", {{"dcpa_m", a.thresholds.distance}, {"tcpa_s", a.thresholds.time}}},
            {"trigger_release_delay_s", a.trigger_release_delay},
            {"cdca",
             {{"heading_span_deg", rad2deg(a.cdca.heading_span)},
              {"heading_step_deg", rad2deg(a.cdca.heading_step)},
              {"speed_factors", a.cdca.speed_factors},
              {"safety_radius_m", a.cdca.safety_radius},
              {"clearance_margin_m", a.cdca.clearance_margin},
              {"uncertainty_gain", a.cdca.uncertainty_gain},
              {"horizon_s", a.cdca.horizon},
              {"lead_time_s", a.cdca.lead_time},
              {"rejoin_ahead_m", a.cdca.rejoin_ahead}}},
            {"guidance", {{"lookahead_m", a.guidance.lookahead}, {"accept_radius_m", a.guidance.accept_radius}}},
            {"control",
             {{"heading_kp", a.control.heading_kp},
              {"heading_ki", a.control.heading_ki},
              {"heading_kd", a.control.heading_kd},
              {"speed_kp", a.control.speed_kp},
              {"speed_ki", a.control.speed_ki}}},
            {"ukc", {{"mode", a.ukc.mode == UkcMode::fixed ? "fixed" : "fraction_of_draft"}, {"value", a.ukc.value}}}};
}

}  // namespace

Vec2 GeoBounds::to_local(double lat, double lon) const {
    const double lat0 = 0.5 * (lat_min + lat_max);
    const double lon0 = 0.5 * (lon_min + lon_max);
    return {kEarthRadius * std::cos(deg2rad(lat0)) * deg2rad(lon - lon0), kEarthRadius * deg2rad(lat - lat0)};
}

bool GeoBounds::contains_local(Vec2 p) const {
    const Vec2 lo = local_min(), hi = local_max();
    return p.x >= lo.x && p.x <= hi.x && p.y >= lo.y && p.y <= hi.y;
}

WeatherSeverity weather_preset(std::string_view name) {
    if (name == "ideal") return {0.0, 0.0, 0.0};
    if (name == "moderate") return {5.0, 5.0, 5.0};
    if (name == "severe") return {10.0, 10.0, 10.0};
    fail(ErrorCode::invalid_argument, "unknown weather preset '" + std::string(name) + "' (expected ideal, moderate, severe)");
}

void validate(const Scenario& s) {
    require(s.dt > 0.0 && s.dt <= 0.2, ErrorCode::validation, "scenario /dt: must be in (0, 0.2] s");
    require(s.duration > 0.0, ErrorCode::validation, "scenario /duration: must be positive");
    const double steps = s.duration / s.dt;
    require(std::abs(steps - std::round(steps)) < 1e-6 * std::max(1.0, steps), ErrorCode::validation,
            "scenario /duration: must be a whole number of dt steps");
    require(s.area.lat_max > s.area.lat_min && s.area.lon_max > s.area.lon_min, ErrorCode::validation,
            "scenario /area: bounds must be increasing");
    require(s.area.lat_min >= -90.0 && s.area.lat_max <= 90.0, ErrorCode::validation, "scenario /area: latitude out of range");
    try {
        validate(s.weather);
    } catch (const Error& e) {
        fail(ErrorCode::validation, std::string("scenario /weather: ") + e.what());
    }
    validate(s.radar);
    validate(s.ego.params);
    validate(s.autonomy.fusion);
    require(s.autonomy.thresholds.distance > 0.0 && s.autonomy.thresholds.time > 0.0, ErrorCode::validation,
            "scenario /autonomy/thresholds: must be positive");
    require(s.autonomy.cdca.clearance_margin >= 0.0 && s.autonomy.cdca.uncertainty_gain >= 0.0, ErrorCode::validation,
            "scenario /autonomy/cdca: clearance margin and uncertainty gain must be non-negative");
    require(s.autonomy.cdca.safety_radius > 0.0 && s.autonomy.cdca.horizon > 0.0 && s.autonomy.cdca.heading_step > 0.0,
            ErrorCode::validation, "scenario /autonomy/cdca: radius, horizon and step must be positive");
    require(s.autonomy.guidance.lookahead > 0.0 && s.autonomy.guidance.accept_radius > 0.0, ErrorCode::validation,
            "scenario /autonomy/guidance: lookahead and accept radius must be positive");
    require(s.autonomy.ukc.value >= 0.0, ErrorCode::validation, "scenario /autonomy/ukc/value: must be non-negative");
    require(s.ego.cruise_speed > 0.0 && s.ego.cruise_speed <= s.ego.params.max_speed, ErrorCode::validation,
            "scenario /ego/cruise_speed: must be in (0, max_speed]");
    require(s.ego.initial.speed >= 0.0, ErrorCode::validation, "scenario /ego/initial/speed: must be non-negative");
    require(s.bathymetry.kind == BathymetrySource::Kind::raster ||
                (s.bathymetry.flat_depth > 0.0 && s.bathymetry.cell_size > 0.0),
            ErrorCode::validation, "scenario /bathymetry: flat depth and cell size must be positive");
    require(s.sea.components >= 1 && s.sea.omega_min > 0.0 && s.sea.omega_max > s.sea.omega_min && s.sea.gamma_shape >= 1.0,
            ErrorCode::validation, "scenario /sea: invalid spectrum discretisation");

    auto inside = [&](Vec2 p, const std::string& what) {
        if (!s.area.contains_local(p)) {
            std::ostringstream os;
            os << "scenario " << what << ": position (" << p.x << ", " << p.y << ") lies outside the area";
            fail(ErrorCode::validation, os.str());
        }
    };
    inside(s.ego.initial.position, "/ego/initial");
    inside(s.ego.goal, "/ego/goal");
    std::set<std::string> ids;
    for (std::size_t i = 0; i < s.targets.size(); ++i) {
        const auto& t = s.targets[i];
        const std::string path = "/targets/" + std::to_string(i);
        require(!t.id.empty() && t.id != "ego", ErrorCode::validation, "scenario " + path + "/id: must be non-empty and not 'ego'");
        require(t.id.find_first_of(",\"\n ") == std::string::npos, ErrorCode::validation,
                "scenario " + path + "/id: must not contain commas, quotes or spaces");
        require(ids.insert(t.id).second, ErrorCode::validation, "scenario " + path + "/id: duplicate target id");
        require(t.speed >= 0.0 && t.rcs > 0.0 && t.length > 0.0 && t.beam > 0.0, ErrorCode::validation,
                "scenario " + path + ": speed must be >= 0 and rcs/length/beam positive");
        inside(t.position, path);
    }
}

Scenario parse_scenario(const std::string& json_text, const std::filesystem::path& base_dir) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::parse_error& e) {
        fail(ErrorCode::parse, std::string("scenario is not valid JSON: ") + e.what());
    }
    Scenario s;
    s.base_dir = base_dir;
    Node root(j, "");
    const double version = root.num("schema_version");
    if (version != kScenarioSchemaVersion) {
        fail(ErrorCode::validation, "scenario /schema_version: unsupported version " + std::to_string(version));
    }
    s.name = root.str("name", s.name);
    {
        Node a = root.child("area");
        s.area.lat_min = a.num("lat_min");
        s.area.lat_max = a.num("lat_max");
        s.area.lon_min = a.num("lon_min");
        s.area.lon_max = a.num("lon_max");
        a.finish();
    }
    if (root.has("bathymetry")) {
        Node b = root.child("bathymetry");
        const std::string src = b.str("source");
        if (src == "flat") {
            s.bathymetry.kind = BathymetrySource::Kind::flat;
            s.bathymetry.flat_depth = b.num("depth_m");
            s.bathymetry.cell_size = b.num("cell_size_m", s.bathymetry.cell_size);
        } else if (src == "raster") {
            s.bathymetry.kind = BathymetrySource::Kind::raster;
            s.bathymetry.path = b.str("path");
            const std::string fmt = b.str("format", "ascii_grid");
            if (fmt == "ascii_grid") s.bathymetry.format = RasterFormat::ascii_grid;
            else if (fmt == "raw16") s.bathymetry.format = RasterFormat::raw16;
            else fail(ErrorCode::validation, "scenario " + b.path("format") + ": expected ascii_grid or raw16");
        } else {
            fail(ErrorCode::validation, "scenario " + b.path("source") + ": expected flat or raster");
        }
        b.finish();
    }
    if (root.has("weather")) {
        Node w = root.child("weather");
        s.weather.rain = w.num("rain", 0.0);
        s.weather.fog = w.num("fog", 0.0);
        s.weather.sea = w.num("sea", 0.0);
        if (w.has("severity_map")) {
            Node m = w.child("severity_map");
            if (m.has("rain_rate_mmh")) s.severity_map.rain_rate = read_pwl(m.raw("rain_rate_mmh"), m.path("rain_rate_mmh"));
            if (m.has("liquid_water_gm3")) s.severity_map.liquid_water = read_pwl(m.raw("liquid_water_gm3"), m.path("liquid_water_gm3"));
            if (m.has("wave_height_m")) s.severity_map.wave_height = read_pwl(m.raw("wave_height_m"), m.path("wave_height_m"));
            if (m.has("peak_period_s")) s.severity_map.peak_period = read_pwl(m.raw("peak_period_s"), m.path("peak_period_s"));
            s.severity_map.visibility_coeff = m.num("visibility_coeff", s.severity_map.visibility_coeff);
            s.severity_map.max_visibility = m.num("max_visibility_m", s.severity_map.max_visibility);
            s.severity_map.air_temperature = m.num("air_temperature_k", s.severity_map.air_temperature);
            m.finish();
        }
        w.finish();
    }
    if (root.has("radar")) {
        read_radar(root.child("radar"), s);
    }
    {
        Node e = root.child("ego");
        if (e.has("params")) read_vessel_params(e.child("params"), s.ego.params);
        Node init = e.child("initial");
        s.ego.initial.position = {init.num("x"), init.num("y")};
        s.ego.initial.heading = wrap_angle(deg2rad(init.num("heading_deg")));
        s.ego.initial.speed = init.num("speed");
        init.finish();
        s.ego.initial.propeller_setting = std::clamp(s.ego.initial.speed / s.ego.params.max_speed, 0.0, 1.0);
        s.ego.goal = read_xy(e.raw("goal"), e.path("goal"));
        s.ego.cruise_speed = e.num("cruise_speed", s.ego.initial.speed > 0.0 ? s.ego.initial.speed : s.ego.cruise_speed);
        e.finish();
    }
    if (root.has("targets")) {
        const json& arr = root.raw("targets");
        if (!arr.is_array()) fail(ErrorCode::validation, "scenario /targets: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Node t(arr[i], "/targets/" + std::to_string(i));
            TargetSpec ts;
            ts.id = t.str("id");
            ts.position = {t.num("x"), t.num("y")};
            ts.heading = wrap_angle(deg2rad(t.num("heading_deg")));
            ts.speed = t.num("speed");
            if (t.has("waypoints")) ts.waypoints = read_points(t.raw("waypoints"), t.path("waypoints"));
            ts.rcs = t.num("rcs_m2", ts.rcs);
            ts.length = t.num("length", ts.length);
            ts.beam = t.num("beam", ts.beam);
            t.finish();
            s.targets.push_back(std::move(ts));
        }
    }
    if (root.has("obstacles")) {
        const json& arr = root.raw("obstacles");
        if (!arr.is_array()) fail(ErrorCode::validation, "scenario /obstacles: expected an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Node o(arr[i], "/obstacles/" + std::to_string(i));
            const std::string id = o.str("id");
            const ObstacleKind kind = parse_kind(o.str("kind", "infrastructure"), o.path("kind"));
            auto pts = read_points(o.raw("footprint"), o.path("footprint"));
            o.finish();
            try {
                s.obstacles.emplace_back(id, std::move(pts), kind);
            } catch (const Error& e) {
                fail(ErrorCode::validation, "scenario /obstacles/" + std::to_string(i) + ": " + e.what());
            }
        }
    }
    if (root.has("sea")) {
        Node m = root.child("sea");
        s.sea.gamma_shape = m.num("gamma", s.sea.gamma_shape);
        const double n = m.num("components", static_cast<double>(s.sea.components));
        if (n < 1 || n != std::floor(n)) fail(ErrorCode::validation, "scenario /sea/components: expected a positive integer");
        s.sea.components = static_cast<std::size_t>(n);
        s.sea.omega_min = m.num("omega_min", s.sea.omega_min);
        s.sea.omega_max = m.num("omega_max", s.sea.omega_max);
        s.sea.direction = deg2rad(m.num("direction_deg", rad2deg(s.sea.direction)));
        m.finish();
    }
    if (root.has("autonomy")) {
        read_autonomy(root.child("autonomy"), s.autonomy);
    }
    s.duration = root.num("duration");
    s.dt = root.num("dt");
    if (root.has("seed")) s.seed = root.u64("seed");
    root.finish();
    validate(s);
    return s;
}

Scenario load_scenario(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) {
        fail(ErrorCode::io, "cannot open scenario '" + path.string() + "'");
    }
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_scenario(ss.str(), path.parent_path());
}

std::string scenario_to_json(const Scenario& s, bool include_seed) {
    json j;
    j["schema_version"] = kScenarioSchemaVersion;
    j["name"] = s.name;
    j["area"] = {{"lat_min", s.area.lat_min}, {"lat_max", s.area.lat_max}, {"lon_min", s.area.lon_min}, {"lon_max", s.area.lon_max}};
    if (s.bathymetry.kind == BathymetrySource::Kind::flat) {
        j["bathymetry"] = {{"source", "flat"}, {"depth_m", s.bathymetry.flat_depth}, {"cell_size_m", s.bathymetry.cell_size}};
    } else {
        j["bathymetry"] = {{"source", "raster"},
                           {"path", s.bathymetry.path},
                           {"format", s.bathymetry.format == RasterFormat::ascii_grid ? "ascii_grid" : "raw16"}};
    }
    j["weather"] = {{"rain", s.weather.rain},
                    {"fog", s.weather.fog},
                    {"sea", s.weather.sea},
                    {"severity_map",
                     {{"rain_rate_mmh", pwl(s.severity_map.rain_rate)},
                      {"liquid_water_gm3", pwl(s.severity_map.liquid_water)},
                      {"wave_height_m", pwl(s.severity_map.wave_height)},
                      {"peak_period_s", pwl(s.severity_map.peak_period)},
                      {"visibility_coeff", s.severity_map.visibility_coeff},
                      {"max_visibility_m", s.severity_map.max_visibility},
                      {"air_temperature_k", s.severity_map.air_temperature}}}};
    j["radar"] = radar_json(s);
    j["ego"] = {{"params", vessel_params_json(s.ego.params)},
                {"initial",
                 {{"x", s.ego.initial.position.x},
                  {"y", s.ego.initial.position.y},
                  {"heading_deg", rad2deg(s.ego.initial.heading)},
                  {"speed", s.ego.initial.speed}}},
                {"goal", xy(s.ego.goal)},
                {"cruise_speed", s.ego.cruise_speed}};
    json targets = json::array();
    for (const auto& t : s.targets) {
        json w = json::array();
        for (const auto& p : t.waypoints) w.push_back(xy(p));
        targets.push_back({{"id", t.id},
                           {"x", t.position.x},
                           {"y", t.position.y},
                           {"heading_deg", rad2deg(t.heading)},
                           {"speed", t.speed},
                           {"waypoints", w},
                           {"rcs_m2", t.rcs},
                           {"length", t.length},
                           {"beam", t.beam}});
    }
    j["targets"] = targets;
    json obstacles = json::array();
    for (const auto& o : s.obstacles) {
        json f = json::array();
        for (const auto& p : o.footprint()) f.push_back(xy(p));
        obstacles.push_back({{"id", o.id()}, {"kind", kind_name(o.kind())}, {"footprint", f}});
    }
    j["obstacles"] = obstacles;
    j["sea"] = {{"gamma", s.sea.gamma_shape},
                {"components", s.sea.components},
                {"omega_min", s.sea.omega_min},
                {"omega_max", s.sea.omega_max},
                {"direction_deg", rad2deg(s.sea.direction)}};
    j["autonomy"] = autonomy_json(s.autonomy);
    j["duration"] = s.duration;
    j["dt"] = s.dt;
    if (include_seed) j["seed"] = s.seed;
    return j.dump(2);
}

std::uint64_t scenario_hash(const Scenario& s) {
    const std::string text = scenario_to_json(s, false);
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return h;
}

Scenario build_reference_scenario() {
    Scenario s;
    s.name = "reference-head-on-crossing";
    s.area = {33.5666, 33.7780, -118.2838, -118.0318};
    s.bathymetry.kind = BathymetrySource::Kind::flat;
    s.bathymetry.flat_depth = 40.0;
    s.bathymetry.cell_size = 100.0;
    s.radar_preset = "nominal";
    s.radar = radar_preset("nominal");
    s.ego.params = VesselParams{};  // S175: 175.0 x 25.4 x 9.5 m
    s.ego.initial.position = {0.0, 0.0};
    s.ego.initial.heading = 0.0;
    s.ego.initial.speed = 10.0;
    s.ego.initial.propeller_setting = 10.0 / s.ego.params.max_speed;
    s.ego.goal = {0.0, 11000.0};
    s.ego.cruise_speed = 10.0;

    TargetSpec v1;
    v1.id = "V1";
    v1.position = {3500.0, 3500.0};
    v1.heading = wrap_angle(deg2rad(270.0));
    v1.speed = 10.0;
    TargetSpec v2;
    v2.id = "V2";
    v2.position = {0.0, 7000.0};
    v2.heading = deg2rad(180.0);
    v2.speed = 10.0;
    s.targets = {v1, v2};

    s.duration = 600.0;
    s.dt = 0.05;
    s.seed = 1;
    return s;
}

}  // namespace marvv
