#include "marvv/log.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "marvv/error.hpp"
#include "marvv/format.hpp"

namespace marvv {

namespace {

// Single field list shared by writer and reader so the two cannot drift apart.
template <class F>
void visit_tick(TickRecord& r, F&& f) {
    f("tick", r.tick);
    f("time", r.time);
    f("pipeline", r.pipeline);
    f("ego_x", r.ego.position.x);
    f("ego_y", r.ego.position.y);
    f("ego_heading_rad", r.ego.heading);
    f("ego_speed", r.ego.speed);
    f("ego_sway", r.ego.sway_velocity);
    f("ego_yaw_rate", r.ego.yaw_rate);
    f("ego_rudder", r.ego.rudder_angle);
    f("ego_propeller", r.ego.propeller_setting);
    f("desired_heading_rad", r.desired_heading);
    f("desired_speed", r.desired_speed);
    f("cmd_rudder", r.command.rudder);
    f("cmd_propeller", r.command.propeller);
    f("cross_track", r.cross_track);
    f("depth", r.depth);
    f("grounded", r.grounded);
    f("scan", r.scan);
    f("trigger_raw", r.trigger_raw);
    f("trigger", r.trigger);
    f("planner", r.planner);
    f("plan_id", r.plan_id);
    f("plan_feasible", r.plan_feasible);
    f("active_waypoint", r.active_waypoint);
}

template <class F>
void visit_target(TargetTickRecord& t, F&& f) {
    f("x", t.position.x);
    f("y", t.position.y);
    f("heading_rad", t.heading);
    f("speed", t.speed);
    f("detected", t.detected);
    f("range", t.range);
    f("bearing_rad", t.bearing);
    f("meas_x", t.measured_position.x);
    f("meas_y", t.measured_position.y);
    f("meas_vx", t.measured_velocity.x);
    f("meas_vy", t.measured_velocity.y);
    f("snr_db", t.snr_db);
    f("sigma_range", t.sigma_range);
    f("sigma_velocity", t.sigma_velocity);
    f("has_estimate", t.has_estimate);
    f("est_x", t.estimated_position.x);
    f("est_y", t.estimated_position.y);
    f("est_vx", t.estimated_velocity.x);
    f("est_vy", t.estimated_velocity.y);
    f("dcpa", t.dcpa);
    f("tcpa", t.tcpa);
    f("flagged", t.flagged);
}

struct Writer {
    std::string& out;
    bool first = true;

    void sep() {
        if (!first) out += ',';
        first = false;
    }
    void operator()(const char*, double& v) { sep(); append_double(out, v); }
    void operator()(const char*, bool& v) { sep(); out += v ? '1' : '0'; }
    void operator()(const char*, std::size_t& v) { sep(); out += std::to_string(v); }
    void operator()(const char*, std::string& v) { sep(); out += v; }
    void operator()(const char*, PlannerKind& v) { sep(); out += v == PlannerKind::global ? "global" : "cdca"; }
};

struct Names {
    std::vector<std::string>& out;
    std::string prefix;
    template <class T>
    void operator()(const char* name, T&) { out.push_back(prefix + name); }
};

struct Reader {
    const std::vector<std::string_view>& fields;
    std::size_t line;
    std::size_t i = 0;

    std::string_view next(const char* name) {
        if (i >= fields.size()) {
            fail(ErrorCode::parse, "log line " + std::to_string(line) + ": missing field '" + name + "'");
        }
        return fields[i++];
    }
    [[noreturn]] void bad(const char* name, std::string_view v) {
        fail(ErrorCode::parse,
             "log line " + std::to_string(line) + ": bad value '" + std::string(v) + "' for '" + name + "'");
    }
    void operator()(const char* name, double& v) {
        auto s = next(name);
        if (!parse_double(s, v)) bad(name, s);
    }
    void operator()(const char* name, bool& v) {
        auto s = next(name);
        if (s == "1") v = true;
        else if (s == "0") v = false;
        else bad(name, s);
    }
    void operator()(const char* name, std::size_t& v) {
        auto s = next(name);
        auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        if (ec != std::errc() || p != s.data() + s.size() || s.empty()) bad(name, s);
    }
    void operator()(const char* name, std::string& v) { v = std::string(next(name)); }
    void operator()(const char* name, PlannerKind& v) {
        auto s = next(name);
        if (s == "global") v = PlannerKind::global;
        else if (s == "cdca") v = PlannerKind::cdca;
        else bad(name, s);
    }
};

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t start = 0;
    while (true) {
        const auto pos = line.find(',', start);
        if (pos == std::string_view::npos) {
            out.push_back(line.substr(start));
            return out;
        }
        out.push_back(line.substr(start, pos - start));
        start = pos + 1;
    }
}

std::string read_file(const std::filesystem::path& p) {
    std::ifstream in(p, std::ios::binary);
    if (!in) fail(ErrorCode::io, "cannot open '" + p.string() + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write_file(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write '" + p.string() + "'");
    out << text;
    if (!out) fail(ErrorCode::io, "write failed for '" + p.string() + "'");
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

std::vector<std::string> log_columns(const std::vector<std::string>& target_ids) {
    std::vector<std::string> cols;
    TickRecord r;
    visit_tick(r, Names{cols, ""});
    TargetTickRecord t;
    for (const auto& id : target_ids) visit_target(t, Names{cols, id + "."});
    return cols;
}

std::string log_to_csv(const SimulationLog& log) {
    std::string out;
    const auto cols = log_columns(log.header.target_ids);
    for (std::size_t i = 0; i < cols.size(); ++i) {
        if (i) out += ',';
        out += cols[i];
    }
    out += '\n';
    out.reserve(log.ticks.size() * cols.size() * 12);
    for (const auto& rec : log.ticks) {
        require(rec.targets.size() == log.header.target_ids.size(), ErrorCode::dimension_mismatch,
                "log tick " + std::to_string(rec.tick) + " has the wrong number of targets");
        auto& r = const_cast<TickRecord&>(rec);
        Writer w{out};
        visit_tick(r, w);
        for (auto& t : r.targets) visit_target(t, w);
        out += '\n';
    }
    return out;
}

std::string log_header_to_json(const LogHeader& h) {
    nlohmann::json j;
    j["schema_version"] = h.schema_version;
    j["build_version"] = h.build_version;
    j["scenario_hash"] = hex64(h.scenario_hash);
    j["seed"] = h.seed;
    j["dt"] = h.dt;
    j["duration"] = h.duration;
    j["safety_radius"] = h.safety_radius;
    j["target_ids"] = h.target_ids;
    j["scenario"] = nlohmann::json::parse(h.scenario_json.empty() ? "null" : h.scenario_json);
    return j.dump(2) + "\n";
}

std::filesystem::path log_header_path(const std::filesystem::path& csv_path) {
    auto p = csv_path;
    p.replace_extension(".header.json");
    return p;
}

void write_log(const SimulationLog& log, const std::filesystem::path& csv_path) {
    write_file(csv_path, log_to_csv(log));
    write_file(log_header_path(csv_path), log_header_to_json(log.header));
}

SimulationLog parse_log(const std::string& csv_text, const std::string& header_json) {
    SimulationLog log;
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(header_json);
        log.header.schema_version = j.at("schema_version").get<int>();
        log.header.build_version = j.at("build_version").get<std::string>();
        const auto hash = j.at("scenario_hash").get<std::string>();
        auto [p, ec] = std::from_chars(hash.data(), hash.data() + hash.size(), log.header.scenario_hash, 16);
        if (ec != std::errc() || p != hash.data() + hash.size()) {
            fail(ErrorCode::parse, "log header: bad scenario_hash '" + hash + "'");
        }
        log.header.seed = j.at("seed").get<std::uint64_t>();
        log.header.dt = j.at("dt").get<double>();
        log.header.duration = j.at("duration").get<double>();
        log.header.safety_radius = j.at("safety_radius").get<double>();
        log.header.target_ids = j.at("target_ids").get<std::vector<std::string>>();
        log.header.scenario_json = j.at("scenario").is_null() ? "" : j.at("scenario").dump(2);
    } catch (const nlohmann::json::exception& e) {
        fail(ErrorCode::parse, std::string("log header: ") + e.what());
    }
    if (log.header.schema_version != kLogSchemaVersion) {
        fail(ErrorCode::validation, "log header: unsupported schema version " + std::to_string(log.header.schema_version));
    }

    const auto cols = log_columns(log.header.target_ids);
    std::string_view text(csv_text);
    std::size_t line_no = 0;
    bool header_seen = false;
    while (!text.empty()) {
        const auto nl = text.find('\n');
        std::string_view line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
        if (line.empty()) continue;
        const auto fields = split(line);
        if (!header_seen) {
            header_seen = true;
            if (fields.size() != cols.size()) {
                fail(ErrorCode::dimension_mismatch, "log columns do not match the header's target list");
            }
            for (std::size_t i = 0; i < cols.size(); ++i) {
                if (fields[i] != cols[i]) {
                    fail(ErrorCode::parse, "log column " + std::to_string(i) + ": expected '" + cols[i] + "', got '" +
                                               std::string(fields[i]) + "'");
                }
            }
            continue;
        }
        if (fields.size() != cols.size()) {
            fail(ErrorCode::dimension_mismatch, "log line " + std::to_string(line_no) + ": expected " +
                                                    std::to_string(cols.size()) + " fields, got " +
                                                    std::to_string(fields.size()));
        }
        TickRecord r;
        r.targets.resize(log.header.target_ids.size());
        Reader rd{fields, line_no};
        visit_tick(r, rd);
        for (auto& t : r.targets) visit_target(t, rd);
        log.ticks.push_back(std::move(r));
    }
    if (!header_seen) fail(ErrorCode::parse, "log is empty (no column header)");
    return log;
}

SimulationLog read_log(const std::filesystem::path& csv_path) {
    const auto header = log_header_path(csv_path);
    return parse_log(read_file(csv_path), read_file(header));
}

}  // namespace marvv
