#include "marvv/metrics.hpp"

#include <cmath>
#include <fstream>

#include <json.hpp>

#include "marvv/error.hpp"
#include "marvv/format.hpp"

namespace marvv {

namespace {

void write_text(const std::filesystem::path& p, const std::string& text) {
    std::ofstream out(p, std::ios::binary);
    if (!out) fail(ErrorCode::io, "cannot write '" + p.string() + "'");
    out << text;
    if (!out) fail(ErrorCode::io, "write failed for '" + p.string() + "'");
}

void row(std::string& out, std::initializer_list<double> vals) {
    bool first = true;
    for (double v : vals) {
        if (!first) out += ',';
        first = false;
        append_double(out, v);
    }
    out += '\n';
}

std::string hex64(std::uint64_t v) {
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
    return buf;
}

}  // namespace

double PIReport::mpd(const std::string& target_id) const {
    for (const auto& [id, v] : mpd_per_target) {
        if (id == target_id) return v;
    }
    fail(ErrorCode::invalid_argument, "report has no target '" + target_id + "'");
}

std::pair<std::size_t, double> transitions_before_sustained(const std::vector<double>& times,
                                                            const std::vector<bool>& trigger, double sustain_time) {
    require(times.size() == trigger.size(), ErrorCode::dimension_mismatch, "trigger and time series differ in length");
    std::size_t edges = 0;
    bool prev = false;
    std::size_t i = 0;
    while (i < trigger.size()) {
        if (trigger[i] && !prev) {
            std::size_t j = i;
            while (j + 1 < trigger.size() && trigger[j + 1]) ++j;
            if (times[j] - times[i] >= sustain_time - 1e-9) {
                return {edges, times[i]};
            }
            ++edges;
            i = j + 1;
            prev = true;
            continue;
        }
        prev = trigger[i];
        ++i;
    }
    return {edges, std::nan("")};
}

PIReport compute_pis(const SimulationLog& log, double sustain_time) {
    require(!log.ticks.empty(), ErrorCode::invalid_argument, "cannot compute PIs of an empty log");
    const double dt = log.header.dt;
    require(dt > 0.0, ErrorCode::validation, "log header has a non-positive dt");
    for (std::size_t i = 0; i < log.ticks.size(); ++i) {
        const double expect = static_cast<double>(i) * dt;
        if (log.ticks[i].tick != i || std::abs(log.ticks[i].time - expect) > 1e-9 * std::max(1.0, expect)) {
            fail(ErrorCode::validation, "log has a gap or misordered record at row " + std::to_string(i));
        }
    }
    PIReport r;
    r.tick_count = log.ticks.size();
    r.scenario_hash = log.header.scenario_hash;
    r.seed = log.header.seed;
    const std::size_t nt = log.header.target_ids.size();
    std::vector<double> mpd(nt, std::numeric_limits<double>::infinity());
    double se_v = 0.0, se_psi = 0.0;
    std::vector<double> times;
    std::vector<bool> trig;
    bool prev = false;
    for (const auto& rec : log.ticks) {
        for (std::size_t k = 0; k < nt; ++k) {
            mpd[k] = std::min(mpd[k], norm(rec.targets[k].position - rec.ego.position));
        }
        const double ev = rec.desired_speed - rec.ego.speed;
        const double epsi = rad2deg(wrap_angle(rec.desired_heading - rec.ego.heading));
        se_v += ev * ev;
        se_psi += epsi * epsi;
        if (rec.trigger && !prev) ++r.trigger_transitions;
        prev = rec.trigger;
        r.grounded = r.grounded || rec.grounded;
        times.push_back(rec.time);
        trig.push_back(rec.trigger);
    }
    const double m = static_cast<double>(log.ticks.size());
    r.rmse_speed = std::sqrt(se_v / m);
    r.rmse_heading = std::sqrt(se_psi / m);
    for (std::size_t k = 0; k < nt; ++k) r.mpd_per_target.emplace_back(log.header.target_ids[k], mpd[k]);
    std::tie(r.transitions_before_sustained, r.sustained_onset) = transitions_before_sustained(times, trig, sustain_time);
    return r;
}

std::string report_to_json(const PIReport& r) {
    nlohmann::ordered_json j;
    nlohmann::ordered_json mpd = nlohmann::ordered_json::object();
    for (const auto& [id, v] : r.mpd_per_target) mpd[id] = v;
    j["mpd_m"] = mpd;
    j["rmse_speed_mps"] = r.rmse_speed;
    j["rmse_speed_knots"] = r.rmse_speed_knots();
    j["rmse_heading_deg"] = r.rmse_heading;
    j["trigger_transitions"] = r.trigger_transitions;
    j["transitions_before_sustained"] = r.transitions_before_sustained;
    j["sustained_onset_s"] = std::isnan(r.sustained_onset) ? nlohmann::ordered_json(nullptr)
                                                           : nlohmann::ordered_json(r.sustained_onset);
    j["grounded"] = r.grounded;
    j["tick_count"] = r.tick_count;
    j["scenario_hash"] = hex64(r.scenario_hash);
    j["seed"] = r.seed;
    return j.dump(2) + "\n";
}

void export_artifacts(const SimulationLog& log, const PIReport& report, const std::filesystem::path& out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(out_dir, ec);
    if (ec) fail(ErrorCode::io, "cannot create '" + out_dir.string() + "': " + ec.message());

    write_log(log, out_dir / "log.csv");
    write_text(out_dir / "report.json", report_to_json(report));

    const std::size_t nt = log.header.target_ids.size();
    {
        std::string s = "time,x,y,heading_deg,speed\n";
        for (const auto& r : log.ticks) row(s, {r.time, r.ego.position.x, r.ego.position.y, rad2deg(r.ego.heading), r.ego.speed});
        write_text(out_dir / "trajectory_ego.csv", s);
    }
    for (std::size_t k = 0; k < nt; ++k) {
        std::string s = "time,x,y,heading_deg,speed\n";
        for (const auto& r : log.ticks) {
            const auto& t = r.targets[k];
            row(s, {r.time, t.position.x, t.position.y, rad2deg(t.heading), t.speed});
        }
        write_text(out_dir / ("trajectory_" + log.header.target_ids[k] + ".csv"), s);
    }
    {
        std::string s = "time,heading_deg,desired_heading_deg,heading_error_deg,speed,desired_speed,speed_error,rudder_deg,propeller\n";
        for (const auto& r : log.ticks) {
            row(s, {r.time, rad2deg(r.ego.heading), rad2deg(r.desired_heading),
                    rad2deg(wrap_angle(r.desired_heading - r.ego.heading)), r.ego.speed, r.desired_speed,
                    r.desired_speed - r.ego.speed, rad2deg(r.command.rudder), r.command.propeller});
        }
        write_text(out_dir / "timeseries.csv", s);
    }
    {
        std::string s = "time,trigger,trigger_raw\n";
        for (const auto& r : log.ticks) {
            append_double(s, r.time);
            s += r.trigger ? ",1" : ",0";
            s += r.trigger_raw ? ",1\n" : ",0\n";
        }
        write_text(out_dir / "trigger.csv", s);
    }
    for (std::size_t k = 0; k < nt; ++k) {
        std::string s = "time,true_x,true_y,est_x,est_y,error_m,sigma_range,band_lo,band_hi\n";
        double sigma = std::nan("");
        for (const auto& r : log.ticks) {
            const auto& t = r.targets[k];
            if (t.detected) sigma = t.sigma_range;
            if (!t.has_estimate) continue;
            const double err = norm(t.estimated_position - t.position);
            row(s, {r.time, t.position.x, t.position.y, t.estimated_position.x, t.estimated_position.y, err, sigma,
                    std::max(0.0, err - sigma), err + sigma});
        }
        write_text(out_dir / ("estimates_" + log.header.target_ids[k] + ".csv"), s);
    }
}

}  // namespace marvv
