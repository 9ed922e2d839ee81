#include "legfunnel/trajectory_io.hpp"

#include <array>
#include <charconv>
#include <cmath>

#include "legfunnel/errors.hpp"

namespace legfunnel {

namespace {

// shortest round-trip representation, independent of locale and stream state
void put_number(std::string& out, double v)
{
    if (!std::isfinite(v)) {
        throw SimulationAbort("refusing to write a non-finite value to the trajectory log");
    }
    if (v == 0.0) {
        v = 0.0; // fold -0 into 0
    }
    std::array<char, 32> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    out.append(buf.data(), res.ptr);
}

nlohmann::json finite_or_null(double v)
{
    return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr);
}

}  // namespace

std::string csv_header()
{
    return "t,leg,f_ref,y,e,psi,u,event,roll_deg,pitch_deg,psi_pre,contained,limit_hit,iss_z";
}

void write_csv(std::ostream& os, const SimTrajectory& traj)
{
    std::string line;
    os << csv_header() << '\n';
    for (const auto& rec : traj.steps) {
        for (std::size_t i = 0; i < rec.legs.size(); ++i) {
            const LegSample& s = rec.legs[i];
            line.clear();
            put_number(line, rec.t);
            line += ',';
            line += std::to_string(i + 1);
            for (double v : {s.f_ref, s.y, s.e, s.psi, s.u}) {
                line += ',';
                put_number(line, v);
            }
            line += s.event ? ",1," : ",0,";
            put_number(line, rec.roll_deg);
            line += ',';
            put_number(line, rec.pitch_deg);
            line += ',';
            put_number(line, s.psi_pre);
            line += s.contained ? ",1" : ",0";
            line += s.limit_hit ? ",1," : ",0,";
            put_number(line, rec.iss_z);
            line += '\n';
            os << line;
        }
    }
}

nlohmann::json metrics_to_json(const Metrics& m)
{
    nlohmann::json legs = nlohmann::json::array();
    for (const auto& lm : m.legs) {
        legs.push_back({{"e_min", lm.e_min},
                        {"e_max", lm.e_max},
                        {"e_range", lm.e_range},
                        {"events", lm.events},
                        {"min_gap", finite_or_null(lm.min_gap)}});
    }
    return {{"legs", legs},
            {"e_range_max", m.e_range_max},
            {"angle_min_deg", m.angle_min},
            {"angle_max_deg", m.angle_max},
            {"angle_range_deg", m.angle_range},
            {"roll_range_deg", m.roll_range},
            {"pitch_range_deg", m.pitch_range},
            {"event_count", m.event_count},
            {"min_gap", finite_or_null(m.min_gap)},
            {"varpi_measured", finite_or_null(m.varpi_measured)},
            {"delta_measured", finite_or_null(m.delta_measured)},
            {"contained", m.contained},
            {"dwell_ok", m.dwell_ok},
            {"zeno_ok", m.zeno_ok},
            {"limit_hits", m.limit_hits},
            {"max_abs_z", m.max_abs_z},
            {"horizon", m.horizon}};
}

std::string config_hash(const std::string& text)
{
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ULL;
    }
    static constexpr char kHex[] = "0123456789abcdef";
    std::string out(16, '0');
    for (int i = 15; i >= 0; --i) {
        out[static_cast<std::size_t>(i)] = kHex[h & 0xF];
        h >>= 4;
    }
    return out;
}

nlohmann::json RunManifest::to_json() const
{
    return {{"config_path", config_path},
            {"output_dir", output_dir},
            {"run_id", run_id},
            {"tool_version", tool_version},
            {"config_hash", config_hash}};
}

}  // namespace legfunnel
