#include "gridcascade/serialize.hpp"
#include "gridcascade/version.hpp"
#include "gridcascade/errors.hpp"

#include <chrono>
#include <cinttypes>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace gridcascade {

using nlohmann::json;

std::string file_checksum(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open file for checksum: " + path);
    std::uint64_t h = 14695981039346656037ull;
    char buf[1 << 14];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
        for (std::streamsize i = 0; i < in.gcount(); ++i) {
            h ^= static_cast<unsigned char>(buf[i]);
            h *= 1099511628211ull;
        }
        if (!in) break;
    }
    char out[17];
    std::snprintf(out, sizeof out, "%016" PRIx64, h);
    return out;
}

namespace {

json vec_to_json(const Eigen::VectorXd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v[i]);
    return a;
}

Eigen::VectorXd vec_from_json(const json& a) {
    Eigen::VectorXd v(a.size());
    for (std::size_t i = 0; i < a.size(); ++i) v[static_cast<Eigen::Index>(i)] = a[i].get<double>();
    return v;
}

json config_to_json(const CascadeConfig& cfg) {
    return json{{"m", cfg.m},
                {"relay_period", cfg.relay_period},
                {"dt", cfg.dt},
                {"facts", cfg.facts_enabled}};
}

CascadeConfig config_from_json(const json& j) {
    CascadeConfig cfg;
    cfg.m = j.at("m").get<int>();
    cfg.relay_period = j.at("relay_period").get<double>();
    cfg.dt = j.at("dt").get<double>();
    cfg.facts_enabled = j.at("facts").get<bool>();
    return cfg;
}

} // namespace

json trace_to_json(const CascadeTrace& trace, const Disturbance& d, const CascadeConfig& cfg) {
    json steps = json::array();
    for (const auto& st : trace.steps) {
        steps.push_back(json{{"k", st.k},
                             {"t", st.t},
                             {"tripped", st.tripped},
                             {"islands", st.islands},
                             {"out_cumulative", st.out_cumulative},
                             {"j_partial", st.j_partial},
                             {"B", vec_to_json(st.B)},
                             {"p_e", vec_to_json(st.p_e)}});
    }
    return json{{"disturbance", {{"branch", d.branch}, {"delta", d.delta}}},
                {"config", config_to_json(cfg)},
                {"steps", std::move(steps)},
                {"final",
                 {{"cost", trace.final_cost},
                  {"reason", to_string(trace.reason)},
                  {"severed", trace.severed},
                  {"islands", trace.final_islands},
                  {"outages", trace.outage_count()},
                  {"end_time", trace.end_time()}}}};
}

TraceBundle trace_from_json(const json& j) {
    TraceBundle b;
    b.disturbance.branch = j.at("disturbance").at("branch").get<int>();
    b.disturbance.delta = j.at("disturbance").at("delta").get<double>();
    b.config = config_from_json(j.at("config"));
    for (const auto& js : j.at("steps")) {
        CascadeStep st;
        st.k = js.at("k").get<int>();
        st.t = js.at("t").get<double>();
        st.tripped = js.at("tripped").get<std::vector<int>>();
        st.islands = js.at("islands").get<int>();
        st.out_cumulative = js.at("out_cumulative").get<int>();
        st.j_partial = js.at("j_partial").get<double>();
        st.B = vec_from_json(js.at("B"));
        st.p_e = vec_from_json(js.at("p_e"));
        b.trace.steps.push_back(std::move(st));
    }
    const auto& f = j.at("final");
    b.trace.final_cost = f.at("cost").get<double>();
    b.trace.reason =
        f.at("reason").get<std::string>() == "no-overloads" ? StopReason::NoOverloads
                                                            : StopReason::MaxSteps;
    b.trace.severed = f.at("severed").get<std::vector<int>>();
    b.trace.final_islands = f.at("islands").get<int>();
    return b;
}

json identification_to_json(const IdentificationResult& res, const CascadeConfig& cfg) {
    json restarts = json::array();
    for (const auto& r : res.restarts) {
        json z0 = json::array();
        for (int i = 0; i < 7; ++i) z0.push_back(r.z0[i]);
        restarts.push_back(json{{"l", r.l},
                                {"z0", std::move(z0)},
                                {"delta_candidate", r.delta_candidate},
                                {"j_candidate", r.j_candidate},
                                {"accepted", r.accepted},
                                {"status", r.status}});
    }
    return json{{"branch", res.branch},
                {"bounds", {{"lo", res.bounds.lo}, {"hi", res.bounds.hi}}},
                {"best_delta", res.best_delta},
                {"best_cost", res.best_cost},
                {"restarts", std::move(restarts)},
                {"trace_of_best",
                 trace_to_json(res.trace_of_best, Disturbance{res.branch, res.best_delta}, cfg)}};
}

IdentificationResult identification_from_json(const json& j) {
    IdentificationResult res;
    res.branch = j.at("branch").get<int>();
    res.bounds.lo = j.at("bounds").at("lo").get<double>();
    res.bounds.hi = j.at("bounds").at("hi").get<double>();
    res.best_delta = j.at("best_delta").get<double>();
    res.best_cost = j.at("best_cost").get<double>();
    for (const auto& jr : j.at("restarts")) {
        RestartLog r;
        r.l = jr.at("l").get<int>();
        for (int i = 0; i < 7; ++i) r.z0[i] = jr.at("z0")[i].get<double>();
        r.delta_candidate = jr.at("delta_candidate").get<double>();
        r.j_candidate = jr.at("j_candidate").get<double>();
        r.accepted = jr.at("accepted").get<bool>();
        r.status = jr.at("status").get<std::string>();
        res.restarts.push_back(std::move(r));
    }
    res.trace_of_best = trace_from_json(j.at("trace_of_best")).trace;
    return res;
}

json sweep_to_json(const SweepResult& res, int branch, DisturbanceBounds bounds,
                   const CascadeConfig& cfg) {
    json pts = json::array();
    for (const auto& p : res.points) {
        json jp{{"delta", p.delta}, {"ok", p.ok}};
        if (p.ok)
            jp["J"] = p.j;
        else
            jp["error"] = p.error;
        pts.push_back(std::move(jp));
    }
    json out{{"branch", branch},
             {"bounds", {{"lo", bounds.lo}, {"hi", bounds.hi}}},
             {"config", config_to_json(cfg)},
             {"points", std::move(pts)},
             {"argmin_index", res.argmin_index}};
    if (res.argmin_index >= 0) {
        out["argmin_delta"] = res.points[res.argmin_index].delta;
        out["argmin_J"] = res.points[res.argmin_index].j;
    }
    return out;
}

namespace {

// Fixed-format doubles for CSV so identical runs emit identical bytes.
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

} // namespace

std::string timeline_csv(const CascadeTrace& trace) {
    std::ostringstream out;
    out << "step,time_s,branches_out_cumulative,islands,J_partial\n";
    for (const auto& st : trace.steps)
        out << st.k << ',' << fmt(st.t) << ',' << st.out_cumulative << ',' << st.islands << ','
            << fmt(st.j_partial) << '\n';
    return out.str();
}

std::string sweep_csv(const SweepResult& res) {
    std::ostringstream out;
    out << "delta,J\n";
    for (const auto& p : res.points)
        if (p.ok) out << fmt(p.delta) << ',' << fmt(p.j) << '\n';
    return out.str();
}

json make_manifest(const std::string& command, const std::string& case_path,
                   const std::string& case_checksum, const json& resolved, std::uint64_t seed) {
    const auto now = std::chrono::system_clock::now();
    const auto t = std::chrono::system_clock::to_time_t(now);
    char stamp[32];
    std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", std::gmtime(&t));
    return json{{"tool", std::string(kToolName) + " " + kVersion},
                {"command", command},
                {"case", case_path},
                {"case_checksum", case_checksum},
                {"resolved", resolved},
                {"seed", seed},
                {"generated_utc", std::string(stamp)}};
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ParseError("cannot write file: " + path);
    out << content;
}

} // namespace gridcascade
