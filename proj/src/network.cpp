#include "gridcascade/network.hpp"
#include "gridcascade/errors.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

namespace gridcascade {

using nlohmann::json;

int NetworkCase::bus_index(int bus_id) const {
    for (std::size_t i = 0; i < buses.size(); ++i)
        if (buses[i].id == bus_id) return static_cast<int>(i);
    return -1;
}

int NetworkCase::branch_index(int branch_id) const {
    for (std::size_t i = 0; i < branches.size(); ++i)
        if (branches[i].id == branch_id) return static_cast<int>(i);
    return -1;
}

namespace {

BusKind kind_from_string(const std::string& s) {
    if (s == "generator") return BusKind::Generator;
    if (s == "load") return BusKind::Load;
    if (s == "slack") return BusKind::Slack;
    throw ParseError("unknown bus kind '" + s + "'");
}

void validate_case(NetworkCase& cs) {
    std::vector<std::string> bad;

    std::unordered_map<int, int> bus_pos;
    for (std::size_t i = 0; i < cs.buses.size(); ++i) {
        if (!bus_pos.emplace(cs.buses[i].id, static_cast<int>(i)).second)
            bad.push_back("duplicate bus id " + std::to_string(cs.buses[i].id));
    }

    if (!bus_pos.count(cs.slack_bus)) {
        bad.push_back("slack_bus " + std::to_string(cs.slack_bus) + " is not a bus");
    } else {
        cs.buses[bus_pos[cs.slack_bus]].kind = BusKind::Slack;
    }
    int n_slack = 0;
    for (const auto& b : cs.buses)
        if (b.kind == BusKind::Slack) ++n_slack;
    if (n_slack != 1)
        bad.push_back("case must have exactly one slack bus, found " + std::to_string(n_slack));

    std::unordered_set<int> branch_ids;
    for (const auto& br : cs.branches) {
        const std::string tag = "branch " + std::to_string(br.id);
        if (!branch_ids.insert(br.id).second)
            bad.push_back("duplicate branch id " + std::to_string(br.id));
        if (br.from_bus == br.to_bus)
            bad.push_back(tag + " connects bus " + std::to_string(br.from_bus) + " to itself");
        if (!bus_pos.count(br.from_bus))
            bad.push_back(tag + " references missing bus " + std::to_string(br.from_bus));
        if (!bus_pos.count(br.to_bus))
            bad.push_back(tag + " references missing bus " + std::to_string(br.to_bus));
        if (!(br.x > 0.0))
            bad.push_back(tag + " has non-positive reactance");
        if (!(br.sigma > 0.0))
            bad.push_back(tag + " has non-positive threshold");
        if (br.tcsc) {
            const auto& t = *br.tcsc;
            if (!(t.tc > 0.0)) bad.push_back(tag + " tcsc time constant must be positive");
            if (!(t.xmin <= t.xref && t.xref <= t.xmax))
                bad.push_back(tag + " tcsc requires xmin <= xref <= xmax");
        }
    }

    for (const auto& link : cs.hvdc) {
        const std::string tag = "hvdc on branch " + std::to_string(link.replaced_branch);
        if (!branch_ids.count(link.replaced_branch))
            bad.push_back(tag + ": no such branch");
        if (!(link.rcr + link.rl - link.rci > 0.0))
            bad.push_back(tag + ": R_cr + R_L - R_ci must be positive");
        if (!(std::cos(link.alpha) > std::cos(link.gamma)))
            bad.push_back(tag + ": cos(alpha) must exceed cos(gamma) for forward current");
    }

    if (!bad.empty()) {
        std::string msg = "case validation failed:";
        for (const auto& m : bad) msg += "\n  - " + m;
        throw ValidationError(msg);
    }
}

NetworkCase case_from_json(const json& j) {
    NetworkCase cs;
    try {
        cs.base_mva = j.value("base_mva", 100.0);
        cs.slack_bus = j.at("slack_bus").get<int>();
        for (const auto& jb : j.at("buses")) {
            BusRecord b;
            b.id = jb.at("id").get<int>();
            b.p_injection = jb.at("p").get<double>();
            if (jb.contains("kind"))
                b.kind = kind_from_string(jb.at("kind").get<std::string>());
            else if (b.id == cs.slack_bus)
                b.kind = BusKind::Slack;
            else
                b.kind = b.p_injection > 0.0 ? BusKind::Generator : BusKind::Load;
            cs.buses.push_back(b);
        }
        for (const auto& jb : j.at("branches")) {
            BranchRecord br;
            br.id = jb.at("id").get<int>();
            br.from_bus = jb.at("from").get<int>();
            br.to_bus = jb.at("to").get<int>();
            br.x = jb.at("x").get<double>();
            br.sigma = jb.at("sigma").get<double>();
            br.live = jb.value("live", true);
            if (jb.contains("tcsc")) {
                const auto& jt = jb.at("tcsc");
                TcscParams t;
                t.tc = jt.at("tc").get<double>();
                t.xref = jt.value("xref", 0.0);
                t.xmin = jt.value("xmin", 0.0);
                t.xmax = jt.value("xmax", 10.0);
                t.kp = jt.value("kp", 4.0);
                t.ki = jt.value("ki", 3.0);
                t.kd = jt.value("kd", 2.0);
                br.tcsc = t;
            }
            cs.branches.push_back(br);
        }
        if (j.contains("hvdc")) {
            for (const auto& jl : j.at("hvdc")) {
                HvdcLinkSpec link;
                link.replaced_branch = jl.at("branch").get<int>();
                link.alpha = jl.at("alpha").get<double>();
                link.gamma = jl.at("gamma").get<double>();
                link.rcr = jl.at("rcr").get<double>();
                link.rci = jl.at("rci").get<double>();
                link.rl = jl.at("rl").get<double>();
                cs.hvdc.push_back(link);
            }
        }
    } catch (const json::exception& e) {
        throw ParseError(std::string("bad case JSON: ") + e.what());
    }
    validate_case(cs);
    return cs;
}

// Pull the numeric rows out of one `mpc.<name> = [ ... ];` block.
std::vector<std::vector<double>> matpower_table(const std::string& text, const std::string& name) {
    const std::string key = "mpc." + name;
    auto pos = text.find(key);
    if (pos == std::string::npos)
        throw ParseError("matpower file lacks " + key);
    pos = text.find('[', pos);
    auto end = text.find("];", pos);
    if (pos == std::string::npos || end == std::string::npos)
        throw ParseError("unterminated table " + key);

    std::vector<std::vector<double>> rows;
    std::istringstream body(text.substr(pos + 1, end - pos - 1));
    std::string line;
    while (std::getline(body, line)) {
        if (auto c = line.find('%'); c != std::string::npos) line.erase(c);
        for (char& ch : line)
            if (ch == ';' || ch == ',') ch = ' ';
        std::istringstream ls(line);
        std::vector<double> row;
        double v;
        while (ls >> v) row.push_back(v);
        if (!row.empty()) rows.push_back(row);
    }
    return rows;
}

NetworkCase case_from_matpower(const std::string& text) {
    NetworkCase cs;
    cs.base_mva = 100.0;
    if (auto p = text.find("mpc.baseMVA"); p != std::string::npos) {
        auto eq = text.find('=', p);
        if (eq != std::string::npos) cs.base_mva = std::strtod(text.c_str() + eq + 1, nullptr);
    }

    auto bus = matpower_table(text, "bus");
    auto gen = matpower_table(text, "gen");
    auto branch = matpower_table(text, "branch");

    std::unordered_map<int, double> pg; // summed generation per bus, MW
    for (const auto& row : gen) {
        if (row.size() < 2) throw ParseError("short mpc.gen row");
        pg[static_cast<int>(row[0])] += row[1];
    }

    for (const auto& row : bus) {
        if (row.size() < 3) throw ParseError("short mpc.bus row");
        BusRecord b;
        b.id = static_cast<int>(row[0]);
        const int type = static_cast<int>(row[1]);
        const double pd = row[2];
        b.p_injection = (pg.count(b.id) ? pg[b.id] - pd : -pd) / cs.base_mva;
        b.kind = type == 3 ? BusKind::Slack : type == 2 ? BusKind::Generator : BusKind::Load;
        if (type == 3) cs.slack_bus = b.id;
        cs.buses.push_back(b);
    }

    int next_id = 1;
    for (const auto& row : branch) {
        if (row.size() < 6) throw ParseError("short mpc.branch row");
        BranchRecord br;
        br.id = next_id++;
        br.from_bus = static_cast<int>(row[0]);
        br.to_bus = static_cast<int>(row[1]);
        br.x = row[3];
        // MATPOWER carries no relay threshold; fall back to rateA when set.
        br.sigma = row.size() > 5 && row[5] > 0.0 ? row[5] / cs.base_mva : 1.0;
        cs.branches.push_back(br);
    }

    validate_case(cs);
    return cs;
}

} // namespace

NetworkCase parse_case_json(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::exception& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    return case_from_json(j);
}

NetworkCase load_case(const std::string& path, CaseFormat format) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ParseError("cannot open case file: " + path);
    std::ostringstream buf;
    buf << in.rdbuf();
    return format == CaseFormat::NativeJson ? parse_case_json(buf.str())
                                            : case_from_matpower(buf.str());
}

Eigen::SparseMatrix<double> build_incidence(const NetworkCase& cs) {
    std::vector<int> bus_order(cs.n_bus());
    for (std::size_t i = 0; i < cs.n_bus(); ++i) bus_order[i] = static_cast<int>(i);
    std::sort(bus_order.begin(), bus_order.end(),
              [&](int a, int b) { return cs.buses[a].id < cs.buses[b].id; });
    std::unordered_map<int, int> col_of;
    for (std::size_t c = 0; c < bus_order.size(); ++c)
        col_of[cs.buses[bus_order[c]].id] = static_cast<int>(c);

    std::vector<int> branch_order(cs.n_branch());
    for (std::size_t i = 0; i < cs.n_branch(); ++i) branch_order[i] = static_cast<int>(i);
    std::sort(branch_order.begin(), branch_order.end(),
              [&](int a, int b) { return cs.branches[a].id < cs.branches[b].id; });

    Eigen::SparseMatrix<double> A(static_cast<int>(cs.n_branch()), static_cast<int>(cs.n_bus()));
    std::vector<Eigen::Triplet<double>> trips;
    trips.reserve(2 * cs.n_branch());
    for (std::size_t r = 0; r < branch_order.size(); ++r) {
        const auto& br = cs.branches[branch_order[r]];
        trips.emplace_back(static_cast<int>(r), col_of.at(br.from_bus), +1.0);
        trips.emplace_back(static_cast<int>(r), col_of.at(br.to_bus), -1.0);
    }
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
}

double hvdc_direct_current(const HvdcLinkSpec& link) {
    const double denom = std::numbers::pi * (link.rcr + link.rl - link.rci);
    if (denom == 0.0)
        throw DegenerateLink("HVDC link on branch " + std::to_string(link.replaced_branch) +
                             " has zero commutation denominator");
    return 3.0 * std::sqrt(3.0) * (std::cos(link.alpha) - std::cos(link.gamma)) / denom;
}

double hvdc_rectifier_power(const HvdcLinkSpec& link) {
    const double id = hvdc_direct_current(link);
    return 3.0 * std::sqrt(3.0) / std::numbers::pi * id * std::cos(link.alpha) -
           link.rcr * id * id;
}

double hvdc_inverter_power(const HvdcLinkSpec& link) {
    const double id = hvdc_direct_current(link);
    return hvdc_rectifier_power(link) - link.rl * id * id;
}

NetworkCase apply_hvdc(const NetworkCase& cs, std::vector<std::string>* warnings) {
    NetworkCase out = cs;
    for (const auto& link : out.hvdc) {
        if (warnings) {
            constexpr double pi = std::numbers::pi;
            if (link.alpha < pi / 30 || link.alpha > pi / 2)
                warnings->push_back("hvdc branch " + std::to_string(link.replaced_branch) +
                                    ": alpha outside nominal [pi/30, pi/2]");
            if (link.gamma < pi / 12 || link.gamma > pi / 9)
                warnings->push_back("hvdc branch " + std::to_string(link.replaced_branch) +
                                    ": gamma outside nominal [pi/12, pi/9]");
        }
        const int bi = out.branch_index(link.replaced_branch);
        if (bi < 0)
            throw ValidationError("hvdc replaced_branch " +
                                  std::to_string(link.replaced_branch) + " not found");
        auto& br = out.branches[bi];
        br.live = false;
        const double pr = hvdc_rectifier_power(link);
        const double pi_pwr = hvdc_inverter_power(link);
        out.buses[out.bus_index(br.from_bus)].p_injection -= pr;
        out.buses[out.bus_index(br.to_bus)].p_injection += pi_pwr;
    }
    return out;
}

} // namespace gridcascade
