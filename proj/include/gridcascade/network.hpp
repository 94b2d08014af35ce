#pragma once

#include <Eigen/Core>
#include <Eigen/SparseCore>
#include <optional>
#include <string>
#include <vector>

namespace gridcascade {

enum class BusKind { Generator, Load, Slack };

struct BusRecord {
    int id = 0;
    double p_injection = 0.0; // per-unit; positive = net generation
    BusKind kind = BusKind::Load;
};

struct TcscParams {
    double tc = 1.0;   // first-order time constant, seconds
    double xref = 0.0; // reactance setpoint
    double xmin = 0.0;
    double xmax = 10.0;
    double kp = 4.0, ki = 3.0, kd = 2.0;
};

struct BranchRecord {
    int id = 0;
    int from_bus = 0, to_bus = 0;
    double x = 0.0;     // series reactance, per-unit, > 0
    double sigma = 0.0; // relay power threshold, per-unit, > 0
    std::optional<TcscParams> tcsc;
    bool live = true;
};

struct HvdcLinkSpec {
    int replaced_branch = 0;
    double alpha = 0.0; // rectifier ignition delay angle, radians
    double gamma = 0.0; // inverter extinction advance angle, radians
    double rcr = 0.0, rci = 0.0, rl = 0.0;
};

struct NetworkCase {
    double base_mva = 100.0;
    int slack_bus = 0;
    std::vector<BusRecord> buses;
    std::vector<BranchRecord> branches;
    std::vector<HvdcLinkSpec> hvdc;

    // Lookup helpers (indices into the vectors above, or -1).
    int bus_index(int bus_id) const;
    int branch_index(int branch_id) const;

    std::size_t n_bus() const { return buses.size(); }
    std::size_t n_branch() const { return branches.size(); }
};

enum class CaseFormat { NativeJson, MatpowerM };

// Load and fully validate a case file.  Validation failures are collected
// and reported together in one ValidationError.
NetworkCase load_case(const std::string& path, CaseFormat format = CaseFormat::NativeJson);

// Parse from an in-memory JSON string (used by tests and load_case).
NetworkCase parse_case_json(const std::string& text);

// Branch-bus incidence: +1 at from_bus column, -1 at to_bus column, rows in
// branch-id order, columns in bus-id order.  Severed branches keep their row.
Eigen::SparseMatrix<double> build_incidence(const NetworkCase& cs);

// Direct current carried by one HVDC link.
double hvdc_direct_current(const HvdcLinkSpec& link);

// Rectifier-side real power drawn from the AC system.
double hvdc_rectifier_power(const HvdcLinkSpec& link);

// Inverter-side real power returned to the AC system (P_r minus line loss).
double hvdc_inverter_power(const HvdcLinkSpec& link);

// Replace each HVDC branch with equivalent injections: the rectifier bus
// (branch from-side) loses P_r, the inverter bus (to-side) gains P_i, and the
// AC branch goes out of service.  Returns the reduced case; the input is not
// modified.  Warnings about out-of-range firing angles go to `warnings`.
NetworkCase apply_hvdc(const NetworkCase& cs, std::vector<std::string>* warnings = nullptr);

} // namespace gridcascade
