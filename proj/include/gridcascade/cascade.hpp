#pragma once

#include "gridcascade/facts.hpp"
#include "gridcascade/network.hpp"
#include "gridcascade/power_flow.hpp"

#include <Eigen/Core>
#include <string>
#include <vector>

namespace gridcascade {

struct Disturbance {
    int branch = 0;     // branch id receiving the susceptance change
    double delta = 0.0; // additive change on that branch's susceptance
};

struct CascadeConfig {
    int m = 12;                // maximum number of cascading steps
    double relay_period = 1.0; // relay preset T, seconds
    double dt = 0.01;          // controller integration substep, seconds
    bool facts_enabled = false;
};

enum class StopReason { NoOverloads, MaxSteps };

inline const char* to_string(StopReason r) {
    return r == StopReason::NoOverloads ? "no-overloads" : "max-steps";
}

struct CascadeStep {
    int k = 0;
    double t = 0.0;            // = k * T
    std::vector<int> tripped;  // branch ids severed at this step
    int islands = 0;
    int out_cumulative = 0;
    double j_partial = 0.0;    // 0.5 * ||P_e^k||^2
    Eigen::VectorXd B;
    Eigen::VectorXd p_e;
};

struct CascadeTrace {
    std::vector<CascadeStep> steps;
    double final_cost = 0.0;
    StopReason reason = StopReason::MaxSteps;
    std::vector<int> severed; // all branch ids out at the end, ascending
    int final_islands = 0;

    int outage_count() const { return static_cast<int>(severed.size()); }
    double end_time() const { return steps.empty() ? 0.0 : steps.back().t; }
};

// Apply the initial susceptance disturbance: B_j += delta on the chosen
// branch; a result within 1e-12 of zero severs the branch outright.
// Throws DisturbedBranchSevered when the branch is already out.
Eigen::VectorXd apply_disturbance(const NetworkCase& cs, const Eigen::VectorXd& B0,
                                  const Disturbance& d);

// Drive the full cascade: disturbance at step 1, then alternate controller
// adjustment (identity when FACTS is off) and relay tripping until no branch
// is overloaded or the step budget is exhausted.  Relays accumulate one
// period per overloaded check and trip strictly beyond the preset; all
// expirations in a period trip together.  The case must already have HVDC
// links reduced to injections.
CascadeTrace simulate_cascade(const NetworkCase& cs, const Disturbance& d,
                              const CascadeConfig& cfg);

// Final-state cost of a completed trace.
double cost(const CascadeTrace& trace);

} // namespace gridcascade
