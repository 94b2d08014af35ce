#pragma once

#include "gridcascade/network.hpp"
#include "gridcascade/power_flow.hpp"

#include <Eigen/Core>

namespace gridcascade {

// Controller state for every branch-mounted series compensator.  Rows for
// branches without a device stay at zero and are never touched.
struct TcscBank {
    Eigen::VectorXd xc;     // inserted reactance X_C
    Eigen::VectorXd integ;  // accumulated integral of the error
    Eigen::VectorXd prev_e; // error at the previous substep

    explicit TcscBank(const NetworkCase& cs);
};

// Overload error with a dead zone: feedback engages only at or above the
// reference power, and the engaged value is nonpositive.
double error_signal(double p_e, double p_ref);

// Discrete PID: rectangle-rule integral, backward-difference derivative on
// the error.  Returns the raw controller output and the candidate integral;
// the caller commits the integral only if the reactance stays off its limits
// (anti-windup).
struct PidOutput {
    double u = 0.0;
    double integ_candidate = 0.0;
};
PidOutput pid_control(double e, double integ, double prev_e, const TcscParams& p, double dt);

// One explicit-Euler step of the reactance lag, clamped to [xmin, xmax].
// Returns the new X_C and whether a limit was hit.
struct TcscStep {
    double xc = 0.0;
    bool clamped = false;
};
TcscStep step_tcsc(double xc, double u, const TcscParams& p, double dt);

// Integrate every live compensator over one relay period, re-solving the
// network each substep.  `x_eff` is the effective series reactance per branch
// (disturbance folded in); B is rewritten as -1/(X_C + x_eff) for device
// branches.  Returns the end-of-horizon flows.  Severed branches (B = 0) are
// skipped: a compensator cannot act on a disconnected line.
//
// The controller error is negative under overload, while clearing an
// overload requires raising X_C, so the PID output enters the lag with its
// sign flipped here.
Eigen::VectorXd facts_update(const FlowSolver& solver, Eigen::VectorXd& B,
                             const Eigen::VectorXd& x_eff, TcscBank& bank, double horizon,
                             double dt);

} // namespace gridcascade
