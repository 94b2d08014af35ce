#pragma once

#include "gridcascade/cascade.hpp"
#include "gridcascade/network.hpp"

#include <Eigen/Core>
#include <unordered_map>

namespace gridcascade {

using Vec7 = Eigen::Matrix<double, 7, 1>;

struct DisturbanceBounds {
    double lo = 0.0;
    double hi = 0.0;
};

struct JfnkConfig {
    double eps_sens = 1e-2;  // finite-difference step for the flow sensitivity
    double xi_base = 1e-7;   // Jv probe scale; actual step is xi_base * (1 + ||z||)
    double eps_min = 1e-8;   // Newton termination on ||dz|| / ||z||
    int max_newton = 50;
    int krylov_dim = 7;      // full subspace for the 7-dimensional system
    double gmres_tol = 1e-10;
    int gmres_restart = 7;
};

// First-order optimality system for the worst-disturbance problem on one
// branch.  The unknown ordering is z = (delta, mu1, mu2, x1, x2, y1, y2):
// multipliers for the upper/lower bound, their slacks, and the squared
// reformulation variables that keep the multipliers nonnegative.
//
// Every residual evaluation runs full cascades, so final-step flows are
// memoized per exact disturbance value.
class KktSystem {
public:
    KktSystem(const NetworkCase& cs, int branch, DisturbanceBounds bounds,
              CascadeConfig cascade_cfg, JfnkConfig cfg);

    // Final-step flows P_e^m for the given disturbance (memoized).
    const Eigen::VectorXd& final_flows(double delta);

    // Cascade cost J(delta) = 0.5 ||P_e^m||^2.
    double objective(double delta);

    // Finite-difference dP_e^m/ddelta; probes backward when a forward step
    // would leave the feasible interval.
    Eigen::VectorXd sensitivity_vector(double delta);

    // The 7 residual components, in the fixed order:
    //   (1) P_e^m . dP_e^m/ddelta + mu1 - mu2      stationarity
    //   (2) delta - hi + x1^2                       upper-bound slack
    //   (3) delta - lo - x2^2                       lower-bound slack
    //   (4) mu1 (delta - hi)                        complementarity
    //   (5) mu2 (delta - lo)                        complementarity
    //   (6) mu1 - y1^2                              sign condition
    //   (7) mu2 - y2^2                              sign condition
    Vec7 residual(const Vec7& z);

    const DisturbanceBounds& bounds() const { return bounds_; }
    const CascadeConfig& cascade_config() const { return cascade_; }
    int branch() const { return branch_; }
    long simulations_run() const { return sims_; }

private:
    const NetworkCase* case_;
    int branch_;
    DisturbanceBounds bounds_;
    CascadeConfig cascade_;
    JfnkConfig cfg_;
    std::unordered_map<double, Eigen::VectorXd> flow_memo_;
    long sims_ = 0;
};

} // namespace gridcascade
