#include "gridcascade/cascade.hpp"
#include "gridcascade/errors.hpp"

#include <algorithm>
#include <cmath>

namespace gridcascade {

Eigen::VectorXd apply_disturbance(const NetworkCase& cs, const Eigen::VectorXd& B0,
                                  const Disturbance& d) {
    const int j = cs.branch_index(d.branch);
    if (j < 0)
        throw ValidationError("disturbed branch " + std::to_string(d.branch) + " does not exist");
    if (!cs.branches[j].live || std::abs(B0[j]) <= kSeverTol)
        throw DisturbedBranchSevered("branch " + std::to_string(d.branch) +
                                     " is already out of service");
    Eigen::VectorXd B = B0;
    B[j] += d.delta;
    if (std::abs(B[j]) < kSeverTol) B[j] = 0.0;
    return B;
}

CascadeTrace simulate_cascade(const NetworkCase& cs, const Disturbance& d,
                              const CascadeConfig& cfg) {
    const FlowSolver solver(cs);
    const int n = static_cast<int>(cs.n_branch());
    const double T = cfg.relay_period;

    Eigen::VectorXd B = apply_disturbance(cs, solver.base_susceptance(), d);

    // Effective series reactance with the disturbance folded in; it persists
    // through every later controller update on the disturbed branch.
    Eigen::VectorXd x_eff(n);
    for (int i = 0; i < n; ++i) x_eff[i] = cs.branches[i].x;
    {
        const int j = cs.branch_index(d.branch);
        if (std::abs(B[j]) > kSeverTol) x_eff[j] = -1.0 / B[j];
    }

    Eigen::VectorXd sigma(n);
    for (int i = 0; i < n; ++i) sigma[i] = cs.branches[i].sigma;

    TcscBank bank(cs);
    Eigen::VectorXd timers = Eigen::VectorXd::Zero(n);

    CascadeTrace trace;
    auto severed_now = [&](const Eigen::VectorXd& Bv) {
        std::vector<int> ids;
        for (int i = 0; i < n; ++i)
            if (cs.branches[i].live && std::abs(Bv[i]) <= kSeverTol) ids.push_back(cs.branches[i].id);
        return ids;
    };

    FlowSolution sol = solver.solve(B);
    Eigen::VectorXd p_e = sol.p_e;
    trace.severed = severed_now(B);

    auto record = [&](int k, const std::vector<int>& tripped) {
        CascadeStep st;
        st.k = k;
        st.t = k * T;
        st.tripped = tripped;
        st.islands = sol.island_count;
        st.out_cumulative = static_cast<int>(trace.severed.size());
        st.j_partial = 0.5 * p_e.squaredNorm();
        st.B = B;
        st.p_e = p_e;
        trace.steps.push_back(std::move(st));
    };
    record(1, trace.severed);

    int k = 1;
    trace.reason = StopReason::MaxSteps;
    while (k < cfg.m) {
        bool any_over = false;
        for (int i = 0; i < n; ++i)
            if (std::abs(p_e[i]) > sigma[i] && std::abs(B[i]) > kSeverTol) {
                any_over = true;
                break;
            }
        if (!any_over) {
            trace.reason = StopReason::NoOverloads;
            break;
        }
        ++k;

        if (cfg.facts_enabled) p_e = facts_update(solver, B, x_eff, bank, T, cfg.dt);

        // Relays see the end-of-horizon flows: accrue one period while the
        // overload persists, reset as soon as it clears, trip strictly past T.
        std::vector<int> tripped;
        for (int i = 0; i < n; ++i) {
            const bool over = std::abs(p_e[i]) > sigma[i] && std::abs(B[i]) > kSeverTol;
            timers[i] = over ? timers[i] + T : 0.0;
            if (over && timers[i] > T) {
                B[i] = 0.0;
                tripped.push_back(cs.branches[i].id);
            }
        }
        trace.severed = severed_now(B);

        sol = solver.solve(B);
        p_e = sol.p_e;
        record(k, tripped);
    }

    trace.final_cost = 0.5 * p_e.squaredNorm();
    trace.final_islands = sol.island_count;
    std::sort(trace.severed.begin(), trace.severed.end());
    return trace;
}

double cost(const CascadeTrace& trace) { return trace.final_cost; }

} // namespace gridcascade
