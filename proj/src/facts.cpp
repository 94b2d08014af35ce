#include "gridcascade/facts.hpp"

#include <cmath>

namespace gridcascade {

TcscBank::TcscBank(const NetworkCase& cs) {
    const auto n = static_cast<Eigen::Index>(cs.n_branch());
    xc = Eigen::VectorXd::Zero(n);
    integ = Eigen::VectorXd::Zero(n);
    prev_e = Eigen::VectorXd::Zero(n);
    for (Eigen::Index i = 0; i < n; ++i)
        if (cs.branches[i].tcsc) xc[i] = cs.branches[i].tcsc->xref; // steady start
}

double error_signal(double p_e, double p_ref) {
    const double mag = std::abs(p_e);
    return mag >= p_ref ? p_ref - mag : 0.0;
}

PidOutput pid_control(double e, double integ, double prev_e, const TcscParams& p, double dt) {
    PidOutput out;
    out.integ_candidate = integ + e * dt;
    out.u = p.kp * e + p.ki * out.integ_candidate + p.kd * (e - prev_e) / dt;
    return out;
}

TcscStep step_tcsc(double xc, double u, const TcscParams& p, double dt) {
    TcscStep s;
    s.xc = xc + dt / p.tc * (-xc + p.xref + u);
    if (s.xc < p.xmin) {
        s.xc = p.xmin;
        s.clamped = true;
    } else if (s.xc > p.xmax) {
        s.xc = p.xmax;
        s.clamped = true;
    }
    return s;
}

Eigen::VectorXd facts_update(const FlowSolver& solver, Eigen::VectorXd& B,
                             const Eigen::VectorXd& x_eff, TcscBank& bank, double horizon,
                             double dt) {
    const NetworkCase& cs = solver.network();
    const int n = static_cast<int>(cs.n_branch());
    const int nsub = static_cast<int>(std::lround(horizon / dt));

    Eigen::VectorXd p_e = solver.solve(B).p_e;
    for (int step = 0; step < nsub; ++step) {
        for (int j = 0; j < n; ++j) {
            const auto& br = cs.branches[j];
            if (!br.tcsc || !br.live || std::abs(B[j]) <= kSeverTol) continue;
            const TcscParams& prm = *br.tcsc;

            const double e = error_signal(p_e[j], br.sigma);
            const PidOutput pid = pid_control(e, bank.integ[j], bank.prev_e[j], prm, dt);
            const TcscStep st = step_tcsc(bank.xc[j], -pid.u, prm, dt);
            if (!st.clamped) bank.integ[j] = pid.integ_candidate;
            bank.prev_e[j] = e;
            bank.xc[j] = st.xc;
            B[j] = -1.0 / (st.xc + x_eff[j]);
        }
        p_e = solver.solve(B).p_e;
    }
    return p_e;
}

} // namespace gridcascade
