#include "gridcascade/jfnk.hpp"

#include <cmath>

namespace gridcascade {

Eigen::VectorXd jvp(const ResidualFn& F, const Eigen::VectorXd& z, const Eigen::VectorXd& Fz,
                    const Eigen::VectorXd& v, double xi) {
    if (v.norm() == 0.0) return Eigen::VectorXd::Zero(Fz.size());
    return (F(z + xi * v) - Fz) / xi;
}

JfnkReport jfnk_solve(const ResidualFn& F, const Eigen::VectorXd& z0, const JfnkConfig& cfg) {
    JfnkReport rep;
    rep.z = z0;

    double best_norm = std::numeric_limits<double>::infinity();
    int stall = 0;

    for (int s = 0; s < cfg.max_newton; ++s) {
        const Eigen::VectorXd Fz = F(rep.z);
        const double fnorm = Fz.norm();

        if (fnorm < best_norm) {
            best_norm = fnorm;
            stall = 0;
        } else if (++stall >= 3) {
            rep.history.push_back({s, fnorm, 0.0});
            rep.status = JfnkStatus::NoProgress;
            return rep;
        }

        const double xi = cfg.xi_base * (1.0 + rep.z.norm());
        const Eigen::VectorXd z_snap = rep.z;
        MatVec apply = [&](const Eigen::VectorXd& v) { return jvp(F, z_snap, Fz, v, xi); };

        GmresReport g = gmres(apply, -Fz, Eigen::VectorXd::Zero(z0.size()), cfg.gmres_tol,
                              cfg.gmres_restart, /*max_cycles=*/10);

        const double znorm = std::max(rep.z.norm(), 1e-300);
        rep.z += g.x;
        const double eps = g.x.norm() / znorm;
        rep.history.push_back({s, fnorm, eps});

        if (eps <= cfg.eps_min) {
            rep.status = JfnkStatus::Converged;
            return rep;
        }
    }
    rep.status = JfnkStatus::MaxIterations;
    return rep;
}

} // namespace gridcascade
