#pragma once

#include "gridcascade/gmres.hpp"
#include "gridcascade/kkt.hpp"

#include <Eigen/Core>
#include <functional>
#include <vector>

namespace gridcascade {

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

enum class JfnkStatus { Converged, NoProgress, MaxIterations };

inline const char* to_string(JfnkStatus s) {
    switch (s) {
        case JfnkStatus::Converged: return "converged";
        case JfnkStatus::NoProgress: return "no-progress";
        default: return "max-iterations";
    }
}

struct JfnkIteration {
    int s = 0;
    double residual_norm = 0.0; // ||F(z^s)||
    double eps = 0.0;           // ||dz^s|| / ||z^s||
};

struct JfnkReport {
    Eigen::VectorXd z;
    JfnkStatus status = JfnkStatus::MaxIterations;
    std::vector<JfnkIteration> history;
};

// Matrix-free directional derivative (F(z + xi v) - F(z)) / xi.
Eigen::VectorXd jvp(const ResidualFn& F, const Eigen::VectorXd& z, const Eigen::VectorXd& Fz,
                    const Eigen::VectorXd& v, double xi);

// Newton iteration with GMRES inner solves over the jvp operator.  Each step
// solves J dz = -F from a zero initial guess and applies the full update.
// Terminates when ||dz||/||z|| falls to eps_min; reports no-progress when
// the residual norm fails to improve three times in a row.  The returned z
// is always the best-effort iterate, usable by the caller regardless of
// status.
JfnkReport jfnk_solve(const ResidualFn& F, const Eigen::VectorXd& z0, const JfnkConfig& cfg);

} // namespace gridcascade
