#include "gridcascade/kkt.hpp"

namespace gridcascade {

KktSystem::KktSystem(const NetworkCase& cs, int branch, DisturbanceBounds bounds,
                     CascadeConfig cascade_cfg, JfnkConfig cfg)
    : case_(&cs), branch_(branch), bounds_(bounds), cascade_(cascade_cfg), cfg_(cfg) {}

const Eigen::VectorXd& KktSystem::final_flows(double delta) {
    auto it = flow_memo_.find(delta);
    if (it != flow_memo_.end()) return it->second;
    CascadeTrace tr = simulate_cascade(*case_, Disturbance{branch_, delta}, cascade_);
    ++sims_;
    return flow_memo_.emplace(delta, tr.steps.back().p_e).first->second;
}

double KktSystem::objective(double delta) { return 0.5 * final_flows(delta).squaredNorm(); }

Eigen::VectorXd KktSystem::sensitivity_vector(double delta) {
    const double eps = cfg_.eps_sens;
    // Forward probe unless it would exit the interval; then probe backward.
    if (delta + eps > bounds_.hi) {
        Eigen::VectorXd hi = final_flows(delta);
        Eigen::VectorXd lo = final_flows(delta - eps);
        return (hi - lo) / eps;
    }
    Eigen::VectorXd hi = final_flows(delta + eps);
    Eigen::VectorXd lo = final_flows(delta);
    return (hi - lo) / eps;
}

Vec7 KktSystem::residual(const Vec7& z) {
    const double delta = z[0], mu1 = z[1], mu2 = z[2];
    const double x1 = z[3], x2 = z[4], y1 = z[5], y2 = z[6];

    const double sens = final_flows(delta).dot(sensitivity_vector(delta));

    Vec7 F;
    F[0] = sens + mu1 - mu2;
    F[1] = delta - bounds_.hi + x1 * x1;
    F[2] = delta - bounds_.lo - x2 * x2;
    F[3] = mu1 * (delta - bounds_.hi);
    F[4] = mu2 * (delta - bounds_.lo);
    F[5] = mu1 - y1 * y1;
    F[6] = mu2 - y2 * y2;
    return F;
}

} // namespace gridcascade
