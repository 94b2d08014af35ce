#include "gridcascade/gmres.hpp"

#include <cmath>
#include <vector>

namespace gridcascade {

GmresReport gmres(const MatVec& apply, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                  double tol, int restart, int max_cycles) {
    const auto n = b.size();
    GmresReport rep;
    rep.x = x0;

    const double bnorm = b.norm();
    const double target = tol * (bnorm > 0.0 ? bnorm : 1.0);

    for (int cycle = 0; cycle < max_cycles; ++cycle) {
        Eigen::VectorXd r = b - apply(rep.x);
        double beta = r.norm();
        rep.residual = beta;
        if (beta <= target) {
            rep.converged = true;
            return rep;
        }

        const int m = restart;
        std::vector<Eigen::VectorXd> V;
        V.reserve(m + 1);
        V.push_back(r / beta);
        Eigen::MatrixXd H = Eigen::MatrixXd::Zero(m + 1, m);
        Eigen::VectorXd cs = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd sn = Eigen::VectorXd::Zero(m);
        Eigen::VectorXd g = Eigen::VectorXd::Zero(m + 1);
        g[0] = beta;

        int k = 0;
        bool done = false;
        for (; k < m; ++k) {
            Eigen::VectorXd w = apply(V[k]);
            for (int i = 0; i <= k; ++i) { // modified Gram-Schmidt
                H(i, k) = w.dot(V[i]);
                w -= H(i, k) * V[i];
            }
            const double h_next = w.norm();
            H(k + 1, k) = h_next;

            // Apply the accumulated rotations to the new column, then zero
            // its subdiagonal with a fresh rotation.
            for (int i = 0; i < k; ++i) {
                const double t = cs[i] * H(i, k) + sn[i] * H(i + 1, k);
                H(i + 1, k) = -sn[i] * H(i, k) + cs[i] * H(i + 1, k);
                H(i, k) = t;
            }
            const double denom = std::hypot(H(k, k), H(k + 1, k));
            cs[k] = denom == 0.0 ? 1.0 : H(k, k) / denom;
            sn[k] = denom == 0.0 ? 0.0 : H(k + 1, k) / denom;
            H(k, k) = denom;
            H(k + 1, k) = 0.0;
            g[k + 1] = -sn[k] * g[k];
            g[k] = cs[k] * g[k];

            ++rep.iterations;
            const bool happy = h_next <= 1e-14 * std::max(1.0, beta); // invariant subspace
            if (std::abs(g[k + 1]) <= target || happy) {
                ++k;
                done = true;
                break;
            }
            V.push_back(w / h_next);
        }

        // Back-substitute the k-dimensional least-squares system.
        Eigen::VectorXd y(k);
        for (int i = k - 1; i >= 0; --i) {
            double s = g[i];
            for (int j = i + 1; j < k; ++j) s -= H(i, j) * y[j];
            y[i] = H(i, i) == 0.0 ? 0.0 : s / H(i, i); // zero pivot: rank-deficient operator
        }
        for (int i = 0; i < k; ++i) rep.x += y[i] * V[i];

        rep.residual = (b - apply(rep.x)).norm();
        if (done || rep.residual <= target) {
            rep.converged = true;
            return rep;
        }
    }
    return rep;
}

} // namespace gridcascade
