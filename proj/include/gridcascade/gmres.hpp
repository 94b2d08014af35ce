#pragma once

#include <Eigen/Core>
#include <functional>

namespace gridcascade {

using MatVec = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct GmresReport {
    Eigen::VectorXd x;
    double residual = 0.0; // final ||A x - b||
    int iterations = 0;    // total inner iterations across cycles
    bool converged = false;
};

// Restarted GMRES over an arbitrary linear operator: Arnoldi with modified
// Gram-Schmidt, Givens rotations on the Hessenberg, happy breakdown treated
// as convergence.  Stops when the residual falls to tol * ||b|| (or tol when
// b = 0), or after max_cycles restart cycles of `restart` iterations each.
GmresReport gmres(const MatVec& apply, const Eigen::VectorXd& b, const Eigen::VectorXd& x0,
                  double tol, int restart, int max_cycles = 50);

} // namespace gridcascade
