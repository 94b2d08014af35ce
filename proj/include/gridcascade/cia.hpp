#pragma once

#include "gridcascade/cascade.hpp"
#include "gridcascade/jfnk.hpp"
#include "gridcascade/kkt.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace gridcascade {

struct RestartLog {
    int l = 0;
    Vec7 z0 = Vec7::Zero();
    double delta_candidate = 0.0; // after clamping into bounds
    double j_candidate = 0.0;
    bool accepted = false;
    std::string status; // converged / no-progress / max-iterations / failed: <why>
};

struct IdentificationResult {
    int branch = 0;
    DisturbanceBounds bounds;
    double best_delta = 0.0;
    double best_cost = 0.0;
    std::vector<RestartLog> restarts;
    CascadeTrace trace_of_best;
};

// Multi-start identification of the worst in-bounds disturbance on one
// branch.  The no-disturbance baseline (delta = 0) seeds the incumbent; each
// restart draws delta0 uniformly from the bounds (seeded, reproducible),
// builds a bound-consistent start vector, runs the matrix-free Newton solve,
// clamps the returned delta into bounds, and accepts only strict
// improvements.  Restarts that throw (e.g. a singular island mid-cascade)
// are logged and skipped.
IdentificationResult identify(const NetworkCase& cs, int branch, DisturbanceBounds bounds,
                              const CascadeConfig& cascade_cfg, const JfnkConfig& solver_cfg,
                              int l_max, std::uint64_t seed);

struct SweepPoint {
    double delta = 0.0;
    double j = 0.0;
    bool ok = false;
    std::string error;
};

struct SweepResult {
    std::vector<SweepPoint> points;
    int argmin_index = -1; // over successful points; -1 when none
};

// Brute-force grid oracle: J over n_grid uniform points spanning the bounds
// (endpoints included).  Per-point failures are recorded, not fatal.  jobs>1
// evaluates points on a small thread pool; output order stays deterministic.
SweepResult sweep(const NetworkCase& cs, int branch, DisturbanceBounds bounds, int n_grid,
                  const CascadeConfig& cascade_cfg, int jobs = 1);

} // namespace gridcascade
