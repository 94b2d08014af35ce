#include "gridcascade/cia.hpp"
#include "gridcascade/errors.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>
#include <thread>

namespace gridcascade {

namespace {

// 53-bit uniform in [0, 1); spelled out so the draw sequence is identical on
// every platform for a given seed.
double uniform01(std::mt19937_64& rng) { return (rng() >> 11) * 0x1.0p-53; }

} // namespace

IdentificationResult identify(const NetworkCase& cs, int branch, DisturbanceBounds bounds,
                              const CascadeConfig& cascade_cfg, const JfnkConfig& solver_cfg,
                              int l_max, std::uint64_t seed) {
    if (l_max < 1) throw std::invalid_argument("identify: at least one restart is required");
    if (!(bounds.lo <= bounds.hi))
        throw std::invalid_argument("identify: bounds must satisfy lo <= hi");

    KktSystem sys(cs, branch, bounds, cascade_cfg, solver_cfg);

    IdentificationResult res;
    res.branch = branch;
    res.bounds = bounds;
    res.best_delta = 0.0;
    res.best_cost = sys.objective(0.0); // no-disturbance baseline is always a candidate

    ResidualFn F = [&sys](const Eigen::VectorXd& z) -> Eigen::VectorXd {
        return sys.residual(Vec7(z));
    };

    std::mt19937_64 rng(seed);
    for (int l = 0; l < l_max; ++l) {
        RestartLog log;
        log.l = l;

        const double d0 = bounds.lo + (bounds.hi - bounds.lo) * uniform01(rng);
        Vec7 z0 = Vec7::Zero();
        z0[0] = d0;
        z0[3] = std::sqrt(std::max(bounds.hi - d0, 0.0)); // x1 consistent with slack eq.
        z0[4] = std::sqrt(std::max(d0 - bounds.lo, 0.0)); // x2 likewise
        log.z0 = z0;

        try {
            JfnkReport rep = jfnk_solve(F, z0, solver_cfg);
            log.status = to_string(rep.status);
            const double clamped = std::clamp(rep.z[0], bounds.lo, bounds.hi);
            log.delta_candidate = clamped;
            log.j_candidate = sys.objective(clamped);
            if (log.j_candidate < res.best_cost) {
                res.best_cost = log.j_candidate;
                res.best_delta = clamped;
                log.accepted = true;
            }
        } catch (const std::exception& e) {
            log.status = std::string("failed: ") + e.what();
        }
        res.restarts.push_back(std::move(log));
    }

    res.trace_of_best = simulate_cascade(cs, Disturbance{branch, res.best_delta}, cascade_cfg);
    return res;
}

SweepResult sweep(const NetworkCase& cs, int branch, DisturbanceBounds bounds, int n_grid,
                  const CascadeConfig& cascade_cfg, int jobs) {
    if (n_grid < 2) throw std::invalid_argument("sweep: need at least the two endpoints");

    SweepResult res;
    res.points.resize(n_grid);
    const double span = bounds.hi - bounds.lo;

    auto eval_range = [&](int begin, int end) {
        for (int i = begin; i < end; ++i) {
            auto& pt = res.points[i];
            pt.delta = bounds.lo + span * i / (n_grid - 1);
            try {
                CascadeTrace tr = simulate_cascade(cs, Disturbance{branch, pt.delta}, cascade_cfg);
                pt.j = tr.final_cost;
                pt.ok = true;
            } catch (const std::exception& e) {
                pt.error = e.what();
            }
        }
    };

    jobs = std::max(1, jobs);
    if (jobs == 1) {
        eval_range(0, n_grid);
    } else {
        std::vector<std::thread> pool;
        const int chunk = (n_grid + jobs - 1) / jobs;
        for (int t = 0; t < jobs; ++t) {
            const int b = t * chunk, e = std::min(n_grid, b + chunk);
            if (b < e) pool.emplace_back(eval_range, b, e);
        }
        for (auto& th : pool) th.join();
    }

    for (int i = 0; i < n_grid; ++i)
        if (res.points[i].ok &&
            (res.argmin_index < 0 || res.points[i].j < res.points[res.argmin_index].j))
            res.argmin_index = i;
    return res;
}

} // namespace gridcascade
