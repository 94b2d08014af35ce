#pragma once

#include "gridcascade/network.hpp"

#include <Eigen/Core>
#include <vector>

namespace gridcascade {

// Susceptance entries at or below this magnitude mean "severed".
inline constexpr double kSeverTol = 1e-12;

struct Island {
    std::vector<int> buses;        // bus ids, ascending
    std::vector<int> branch_rows;  // indices into NetworkCase::branches
    bool has_generation = false;   // any generator- or slack-kind bus
    int reference_bus = 0;         // bus id whose angle is fixed to zero
};

struct IslandPartition {
    std::vector<Island> islands;
    std::size_t count() const { return islands.size(); }
};

struct FlowSolution {
    Eigen::VectorXd theta;      // bus angles, case bus order
    Eigen::VectorXd p_e;        // branch flows, case branch order; 0 on severed rows
    Eigen::VectorXd p_balanced; // post-rebalance injections actually solved against
    int island_count = 0;
};

// Connected components of the live-branch graph (live flag AND |B| > tol),
// including isolated buses as singleton islands.  Islands are ordered by
// their lowest bus id; each island's reference is the global slack when
// present, else its lowest-id generator bus, else its lowest bus id.
IslandPartition island_decomposition(const NetworkCase& cs, const Eigen::VectorXd& B);

// Repeated-solve helper: binds to one case, then solves many susceptance
// states against it.  Per island: fix theta = 0 at the reference, rebalance
// injections (reference absorbs the island imbalance when generation is
// present; load-only islands shed to zero), factor the reduced nodal matrix,
// and back out branch flows P_e = diag(B) A theta.
class FlowSolver {
public:
    explicit FlowSolver(const NetworkCase& cs);

    FlowSolution solve(const Eigen::VectorXd& B) const;

    // Baseline susceptances from branch data: -1/x on live rows, 0 otherwise.
    Eigen::VectorXd base_susceptance() const;

    const NetworkCase& network() const { return *case_; }

private:
    const NetworkCase* case_;
    int n_bus_ = 0, n_branch_ = 0;
    std::vector<int> from_idx_, to_idx_; // branch endpoints as bus indices
    std::vector<char> branch_live_;
    Eigen::VectorXd p_base_;
    std::vector<BusKind> kind_;
    std::vector<int> bus_id_;    // bus id per index
    int slack_idx_ = -1;
};

// One-shot convenience wrappers used by tests and small callers.
FlowSolution solve_flows(const NetworkCase& cs, const Eigen::VectorXd& B);

} // namespace gridcascade
