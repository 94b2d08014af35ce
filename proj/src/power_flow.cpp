#include "gridcascade/power_flow.hpp"
#include "gridcascade/errors.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <unordered_map>

namespace gridcascade {

namespace {

// Shared component labelling: returns (label per bus index, component count),
// labels numbered by ascending lowest bus index.  Buses are assumed stored in
// ascending-id order for the "lowest id" tie-breaks to coincide with index
// order; the loader guarantees this after validation.
std::pair<std::vector<int>, int> label_components(int n_bus,
                                                  const std::vector<int>& from_idx,
                                                  const std::vector<int>& to_idx,
                                                  const std::vector<char>& edge_live) {
    std::vector<std::vector<int>> adj(n_bus);
    for (std::size_t e = 0; e < from_idx.size(); ++e) {
        if (!edge_live[e]) continue;
        adj[from_idx[e]].push_back(to_idx[e]);
        adj[to_idx[e]].push_back(from_idx[e]);
    }
    std::vector<int> label(n_bus, -1);
    std::vector<int> stack;
    int next = 0;
    for (int s = 0; s < n_bus; ++s) {
        if (label[s] >= 0) continue;
        label[s] = next;
        stack.push_back(s);
        while (!stack.empty()) {
            int u = stack.back();
            stack.pop_back();
            for (int v : adj[u])
                if (label[v] < 0) {
                    label[v] = next;
                    stack.push_back(v);
                }
        }
        ++next;
    }
    return {std::move(label), next};
}

} // namespace

FlowSolver::FlowSolver(const NetworkCase& cs) : case_(&cs) {
    n_bus_ = static_cast<int>(cs.n_bus());
    n_branch_ = static_cast<int>(cs.n_branch());

    std::unordered_map<int, int> idx_of;
    idx_of.reserve(cs.n_bus());
    p_base_.resize(n_bus_);
    kind_.resize(n_bus_);
    bus_id_.resize(n_bus_);
    for (int i = 0; i < n_bus_; ++i) {
        idx_of[cs.buses[i].id] = i;
        p_base_[i] = cs.buses[i].p_injection;
        kind_[i] = cs.buses[i].kind;
        bus_id_[i] = cs.buses[i].id;
        if (cs.buses[i].kind == BusKind::Slack) slack_idx_ = i;
        if (i > 0 && !(cs.buses[i - 1].id < cs.buses[i].id))
            throw ValidationError("buses must be stored in ascending id order");
    }
    from_idx_.resize(n_branch_);
    to_idx_.resize(n_branch_);
    branch_live_.resize(n_branch_);
    for (int e = 0; e < n_branch_; ++e) {
        from_idx_[e] = idx_of.at(cs.branches[e].from_bus);
        to_idx_[e] = idx_of.at(cs.branches[e].to_bus);
        branch_live_[e] = cs.branches[e].live ? 1 : 0;
    }
}

Eigen::VectorXd FlowSolver::base_susceptance() const {
    Eigen::VectorXd B(n_branch_);
    for (int e = 0; e < n_branch_; ++e)
        B[e] = branch_live_[e] ? -1.0 / case_->branches[e].x : 0.0;
    return B;
}

FlowSolution FlowSolver::solve(const Eigen::VectorXd& B) const {
    std::vector<char> live(n_branch_);
    for (int e = 0; e < n_branch_; ++e)
        live[e] = branch_live_[e] && std::abs(B[e]) > kSeverTol;

    auto [label, n_comp] = label_components(n_bus_, from_idx_, to_idx_, live);

    FlowSolution sol;
    sol.theta = Eigen::VectorXd::Zero(n_bus_);
    sol.p_e = Eigen::VectorXd::Zero(n_branch_);
    sol.p_balanced = Eigen::VectorXd::Zero(n_bus_);
    sol.island_count = n_comp;

    // Group members and live branches per component.
    std::vector<std::vector<int>> members(n_comp), edges(n_comp);
    for (int i = 0; i < n_bus_; ++i) members[label[i]].push_back(i);
    for (int e = 0; e < n_branch_; ++e)
        if (live[e]) edges[label[from_idx_[e]]].push_back(e);

    std::vector<int> red(n_bus_, -1); // bus index -> reduced row, reset per island
    for (int c = 0; c < n_comp; ++c) {
        if (edges[c].empty()) continue; // isolated bus: angle stays 0
        const auto& comp = members[c];

        bool has_gen = false;
        int ref = comp.front(); // lowest index == lowest id
        for (int i : comp)
            if (kind_[i] == BusKind::Generator || kind_[i] == BusKind::Slack) {
                has_gen = true;
                break;
            }
        if (slack_idx_ >= 0 && label[slack_idx_] == c) {
            ref = slack_idx_;
        } else if (has_gen) {
            for (int i : comp)
                if (kind_[i] == BusKind::Generator) {
                    ref = i;
                    break;
                }
        }

        int n_red = 0;
        for (int i : comp)
            if (i != ref) red[i] = n_red++;
        if (n_red == 0) continue;

        // Rebalanced injections: the island reference absorbs the imbalance
        // when the island can generate; a load-only island is fully shed, so
        // its reduced rhs is identically zero.
        Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n_red);
        if (has_gen) {
            double others = 0.0;
            for (int i : comp)
                if (i != ref) {
                    rhs[red[i]] = p_base_[i];
                    sol.p_balanced[i] = p_base_[i];
                    others += p_base_[i];
                }
            sol.p_balanced[ref] = -others;
        }

        // Reduced nodal matrix N = A^T diag(B) A with the reference row and
        // column removed.  B is negative by convention, so -N is positive
        // definite on a connected island; factor that and flip the rhs.
        Eigen::MatrixXd N = Eigen::MatrixXd::Zero(n_red, n_red);
        for (int e : edges[c]) {
            const double b = B[e];
            const int fi = red[from_idx_[e]], ti = red[to_idx_[e]];
            if (fi >= 0) N(fi, fi) += b;
            if (ti >= 0) N(ti, ti) += b;
            if (fi >= 0 && ti >= 0) {
                N(fi, ti) -= b;
                N(ti, fi) -= b;
            }
        }

        Eigen::VectorXd th;
        Eigen::LLT<Eigen::MatrixXd> llt(-N);
        if (llt.info() == Eigen::Success) {
            th = llt.solve(-rhs);
        } else {
            th = N.partialPivLu().solve(rhs);
        }
        const double res = (N * th - rhs).norm();
        // Written as a negated <= so a NaN residual (e.g. zero-sum parallel
        // susceptances) also lands in the singular branch.
        if (!(res / std::max(1.0, rhs.norm()) <= 1e-8))
            throw SingularIsland("island containing bus " + std::to_string(bus_id_[ref]) +
                                 " is numerically singular");

        for (int i : comp)
            if (i != ref) sol.theta[i] = th[red[i]];
        sol.theta[ref] = 0.0;
        for (int i : comp) red[i] = -1;
    }

    for (int e = 0; e < n_branch_; ++e)
        if (live[e]) sol.p_e[e] = B[e] * (sol.theta[from_idx_[e]] - sol.theta[to_idx_[e]]);
    return sol;
}

IslandPartition island_decomposition(const NetworkCase& cs, const Eigen::VectorXd& B) {
    FlowSolver fs(cs); // validates ordering, builds index maps
    const int n_bus = static_cast<int>(cs.n_bus());
    const int n_branch = static_cast<int>(cs.n_branch());

    std::vector<int> from_idx(n_branch), to_idx(n_branch);
    std::unordered_map<int, int> idx_of;
    for (int i = 0; i < n_bus; ++i) idx_of[cs.buses[i].id] = i;
    std::vector<char> live(n_branch);
    for (int e = 0; e < n_branch; ++e) {
        from_idx[e] = idx_of.at(cs.branches[e].from_bus);
        to_idx[e] = idx_of.at(cs.branches[e].to_bus);
        live[e] = cs.branches[e].live && std::abs(B[e]) > kSeverTol;
    }
    auto [label, n_comp] = label_components(n_bus, from_idx, to_idx, live);

    IslandPartition part;
    part.islands.resize(n_comp);
    for (int i = 0; i < n_bus; ++i) part.islands[label[i]].buses.push_back(cs.buses[i].id);
    for (int e = 0; e < n_branch; ++e)
        if (live[e]) part.islands[label[from_idx[e]]].branch_rows.push_back(e);

    for (auto& isl : part.islands) {
        isl.reference_bus = isl.buses.front();
        bool slack_here = false;
        int lowest_gen = -1;
        for (int id : isl.buses) {
            const auto& b = cs.buses[idx_of.at(id)];
            if (b.kind == BusKind::Slack) {
                slack_here = true;
                isl.has_generation = true;
            }
            if (b.kind == BusKind::Generator) {
                isl.has_generation = true;
                if (lowest_gen < 0) lowest_gen = id;
            }
        }
        if (slack_here)
            isl.reference_bus = cs.slack_bus;
        else if (lowest_gen >= 0)
            isl.reference_bus = lowest_gen;
    }
    return part;
}

FlowSolution solve_flows(const NetworkCase& cs, const Eigen::VectorXd& B) {
    return FlowSolver(cs).solve(B);
}

} // namespace gridcascade
