#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "gridcascade/cascade.hpp"
#include "gridcascade/errors.hpp"
#include "gridcascade/network.hpp"
#include "gridcascade/power_flow.hpp"

#include <cmath>
#include <string>

using namespace gridcascade;

namespace {

std::string data_path(const char* name) {
    return std::string(GRIDCASCADE_DATA_DIR) + "/" + name;
}

// Generator at bus 1 feeding the load at bus 2 over two parallel branches.
NetworkCase parallel_corridor(double p, double x1, double x2, double s1, double s2,
                              bool tcsc_on_first = false, double xmax = 2.0,
                              double xref = 0.0) {
    NetworkCase cs;
    cs.slack_bus = 1;
    cs.buses = {{1, p, BusKind::Slack}, {2, -p, BusKind::Load}};
    BranchRecord a;
    a.id = 1;
    a.from_bus = 1;
    a.to_bus = 2;
    a.x = x1;
    a.sigma = s1;
    if (tcsc_on_first) {
        TcscParams t;
        t.tc = 0.05;
        t.xmin = 0.0;
        t.xref = xref;
        t.xmax = xmax;
        // No derivative action: at dt = 0.01 the default kick would slam
        // the device between its clamp rails instead of settling.
        t.kp = 0.5;
        t.ki = 2.0;
        t.kd = 0.0;
        a.tcsc = t;
    }
    BranchRecord b = a;
    b.id = 2;
    b.from_bus = 1;
    b.to_bus = 2;
    b.x = x2;
    b.sigma = s2;
    b.tcsc.reset();
    cs.branches = {a, b};
    return cs;
}

} // namespace

TEST_CASE("disturbance shifts susceptance and severs at the zero crossing") {
    NetworkCase cs = parallel_corridor(1.0, 0.5, 0.5, 5.0, 5.0);
    FlowSolver fs(cs);
    const Eigen::VectorXd B0 = fs.base_susceptance(); // both -2

    Eigen::VectorXd B = apply_disturbance(cs, B0, {1, 0.5});
    CHECK(B[0] == doctest::Approx(-1.5).epsilon(1e-15));
    CHECK(B[1] == -2.0);

    // Exactly cancelling the susceptance severs the branch outright.
    B = apply_disturbance(cs, B0, {1, 2.0});
    CHECK(B[0] == 0.0);

    CHECK_THROWS_AS(apply_disturbance(cs, B0, {9, 1.0}), ValidationError);

    Eigen::VectorXd Bdead = B0;
    Bdead[0] = 0.0;
    CHECK_THROWS_AS(apply_disturbance(cs, Bdead, {1, 1.0}), DisturbedBranchSevered);
}

TEST_CASE("quiet base case stops immediately with no outages") {
    NetworkCase cs = parallel_corridor(1.0, 0.2, 0.2, 1.0, 1.0); // flows 0.5 each
    CascadeConfig cfg;
    CascadeTrace tr = simulate_cascade(cs, {1, 0.0}, cfg);

    CHECK(tr.reason == StopReason::NoOverloads);
    CHECK(tr.outage_count() == 0);
    REQUIRE(tr.steps.size() == 1);
    CHECK(tr.steps[0].k == 1);
    CHECK(tr.steps[0].t == 1.0);
    CHECK(tr.steps[0].islands == 1);
    CHECK(tr.final_cost == doctest::Approx(0.5 * (0.25 + 0.25)).epsilon(1e-12));
}

TEST_CASE("bundled base case carries no overloads at zero disturbance") {
    NetworkCase cs = apply_hvdc(load_case(data_path("ieee118.json")));
    FlowSolver fs(cs);
    FlowSolution sol = fs.solve(fs.base_susceptance());
    for (std::size_t i = 0; i < cs.n_branch(); ++i)
        CHECK(std::abs(sol.p_e[i]) <= cs.branches[i].sigma);

    CascadeConfig cfg;
    CascadeTrace tr = simulate_cascade(cs, {8, 0.0}, cfg);
    CHECK(tr.reason == StopReason::NoOverloads);
    CHECK(tr.outage_count() == 0);
}

TEST_CASE("persistent overload trips strictly after the preset, at step 3") {
    // Branch 1 carries 1.0 against a 0.9 threshold from the start; branch 2
    // then inherits the full 1.5 against 0.8 and follows two steps later.
    NetworkCase cs = parallel_corridor(1.5, 0.1, 0.2, 0.9, 0.8);
    CascadeConfig cfg;
    cfg.relay_period = 0.5;
    CascadeTrace tr = simulate_cascade(cs, {1, 0.0}, cfg);

    REQUIRE(tr.steps.size() == 5);
    CHECK(tr.steps[0].tripped.empty());           // k=1: record only
    CHECK(tr.steps[1].tripped.empty());           // k=2: timer at T, not beyond
    CHECK(tr.steps[2].tripped == std::vector<int>{1}); // k=3: timer 2T > T
    CHECK(tr.steps[3].tripped.empty());           // k=4: successor timer at T
    CHECK(tr.steps[4].tripped == std::vector<int>{2}); // k=5

    // Time stamps are k*T and outage counts never decrease.
    for (std::size_t i = 0; i < tr.steps.size(); ++i) {
        CHECK(tr.steps[i].k == static_cast<int>(i) + 1);
        CHECK(tr.steps[i].t == doctest::Approx(0.5 * (i + 1)));
        if (i > 0) CHECK(tr.steps[i].out_cumulative >= tr.steps[i - 1].out_cumulative);
    }

    CHECK(tr.severed == std::vector<int>{1, 2});
    CHECK(tr.reason == StopReason::NoOverloads); // islanded load sheds, flows die
    CHECK(tr.final_islands == 2);
    CHECK(tr.final_cost == 0.0);
    CHECK(tr.end_time() == doctest::Approx(2.5));
}

TEST_CASE("step budget caps the cascade with max-steps") {
    NetworkCase cs = parallel_corridor(1.5, 0.1, 0.2, 0.9, 0.8);
    CascadeConfig cfg;
    cfg.m = 2; // too small for the first trip at k=3
    CascadeTrace tr = simulate_cascade(cs, {1, 0.0}, cfg);

    CHECK(tr.reason == StopReason::MaxSteps);
    CHECK(tr.steps.size() == 2);
    CHECK(tr.outage_count() == 0);
    CHECK(tr.end_time() == doctest::Approx(2.0));
}

TEST_CASE("severing disturbance counts as an outage at step one") {
    NetworkCase cs = parallel_corridor(1.0, 0.2, 0.2, 2.0, 2.0);
    CascadeConfig cfg;
    // delta = +5 exactly cancels B = -5 on branch 1.
    CascadeTrace tr = simulate_cascade(cs, {1, 5.0}, cfg);

    REQUIRE(!tr.steps.empty());
    CHECK(tr.steps[0].k == 1);
    CHECK(tr.steps[0].tripped == std::vector<int>{1});
    CHECK(tr.steps[0].out_cumulative == 1);
    CHECK(tr.steps[0].B[0] == 0.0);
    CHECK(tr.steps[0].p_e[0] == 0.0);
    CHECK(tr.steps[0].p_e[1] == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("series compensation averts the trip that strikes without it") {
    // Branch 1 runs at 0.7 against a 0.6 threshold.  Its device idles at a
    // setpoint of 0.5 extra reactance, which steers enough flow onto branch
    // 2 to duck the relay — but only when the control loop actually runs.
    NetworkCase with = parallel_corridor(1.4, 0.2, 0.2, 0.6, 2.0, true, 2.0, 0.5);
    CascadeConfig cfg;

    cfg.facts_enabled = false;
    CascadeTrace unprotected = simulate_cascade(with, {1, 0.0}, cfg);
    CHECK(unprotected.outage_count() == 1);
    CHECK(unprotected.severed == std::vector<int>{1});

    cfg.facts_enabled = true;
    CascadeTrace protected_run = simulate_cascade(with, {1, 0.0}, cfg);
    CHECK(protected_run.outage_count() == 0);
    CHECK(protected_run.reason == StopReason::NoOverloads);
    // The compensated corridor sheds the overload onto branch 2.
    const Eigen::VectorXd& pe = protected_run.steps.back().p_e;
    CHECK(std::abs(pe[0]) <= 0.6 + 1e-9);
    CHECK(std::abs(pe[1]) > 0.7);
}

TEST_CASE("partial cost tracks the recorded flows") {
    NetworkCase cs = parallel_corridor(1.5, 0.1, 0.2, 0.9, 0.8);
    CascadeConfig cfg;
    CascadeTrace tr = simulate_cascade(cs, {1, 0.0}, cfg);
    for (const auto& st : tr.steps)
        CHECK(st.j_partial == doctest::Approx(0.5 * st.p_e.squaredNorm()).epsilon(1e-12));
    CHECK(tr.final_cost == doctest::Approx(tr.steps.back().j_partial).epsilon(1e-12));
}
