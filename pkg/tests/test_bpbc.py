import itertools
import math

import pytest

from fmtpbd.baselines import oracle_solve
from fmtpbd.bpbc import (
    BranchAndPrice,
    LambdaArc,
    PiStop,
    PsiBus,
    SolveOptions,
    branch_values,
    fix_columns,
    node_lower_bound,
    node_restrictions,
    select_branch,
    solve,
)
from fmtpbd.benders import Master
from fmtpbd.columns import make_assignment, schedule_flight
from fmtpbd.instance_io import GeneratorConfig, generate
from fmtpbd.model import Bus, BusStop, Customer, Instance, Location, Params, build_derived
from fmtpbd.pricing import LOCKER
from cache import ALL_OFF, solved
from suite import oracle_suite
from tiny import one_customer


def test_one_customer_optimum():
    sol = solve(one_customer())
    assert sol.status == "Optimal"
    assert sol.total == pytest.approx(66)
    assert sol.assignment == {0: (0, 0)}
    assert sol.stats.lower_bound == pytest.approx(66)


def test_root_integral_capture():
    solver = BranchAndPrice(one_customer(), SolveOptions(warm_start=False))
    assert solver.ub == math.inf
    solver.process_node(solver._root())
    assert solver.ub == pytest.approx(66)
    assert solver.incumbent.algorithm == "capture"


def test_no_customers():
    inst = Instance(Location(0, 0), one_customer().stops, one_customer().buses, ())
    sol = solve(inst)
    assert (sol.status, sol.total) == ("Optimal", 0.0)


def test_select_branch_prefers_half():
    kind, (lo, hi) = select_branch({(0, 0): 0.5, (1, 0): 0.7, (2, 0): 1.0}, {}, {})
    assert kind == "Pi"
    assert (lo, hi) == (PiStop(0, 0, 0), PiStop(0, 0, 1))


def test_select_branch_hierarchy():
    kind, (lo, _) = select_branch({(0, 0): 1.0}, {(0, 1): 1.0}, {(LOCKER, 0, 0): 0.4})
    assert kind == "Lambda" and lo == LambdaArc(LOCKER, 0, 0, 0)
    kind, _ = select_branch({(0, 0): 1.0}, {(0, 1): 0.3}, {(LOCKER, 0, 0): 0.4})
    assert kind == "Psi"


def test_select_branch_integral():
    assert select_branch({(0, 0): 1.0}, {(0, 0): 1.0}, {(LOCKER, 0, 0): 1.0, (0, LOCKER, 0): 0.0}) is None


def test_select_branch_clips_over_coverage_and_skips_constrained():
    assert select_branch({(0, 0): 1.3}, {}, {}) is None
    pi = {(0, 0): 0.5, (1, 0): 0.2}
    kind, (lo, _) = select_branch(pi, {}, {}, frozenset({PiStop(0, 0, 1)}))
    assert lo == PiStop(1, 0, 0)


def test_node_lower_bound():
    assert node_lower_bound(100.0, {}) == 100.0
    assert node_lower_bound(100.0, {(0, 0): 1.0, (1, 0): 0.0}) == 100.0
    assert node_lower_bound(100.0, {(0, 0): -3.0, (1, 0): -2.0, (2, 0): 1.0}) == pytest.approx(95.0)


def test_fix_columns():
    assert fix_columns(95.0, math.inf, {(0, 0): 6.0}) == set()
    assert fix_columns(95.0, 100.0, {(0, 0): 6.0, (1, 0): 4.0, (2, 0): -1.0}) == {(0, 0)}


def test_branch_values():
    net = build_derived(one_customer())
    col = make_assignment(net, 0, 0, [0])
    f = schedule_flight(net, 0, [(0, 0)])
    pi, psi, lam = branch_values({col.key: col}, {col.key: 0.5}, {f.key: f}, {f.key: 0.5})
    assert pi == {(0, 0): 0.5} and psi == {(0, 0): 0.5}
    assert lam == {(LOCKER, 0, 0): 0.5, (0, LOCKER, 0): 0.5}


def test_node_restrictions():
    net = build_derived(oracle_suite()[40])
    c = net.instance.customers[0].id
    b, s = net.options(c)[0]
    R = node_restrictions(net, {PiStop(c, s, 1), PsiBus(c, b, 1)})
    assert R.allowed[c] == {(b, s)}
    assert c in R.assignment[(b, s)].required
    R = node_restrictions(net, {PiStop(c, s, 0)})
    assert all(bs[1] != s for bs in R.allowed[c])
    assert not node_restrictions(net, {LambdaArc(c, LOCKER, s, 0), LambdaArc(c, LOCKER, s, 1)}).feasible


def _capacity_conflict():
    # greedy puts A on stop 0, then B (only reachable from stop 0) no longer fits
    stops = (BusStop(0, Location(0, 0), 5.0), BusStop(1, Location(10, 0), 10.0))
    bus = Bus(0, {0: 20.0, 1: 40.0})
    custs = (Customer(0, Location(5, 0), 6.0, 200.0), Customer(1, Location(-4, 0), 6.0, 300.0))
    return Instance(Location(-5, 0), stops, (bus,), custs, Params())


def test_warm_start_single_customer():
    cols, flights, sol = BranchAndPrice(one_customer()).root_warm_start()
    assert [c.key for c in cols] == [(0, 0, (0,))]
    assert sol.total == pytest.approx(66)


def test_warm_start_fallback_pool():
    inst = _capacity_conflict()
    cols, flights, sol = BranchAndPrice(inst).root_warm_start()
    assert sol is None and flights == []
    assert sorted(c.key for c in cols) == [(0, 0, (0,)), (0, 0, (1,)), (0, 1, (0,))]
    got = solve(inst)
    assert got.status == "Optimal"
    assert got.total == pytest.approx(oracle_solve(inst).total)
    assert got.assignment == {0: (0, 1), 1: (0, 0)}


def test_restricted_ip_without_flights():
    solver = BranchAndPrice(one_customer(), SolveOptions())
    net = solver.net
    sol, res = solver.pool_ip([make_assignment(net, 0, 0, [0])], [], 5.0)
    assert sol is None and res.status == "Infeasible"
    assert solver.ub == math.inf


@pytest.mark.parametrize("idx", [i for i, inst in enumerate(oracle_suite()) if len(inst.customers) == 4][:5])
def test_restricted_ip_against_oracle(idx):
    inst = oracle_suite()[idx]
    opt = oracle_solve(inst)
    solver = BranchAndPrice(inst, SolveOptions())
    net = solver.net
    groups = {}
    for i, bs in opt.assignment.items():
        groups.setdefault(bs, []).append(i)
    optimal_cols = [make_assignment(net, b, s, g) for (b, s), g in groups.items()]
    subsets = []
    for st in inst.stops:
        for bus in inst.buses:
            cands = sorted(i for i, b in net.stop_pairs(st.id) if b == bus.id)
            for r in range(1, len(cands) + 1):
                for sub in itertools.combinations(cands, r):
                    if sum(net.demand(i) for i in sub) <= net.params.Q_S:
                        subsets.append(make_assignment(net, bus.id, st.id, sub))
    single_flights = [schedule_flight(net, s, [(c.id, b)]) for c in inst.customers for b, s in net.options(c.id)]
    sol, _ = solver.pool_ip(subsets, single_flights, 10.0)
    assert sol.total >= opt.total - 1e-6
    sol, _ = solver.pool_ip(subsets + optimal_cols, single_flights + list(opt.all_flights()), 10.0)
    assert sol.total == pytest.approx(opt.total, abs=1e-6)


def test_deterministic():
    inst = oracle_suite()[45]
    a, b = solve(inst), solve(inst)
    assert a.total == b.total and a.assignment == b.assignment
    assert a.stats.nodes == b.stats.nodes
    assert a.stats.run_log == b.stats.run_log


def test_time_limit():
    inst = generate(GeneratorConfig(n_stops=4, n_buses=4, n_customers=16, seed=2))
    sol = solve(inst, time_limit=0.2)
    assert sol.status == "TimeLimit"
    assert sol.stats.wall_time < 5.0
    if sol.has_incumbent:
        assert sol.stats.lower_bound <= sol.total + 1e-6


def test_node_limit():
    inst = generate(GeneratorConfig(n_stops=3, n_buses=3, n_customers=10, seed=7))
    sol = solve(inst, node_limit=1, **ALL_OFF)
    assert sol.stats.nodes <= 1
    assert sol.status in ("TimeLimit", "Optimal")


def test_root_mode_statuses():
    sol = solve(one_customer(), "root")
    assert (sol.status, sol.algorithm) == ("Optimal", "hbpbc")


def _pi_instance(k):
    return generate(GeneratorConfig(n_stops=2 + k % 2, n_buses=1 + k % 3, n_customers=4 + k % 3, seed=1000 + k))


@pytest.mark.parametrize("k, family", [(24, "Pi"), (27, "Lambda"), (95, "Psi")])
def test_branch_families_reach_oracle(k, family):
    inst = _pi_instance(k)
    sol = solve(inst, **ALL_OFF)
    kinds = {row[4] for row in sol.stats.run_log}
    assert family in kinds
    assert sol.total == pytest.approx(oracle_solve(inst).total, abs=1e-6)


def test_suite_exercises_psi_and_lambda():
    kinds = set()
    for idx in range(len(oracle_suite())):
        kinds |= {row[4] for row in solved("bpbc", idx).stats.run_log}
    assert {"Psi", "Lambda"} <= kinds


def test_cut_pool_contexts_are_per_stop():
    inst = _pi_instance(27)
    solver = BranchAndPrice(inst, SolveOptions(**ALL_OFF | {"warm_start": True}))
    solver.solve()
    for cut in solver.cut_pool:
        assert all(isinstance(c, LambdaArc) and c.stop == cut.stop for c in cut.lambda_context)
