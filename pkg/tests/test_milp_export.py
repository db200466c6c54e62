import dataclasses
import math

import numpy as np
import pytest
from scipy.optimize import Bounds, LinearConstraint, milp

from fmtpbd import milp_export as mx
from fmtpbd.baselines import oracle_solve
from fmtpbd.bpbc import solve
from fmtpbd.model import build_derived
from suite import oracle_suite
from tiny import line_instance, one_customer, two_same_release


def _kinds(violations):
    return {str(v).split(":")[0] for v in violations}


def _solve_parsed(parsed):
    """Solve a parsed LP file with HiGHS; returns the optimal objective."""
    names = sorted(set(parsed.objective) | {v for co, _, _ in parsed.rows.values() for v in co} | set(parsed.binaries) | set(parsed.bounds))
    idx = {v: k for k, v in enumerate(names)}
    c = np.array([parsed.objective.get(v, 0.0) for v in names])
    A = np.zeros((len(parsed.rows), len(names)))
    lo = np.full(len(parsed.rows), -np.inf)
    hi = np.full(len(parsed.rows), np.inf)
    for r, (co, sense, rhs) in enumerate(parsed.rows.values()):
        for v, a in co.items():
            A[r, idx[v]] = a
        if sense in ("<=", "="):
            hi[r] = rhs
        if sense in (">=", "="):
            lo[r] = rhs
    binary = set(parsed.binaries)
    vlo = np.zeros(len(names))
    vhi = np.array([1.0 if v in binary else np.inf for v in names])
    integrality = np.array([1 if v in binary else 0 for v in names])
    res = milp(c, constraints=LinearConstraint(A, lo, hi), bounds=Bounds(vlo, vhi), integrality=integrality)
    return res.fun if res.success else math.inf


def test_one_customer_has_single_assignment_variable():
    m = mx.build_milp1(one_customer())
    xs = [v for v in m.binaries if v.startswith("x_")]
    assert xs == [mx.x_name(0, 0, 0)]
    visit = [r for r in m.rows() if r.kind == "visit"]
    assert len(visit) == 1
    assert visit[0].coeffs == {mx.x_name(0, 0, 0): 1.0}
    assert visit[0].sense == "=" and visit[0].rhs == 1.0


def test_big_m_start_value():
    # arrival 20, loading 1, takeoff 1, flight 6
    net = build_derived(one_customer())
    assert mx.big_m_start(net, 0, 0, 0) == pytest.approx(28.0)


def test_big_m_nonnegative_everywhere():
    for inst in oracle_suite()[:10]:
        m = mx.build_milp1(inst)
        for s, i, b in m.pairs:
            assert mx.big_m_start(m.net, s, i, b) >= 0
            assert mx.big_m_holding(m.net, s, i, b) >= 0


def test_drone_count_equals_reachable_customers():
    m = mx.build_milp1(two_same_release())
    assert m.drones == {0: 2}
    assert sum(v.startswith("z_") for v in m.binaries) == 2


def test_incumbent_passes_checker():
    inst = two_same_release()
    sol = solve(inst, "exact")
    assert mx.check_solution_feasible(sol, inst) == []


def test_late_service_breaks_deadline_row():
    inst = one_customer(deadline=40.0)
    sol = oracle_solve(inst)
    f = sol.flights[0][0]
    t = f.trips[0]
    late = dataclasses.replace(t, service_start=inst.customer(0).deadline + 1)
    sol.flights[0][0] = dataclasses.replace(f, trips=(late,))
    assert "DeadlineRow(0)" in _kinds(mx.check_solution_feasible(sol, inst))


def test_missing_customer_breaks_visit_row():
    inst = two_same_release()
    sol = oracle_solve(inst)
    del sol.assignment[1]
    assert "VisitRow(1)" in _kinds(mx.check_solution_feasible(sol, inst))


def test_trip_on_wrong_bus_is_reported():
    inst = line_instance([(4.0, 0.0, 1.0, 300.0)], arrivals=(20.0, 60.0))
    sol = oracle_solve(inst)
    assert mx.check_solution_feasible(sol, inst) == []
    b, s = sol.assignment[0]
    sol.assignment[0] = (1 - b, s)
    kinds = _kinds(mx.check_solution_feasible(sol, inst))
    assert "TripAssignmentRow(0)" in kinds


def test_wrong_reported_cost_breaks_identity():
    inst = one_customer()
    sol = oracle_solve(inst)
    sol.cost = dataclasses.replace(sol.cost, bus=sol.cost.bus + 1.0)
    assert "CostIdentityRow()" in _kinds(mx.check_solution_feasible(sol, inst))


def test_lp_text_round_trip():
    m = mx.build_milp1(oracle_suite()[0])
    parsed = mx.parse_lp(mx.lp_text(m))
    rows = list(m.rows())
    assert len(parsed.rows) == len(rows)
    for r in rows:
        co, sense, rhs = parsed.rows[r.name]
        assert sense == r.sense and rhs == r.rhs
        assert co == {v: a for v, a in r.coeffs.items() if a != 0}
    assert parsed.objective == {v: a for v, a in m.objective.items() if a != 0}
    assert parsed.binaries == m.binaries
    assert set(parsed.bounds) == set(m.continuous)


def test_lp_file_written(tmp_path):
    m = mx.build_milp1(one_customer())
    path = tmp_path / "m.lp"
    mx.export_lp_file(m, path)
    assert mx.read_lp_file(path).binaries == m.binaries


def test_parse_rejects_garbage():
    with pytest.raises(ValueError):
        mx.parse_lp("x + y <= 3\n")


def test_objective_value_matches_oracle_total():
    for inst in oracle_suite()[:10]:
        sol = oracle_solve(inst)
        m = mx.build_milp1(inst)
        vals, issues = mx.solution_values(sol, m)
        assert issues == []
        assert mx.objective_value(m, vals) == pytest.approx(sol.total, abs=1e-6)


@pytest.mark.parametrize("k", range(6))
def test_exported_model_optimum_equals_oracle(k):
    inst = oracle_suite()[k]
    parsed = mx.parse_lp(mx.lp_text(mx.build_milp1(inst)))
    assert _solve_parsed(parsed) == pytest.approx(oracle_solve(inst).total, abs=1e-5)


def test_tiny_exported_optimum():
    assert _solve_parsed(mx.parse_lp(mx.lp_text(mx.build_milp1(one_customer())))) == pytest.approx(66.0)
