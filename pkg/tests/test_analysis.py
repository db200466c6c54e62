import itertools
import math
import random

import pytest
from hypothesis import given, settings, strategies as st

from fmtpbd import analysis as an
from fmtpbd.baselines import oracle_solve
from fmtpbd.model import Location
from fmtpbd.solution import Solution
from suite import oracle_suite
from tiny import line_instance, one_customer, two_same_release

KM_PER_MILE = 1.609344


def test_bus_rate_per_km():
    assert an.bus_emissions_km(10.0) == pytest.approx(7.6437, abs=1e-4)


def test_drone_rate_per_mile():
    assert an.drone_emissions_miles(10.0) == pytest.approx(0.3773, abs=1e-4)


def test_truck_five_mile_customer():
    # terminal sits at x = -5; the customer is 5 miles away, 10 miles round trip
    inst = line_instance([(-5.0 + 5 * KM_PER_MILE, 0.0, 1.0, 300.0)])
    assert an.emissions_truck(inst) == pytest.approx(12.603, abs=1e-4)


def test_empty_solution_has_no_emissions():
    e = an.emissions_bus_drone(Solution("Feasible"), one_customer())
    assert e.bus == 0.0 and e.drone == 0.0 and e.total == 0.0


def test_bus_drone_emissions_one_customer():
    inst = one_customer()
    e = an.emissions_bus_drone(oracle_solve(inst), inst)
    assert e.bus == pytest.approx(an.bus_emissions_km(5.0))
    assert e.drone == pytest.approx(an.drone_emissions_miles(8.0 * an.MILES_PER_KM))


def test_bus_counted_once_to_farthest_stop():
    inst = two_same_release()
    e = an.emissions_bus_drone(oracle_solve(inst), inst)
    assert e.bus == pytest.approx(an.bus_emissions_km(5.0))


def _points(n, seed):
    rng = random.Random(seed)
    return [Location(rng.uniform(0, 10), rng.uniform(0, 10)) for _ in range(n)]


def _brute_tour(pts):
    best = math.inf
    for perm in itertools.permutations(range(1, len(pts))):
        order = (0, *perm, 0)
        best = min(best, sum(pts[a].distance(pts[b]) for a, b in zip(order, order[1:])))
    return best


@pytest.mark.parametrize("seed", range(8))
def test_held_karp_matches_permutations(seed):
    pts = _points(2 + seed % 6, seed)
    length, order = an.held_karp(pts)
    assert length == pytest.approx(_brute_tour(pts))
    assert order[0] == order[-1] == 0 and sorted(order[1:-1]) == list(range(1, len(pts)))


@pytest.mark.parametrize("seed", range(8))
def test_heuristic_tour_not_shorter_than_exact(seed):
    pts = _points(9, 100 + seed)
    h, order = an.nearest_neighbour_2opt(pts)
    assert h >= an.held_karp(pts)[0] - 1e-9
    assert sorted(order[1:-1]) == list(range(1, 9))
    assert h <= an.nearest_neighbour_2opt(pts, improve=False)[0] + 1e-9


coords = st.floats(min_value=-20, max_value=20, allow_nan=False)


@settings(max_examples=60, deadline=None)
@given(st.lists(st.tuples(coords, coords), min_size=1, max_size=7))
def test_tour_properties(raw):
    pts = [Location(x, y) for x, y in raw]
    exact, order = an.held_karp(pts)
    assert exact == pytest.approx(_brute_tour(pts) if len(pts) > 1 else 0.0, abs=1e-9)
    assert an.nearest_neighbour_2opt(pts)[0] >= exact - 1e-9


def test_degenerate_tours():
    assert an.held_karp([Location(0, 0)]) == (0.0, [0, 0])
    assert an.nearest_neighbour_2opt([Location(0, 0)])[0] == 0.0


def test_unit_factors_reproduce_baseline():
    inst = two_same_release()
    rows = an.sweep_costs(inst, (1.0,), (1.0,), algo="oracle")
    assert rows == [(1.0, 1.0, pytest.approx(oracle_solve(inst).total))]


def test_cost_sweep_grid_and_monotone():
    inst = oracle_suite()[0]
    rows = an.sweep_costs(inst, (1.0, 2.0), (1.0, 2.0), algo="oracle")
    assert [(a, b) for a, b, _ in rows] == [(1.0, 1.0), (1.0, 2.0), (2.0, 1.0), (2.0, 2.0)]
    t = {(a, b): v for a, b, v in rows}
    assert t[(2.0, 2.0)] >= max(t[(1.0, 2.0)], t[(2.0, 1.0)]) - 1e-9
    assert min(t[(1.0, 2.0)], t[(2.0, 1.0)]) >= t[(1.0, 1.0)] - 1e-9


def test_rejects_nonpositive_factor():
    with pytest.raises(ValueError):
        an.sweep_costs(one_customer(), (0.0,), (1.0,))


def test_doubling_holding_rate_doubles_holding():
    inst = two_same_release()
    base = oracle_solve(inst)
    assert base.cost.holding == pytest.approx(14.0)
    doubled = oracle_solve(inst.with_params(f_H=2 * inst.params.f_H))
    assert doubled.cost.holding == pytest.approx(28.0)


def test_locker_sweep_rows():
    inst = next(i for i in oracle_suite() if len(i.stops) >= 2)
    ids = [s.id for s in inst.stops]
    rows = an.sweep_lockers(inst, [ids, ids[:1], []], algo="oracle")
    assert rows[0][:2] == (" ".join(map(str, ids)), len(ids))
    assert rows[0][2] == pytest.approx(oracle_solve(inst).total)
    assert rows[2] == ("", 0, None)
    assert rows[1][2] is None or rows[1][2] >= rows[0][2] - 1e-9


def test_locker_sweep_unknown_stop():
    with pytest.raises(ValueError):
        an.sweep_lockers(one_customer(), [[7]])


def test_csv_text():
    text = an.csv_text(an.LOCKER_HEADER, [("0 1", 2, 12.5), ("0", 1, None)])
    assert text == "stops,n_lockers,total\n0 1,2,12.500000\n0,1,\n"


def test_write_csv(tmp_path):
    p = tmp_path / "c.csv"
    an.write_csv(p, an.COST_HEADER, [(1.0, 1.0, 3.0)])
    assert p.read_text().splitlines() == ["factor_bus,factor_drone,total", "1.000000,1.000000,3.000000"]


def test_unknown_algorithm():
    with pytest.raises(ValueError):
        an.run_solver(one_customer(), "tabu")
