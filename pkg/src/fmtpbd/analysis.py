"""Emission estimates and batch sensitivity sweeps written as CSV."""

from __future__ import annotations

import csv
import io
import math
from dataclasses import dataclass
from pathlib import Path

from .model import Instance, Location, UnservableCustomer, build_derived

DIESEL_KG_PER_L = 2.5479
BUS_L_PER_KM = 0.3
GRID_KG_PER_KWH = 0.3773
DRONE_KWH_PER_MILE = 0.1
TRUCK_KG_PER_MILE = 1.2603
MILES_PER_KM = 0.621371
HELD_KARP_LIMIT = 14
DEFAULT_FACTORS = (0.5, 1.0, 1.5, 2.0, 2.5, 3.0)


@dataclass(frozen=True)
class Emissions:
    bus: float
    drone: float

    @property
    def total(self) -> float:
        return self.bus + self.drone


def bus_emissions_km(km: float) -> float:
    return DIESEL_KG_PER_L * BUS_L_PER_KM * km


def drone_emissions_miles(miles: float) -> float:
    return GRID_KG_PER_KWH * DRONE_KWH_PER_MILE * miles


def truck_emissions_miles(miles: float) -> float:
    return TRUCK_KG_PER_MILE * miles


def emissions_bus_drone(solution, instance: Instance) -> Emissions:
    """Each bus counts terminal to the farthest stop where it drops parcels;
    each drone trip counts the round trip locker-customer-locker."""
    farthest: dict = {}
    for i, (b, s) in solution.assignment.items():
        farthest[b] = max(farthest.get(b, 0.0), instance.stop(s).route_km)
    km = 0.0
    for f in solution.all_flights():
        loc = instance.stop(f.stop).loc
        for t in f.trips:
            km += 2.0 * loc.distance(instance.customer(t.customer).loc)
    return Emissions(bus_emissions_km(sum(farthest.values())), drone_emissions_miles(km * MILES_PER_KM))


def _tour_length(pts, order) -> float:
    return sum(pts[a].distance(pts[b]) for a, b in zip(order, order[1:]))


def held_karp(pts: list[Location]) -> tuple[float, list[int]]:
    """Shortest closed tour from point 0 through all others (exact)."""
    n = len(pts)
    if n <= 1:
        return 0.0, [0, 0]
    m = n - 1
    d = [[pts[a].distance(pts[b]) for b in range(n)] for a in range(n)]
    full = (1 << m) - 1
    cost = [[math.inf] * m for _ in range(1 << m)]
    parent = [[-1] * m for _ in range(1 << m)]
    for k in range(m):
        cost[1 << k][k] = d[0][k + 1]
    for mask in range(1, 1 << m):
        row = cost[mask]
        for k in range(m):
            c = row[k]
            if c == math.inf or not mask >> k & 1:
                continue
            dk = d[k + 1]
            for j in range(m):
                if mask >> j & 1:
                    continue
                nm = mask | 1 << j
                v = c + dk[j + 1]
                if v < cost[nm][j]:
                    cost[nm][j] = v
                    parent[nm][j] = k
    best, last = min((cost[full][k] + d[k + 1][0], k) for k in range(m))
    order, mask = [], full
    while last != -1:
        order.append(last + 1)
        last, mask = parent[mask][last], mask & ~(1 << last)
    return best, [0, *reversed(order), 0]


def nearest_neighbour_2opt(pts: list[Location], improve: bool = True) -> tuple[float, list[int]]:
    n = len(pts)
    if n <= 1:
        return 0.0, [0, 0]
    left = set(range(1, n))
    order = [0]
    while left:
        cur = pts[order[-1]]
        nxt = min(left, key=lambda k: (cur.distance(pts[k]), k))
        order.append(nxt)
        left.remove(nxt)
    order.append(0)
    while improve:
        improve = False
        for a in range(1, n - 1):
            for b in range(a + 1, n):
                p, q, r, s = pts[order[a - 1]], pts[order[a]], pts[order[b]], pts[order[b + 1]]
                if p.distance(r) + q.distance(s) < p.distance(q) + r.distance(s) - 1e-12:
                    order[a : b + 1] = reversed(order[a : b + 1])
                    improve = True
    return _tour_length(pts, order), order


def truck_tour_km(instance: Instance) -> float:
    pts = [instance.terminal] + [c.loc for c in instance.customers]
    if len(instance.customers) <= HELD_KARP_LIMIT:
        return held_karp(pts)[0]
    return nearest_neighbour_2opt(pts)[0]


def emissions_truck(instance: Instance) -> float:
    """One truck visiting every customer from the terminal, deadlines ignored."""
    return truck_emissions_miles(truck_tour_km(instance) * MILES_PER_KM)


# ---- sweeps ---------------------------------------------------------------------

def run_solver(instance: Instance, algo: str = "hbpbc", time_limit: float = math.inf):
    from .baselines import oracle_solve, solve_so
    from .bpbc import solve

    if algo == "bpbc":
        return solve(instance, "exact", time_limit)
    if algo == "hbpbc":
        return solve(instance, "root", time_limit)
    if algo == "so":
        return solve_so(instance, time_limit)
    if algo == "oracle":
        return oracle_solve(instance)
    raise ValueError(f"unknown algorithm {algo!r}")


def _total_or_none(instance, algo, time_limit):
    try:
        build_derived(instance)
    except UnservableCustomer:
        return None
    sol = run_solver(instance, algo, time_limit)
    return sol.total if sol.has_incumbent else None


def sweep_costs(instance: Instance, bus_factors=DEFAULT_FACTORS, drone_factors=DEFAULT_FACTORS, algo="hbpbc", time_limit=math.inf):
    """Re-solve with scaled bus and drone operating rates; one row per cell."""
    if any(f <= 0 for f in (*bus_factors, *drone_factors)):
        raise ValueError("factors must be positive")
    p = instance.params
    rows = []
    for fb in bus_factors:
        for fd in drone_factors:
            scaled = instance.with_params(c_bus=p.c_bus * fb, c_drone=p.c_drone * fd)
            rows.append((fb, fd, _total_or_none(scaled, algo, time_limit)))
    return rows


def sweep_lockers(instance: Instance, locker_subsets, algo="hbpbc", time_limit=math.inf):
    """Re-solve with only the given stops equipped with lockers."""
    rows = []
    for subset in locker_subsets:
        ids = sorted(subset)
        unknown = set(ids) - {s.id for s in instance.stops}
        if unknown:
            raise ValueError(f"unknown stops {sorted(unknown)}")
        reduced = instance.with_stops(ids)
        total = _total_or_none(reduced, algo, time_limit) if ids else None
        rows.append((" ".join(map(str, ids)), len(ids), total))
    return rows


def _cell(v):
    if v is None:
        return ""
    if isinstance(v, float):
        return f"{v:.6f}"
    return str(v)


def csv_text(header, rows) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for r in rows:
        w.writerow([_cell(v) for v in r])
    return buf.getvalue()


def write_csv(path, header, rows) -> None:
    Path(path).write_text(csv_text(header, rows))


COST_HEADER = ("factor_bus", "factor_drone", "total")
LOCKER_HEADER = ("stops", "n_lockers", "total")
EMISSION_HEADER = ("mode", "bus_kg", "drone_kg", "truck_kg", "total_kg")
