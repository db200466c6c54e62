"""Reference solvers: the exhaustive oracle for tiny instances and the
sequential (assign first, schedule drones second) baseline."""

from __future__ import annotations

import math
import time
from functools import lru_cache

from .columns import schedule_flight
from .lp_core import EQ, LE, Constraint, solve_ip_pool
from .model import DerivedNetwork, FmtpError, Instance, UnservableCustomer, build_derived
from .solution import Solution, SolveStats, build_solution, infeasible

MAX_ORACLE_CUSTOMERS = 7
MAX_ORACLE_PAIRS = 9
EXACT_STOP_LIMIT = 8
PARTITION_LIMIT = 12
SEQUENCE_CAP = 200_000


class TooLarge(FmtpError):
    pass


def best_flight_orders(net: DerivedNetwork, s: int, pairs, cap: int | None = None) -> dict:
    """For every subset (bitmask over ``pairs``) the cheapest feasible ordering:
    mask -> (cost, ordered pairs).  Infeasible subsets are absent.

    Raises TooLarge once more than ``cap`` feasible sequences have been seen.
    """
    pairs = list(pairs)
    p = net.params
    info = [
        (net.release[(i, b, s)], p.tau_S + net.tau[(s, i)], net.deadline(i), net.delta[(s, i)], p.f_H * net.demand(i))
        for i, b in pairs
    ]
    best: dict = {}
    seen = [0]

    def dfs(mask, order, avail, dur, cost):
        if mask:
            seen[0] += 1
            if cap is not None and seen[0] > cap:
                raise TooLarge(f"more than {cap} flight sequences at stop {s}")
            cur = best.get(mask)
            if cur is None or cost < cur[0] - 1e-12:
                best[mask] = (cost, tuple(order))
        for k, (e, to, dl, d, hq) in enumerate(info):
            if mask >> k & 1:
                continue
            start = max(avail, e)
            if start + to > dl + 1e-9 or dur + d > p.Delta + 1e-9:
                continue
            order.append(pairs[k])
            dfs(mask | 1 << k, order, start + d, dur + d, cost + hq * (start - e))
            order.pop()

    dfs(0, [], 0.0, 0.0, p.f_F)
    return best


def best_stop_schedule(net: DerivedNetwork, s: int, pairs, cap: int | None = None) -> tuple[float, list]:
    """Exact minimum drone cost at stop ``s`` for a fixed set of (i, b) pairs:
    every partition into flights and every order within each flight."""
    pairs = sorted(pairs)
    if not pairs:
        return 0.0, []
    seq = best_flight_orders(net, s, pairs, cap)
    n = len(pairs)

    @lru_cache(maxsize=None)
    def part(mask):
        if mask == 0:
            return 0.0, ()
        low = mask & -mask
        best = (math.inf, ())
        sub = mask
        while sub:
            if sub & low and sub in seq:
                rest = part(mask ^ sub)
                c = seq[sub][0] + rest[0]
                if c < best[0] - 1e-12:
                    best = (c, (seq[sub][1],) + rest[1])
            sub = (sub - 1) & mask
        return best

    cost, orders = part((1 << n) - 1)
    return cost, [schedule_flight(net, s, o) for o in orders]


def oracle_solve(instance: Instance) -> Solution:
    """Exhaustive search over assignments, flight partitions and orders."""
    t0 = time.monotonic()
    n_pairs = len(instance.buses) * len(instance.stops)
    if len(instance.customers) > MAX_ORACLE_CUSTOMERS or n_pairs > MAX_ORACLE_PAIRS:
        raise TooLarge(
            f"oracle limited to {MAX_ORACLE_CUSTOMERS} customers and {MAX_ORACLE_PAIRS} bus-stop pairs"
        )
    try:
        net = build_derived(instance)
    except UnservableCustomer:
        return infeasible("oracle")
    p = net.params
    custs = sorted(instance.customers, key=lambda c: len(net.options(c.id)))
    stop_cache: dict = {}

    def stop_cost(s, pairs: frozenset):
        key = (s, pairs)
        if key not in stop_cache:
            stop_cache[key] = best_stop_schedule(net, s, pairs)[0]
        return stop_cache[key]

    best = [math.inf, None]
    assign: dict = {}
    at_stop = {st.id: frozenset() for st in instance.stops}
    load_bus = {b.id: 0.0 for b in instance.buses}
    load_pair: dict = {}

    def dfs(k, acost):
        drone = sum(stop_cost(s, prs) for s, prs in at_stop.items() if prs)
        if acost + drone >= best[0] - 1e-9:
            return
        if k == len(custs):
            best[0] = acost + drone
            best[1] = dict(assign)
            return
        c = custs[k]
        for b, s in net.options(c.id):
            if load_bus[b] + c.demand > p.Q_B + 1e-9 or load_pair.get((b, s), 0.0) + c.demand > p.Q_S + 1e-9:
                continue
            load_bus[b] += c.demand
            load_pair[(b, s)] = load_pair.get((b, s), 0.0) + c.demand
            assign[c.id] = (b, s)
            prev = at_stop[s]
            at_stop[s] = prev | {(c.id, b)}
            dfs(k + 1, acost + net.c1[(b, s)] * c.demand + net.c2[(s, c.id)])
            at_stop[s] = prev
            del assign[c.id]
            load_bus[b] -= c.demand
            load_pair[(b, s)] -= c.demand

    dfs(0, 0.0)
    if best[1] is None:
        return infeasible("oracle")
    return _assemble(net, best[1], "Optimal", "oracle", t0)


def _assemble(net, assignment, status, algo, t0, lb=None):
    flights = []
    by_stop: dict = {}
    for i, (b, s) in assignment.items():
        by_stop.setdefault(s, []).append((i, b))
    for s, prs in sorted(by_stop.items()):
        flights.extend(best_stop_schedule(net, s, prs)[1])
    sol = build_solution(net, assignment, flights, status, algorithm=algo)
    sol.stats = SolveStats(wall_time=time.monotonic() - t0, lower_bound=sol.total if lb is None else lb)
    return sol


def so_assignment(net: DerivedNetwork, time_limit: float = 30.0):
    """Stage 1: cheapest assignment by bus and drone operating cost alone."""
    inst = net.instance
    p = net.params
    choices = [(c.id, b, s) for c in inst.customers for b, s in net.options(c.id)]
    costs = [net.c1[(b, s)] * net.demand(i) + net.c2[(s, i)] for i, b, s in choices]
    cover: dict = {c.id: {} for c in inst.customers}
    pair: dict = {}
    bus: dict = {}
    for k, (i, b, s) in enumerate(choices):
        q = net.demand(i)
        cover[i][k] = 1.0
        pair.setdefault((b, s), {})[k] = q
        bus.setdefault(b, {})[k] = q
    rows = [Constraint(co, EQ, 1.0) for _, co in sorted(cover.items())]
    rows += [Constraint(co, LE, p.Q_S) for _, co in sorted(pair.items())]
    rows += [Constraint(co, LE, p.Q_B) for _, co in sorted(bus.items())]
    res = solve_ip_pool(costs, rows, time_limit)
    if res.x is None:
        return None, res
    return {choices[k][0]: choices[k][1:] for k in range(len(choices)) if res.x[k] > 0.5}, res


def enumerable(net: DerivedNetwork, s: int, pairs) -> bool:
    """Whether exhaustive scheduling of ``pairs`` at ``s`` is cheap enough."""
    if len(pairs) <= EXACT_STOP_LIMIT:
        return True
    if len(pairs) > PARTITION_LIMIT:
        return False
    try:
        best_flight_orders(net, s, pairs, SEQUENCE_CAP)
    except TooLarge:
        return False
    return True


def solve_so(instance: Instance, time_limit: float = math.inf, stage_two: str = "auto") -> Solution:
    """Sequential optimisation: stage-1 assignment, then exact drone schedules.

    ``stage_two`` is "auto" (enumerate each stop when that is cheap, else
    column generation with consecutive-visit branching), "enumerate" or "branch".
    """
    from .bpbc import BranchAndPrice, PiStop, PsiBus, SolveOptions

    if stage_two not in ("auto", "enumerate", "branch"):
        raise ValueError(f"unknown stage_two mode {stage_two!r}")
    t0 = time.monotonic()
    try:
        net = build_derived(instance)
    except UnservableCustomer:
        return infeasible("so")
    if not instance.customers:
        return _assemble(net, {}, "Optimal", "so", t0)
    assignment, res = so_assignment(net, min(30.0, time_limit))
    if assignment is None:
        return infeasible("so")
    by_stop: dict = {}
    for i, (b, s) in assignment.items():
        by_stop.setdefault(s, []).append((i, b))
    if stage_two == "enumerate" or (
        stage_two == "auto" and all(enumerable(net, s, prs) for s, prs in by_stop.items())
    ):
        return _assemble(net, assignment, "Feasible", "so", t0, lb=-math.inf)
    fixed = frozenset(PiStop(i, s, 1) for i, (b, s) in assignment.items()) | frozenset(
        PsiBus(i, b, 1) for i, (b, s) in assignment.items()
    )
    solver = BranchAndPrice(instance, SolveOptions(time_limit=max(time_limit - (time.monotonic() - t0), 0.01)))
    solver.root_constraints = fixed
    sol = solver.solve()
    sol.algorithm = "so"
    if sol.status == "Optimal":
        sol.status = "Feasible"
    return sol
