"""Exhaustive reference computations for the pricing problems."""

from __future__ import annotations

import itertools
import math

from fmtpbd.columns import FlightInfeasible, schedule_flight


def best_assignment_rc(net, b, s, duals, eligible=None, required=frozenset()):
    """min over customer subsets of -pi + sum theta1, by enumeration."""
    cands = [i for i in sorted(net.reach[s]) if b in net.feas_buses[(s, i)]]
    if eligible is not None:
        cands = [i for i in cands if i in eligible]
    pi = duals.pi.get((b, s), 0.0)
    best = math.inf
    for r in range(len(cands) + 1):
        for sub in itertools.combinations(cands, r):
            if not set(required) <= set(sub):
                continue
            if sum(net.demand(i) for i in sub) > net.params.Q_S + 1e-9:
                continue
            best = min(best, -pi + sum(duals.theta1(net, i, b, s) for i in sub))
    return best


def best_flight_rc(net, s, omega, vertices, restriction=None):
    """min over ordered sequences of distinct customers of cost - sum omega."""
    verts = sorted(set(vertices))
    best = math.inf
    for r in range(1, len(verts) + 1):
        for seq in itertools.permutations(verts, r):
            if len({i for i, _ in seq}) < r:
                continue
            if restriction is not None and not restriction.allows([i for i, _ in seq]):
                continue
            try:
                f = schedule_flight(net, s, seq)
            except FlightInfeasible:
                continue
            best = min(best, f.cost - sum(omega.get(v, 0.0) for v in seq))
    return best


def set_partitions(items):
    items = list(items)
    if not items:
        yield []
        return
    first, rest = items[0], items[1:]
    for part in set_partitions(rest):
        yield [[first], *part]
        for k in range(len(part)):
            yield [*part[:k], [first, *part[k]], *part[k + 1 :]]


def min_stop_cost(net, s, pairs):
    """Cheapest set of flights serving every (i, b) in ``pairs`` at stop ``s``."""
    best = math.inf
    for part in set_partitions(sorted(pairs)):
        total = 0.0
        for block in part:
            cheapest = math.inf
            for seq in itertools.permutations(block):
                try:
                    cheapest = min(cheapest, schedule_flight(net, s, seq).cost)
                except FlightInfeasible:
                    pass
            total += cheapest
            if total == math.inf:
                break
        best = min(best, total)
    return best
