"""Labeling algorithms for the assignment (per bus/stop) and flight (per stop)
pricing problems."""

from __future__ import annotations

import math
from collections import deque
from dataclasses import dataclass, field

from .columns import AssignmentColumn, FlightColumn, schedule_flight
from .model import DerivedNetwork

NEG_TOL = 1e-6
LOCKER = "L"


@dataclass
class DualBundle:
    """Master duals.  ``cut_terms[(i, b, s)]`` holds sum(rho * weight_ib) over the
    phi-rows (Benders cuts and lower-bound inequalities) of stop ``s``."""

    mu: dict = field(default_factory=dict)
    pi: dict = field(default_factory=dict)
    lam: dict = field(default_factory=dict)
    rho: dict = field(default_factory=dict)
    cut_terms: dict = field(default_factory=dict)

    def theta1(self, net: DerivedNetwork, i: int, b: int, s: int) -> float:
        q = net.demand(i)
        return (
            net.c1[(b, s)] * q
            + net.c2[(s, i)]
            - self.mu.get(i, 0.0)
            - q * self.lam.get(b, 0.0)
            + self.cut_terms.get((i, b, s), 0.0)
        )

    def sign_violations(self, tol: float = 1e-9) -> list[str]:
        bad = [f"mu[{k}]" for k, v in self.mu.items() if v < -tol]
        bad += [f"pi[{k}]" for k, v in self.pi.items() if v > tol]
        bad += [f"lambda[{k}]" for k, v in self.lam.items() if v > tol]
        bad += [f"rho[{k}]" for k, v in self.rho.items() if v < -tol]
        return bad


@dataclass(frozen=True)
class AssignmentRestriction:
    """Node restrictions for one (bus, stop) pricing problem."""

    eligible: frozenset | None = None  # None: every reachable customer
    required: frozenset = frozenset()


@dataclass(frozen=True)
class FlightRestriction:
    """Consecutive-visit branching at one stop; ends may be ``LOCKER``."""

    forbidden: frozenset = frozenset()
    forced: frozenset = frozenset()

    def __bool__(self):
        return bool(self.forbidden or self.forced)

    def allows(self, flight_customers) -> bool:
        seq = [LOCKER, *flight_customers, LOCKER]
        arcs = set(zip(seq, seq[1:]))
        if arcs & self.forbidden:
            return False
        present = set(flight_customers)
        for a, b in self.forced:
            if a != LOCKER and a in present:
                if b == LOCKER:
                    if seq[-2] != a:
                        return False
                elif (a, b) not in arcs:
                    return False
            if b != LOCKER and b in present:
                if a == LOCKER:
                    if seq[1] != b:
                        return False
                elif (a, b) not in arcs:
                    return False
        return True


@dataclass
class MpsLabel:
    reduced_cost: float
    load: float
    visited: frozenset
    path: tuple = ()

    def resources(self):
        return (self.load,)


@dataclass
class SpsLabel:
    reduced_cost: float
    avail_time: float
    duration: float
    visited: frozenset
    path: tuple = ()
    alive: bool = True

    def resources(self):
        return (self.avail_time, self.duration)


def dominates(a, b) -> bool:
    """Dominance rule 1 for labels ending at the same vertex."""
    if a.reduced_cost > b.reduced_cost:
        return False
    if any(x > y for x, y in zip(a.resources(), b.resources())):
        return False
    return a.visited <= b.visited


def _insert(bucket: list, label, use_dominance: bool) -> bool:
    if not use_dominance:
        bucket.append(label)
        return True
    for other in bucket:
        if getattr(other, "alive", True) and dominates(other, label):
            return False
    keep = []
    for other in bucket:
        if dominates(label, other):
            if hasattr(other, "alive"):
                other.alive = False
        else:
            keep.append(other)
    keep.append(label)
    bucket[:] = keep
    return True


def price_assignment(
    net: DerivedNetwork,
    b: int,
    s: int,
    duals: DualBundle,
    restriction: AssignmentRestriction | None = None,
    max_columns: int = 10,
    use_dominance: bool = True,
) -> tuple[list[AssignmentColumn], float]:
    """Most negative assignment columns for bus ``b`` at stop ``s`` and the exact
    minimum reduced cost ``v_bs`` (``inf`` if no column is feasible)."""
    restriction = restriction or AssignmentRestriction()
    QS = net.params.Q_S
    cands = [i for i in sorted(net.reach[s]) if b in net.feas_buses[(s, i)]]
    if restriction.eligible is not None:
        cands = [i for i in cands if i in restriction.eligible]
    required = restriction.required
    if not required <= set(cands):
        return [], math.inf
    pi = duals.pi.get((b, s), 0.0)
    theta = {i: duals.theta1(net, i, b, s) for i in cands}
    # req_before[k]: number of required customers among cands[:k]
    req_before = [0]
    for i in cands:
        req_before.append(req_before[-1] + (i in required))
    n_req = req_before[-1]

    buckets: list[list[MpsLabel]] = [[] for _ in cands]
    for k, j in enumerate(cands):
        q = net.demand(j)
        if q > QS + 1e-9:
            continue
        # everything up to and including j counts as visited: arcs only go forward
        visited = frozenset(cands[: k + 1])
        new = []
        if req_before[k] == 0:
            new.append(MpsLabel(theta[j], q, visited, (j,)))
        for h in range(k):
            if req_before[k] - req_before[h + 1] > 0:
                continue  # would skip a required customer
            for lab in buckets[h]:
                load = lab.load + q
                if load <= QS + 1e-9:
                    new.append(MpsLabel(lab.reduced_cost + theta[j], load, visited, lab.path + (j,)))
        for lab in new:
            _insert(buckets[k], lab, use_dominance)

    complete = []
    for k in range(len(cands)):
        if req_before[len(cands)] - req_before[k + 1] > 0:
            continue
        complete.extend(buckets[k])
    v = -pi if n_req == 0 else math.inf
    if complete:
        v = min(v, min(-pi + lab.reduced_cost for lab in complete))
    complete.sort(key=lambda lab: (lab.reduced_cost, lab.path))
    out = []
    for lab in complete:
        if -pi + lab.reduced_cost >= -NEG_TOL or len(out) >= max_columns:
            break
        load = sum(net.demand(i) for i in lab.path)
        cost = sum(net.c1[(b, s)] * net.demand(i) + net.c2[(s, i)] for i in lab.path)
        out.append(AssignmentColumn(b, s, frozenset(lab.path), load, cost))
    return out, v


def _arc_rules(restriction: FlightRestriction | None):
    succ, pred = {}, {}
    no_start, no_end, forbid = set(), set(), set()
    if restriction:
        for a, c in restriction.forbidden:
            if a == LOCKER:
                no_start.add(c)
            elif c == LOCKER:
                no_end.add(a)
            else:
                forbid.add((a, c))
        for a, c in restriction.forced:
            if a == LOCKER:
                pred[c] = LOCKER
            elif c == LOCKER:
                succ[a] = LOCKER
            else:
                succ[a] = c
                pred[c] = a
    return succ, pred, no_start, no_end, forbid


def price_flight(
    net: DerivedNetwork,
    s: int,
    omega: dict,
    vertices,
    restriction: FlightRestriction | None = None,
    max_columns: int = 10,
    use_dominance: bool = True,
    prune: bool = False,
) -> tuple[list[FlightColumn], float]:
    """Most negative flights at stop ``s`` over the given (customer, bus) vertices.

    Reduced cost of a flight is ``f_F + sum(f_H * q_i * holding_i - omega_ib)``.
    Returns ``(columns, min_reduced_cost)``; the minimum is ``inf`` when no
    non-empty flight exists.  With ``prune`` set, labels that cannot reach a
    negative reduced cost are dropped, so the minimum is exact only when it
    is negative.
    """
    p = net.params
    verts = sorted(set(vertices))
    succ, pred, no_start, no_end, forbid = _arc_rules(restriction)
    info = {}
    for i, b in verts:
        info[(i, b)] = (
            net.release[(i, b, s)],
            p.tau_S + net.tau[(s, i)],
            net.deadline(i),
            net.delta[(s, i)],
            p.f_H * net.demand(i),
            omega.get((i, b), 0.0),
        )
    # a customer stays reachable iff its earliest-released vertex is; the
    # other fields do not depend on the bus
    reach_info: dict = {}
    for v in verts:
        e, to_cust, dl, d = info[v][:4]
        cur = reach_info.get(v[0])
        if cur is None or e < cur[0]:
            reach_info[v[0]] = (e, dl - to_cust + 1e-9, p.Delta - d + 1e-9)

    def can_enter(prev, j):
        if pred.get(j, prev) != prev:
            return False
        if prev == LOCKER:
            return j not in no_start
        if succ.get(prev, j) != j:
            return False
        return (prev, j) not in forbid

    def can_end(i):
        return i not in no_end and succ.get(i, LOCKER) == LOCKER

    def extend(lab, v):
        e, to_cust, dl, d, hq, om = info[v]
        start = max(lab.avail_time, e)
        if start + to_cust > dl + 1e-9 or lab.duration + d > p.Delta + 1e-9:
            return None
        avail = start + d
        dur = lab.duration + d
        visited = set(lab.visited)
        visited.add(v[0])
        for k, (ek, latest, dur_cap) in reach_info.items():
            if k not in visited and (dur > dur_cap or max(avail, ek) > latest):
                visited.add(k)
        return SpsLabel(lab.reduced_cost + hq * (start - e) - om, avail, dur, frozenset(visited), lab.path + (v,))

    gain: dict = {}
    for v in verts:
        gain[v[0]] = max(gain.get(v[0], 0.0), info[v][5])
    d_min = min((info[v][3] for v in verts), default=math.inf)

    def hopeless(lab):
        # holding is never negative, so each further trip lowers the reduced
        # cost by at most its best omega, and only so many trips still fit
        room = int((p.Delta - lab.duration + 1e-9) // d_min)
        best = sorted((g for k, g in gain.items() if k not in lab.visited and g > 0), reverse=True)
        return lab.reduced_cost - sum(best[:room]) >= -NEG_TOL

    def keep(bucket, lab):
        if lab is None or (prune and hopeless(lab)):
            return False
        return _insert(bucket, lab, use_dominance)

    buckets = {v: [] for v in verts}
    queue = deque()
    root = SpsLabel(p.f_F, 0.0, 0.0, frozenset())
    for v in verts:
        if can_enter(LOCKER, v[0]):
            lab = extend(root, v)
            if keep(buckets[v], lab):
                queue.append(lab)
    while queue:
        lab = queue.popleft()
        if not lab.alive:
            continue
        last = lab.path[-1][0]
        for v in verts:
            if v[0] in lab.visited or not can_enter(last, v[0]):
                continue
            new = extend(lab, v)
            if keep(buckets[v], new):
                queue.append(new)

    complete = [
        lab for v, bucket in buckets.items() if can_end(v[0]) for lab in bucket if lab.alive
    ]
    best = min((lab.reduced_cost for lab in complete), default=math.inf)
    complete.sort(key=lambda lab: (lab.reduced_cost, lab.path))
    out = []
    for lab in complete:
        if lab.reduced_cost >= -NEG_TOL or len(out) >= max_columns:
            break
        out.append(schedule_flight(net, s, lab.path))
    return out, best
