"""Benders master problem (assignment columns + per-stop drone-cost surrogates)
and the per-stop drone scheduling subproblems that generate optimality cuts."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field

from .columns import AssignmentColumn, FlightColumn, schedule_flight
from .lp_core import GE, LE, LinearProgram, solve_lp
from .model import DerivedNetwork, FmtpError
from .pricing import (
    AssignmentRestriction,
    DualBundle,
    FlightRestriction,
    price_assignment,
    price_flight,
)

CONV_TOL = 1e-6
SUPPORT_TOL = 1e-9


class MasterInfeasible(FmtpError):
    pass


class TimeUp(FmtpError):
    pass


@dataclass(frozen=True)
class BendersCut:
    """Row ``phi_s >= sum_ib weights[(i, b)] * x_ibs``.

    Lower-bound inequalities use the same shape with ``kind="lower_bound"``.
    """

    stop: int
    weights: tuple  # sorted ((i, b), w) pairs
    lambda_context: frozenset = frozenset()
    kind: str = "cut"

    @property
    def weight_map(self) -> dict:
        return dict(self.weights)

    def coefficient(self, col: AssignmentColumn) -> float:
        if col.stop != self.stop:
            return 0.0
        w = self.weight_map
        return sum(w.get((i, col.bus), 0.0) for i in col.customers)


def initial_inequalities(net: DerivedNetwork) -> list[BendersCut]:
    """phi_s >= f_F * (sum of round-trip durations assigned to s) / Delta."""
    p = net.params
    rows = []
    for st in net.instance.stops:
        s = st.id
        w = tuple(((i, b), p.f_F * net.delta[(s, i)] / p.Delta) for i, b in net.stop_pairs(s))
        rows.append(BendersCut(s, w, frozenset(), "lower_bound"))
    return rows


def big_m(net: DerivedNetwork) -> float:
    """A cost larger than any feasible solution, used for artificial variables."""
    p = net.params
    total = 0.0
    for c in net.instance.customers:
        best = max(
            (net.c1[(b, s)] * c.demand + net.c2[(s, c.id)] for b, s in net.options(c.id)),
            default=0.0,
        )
        total += best + p.f_F + p.f_H * c.demand * (p.horizon_end + p.Delta)
    return 10.0 * total + 1000.0


@dataclass
class BmpResult:
    status: str  # "Optimal" | "Infeasible" | "Pruned"
    gamma: float = math.nan
    theta: dict = field(default_factory=dict)  # column key -> value
    phi: dict = field(default_factory=dict)
    duals: DualBundle | None = None
    v: dict = field(default_factory=dict)
    iterations: int = 0
    artificial: float = 0.0


class Master:
    """Restricted Benders master LP over a column pool and a phi-row pool."""

    def __init__(self, net: DerivedNetwork, penalty: float | None = None):
        self.net = net
        self.columns: dict = {}
        self.rows: list[BendersCut] = []
        self._row_keys = set()
        self.penalty = big_m(net) if penalty is None else penalty

    def add_column(self, col: AssignmentColumn) -> bool:
        if col.key in self.columns:
            return False
        self.columns[col.key] = col
        return True

    def add_row(self, row: BendersCut) -> bool:
        key = (row.stop, row.weights, row.kind)
        if key in self._row_keys:
            return False
        self._row_keys.add(key)
        self.rows.append(row)
        return True

    @property
    def n_cuts(self) -> int:
        return sum(r.kind == "cut" for r in self.rows)

    def solve(self) -> BmpResult:
        net = self.net
        inst = net.instance
        lp = LinearProgram()
        cols = list(self.columns.values())
        theta_idx = [lp.add_var(c.cost) for c in cols]
        phi_idx = {st.id: lp.add_var(1.0) for st in inst.stops}
        art_idx = {c.id: lp.add_var(self.penalty) for c in inst.customers}

        cover = {c.id: {art_idx[c.id]: 1.0} for c in inst.customers}
        pair_rows: dict = {}
        cap = {b.id: {} for b in inst.buses}
        for k, col in zip(theta_idx, cols):
            for i in col.customers:
                cover[i][k] = 1.0
            pair_rows.setdefault((col.bus, col.stop), {})[k] = 1.0
            if col.load:
                cap[col.bus][k] = col.load
        cover_r = {i: lp.add_row(co, GE, 1.0) for i, co in cover.items()}
        pair_r = {bs: lp.add_row(co, LE, 1.0) for bs, co in pair_rows.items()}
        cap_r = {b: lp.add_row(co, LE, inst.params.Q_B) for b, co in cap.items() if co}
        cut_r = []
        for row in self.rows:
            co = {phi_idx[row.stop]: 1.0}
            for k, col in zip(theta_idx, cols):
                a = row.coefficient(col)
                if a:
                    co[k] = -a
            cut_r.append(lp.add_row(co, GE, 0.0))

        sol = solve_lp(lp)
        if sol.status != "Optimal":
            raise MasterInfeasible(f"master LP status {sol.status}")
        y = sol.duals
        duals = DualBundle(
            mu={i: max(y[r], 0.0) for i, r in cover_r.items()},
            pi={bs: min(y[r], 0.0) for bs, r in pair_r.items()},
            lam={b: min(y[cap_r[b]], 0.0) if b in cap_r else 0.0 for b in cap},
            rho={k: max(y[r], 0.0) for k, r in enumerate(cut_r)},
        )
        terms: dict = {}
        for k, row in enumerate(self.rows):
            rho = duals.rho[k]
            if rho <= 0:
                continue
            for (i, b), w in row.weights:
                key = (i, b, row.stop)
                terms[key] = terms.get(key, 0.0) + rho * w
        duals.cut_terms = terms
        theta = {col.key: float(sol.x[k]) for k, col in zip(theta_idx, cols)}
        return BmpResult(
            "Optimal",
            gamma=sol.objective,
            theta=theta,
            phi={s: float(sol.x[k]) for s, k in phi_idx.items()},
            duals=duals,
            artificial=float(sum(sol.x[k] for k in art_idx.values())),
        )

    def assigned(self, theta: dict) -> dict:
        """x[s][(i, b)] = sum of theta over columns of (b, s) containing i."""
        x: dict = {st.id: {} for st in self.net.instance.stops}
        for key, val in theta.items():
            if val <= SUPPORT_TOL:
                continue
            col = self.columns[key]
            for i in col.customers:
                d = x[col.stop]
                d[(i, col.bus)] = d.get((i, col.bus), 0.0) + val
        return x


def solve_bmp(
    master: Master,
    restrictions: dict,
    fixed: set,
    on_iteration=None,
    deadline: float | None = None,
    max_columns: int = 10,
) -> BmpResult:
    """Column generation on the master until no assignment column prices out.

    ``restrictions`` maps (b, s) to an AssignmentRestriction; pairs in ``fixed``
    are skipped.  ``on_iteration(result)`` may return True to stop early
    (bound-based pruning); it may also grow ``fixed``.
    """
    net = master.net
    pairs = [(b.id, st.id) for st in net.instance.stops for b in net.instance.buses]
    it = 0
    while True:
        if deadline is not None and time.monotonic() > deadline:
            raise TimeUp()
        res = master.solve()
        it += 1
        res.iterations = it
        new = []
        v = {}
        for bs in pairs:
            if bs in fixed:
                continue
            cols, v[bs] = price_assignment(
                net, bs[0], bs[1], res.duals, restrictions.get(bs), max_columns=max_columns
            )
            new.extend(cols)
        res.v = v
        if on_iteration is not None and on_iteration(res):
            res.status = "Pruned"
            return res
        added = [c for c in new if (c.bus, c.stop) not in fixed and master.add_column(c)]
        if not added:
            if res.artificial > 1e-6:
                res.status = "Infeasible"
            return res


@dataclass
class BspResult:
    stop: int
    value: float
    omega: dict  # (i, b) -> dual, zero for pairs without a row
    zeta: dict  # flight key -> value (positive only)
    flights: dict  # flight key -> FlightColumn for every flight in the final LP
    artificial: float = 0.0
    iterations: int = 0


def solve_bsp(
    net: DerivedNetwork,
    s: int,
    x: dict,
    pool: dict,
    restriction: FlightRestriction | None = None,
    penalty: float | None = None,
    deadline: float | None = None,
    max_columns: int = 10,
) -> BspResult:
    """Drone scheduling LP at stop ``s`` for fractional assignment ``x[(i, b)]``.

    ``pool`` (flight key -> FlightColumn) is read and extended in place.
    Under consecutive-visit branching, the dual point is also made feasible
    for flights through pairs with zero assignment, so that the resulting cut
    stays valid for every assignment.
    """
    rows = {p: v for p, v in x.items() if v > SUPPORT_TOL}
    if not rows:
        return BspResult(s, 0.0, {}, {}, {})
    penalty = big_m(net) if penalty is None else penalty
    restriction = restriction or FlightRestriction()
    for i, b in rows:
        if restriction.allows((i,)):
            f = schedule_flight(net, s, [(i, b)])
            pool.setdefault(f.key, f)
    it = 0
    while True:
        if deadline is not None and time.monotonic() > deadline:
            raise TimeUp()
        it += 1
        flights = [
            f
            for f in pool.values()
            if any(p in rows for p in f.sequence) and restriction.allows(f.customers)
        ]
        lp = LinearProgram()
        idx = [lp.add_var(f.cost) for f in flights]
        cover = {p: {lp.add_var(penalty): 1.0} for p in rows}
        for k, f in zip(idx, flights):
            for p in f.sequence:
                if p in cover:
                    cover[p][k] = 1.0
        row_id = {p: lp.add_row(co, GE, rows[p]) for p, co in cover.items()}
        sol = solve_lp(lp)
        omega = {p: max(sol.duals[r], 0.0) for p, r in row_id.items()}
        cols, _ = price_flight(net, s, omega, rows.keys(), restriction, max_columns, prune=True)
        fresh = [c for c in cols if c.key not in pool]
        if not fresh and restriction:
            cols, _ = price_flight(net, s, omega, net.stop_pairs(s), restriction, max_columns, prune=True)
            fresh = [c for c in cols if c.key not in pool]
            for c in fresh:
                for p in c.sequence:
                    rows.setdefault(p, 0.0)
        if not fresh:
            break
        for c in fresh:
            pool[c.key] = c
    zeta = {f.key: float(sol.x[k]) for k, f in zip(idx, flights) if sol.x[k] > SUPPORT_TOL}
    art = float(sum(sol.x[k] for co in cover.values() for k in co if lp.costs[k] == penalty))
    return BspResult(s, sol.objective, omega, zeta, {f.key: f for f in flights}, art, it)


def separate_cuts(phi: dict, bsp_results, lambda_contexts: dict | None = None, tol: float = CONV_TOL):
    """One optimality cut per stop whose drone cost exceeds its surrogate."""
    cuts = []
    for r in bsp_results:
        if r.value > phi.get(r.stop, 0.0) + tol:
            ctx = (lambda_contexts or {}).get(r.stop, frozenset())
            w = tuple(sorted((p, v) for p, v in r.omega.items() if v > 1e-12))
            cuts.append(BendersCut(r.stop, w, ctx))
    return cuts
