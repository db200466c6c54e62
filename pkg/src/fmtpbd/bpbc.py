"""Branch-and-price-and-Benders-cut: node processing, branching, bounding and
fixing, primal heuristics, and the root-only heuristic mode."""

from __future__ import annotations

import csv
import heapq
import logging
import math
import time
from dataclasses import dataclass, field

from .benders import (
    CONV_TOL,
    BendersCut,
    Master,
    TimeUp,
    big_m,
    initial_inequalities,
    separate_cuts,
    solve_bmp,
    solve_bsp,
)
from .columns import AssignmentColumn, FlightColumn, make_assignment, schedule_flight
from .lp_core import EQ, LE, Constraint, solve_ip_pool
from .model import DerivedNetwork, Instance, UnservableCustomer, build_derived
from .pricing import LOCKER, AssignmentRestriction, FlightRestriction
from .solution import Solution, SolveStats, build_solution, from_columns, infeasible

log = logging.getLogger(__name__)

INT_TOL = 1e-6
PRUNE_TOL = 1e-6
ROOT_SHARE = 0.8  # share of the time limit spent converging the root in root-only mode


@dataclass(frozen=True)
class PiStop:
    customer: int
    stop: int
    value: int


@dataclass(frozen=True)
class PsiBus:
    customer: int
    bus: int
    value: int


@dataclass(frozen=True)
class LambdaArc:
    tail: object  # customer id or LOCKER
    head: object
    stop: int
    value: int


BranchConstraint = PiStop | PsiBus | LambdaArc


@dataclass
class NodeState:
    id: int
    depth: int
    constraints: frozenset = frozenset()
    columns: tuple = ()
    flights: dict = field(default_factory=dict)  # stop -> tuple of FlightColumn
    fixed_pairs: frozenset = frozenset()
    lp_bound: float = -math.inf
    branch_kind: str = "root"

    def lambda_context(self, s: int) -> frozenset:
        return frozenset(c for c in self.constraints if isinstance(c, LambdaArc) and c.stop == s)


@dataclass
class SolveOptions:
    mode: str = "exact"  # "exact" | "root"
    time_limit: float = math.inf
    node_limit: int | None = None
    warm_start: bool = True
    fixing: bool = True
    valid_inequalities: bool = True
    heuristics: bool = True
    ip_time_limit: float = 30.0
    max_columns: int = 10


@dataclass
class NodeRestrictions:
    assignment: dict  # (b, s) -> AssignmentRestriction
    flights: dict  # s -> FlightRestriction
    allowed: dict  # customer -> set of (b, s)
    feasible: bool = True

    def column_ok(self, col: AssignmentColumn) -> bool:
        r = self.assignment[(col.bus, col.stop)]
        return col.customers <= r.eligible and r.required <= col.customers

    def flight_ok(self, f: FlightColumn) -> bool:
        return self.flights[f.stop].allows(f.customers) and all(
            (b, f.stop) in self.allowed[i] for i, b in f.sequence
        )


def node_restrictions(net: DerivedNetwork, constraints) -> NodeRestrictions:
    inst = net.instance
    allowed = {c.id: set(net.options(c.id)) for c in inst.customers}
    lam: dict = {st.id: ([], []) for st in inst.stops}
    for c in constraints:
        if isinstance(c, PiStop):
            keep = (lambda bs, c=c: bs[1] == c.stop) if c.value else (lambda bs, c=c: bs[1] != c.stop)
            allowed[c.customer] = {bs for bs in allowed[c.customer] if keep(bs)}
        elif isinstance(c, PsiBus):
            keep = (lambda bs, c=c: bs[0] == c.bus) if c.value else (lambda bs, c=c: bs[0] != c.bus)
            allowed[c.customer] = {bs for bs in allowed[c.customer] if keep(bs)}
        else:
            lam[c.stop][c.value].append((c.tail, c.head))
    feasible = all(allowed.values())
    flights = {}
    for s, (forbidden, forced) in lam.items():
        forced_set, forbidden_set = frozenset(forced), frozenset(forbidden)
        if forced_set & forbidden_set:
            feasible = False
        tails = [a for a, _ in forced if a != LOCKER]
        heads = [b for _, b in forced if b != LOCKER]
        if len(tails) != len(set(tails)) or len(heads) != len(set(heads)):
            feasible = False
        if any(a == b for a, b in forced):
            feasible = False
        flights[s] = FlightRestriction(forbidden_set, forced_set)
    assignment = {}
    for st in inst.stops:
        for b in inst.buses:
            bs = (b.id, st.id)
            elig = frozenset(i for i, a in allowed.items() if bs in a)
            req = frozenset(i for i, a in allowed.items() if a == {bs})
            assignment[bs] = AssignmentRestriction(elig, req)
    return NodeRestrictions(assignment, flights, allowed, feasible)


def node_lower_bound(gamma: float, v: dict) -> float:
    """Lagrangian bound: Gamma plus every negative pricing minimum."""
    return gamma + sum(x for x in v.values() if x < 0)


def fix_columns(lb: float, ub: float, v: dict, tol: float = PRUNE_TOL) -> set:
    """(b, s) pairs that cannot appear in a solution better than ``ub``."""
    if not math.isfinite(ub):
        return set()
    return {bs for bs, x in v.items() if math.isfinite(x) and x >= 0 and lb + x >= ub - tol}


def _frac(v: float) -> float:
    return abs(v - round(v))


def branch_values(master_columns: dict, theta: dict, flights: dict, zeta: dict):
    """Pi[(i, s)], Psi[(i, b)] from assignment weights, Lambda[(i, j, s)] from flights."""
    pi: dict = {}
    psi: dict = {}
    for key, val in theta.items():
        if val <= 1e-9:
            continue
        col = master_columns[key]
        for i in col.customers:
            pi[(i, col.stop)] = pi.get((i, col.stop), 0.0) + val
            psi[(i, col.bus)] = psi.get((i, col.bus), 0.0) + val
    lam: dict = {}
    for key, val in zeta.items():
        f = flights[key]
        for a, b in f.adjacencies():
            k = (a, b, f.stop)
            lam[k] = lam.get(k, 0.0) + val
    return pi, psi, lam


def _sort_key(k):
    return tuple((0, x) if isinstance(x, int) else (1, str(x)) for x in k)


def select_branch(pi: dict, psi: dict, lam: dict, constrained=frozenset()):
    """First fractional family in the order Pi, Psi, Lambda; the member closest
    to 0.5 is returned as a pair of children, or None when all are integral."""
    families = (
        ("Pi", pi, lambda k, v: PiStop(k[0], k[1], v)),
        ("Psi", psi, lambda k, v: PsiBus(k[0], k[1], v)),
        ("Lambda", lam, lambda k, v: LambdaArc(k[0], k[1], k[2], v)),
    )
    for name, values, make in families:
        cands = []
        for k in sorted(values, key=_sort_key):
            x = min(values[k], 1.0)
            if _frac(x) > INT_TOL and make(k, 0) not in constrained and make(k, 1) not in constrained:
                cands.append((abs(x - math.floor(x) - 0.5), k))
        if cands:
            _, k = min(cands, key=lambda c: c[0])
            return name, (make(k, 0), make(k, 1))
    return None


class BranchAndPrice:
    """Exact branch-and-price-and-Benders-cut, or its root-only heuristic."""

    def __init__(self, instance: Instance, options: SolveOptions | None = None):
        self.instance = instance
        self.opt = options or SolveOptions()
        self.net = build_derived(instance)
        self.penalty = big_m(self.net)
        self.stats = SolveStats()
        self.cut_pool: list[BendersCut] = []
        self.all_columns: dict = {}
        self.all_flights: dict = {}
        self.ub = math.inf
        self.incumbent: Solution | None = None
        self.deadline = math.inf
        self._next_id = 0
        # constraints imposed on the whole tree (used to solve restricted problems)
        self.root_constraints: frozenset = frozenset()

    # ---- incumbent handling -------------------------------------------------
    def _offer(self, sol: Solution, source: str) -> None:
        if sol.total < self.ub - 1e-9:
            log.debug("new incumbent %.6f from %s", sol.total, source)
            self.ub = sol.total
            self.incumbent = sol

    def root_warm_start(self):
        """Greedy: customers by deadline, cheapest (b, s) with spare capacity,
        singleton flights.  Returns (columns, flights, solution or None)."""
        net = self.net
        p = net.params
        rem_bus = {b.id: p.Q_B for b in self.instance.buses}
        rem_pair: dict = {}
        chosen: dict = {}
        order = sorted(self.instance.customers, key=lambda c: (c.deadline, c.id))
        for c in order:
            opts = sorted(net.options(c.id), key=lambda bs: (net.c1[bs] * c.demand + net.c2[(bs[1], c.id)], bs[1], bs[0]))
            for b, s in opts:
                if rem_bus[b] >= c.demand - 1e-9 and rem_pair.get((b, s), p.Q_S) >= c.demand - 1e-9:
                    rem_bus[b] -= c.demand
                    rem_pair[(b, s)] = rem_pair.get((b, s), p.Q_S) - c.demand
                    chosen[c.id] = (b, s)
                    break
            else:
                chosen = None
                break
        if chosen is None:
            cols = [
                make_assignment(net, b, s, [c.id]) for c in self.instance.customers for b, s in net.options(c.id)
            ]
            return cols, [], None
        groups: dict = {}
        for i, bs in chosen.items():
            groups.setdefault(bs, []).append(i)
        cols = [make_assignment(net, b, s, g) for (b, s), g in sorted(groups.items())]
        flights = [schedule_flight(net, s, [(i, b)]) for i, (b, s) in sorted(chosen.items())]
        sol = build_solution(net, chosen, flights, "Feasible", algorithm="greedy")
        return cols, flights, sol

    # ---- node processing ----------------------------------------------------
    def _new_id(self) -> int:
        k = self._next_id
        self._next_id += 1
        return k

    def _check_time(self):
        if time.monotonic() > self.deadline:
            raise TimeUp()

    def process_node(self, node: NodeState):
        """Converge the node's master.  Returns a dict describing the outcome."""
        net = self.net
        opt = self.opt
        R = node_restrictions(net, node.constraints)
        if not R.feasible:
            return {"kind": "infeasible"}
        master = Master(net, self.penalty)
        for col in node.columns:
            if (col.bus, col.stop) not in node.fixed_pairs and R.column_ok(col):
                master.add_column(col)
        if opt.valid_inequalities:
            for row in initial_inequalities(net):
                master.add_row(row)
        if opt.warm_start:
            for cut in self.cut_pool:
                if cut.lambda_context <= node.lambda_context(cut.stop):
                    master.add_row(cut)
        pools = {st.id: {} for st in self.instance.stops}
        for s, fl in node.flights.items():
            for f in fl:
                if R.flight_ok(f):
                    pools[s][f.key] = f
        fixed = set(node.fixed_pairs)
        contexts = {st.id: node.lambda_context(st.id) for st in self.instance.stops}
        state = {"lb": node.lp_bound}

        def on_iteration(res):
            self.stats.cg_iterations += 1
            if res.artificial > 1e-6:
                return False  # bound not meaningful while artificials carry coverage
            lb = node_lower_bound(res.gamma, res.v)
            self.stats.lb_trace.append((node.id, node.constraints, frozenset(fixed), lb))
            state["lb"] = max(state["lb"], lb)
            if state["lb"] >= self.ub - PRUNE_TOL:
                return True
            if opt.fixing:
                newly = fix_columns(lb, self.ub, res.v) - fixed
                if newly:
                    fixed.update(newly)
                    for key in [k for k, c in master.columns.items() if (c.bus, c.stop) in newly]:
                        del master.columns[key]
            return False

        try:
            return self._converge(node, master, R, pools, fixed, contexts, on_iteration, state)
        finally:
            # keep what was generated even when the node is cut short
            for k, c in master.columns.items():
                self.all_columns.setdefault(k, c)
            for pool in pools.values():
                for k, f in pool.items():
                    self.all_flights.setdefault(k, f)

    def _converge(self, node, master, R, pools, fixed, contexts, on_iteration, state):
        net = self.net
        opt = self.opt
        while True:
            self._check_time()
            bmp = solve_bmp(
                master,
                R.assignment,
                fixed,
                on_iteration,
                self.deadline,
                opt.max_columns,
            )
            if bmp.status == "Pruned":
                return {"kind": "pruned", "bound": state["lb"]}
            if bmp.status == "Infeasible":
                return {"kind": "infeasible"}
            x = master.assigned(bmp.theta)
            bsps = [
                solve_bsp(net, s, x[s], pools[s], R.flights[s], self.penalty, self.deadline, opt.max_columns)
                for s in sorted(pools)
            ]
            self.stats.benders_rounds += 1
            sum_phi = sum(bmp.phi.values())
            sum_bsp = sum(r.value for r in bsps)
            self.stats.iteration_log.append(
                (self.stats.benders_rounds, node.id, bmp.gamma, sum_phi, sum_bsp, len(master.columns), master.n_cuts)
            )
            flights = {k: f for r in bsps for k, f in r.flights.items()}
            zeta = {k: v for r in bsps for k, v in r.zeta.items()}
            if opt.heuristics:
                self._integral_capture(master, bmp, flights, zeta, bsps)
            cuts = separate_cuts(bmp.phi, bsps, contexts)
            if not cuts:
                break
            for c in cuts:
                master.add_row(c)
                self.cut_pool.append(c)
                self.stats.cuts += 1

        if any(r.artificial > 1e-6 for r in bsps):
            return {"kind": "infeasible"}
        gamma = bmp.gamma
        self.stats.convergence.append((node.id, gamma, sum_phi, sum_bsp))
        if not opt.heuristics:
            self._integral_capture(master, bmp, flights, zeta, bsps)
        bound = max(gamma, node.lp_bound)
        return {
            "kind": "converged",
            "bound": bound,
            "gamma": gamma,
            "master": master,
            "theta": bmp.theta,
            "flights": flights,
            "zeta": zeta,
            "pools": pools,
            "fixed": frozenset(fixed),
            "R": R,
        }

    def _integral_capture(self, master, bmp, flights, zeta, bsps):
        if bmp.artificial > 1e-6 or any(r.artificial > 1e-6 for r in bsps):
            return
        if any(_frac(v) > INT_TOL for v in bmp.theta.values()):
            return
        if any(_frac(v) > INT_TOL for v in zeta.values()):
            return
        cols = [master.columns[k] for k, v in bmp.theta.items() if v > 0.5]
        fl = [flights[k] for k, v in zeta.items() if v > 0.5]
        sol = from_columns(self.net, cols, fl, algorithm="capture")
        self._offer(sol, "integral capture")

    def pool_ip(self, columns, flights, time_limit: float):
        """Solve the two-column integer program over explicit pools."""
        net = self.net
        cols = sorted(columns, key=lambda c: c.key)
        fls = sorted(flights, key=lambda f: f.key)
        costs = [c.cost for c in cols] + [f.cost for f in fls]
        nc = len(cols)
        rows = []
        cover: dict = {c.id: {} for c in self.instance.customers}
        pair: dict = {}
        cap: dict = {}
        couple: dict = {}
        for k, col in enumerate(cols):
            for i in col.customers:
                cover[i][k] = 1.0
                couple.setdefault((i, col.bus, col.stop), {})[k] = -1.0
            pair.setdefault((col.bus, col.stop), {})[k] = 1.0
            cap.setdefault(col.bus, {})[k] = col.load
        for k, f in enumerate(fls, start=nc):
            for i, b in f.sequence:
                couple.setdefault((i, b, f.stop), {})[k] = 1.0
        for i, co in cover.items():
            rows.append(Constraint(co, EQ, 1.0, f"cover_{i}"))
        for bs, co in sorted(pair.items()):
            rows.append(Constraint(co, LE, 1.0))
        for b, co in sorted(cap.items()):
            rows.append(Constraint(co, LE, net.params.Q_B))
        for key, co in sorted(couple.items()):
            rows.append(Constraint(co, EQ, 0.0))
        res = solve_ip_pool(costs, rows, time_limit)
        if res.x is None:
            return None, res
        chosen_c = [cols[k] for k in range(nc) if res.x[k] > 0.5]
        chosen_f = [fls[k - nc] for k in range(nc, len(costs)) if res.x[k] > 0.5]
        return from_columns(net, chosen_c, chosen_f), res

    def _restricted_ip(self, out):
        master = out["master"]
        flights = [f for pool in out["pools"].values() for f in pool.values()]
        limit = min(self.opt.ip_time_limit, max(self.deadline - time.monotonic(), 0.01))
        sol, _ = self.pool_ip(master.columns.values(), flights, limit)
        if sol is not None:
            self._offer(sol, "restricted IP")
        return sol

    # ---- drivers ------------------------------------------------------------
    def _root(self) -> NodeState:
        cols, flights, greedy = ([], [], None)
        if self.opt.warm_start:
            cols, flights, greedy = self.root_warm_start()
            if greedy is not None and not self.root_constraints:
                self._offer(greedy, "greedy")
        fl: dict = {}
        for f in flights:
            fl.setdefault(f.stop, []).append(f)
        return NodeState(
            self._new_id(), 0, self.root_constraints, tuple(cols), {s: tuple(v) for s, v in fl.items()}
        )

    def _children(self, node, out, pair, kind):
        kids = []
        for c in pair:
            if self.opt.warm_start:
                master = out["master"]
                cols = tuple(master.columns[k] for k, v in out["theta"].items() if v > 1e-9)
                fl: dict = {}
                for k, v in out["zeta"].items():
                    if v > 1e-9:
                        f = out["flights"][k]
                        fl.setdefault(f.stop, []).append(f)
                flights = {s: tuple(v) for s, v in fl.items()}
            else:
                cols, flights = (), {}
            kids.append(
                NodeState(
                    self._new_id(),
                    node.depth + 1,
                    node.constraints | {c},
                    cols,
                    flights,
                    out["fixed"],
                    out["bound"],
                    kind,
                )
            )
        return kids

    def _fallback_branch(self, node, out):
        """Families integral but the flight weights are not: branch on an
        unconstrained consecutive visit of the most fractional flight."""
        cands = sorted(
            ((abs(v - 0.5), k) for k, v in out["zeta"].items() if _frac(v) > INT_TOL),
            key=lambda t: (t[0], _sort_key(t[1][1])),
        )
        for _, k in cands:
            f = out["flights"][k]
            for a, b in f.adjacencies():
                kid0 = LambdaArc(a, b, f.stop, 0)
                kid1 = LambdaArc(a, b, f.stop, 1)
                if kid0 not in node.constraints and kid1 not in node.constraints:
                    return (kid0, kid1)
        return None

    def _log_node(self, node, kind, bound):
        self.stats.run_log.append((node.id, node.depth, bound, self.ub, kind))

    def solve(self) -> Solution:
        t0 = time.monotonic()
        self.deadline = t0 + self.opt.time_limit if math.isfinite(self.opt.time_limit) else math.inf
        if not self.instance.customers:
            sol = build_solution(self.net, {}, [], "Optimal")
            return self._finish(sol, t0, 0.0)
        root = self._root()
        algo = "hbpbc" if self.opt.mode == "root" else "bpbc"
        if self.opt.mode == "root":
            return self._solve_root_only(root, t0, algo)
        full_deadline = self.deadline
        if math.isfinite(full_deadline) and self.opt.heuristics:
            self.deadline = t0 + ROOT_SHARE * self.opt.time_limit
        heap = [(root.lp_bound, 0, root.id, root)]
        open_bound = -math.inf
        timed_out = False
        try:
            while heap:
                bound, _, _, node = heapq.heappop(heap)
                if bound >= self.ub - PRUNE_TOL:
                    self._log_node(node, "pruned", bound)
                    continue
                if self.opt.node_limit is not None and self.stats.nodes >= self.opt.node_limit:
                    heapq.heappush(heap, (bound, -node.depth, node.id, node))
                    timed_out = True
                    break
                self.stats.nodes += 1
                try:
                    out = self.process_node(node)
                except TimeUp:
                    heapq.heappush(heap, (bound, -node.depth, node.id, node))
                    raise
                if out["kind"] != "converged":
                    self._log_node(node, out["kind"], out.get("bound", math.inf))
                    continue
                nb = out["bound"]
                if nb >= self.ub - PRUNE_TOL:
                    self._log_node(node, "bound", nb)
                    continue
                pi, psi, lam = branch_values(out["master"].columns, out["theta"], out["flights"], out["zeta"])
                choice = select_branch(pi, psi, lam, node.constraints)
                if choice is None:
                    theta_int = all(_frac(v) <= INT_TOL for v in out["theta"].values())
                    zeta_int = all(_frac(v) <= INT_TOL for v in out["zeta"].values())
                    if theta_int and zeta_int:
                        self._log_node(node, "integral", nb)
                        continue
                    pair = self._fallback_branch(node, out) if theta_int else None
                    if pair is None:
                        # degenerate point: settle the node with its column pool
                        sol = self._restricted_ip(out)
                        if sol is None or sol.total > nb + 1e-6:
                            log.warning("node %d closed by pool IP without certificate", node.id)
                        self._log_node(node, "pool", nb)
                        continue
                    choice = ("Lambda", pair)
                if self.opt.heuristics:
                    self._restricted_ip(out)
                    if nb >= self.ub - PRUNE_TOL:
                        self._log_node(node, "bound", nb)
                        continue
                kind, pair = choice
                self._log_node(node, kind, nb)
                for kid in self._children(node, out, pair, kind):
                    heapq.heappush(heap, (kid.lp_bound, -kid.depth, kid.id, kid))
        except TimeUp:
            timed_out = True
        if heap:
            open_bound = min(b for b, *_ in heap)
        if timed_out and self.opt.heuristics and self.all_columns:
            self.deadline = full_deadline
            self._pool_completion()
        if timed_out:
            lb = min(open_bound, self.ub)
            if self.incumbent is None:
                sol = Solution("TimeLimit", has_incumbent=False, algorithm=algo)
            else:
                sol = self._copy(self.incumbent, "TimeLimit")
            return self._finish(sol, t0, lb, algo)
        if self.incumbent is None:
            return self._finish(infeasible(algo), t0, math.inf, algo)
        return self._finish(self._copy(self.incumbent, "Optimal"), t0, self.ub, algo)

    def _pool_completion(self):
        """Pool IP over every column and flight generated so far."""
        flights = dict(self.all_flights)
        # every (i, b, s) in the assignment pool can be flown alone
        for col in self.all_columns.values():
            for i in col.customers:
                f = schedule_flight(self.net, col.stop, [(i, col.bus)])
                flights.setdefault(f.key, f)
        limit = max(self.deadline - time.monotonic(), 0.01)
        sol, _ = self.pool_ip(self.all_columns.values(), flights.values(), limit)
        if sol is not None:
            self._offer(sol, "pool completion")

    def _solve_root_only(self, root, t0, algo):
        full_deadline = self.deadline
        if math.isfinite(full_deadline):
            # leave part of the budget for the pool IP
            self.deadline = t0 + ROOT_SHARE * self.opt.time_limit
        self.stats.nodes = 1
        try:
            out = self.process_node(root)
        except TimeUp:
            out = {"kind": "timeout"}
        self.deadline = full_deadline
        if out["kind"] == "infeasible":
            return self._finish(infeasible(algo), t0, math.inf, algo)
        bound = out["bound"] if out["kind"] in ("converged", "pruned") else -math.inf
        if out["kind"] != "pruned":
            self._pool_completion()
        if self.incumbent is None:
            status = "TimeLimit" if out["kind"] == "timeout" else "Infeasible"
            sol = Solution(status, has_incumbent=False) if status == "TimeLimit" else infeasible(algo)
            return self._finish(sol, t0, bound, algo)
        if out["kind"] == "timeout":
            status = "TimeLimit"
        else:
            status = "Optimal" if self.ub <= bound + PRUNE_TOL else "Feasible"
        return self._finish(self._copy(self.incumbent, status), t0, bound, algo)

    @staticmethod
    def _copy(sol: Solution, status: str) -> Solution:
        return Solution(status, sol.assignment, sol.flights, sol.cost, sol.stats, sol.algorithm, sol.instance_name)

    def _finish(self, sol: Solution, t0: float, lb: float, algo: str = "bpbc") -> Solution:
        self.stats.wall_time = time.monotonic() - t0
        self.stats.lower_bound = lb
        self.stats.columns = len(self.all_columns)
        self.stats.flights = len(self.all_flights)
        sol.stats = self.stats
        sol.algorithm = algo
        sol.instance_name = self.instance.name
        return sol


def solve(instance: Instance, mode: str = "exact", time_limit: float = math.inf, node_limit=None, **toggles) -> Solution:
    """Solve ``instance``; ``mode`` is "exact" (branch-and-price) or "root" (HBPBC)."""
    try:
        solver = BranchAndPrice(instance, SolveOptions(mode=mode, time_limit=time_limit, node_limit=node_limit, **toggles))
    except UnservableCustomer:
        return infeasible("hbpbc" if mode == "root" else "bpbc")
    return solver.solve()


def write_run_log(stats: SolveStats, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["node_id", "depth", "lb", "ub", "branch_kind"])
        for node_id, depth, lb, ub, kind in stats.run_log:
            w.writerow([node_id, depth, f"{lb:.6f}", f"{ub:.6f}", kind])


def write_iteration_log(stats: SolveStats, path) -> None:
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh)
        w.writerow(["iteration", "node_id", "gamma", "sum_phi", "sum_bsp", "columns", "cuts"])
        for it, node_id, gamma, phi, bsp, ncol, ncut in stats.iteration_log:
            w.writerow([it, node_id, f"{gamma:.6f}", f"{phi:.6f}", f"{bsp:.6f}", ncol, ncut])
