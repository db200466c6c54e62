"""Integer solutions: assignment + scheduled flights, cost breakdown, file format."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field
from pathlib import Path

from .columns import FlightColumn, FlightInfeasible, Trip, schedule_flight
from .model import DerivedNetwork, FmtpError

STATUSES = ("Optimal", "Feasible", "Infeasible", "TimeLimit")


class SolutionFormatError(FmtpError):
    pass


@dataclass
class CostBreakdown:
    bus: float = 0.0
    drone_ops: float = 0.0
    drone_fixed: float = 0.0
    holding: float = 0.0

    @property
    def total(self) -> float:
        return self.bus + self.drone_ops + self.drone_fixed + self.holding


@dataclass
class SolveStats:
    nodes: int = 0
    cg_iterations: int = 0
    benders_rounds: int = 0
    cuts: int = 0
    columns: int = 0
    flights: int = 0
    wall_time: float = 0.0
    lower_bound: float = -math.inf
    # in-memory traces, not written to solution files
    lb_trace: list = field(default_factory=list, repr=False)
    convergence: list = field(default_factory=list, repr=False)
    iteration_log: list = field(default_factory=list, repr=False)
    run_log: list = field(default_factory=list, repr=False)


@dataclass
class Solution:
    status: str
    assignment: dict = field(default_factory=dict)  # customer -> (bus, stop)
    flights: dict = field(default_factory=dict)  # stop -> [FlightColumn]
    cost: CostBreakdown = field(default_factory=CostBreakdown)
    stats: SolveStats = field(default_factory=SolveStats)
    algorithm: str = ""
    instance_name: str = ""
    has_incumbent: bool = True

    @property
    def total(self) -> float:
        return self.cost.total if self.has_incumbent else math.inf

    def all_flights(self):
        for s in sorted(self.flights):
            yield from self.flights[s]


def breakdown(net: DerivedNetwork, assignment: dict, flights: dict) -> CostBreakdown:
    p = net.params
    cb = CostBreakdown()
    for i, (b, s) in assignment.items():
        cb.bus += net.c1[(b, s)] * net.demand(i)
        cb.drone_ops += net.c2[(s, i)]
    for fl in flights.values():
        for f in fl:
            cb.drone_fixed += p.f_F
            cb.holding += sum(p.f_H * net.demand(t.customer) * t.holding for t in f.trips)
    return cb


def build_solution(net: DerivedNetwork, assignment: dict, flights, status: str = "Feasible", **kw) -> Solution:
    """Make a consistent solution from an assignment and candidate flights.

    Trips that disagree with the assignment or repeat a customer are dropped
    (removing trips never delays the remaining ones), and any assigned
    customer left without a trip gets a singleton flight.
    """
    flown = set()
    per_stop: dict = {}
    for f in sorted(flights, key=lambda f: (f.stop, f.sequence)):
        keep = [
            (i, b)
            for i, b in f.sequence
            if assignment.get(i) == (b, f.stop) and i not in flown
        ]
        if not keep:
            continue
        flown.update(i for i, _ in keep)
        per_stop.setdefault(f.stop, []).append(schedule_flight(net, f.stop, keep))
    for i in sorted(assignment):
        if i not in flown:
            b, s = assignment[i]
            per_stop.setdefault(s, []).append(schedule_flight(net, s, [(i, b)]))
    per_stop = {s: per_stop[s] for s in sorted(per_stop)}
    sol = Solution(status, dict(sorted(assignment.items())), per_stop, **kw)
    sol.cost = breakdown(net, sol.assignment, per_stop)
    sol.instance_name = net.instance.name
    return sol


def from_columns(net: DerivedNetwork, columns, flights, status: str = "Feasible", **kw) -> Solution:
    """Solution from selected assignment columns and flights.

    A customer covered by several columns keeps the first (bus, stop) that also
    has a flight serving it; dropping it from the other columns only lowers cost.
    """
    flown = {(i, b, f.stop) for f in flights for i, b in f.sequence}
    assignment: dict = {}
    for col in sorted(columns, key=lambda c: c.key):
        for i in sorted(col.customers):
            cur = assignment.get(i)
            here = (col.bus, col.stop)
            if cur is None or ((i, *cur) not in flown and (i, *here) in flown):
                assignment[i] = here
    return build_solution(net, assignment, flights, status, **kw)


def infeasible(algorithm: str = "", stats: SolveStats | None = None) -> Solution:
    return Solution("Infeasible", stats=stats or SolveStats(), algorithm=algorithm, has_incumbent=False)


def _r(x: float) -> float:
    return float(f"{x:.12g}")


def solution_to_dict(sol: Solution) -> dict:
    st = sol.stats
    return {
        "instance": sol.instance_name,
        "algorithm": sol.algorithm,
        "status": sol.status,
        "total": _r(sol.cost.total) if sol.has_incumbent else None,
        "cost": {k: _r(v) for k, v in asdict(sol.cost).items()},
        "assignment": [
            {"customer": i, "bus": b, "stop": s} for i, (b, s) in sorted(sol.assignment.items())
        ],
        "flights": [
            {
                "stop": f.stop,
                "duration": _r(f.duration),
                "cost": _r(f.cost),
                "trips": [
                    {
                        "customer": t.customer,
                        "bus": t.bus,
                        "loading_start": _r(t.loading_start),
                        "service_start": _r(t.service_start),
                        "return_time": _r(t.return_time),
                        "holding": _r(t.holding),
                    }
                    for t in f.trips
                ],
            }
            for f in sol.all_flights()
        ],
        "stats": {
            "nodes": st.nodes,
            "cg_iterations": st.cg_iterations,
            "benders_rounds": st.benders_rounds,
            "cuts": st.cuts,
            "columns": st.columns,
            "flights": st.flights,
            "wall_time": round(st.wall_time, 6),
            "lower_bound": None if not math.isfinite(st.lower_bound) else _r(st.lower_bound),
        },
    }


def dumps(sol: Solution) -> str:
    return json.dumps(solution_to_dict(sol), indent=2) + "\n"


def save(sol: Solution, path) -> None:
    Path(path).write_text(dumps(sol))


def solution_from_dict(data: dict) -> Solution:
    try:
        assignment = {int(a["customer"]): (int(a["bus"]), int(a["stop"])) for a in data["assignment"]}
        flights: dict = {}
        for f in data["flights"]:
            trips = tuple(
                Trip(
                    int(t["customer"]),
                    int(t["bus"]),
                    float(t["loading_start"]),
                    float(t["service_start"]),
                    float(t["return_time"]),
                    float(t["holding"]),
                )
                for t in f["trips"]
            )
            fc = FlightColumn(int(f["stop"]), trips, float(f["duration"]), float(f["cost"]))
            flights.setdefault(fc.stop, []).append(fc)
        cost = CostBreakdown(**{k: float(v) for k, v in data["cost"].items()})
        status = data["status"]
        if status not in STATUSES:
            raise SolutionFormatError(f"unknown status {status!r}")
        st = data.get("stats", {})
        stats = SolveStats(
            **{k: st[k] for k in ("nodes", "cg_iterations", "benders_rounds", "cuts", "columns", "flights") if k in st}
        )
        if st.get("lower_bound") is not None:
            stats.lower_bound = float(st["lower_bound"])
    except (KeyError, TypeError, ValueError) as e:
        raise SolutionFormatError(f"malformed solution file: {e!r}") from None
    return Solution(
        status,
        assignment,
        flights,
        cost,
        stats,
        data.get("algorithm", ""),
        data.get("instance", ""),
        data.get("total") is not None,
    )


def load(path) -> Solution:
    try:
        data = json.loads(Path(path).read_text())
    except json.JSONDecodeError as e:
        raise SolutionFormatError(f"line {e.lineno}: {e.msg}") from None
    return solution_from_dict(data)


__all__ = [
    "CostBreakdown",
    "FlightInfeasible",
    "Solution",
    "SolutionFormatError",
    "SolveStats",
    "breakdown",
    "build_solution",
    "from_columns",
    "infeasible",
    "load",
    "save",
]
