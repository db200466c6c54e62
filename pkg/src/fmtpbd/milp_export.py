"""The compact arc-based MILP: model construction, LP-format export and
re-parse, and a row-by-row feasibility checker for solutions.

Variables: ``x_s_i_b`` (bus b brings parcel i to stop s), ``y_i_j_s_d`` (drone
d of stop s serves j right after i; ``L`` stands for the locker), ``z_s_d``
(drone d of stop s is used), ``h_i`` (holding minutes) and ``w_i`` (service
start).  One drone is instantiated per reachable customer, and each drone flies
at most one flight, so drones and flights coincide.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field
from pathlib import Path

from .model import DerivedNetwork, Instance, build_derived

LOCKER = "L"
FEAS_TOL = 1e-6


@dataclass(frozen=True)
class Row:
    kind: str
    entity: tuple
    coeffs: dict
    sense: str  # "<=", ">=", "="
    rhs: float

    @property
    def name(self) -> str:
        return "_".join([self.kind, *map(str, self.entity)])


@dataclass
class Milp1Model:
    net: DerivedNetwork
    objective: dict = field(default_factory=dict)
    binaries: list = field(default_factory=list)
    continuous: list = field(default_factory=list)
    drones: dict = field(default_factory=dict)  # stop -> number of drone indices
    pairs: list = field(default_factory=list)  # (s, i, b) with an x variable

    @property
    def variables(self) -> list:
        return self.binaries + self.continuous

    def rows(self):
        """Every constraint, generated on demand in a fixed order."""
        return _rows(self)


def x_name(s, i, b):
    return f"x_{s}_{i}_{b}"


def y_name(i, j, s, d):
    return f"y_{i}_{j}_{s}_{d}"


def z_name(s, d):
    return f"z_{s}_{d}"


def big_m_start(net, s, i, b) -> float:
    """Constant of the bus-to-drone timing row."""
    p = net.params
    return net.instance.bus(b).arrival[s] + p.tau_B + p.tau_S + net.tau[(s, i)]


def big_m_sequence(net, s, i, j) -> float:
    p = net.params
    return net.deadline(i) + p.tau_D + net.tau[(s, i)] + p.tau_S + net.tau[(s, j)]


def big_m_holding(net, s, i, b) -> float:
    p = net.params
    return net.deadline(i) - net.tau[(s, i)] - p.tau_S - p.tau_B - net.instance.bus(b).arrival[s]


def build_milp1(instance: Instance | DerivedNetwork) -> Milp1Model:
    net = instance if isinstance(instance, DerivedNetwork) else build_derived(instance)
    inst = net.instance
    p = net.params
    m = Milp1Model(net)
    for st in inst.stops:
        s = st.id
        for i in sorted(net.reach[s]):
            for b in net.feas_buses[(s, i)]:
                m.pairs.append((s, i, b))
                v = x_name(s, i, b)
                m.binaries.append(v)
                m.objective[v] = net.c1[(b, s)] * net.demand(i) + net.c2[(s, i)]
    for st in inst.stops:
        s = st.id
        cs = sorted(net.reach[s])
        m.drones[s] = len(cs)
        nodes = [LOCKER, *cs]
        for d in range(len(cs)):
            for i in nodes:
                for j in nodes:
                    if i != j:
                        m.binaries.append(y_name(i, j, s, d))
        for d in range(len(cs)):
            v = z_name(s, d)
            m.binaries.append(v)
            m.objective[v] = p.f_F
    for c in inst.customers:
        m.continuous.append(f"h_{c.id}")
        m.objective[f"h_{c.id}"] = p.f_H * c.demand
    for c in inst.customers:
        m.continuous.append(f"w_{c.id}")
    return m


def _rows(m: Milp1Model):
    net = m.net
    inst = net.instance
    p = net.params
    by_customer: dict = {}
    by_bus: dict = {}
    by_pair: dict = {}
    by_stop_cust: dict = {}
    for s, i, b in m.pairs:
        by_customer.setdefault(i, []).append((s, i, b))
        by_bus.setdefault(b, []).append((s, i, b))
        by_pair.setdefault((b, s), []).append((s, i, b))
        by_stop_cust.setdefault((s, i), []).append(b)
    for c in inst.customers:
        yield Row("visit", (c.id,), {x_name(*k): 1.0 for k in by_customer.get(c.id, [])}, "=", 1.0)
    for bus in inst.buses:
        co = {x_name(*k): net.demand(k[1]) for k in by_bus.get(bus.id, [])}
        yield Row("buscap", (bus.id,), co, "<=", p.Q_B)
    for bus in inst.buses:
        for st in inst.stops:
            co = {x_name(*k): net.demand(k[1]) for k in by_pair.get((bus.id, st.id), [])}
            yield Row("stopcap", (bus.id, st.id), co, "<=", p.Q_S)
    for st in inst.stops:
        s = st.id
        cs = sorted(net.reach[s])
        nodes = [LOCKER, *cs]
        D = range(m.drones[s])
        for i in cs:
            xs = {x_name(s, i, b): -1.0 for b in by_stop_cust.get((s, i), [])}
            into = {y_name(j, i, s, d): 1.0 for d in D for j in nodes if j != i}
            out = {y_name(i, j, s, d): 1.0 for d in D for j in nodes if j != i}
            yield Row("connect_in", (s, i), {**into, **xs}, "=", 0.0)
            yield Row("connect_out", (s, i), {**out, **xs}, "=", 0.0)
        for d in D:
            starts = {y_name(LOCKER, i, s, d): 1.0 for i in cs}
            ends = {y_name(i, LOCKER, s, d): -1.0 for i in cs}
            yield Row("locker_balance", (s, d), {**starts, **ends}, "=", 0.0)
            yield Row("drone_use", (s, d), {**starts, z_name(s, d): -1.0}, "<=", 0.0)
            for i in cs:
                into = {y_name(j, i, s, d): 1.0 for j in nodes if j != i}
                out = {y_name(i, j, s, d): -1.0 for j in nodes if j != i}
                yield Row("flow", (s, d, i), {**into, **out}, "=", 0.0)
            co = {y_name(i, j, s, d): net.delta[(s, i)] for i in cs for j in nodes if j != i}
            co[z_name(s, d)] = -p.Delta
            yield Row("duration", (s, d), co, "<=", 0.0)
    for s, i, b in m.pairs:
        M = big_m_start(net, s, i, b)
        yield Row("start_time", (s, i, b), {f"w_{i}": -1.0, x_name(s, i, b): M}, "<=", 0.0)
    for st in inst.stops:
        s = st.id
        cs = sorted(net.reach[s])
        for i in cs:
            for j in cs:
                if i == j:
                    continue
                M = big_m_sequence(net, s, i, j)
                gap = p.tau_D + net.tau[(s, i)] + p.tau_S + net.tau[(s, j)]
                co = {f"w_{i}": 1.0, f"w_{j}": -1.0}
                for d in range(m.drones[s]):
                    co[y_name(i, j, s, d)] = M
                yield Row("time_flow", (s, i, j), co, "<=", M - gap)
    for s, i, b in m.pairs:
        M = big_m_holding(net, s, i, b)
        release = net.instance.bus(b).arrival[s] + p.tau_B
        co = {f"w_{i}": 1.0, f"h_{i}": -1.0, x_name(s, i, b): M}
        yield Row("holding", (s, i, b), co, "<=", M + net.tau[(s, i)] + p.tau_S + release)
    for c in inst.customers:
        yield Row("deadline", (c.id,), {f"w_{c.id}": 1.0}, "<=", c.deadline)


# ---- LP text format ----------------------------------------------------------

def _fmt(x: float) -> str:
    return repr(float(x))


def _expr(coeffs: dict, width: int = 200) -> list[str]:
    lines, cur = [], ""
    for v, a in coeffs.items():
        if a == 0:
            continue
        term = f"{'-' if a < 0 else '+'} {_fmt(abs(a))} {v}"
        if cur and len(cur) + len(term) + 1 > width:
            lines.append(cur)
            cur = ""
        cur = f"{cur} {term}" if cur else term
    lines.append(cur or "0 x_dummy_zero")
    return lines


def lp_text(model: Milp1Model) -> str:
    out = [f"\\ compact bus-drone model for instance {model.net.instance.name}", "Minimize"]
    obj = _expr(model.objective)
    out.append(" obj: " + obj[0])
    out += ["   " + ln for ln in obj[1:]]
    out.append("Subject To")
    for r in model.rows():
        expr = _expr(r.coeffs)
        sense = {"=": "="}.get(r.sense, r.sense)
        expr[-1] += f" {sense} {_fmt(r.rhs)}"
        out.append(f" {r.name}: " + expr[0])
        out += ["   " + ln for ln in expr[1:]]
    out.append("Bounds")
    for v in model.continuous:
        out.append(f" 0 <= {v}")
    out.append("Binary")
    for k in range(0, len(model.binaries), 8):
        out.append(" " + " ".join(model.binaries[k : k + 8]))
    out.append("End")
    return "\n".join(out) + "\n"


def export_lp_file(model: Milp1Model, path) -> None:
    Path(path).write_text(lp_text(model))


@dataclass
class ParsedLp:
    objective: dict
    rows: dict  # name -> (coeffs, sense, rhs)
    bounds: dict  # var -> (lo, hi)
    binaries: list


_ROW_START = re.compile(r"^([A-Za-z_][\w.\-]*):\s*(.*)$")
_TERM = re.compile(r"([+-])\s*([0-9.eE+\-]+|inf)\s+([A-Za-z_][\w.\-]*)")


def _parse_expr(text: str) -> dict:
    coeffs = {}
    for sign, num, var in _TERM.findall(text):
        if var == "x_dummy_zero":
            continue
        a = float(num)
        coeffs[var] = coeffs.get(var, 0.0) + (-a if sign == "-" else a)
    return coeffs


def parse_lp(text: str) -> ParsedLp:
    section = None
    logical: dict = {"obj": [], "st": [], "bounds": [], "bin": []}
    headers = {"minimize": "obj", "subject to": "st", "bounds": "bounds", "binary": "bin", "binaries": "bin"}
    for raw in text.splitlines():
        line = raw.strip()
        if not line or line.startswith("\\"):
            continue
        low = line.lower()
        if low in headers:
            section = headers[low]
            continue
        if low == "end":
            break
        if section is None:
            raise ValueError(f"content before any section: {line!r}")
        if section in ("obj", "st") and not _ROW_START.match(line) and logical[section]:
            logical[section][-1] += " " + line
        else:
            logical[section].append(line)
    obj_line = logical["obj"][0] if logical["obj"] else "obj:"
    objective = _parse_expr(_ROW_START.match(obj_line).group(2))
    rows = {}
    for line in logical["st"]:
        m = _ROW_START.match(line)
        if not m:
            raise ValueError(f"unnamed row: {line!r}")
        body = m.group(2)
        sm = re.search(r"(<=|>=|=)\s*(\S+)\s*$", body)
        if not sm:
            raise ValueError(f"row {m.group(1)} has no sense")
        rows[m.group(1)] = (_parse_expr(" " + body[: sm.start()]), sm.group(1), float(sm.group(2)))
    bounds = {}
    for line in logical["bounds"]:
        parts = line.split()
        if len(parts) == 3 and parts[1] == "<=":
            bounds[parts[2]] = (float(parts[0]), float("inf"))
        else:
            raise ValueError(f"unsupported bound: {line!r}")
    binaries = [v for line in logical["bin"] for v in line.split()]
    return ParsedLp(objective, rows, bounds, binaries)


def read_lp_file(path) -> ParsedLp:
    return parse_lp(Path(path).read_text())


# ---- solution checking -------------------------------------------------------

@dataclass(frozen=True)
class RowViolation:
    kind: str
    entity: tuple
    detail: str = ""

    def __str__(self):
        label = "".join(part.capitalize() for part in self.kind.split("_")) + "Row"
        ent = ",".join(map(str, self.entity))
        return f"{label}({ent})" + (f": {self.detail}" if self.detail else "")


def solution_values(solution, model: Milp1Model) -> tuple[dict, list]:
    """Variable values implied by a solution, plus mapping problems."""
    net = model.net
    vals: dict = {}
    issues = []
    for i, (b, s) in solution.assignment.items():
        vals[x_name(s, i, b)] = 1.0
    for s in sorted(solution.flights):
        fl = solution.flights[s]
        if len(fl) > model.drones.get(s, 0):
            issues.append(RowViolation("drone_count", (s,), f"{len(fl)} flights, {model.drones.get(s, 0)} drones"))
        for d, f in enumerate(fl):
            vals[z_name(s, d)] = 1.0
            seq = [LOCKER, *f.customers, LOCKER]
            for a, c in zip(seq, seq[1:]):
                key = y_name(a, c, s, d)
                vals[key] = vals.get(key, 0.0) + 1.0
            for t in f.trips:
                if solution.assignment.get(t.customer) != (t.bus, s):
                    issues.append(RowViolation("trip_assignment", (t.customer,), f"flown from stop {s} on bus {t.bus}"))
                if f"w_{t.customer}" in vals:
                    issues.append(RowViolation("repeated_trip", (t.customer,)))
                vals[f"w_{t.customer}"] = t.service_start
                vals[f"h_{t.customer}"] = t.holding
    return vals, issues


def check_solution_feasible(solution, instance: Instance, tol: float = FEAS_TOL) -> list[RowViolation]:
    """Evaluate every row of the compact model at the solution, the variable
    domains, and the identity between the model objective and the solution's
    reported cost.  An empty list means feasible and cost-consistent."""
    model = build_milp1(instance)
    known = set(model.variables)
    vals, out = solution_values(solution, model)
    for v in vals:
        if v not in known:
            out.append(RowViolation("unknown_variable", (v,)))
    for v in model.continuous:
        if vals.get(v, 0.0) < -tol:
            out.append(RowViolation("nonnegative", (v,), f"{vals[v]:.6f}"))
    for v in model.binaries:
        if vals.get(v, 0.0) not in (0.0, 1.0):
            out.append(RowViolation("binary", (v,), f"{vals[v]}"))
    for r in model.rows():
        lhs = sum(a * vals.get(v, 0.0) for v, a in r.coeffs.items())
        slack = {"<=": r.rhs - lhs, ">=": lhs - r.rhs, "=": -abs(lhs - r.rhs)}[r.sense]
        if slack < -tol * (1 + abs(r.rhs)):
            out.append(RowViolation(r.kind, r.entity, f"lhs {lhs:.6f} {r.sense} {r.rhs:.6f}"))
    objective = sum(a * vals.get(v, 0.0) for v, a in model.objective.items())
    reported = solution.cost.total
    if abs(objective - reported) > tol * (1 + abs(reported)):
        out.append(RowViolation("cost_identity", (), f"model {objective:.6f} vs reported {reported:.6f}"))
    return out


def objective_value(model: Milp1Model, vals: dict) -> float:
    return sum(a * vals.get(v, 0.0) for v, a in model.objective.items())
