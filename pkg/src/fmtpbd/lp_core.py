"""Small LP / pure-binary IP layer used by the restricted master problems.

Both solvers sit on HiGHS (through scipy).  Dual values follow the usual
minimisation convention: ``>=`` rows have non-negative duals, ``<=`` rows
non-positive ones, ``=`` rows are free.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from scipy.optimize import LinearConstraint, linprog, milp
from scipy.sparse import csr_matrix

from .model import FmtpError

FEAS_TOL = 1e-7
INT_TOL = 1e-6
GAP_TOL = 1e-6

LE, GE, EQ = "<=", ">=", "="


class NumericalFailure(FmtpError):
    pass


@dataclass
class Constraint:
    coeffs: dict[int, float]
    sense: str
    rhs: float
    name: str = ""


@dataclass
class LinearProgram:
    """min c.x subject to sparse rows and variable bounds."""

    costs: list[float] = field(default_factory=list)
    lower: list[float] = field(default_factory=list)
    upper: list[float] = field(default_factory=list)
    rows: list[Constraint] = field(default_factory=list)

    def add_var(self, cost: float, lb: float = 0.0, ub: float = math.inf) -> int:
        self.costs.append(float(cost))
        self.lower.append(float(lb))
        self.upper.append(float(ub))
        return len(self.costs) - 1

    def add_row(self, coeffs: dict[int, float], sense: str, rhs: float, name: str = "") -> int:
        if sense not in (LE, GE, EQ):
            raise ValueError(f"bad sense {sense!r}")
        self.rows.append(Constraint(dict(coeffs), sense, float(rhs), name))
        return len(self.rows) - 1

    @property
    def n_vars(self) -> int:
        return len(self.costs)


@dataclass
class LpSolution:
    status: str  # "Optimal" | "Infeasible" | "Unbounded"
    x: np.ndarray | None = None
    duals: np.ndarray | None = None
    reduced_costs: np.ndarray | None = None
    objective: float = math.nan


def _matrix(n_vars: int, rows: list[Constraint]):
    data, ri, ci = [], [], []
    for k, r in enumerate(rows):
        for j, a in r.coeffs.items():
            if a:
                if not (0 <= j < n_vars):
                    raise ValueError(f"row {k} references unknown variable {j}")
                data.append(a)
                ri.append(k)
                ci.append(j)
    return csr_matrix((data, (ri, ci)), shape=(len(rows), n_vars))


def solve_lp(lp: LinearProgram, check: bool = True) -> LpSolution:
    n = lp.n_vars
    c = np.asarray(lp.costs, dtype=float)
    if not np.all(np.isfinite(c)):
        raise ValueError("non-finite objective coefficient")
    ub_rows = [k for k, r in enumerate(lp.rows) if r.sense != EQ]
    eq_rows = [k for k, r in enumerate(lp.rows) if r.sense == EQ]
    A_ub = b_ub = A_eq = b_eq = None
    if ub_rows:
        sign = np.array([1.0 if lp.rows[k].sense == LE else -1.0 for k in ub_rows])
        A_ub = _matrix(n, [lp.rows[k] for k in ub_rows]).multiply(sign[:, None]).tocsr()
        b_ub = sign * np.array([lp.rows[k].rhs for k in ub_rows])
    if eq_rows:
        A_eq = _matrix(n, [lp.rows[k] for k in eq_rows])
        b_eq = np.array([lp.rows[k].rhs for k in eq_rows])
    bounds = [(lo, None if math.isinf(hi) else hi) for lo, hi in zip(lp.lower, lp.upper)]
    if n == 0:
        # no columns: feasible iff every row is satisfied at zero
        ok = all(
            (r.sense == LE and 0 <= r.rhs + FEAS_TOL)
            or (r.sense == GE and 0 >= r.rhs - FEAS_TOL)
            or (r.sense == EQ and abs(r.rhs) <= FEAS_TOL)
            for r in lp.rows
        )
        if not ok:
            return LpSolution("Infeasible")
        return LpSolution("Optimal", np.zeros(0), np.zeros(len(lp.rows)), np.zeros(0), 0.0)
    res = linprog(c, A_ub=A_ub, b_ub=b_ub, A_eq=A_eq, b_eq=b_eq, bounds=bounds, method="highs")
    if res.status == 2:
        return LpSolution("Infeasible")
    if res.status == 3:
        return LpSolution("Unbounded")
    if res.status != 0:
        raise NumericalFailure(f"HiGHS status {res.status}: {res.message}")
    duals = np.zeros(len(lp.rows))
    if ub_rows:
        duals[ub_rows] = sign * res.ineqlin.marginals
    if eq_rows:
        duals[eq_rows] = res.eqlin.marginals
    rc = np.asarray(res.lower.marginals) + np.asarray(res.upper.marginals)
    sol = LpSolution("Optimal", np.asarray(res.x), duals, rc, float(res.fun))
    if check:
        _certify(lp, sol, res)
    return sol


def _certify(lp: LinearProgram, sol: LpSolution, res) -> None:
    """Primal feasibility, dual signs and strong duality of an optimal solution."""
    x, y = sol.x, sol.duals
    scale = 1.0 + abs(sol.objective)
    for k, r in enumerate(lp.rows):
        lhs = sum(a * x[j] for j, a in r.coeffs.items())
        tol = FEAS_TOL * (1 + abs(r.rhs)) * 10
        if (r.sense == LE and lhs > r.rhs + tol) or (r.sense == GE and lhs < r.rhs - tol) or (
            r.sense == EQ and abs(lhs - r.rhs) > tol
        ):
            raise NumericalFailure(f"row {k} violated: {lhs} {r.sense} {r.rhs}")
        if (r.sense == GE and y[k] < -1e-7 * scale) or (r.sense == LE and y[k] > 1e-7 * scale):
            raise NumericalFailure(f"row {k} dual {y[k]} has the wrong sign")
    lo = np.asarray(res.lower.marginals)
    up = np.asarray(res.upper.marginals)
    dual_obj = float(np.dot(y, [r.rhs for r in lp.rows]))
    dual_obj += sum(l * m for l, m in zip(lp.lower, lo) if m)
    dual_obj += sum(u * m for u, m in zip(lp.upper, up) if m and not math.isinf(u))
    if abs(dual_obj - sol.objective) > GAP_TOL * scale:
        raise NumericalFailure(f"duality gap {dual_obj - sol.objective:.3g} (cond. check failed)")


def complementary_slackness_gap(lp: LinearProgram, sol: LpSolution) -> float:
    """Largest |dual * slack| over rows; zero at an exact optimum."""
    worst = 0.0
    for k, r in enumerate(lp.rows):
        lhs = sum(a * sol.x[j] for j, a in r.coeffs.items())
        worst = max(worst, abs(sol.duals[k] * (lhs - r.rhs)))
    return worst


@dataclass
class IpResult:
    x: np.ndarray | None
    objective: float
    bound: float
    status: str  # "Optimal" | "Feasible" | "Infeasible" | "TimeLimit"

    @property
    def incumbent(self):
        return self.x


def solve_ip_pool(costs, constraints: list[Constraint], time_limit: float = 30.0) -> IpResult:
    """Choose a 0/1 value for every column.  Returns the best incumbent found
    (``None`` if none) together with a valid lower bound."""
    n = len(costs)
    if n == 0:
        lp = LinearProgram(rows=list(constraints))
        if solve_lp(lp, check=False).status == "Optimal":
            return IpResult(np.zeros(0), 0.0, 0.0, "Optimal")
        return IpResult(None, math.inf, math.inf, "Infeasible")
    c = np.asarray(costs, dtype=float)
    cons = []
    if constraints:
        A = _matrix(n, constraints)
        lb = np.array([-np.inf if r.sense == LE else r.rhs for r in constraints])
        ub = np.array([np.inf if r.sense == GE else r.rhs for r in constraints])
        cons.append(LinearConstraint(A, lb, ub))
    res = milp(
        c,
        constraints=cons,
        integrality=np.ones(n),
        bounds=(0, 1),
        options={"time_limit": max(time_limit, 0.01), "disp": False, "mip_rel_gap": 0.0},
    )
    bound = getattr(res, "mip_dual_bound", None)
    if res.status == 2:
        return IpResult(None, math.inf, math.inf, "Infeasible")
    if res.x is None:
        b = -math.inf if bound is None or not np.isfinite(bound) else float(bound)
        return IpResult(None, math.inf, b, "TimeLimit")
    x = np.round(res.x)
    obj = float(np.dot(c, x))
    if res.status == 0:
        return IpResult(x, obj, obj, "Optimal")
    b = -math.inf if bound is None or not np.isfinite(bound) else min(float(bound), obj)
    return IpResult(x, obj, b, "TimeLimit")
