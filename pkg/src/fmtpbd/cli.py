"""Command-line entry point: ``fmtpbd <command> ...``.

Exit codes: 0 success, 1 infeasible (or failed verification), 2 invalid
input, 3 time limit reached, 4 internal error.
"""

from __future__ import annotations

import argparse
import logging
import math
import os
import sys
from pathlib import Path

from . import analysis, instance_io, milp_export, solution as solmod
from .baselines import TooLarge
from .instance_io import GeneratorConfig, InstanceFormatError
from .model import validate_instance

EXIT_OK, EXIT_INFEASIBLE, EXIT_INPUT, EXIT_TIME, EXIT_INTERNAL = 0, 1, 2, 3, 4
ALGOS = ("bpbc", "hbpbc", "so", "oracle")

log = logging.getLogger("fmtpbd")


class InputError(Exception):
    pass


def _factors(text: str) -> list[float]:
    try:
        vals = [float(x) for x in text.split(",") if x.strip()]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad factor list {text!r}") from None
    if not vals or any(v <= 0 for v in vals):
        raise argparse.ArgumentTypeError("factors must be positive")
    return vals


def _subsets(text: str) -> list[list[int]]:
    try:
        return [[int(x) for x in part.split(",") if x.strip()] for part in text.split(";")]
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad subset list {text!r}") from None


def _positive_int(text: str) -> int:
    v = int(text)
    if v < 1:
        raise argparse.ArgumentTypeError("must be >= 1")
    return v


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="fmtpbd", description="Bus + drone parcel delivery solver")
    ap.add_argument("--threads", type=_positive_int, default=1, help="worker cap (solves run sequentially)")
    sub = ap.add_subparsers(dest="command", required=True)

    g = sub.add_parser("generate", help="write a random instance")
    g.add_argument("--stops", type=_positive_int, default=6)
    g.add_argument("--buses", type=_positive_int, default=6)
    g.add_argument("--customers", type=_positive_int, default=18)
    g.add_argument("--seed", type=int, default=0)
    g.add_argument("--name")
    g.add_argument("-o", "--output")

    v = sub.add_parser("validate", help="check an instance file")
    v.add_argument("file")

    s = sub.add_parser("solve", help="solve an instance")
    s.add_argument("file")
    s.add_argument("--algo", choices=ALGOS, default="bpbc")
    s.add_argument("--time-limit", type=float, default=3600.0)
    s.add_argument("--node-limit", type=_positive_int)
    s.add_argument("-o", "--output")
    s.add_argument("--log", help="branch-and-bound run log (CSV)")
    s.add_argument("--iteration-log", help="Benders iteration log (CSV)")
    for flag in ("warm-start", "fixing", "inequalities", "heuristics"):
        s.add_argument(f"--no-{flag}", action="store_true")

    e = sub.add_parser("export-milp", help="write the compact model in LP format")
    e.add_argument("file")
    e.add_argument("-o", "--output", required=True)

    vf = sub.add_parser("verify", help="check a solution against the compact model")
    vf.add_argument("file")
    vf.add_argument("solution")

    an = sub.add_parser("analyze", help="emissions and sensitivity sweeps")
    asub = an.add_subparsers(dest="analysis", required=True)
    em = asub.add_parser("emissions")
    em.add_argument("file")
    em.add_argument("--solution", help="use this solution instead of solving")
    sc = asub.add_parser("sweep-costs")
    sc.add_argument("file")
    sc.add_argument("--bus-factors", type=_factors, default=list(analysis.DEFAULT_FACTORS))
    sc.add_argument("--drone-factors", type=_factors, default=list(analysis.DEFAULT_FACTORS))
    sl = asub.add_parser("sweep-lockers")
    sl.add_argument("file")
    sl.add_argument("--subsets", type=_subsets, required=True, help='e.g. "0,1,2;0,2"')
    for p in (em, sc, sl):
        p.add_argument("--algo", choices=ALGOS, default="hbpbc")
        p.add_argument("--time-limit", type=float, default=3600.0)
        p.add_argument("-o", "--output")
    return ap


def _load(path):
    try:
        return instance_io.load(path)
    except FileNotFoundError:
        raise InputError(f"{path}: no such file") from None
    except InstanceFormatError as e:
        raise InputError(f"{path}: {e}") from None


def _emit(text: str, path) -> None:
    if path:
        Path(path).write_text(text)
    else:
        sys.stdout.write(text)


def cmd_generate(a) -> int:
    cfg = GeneratorConfig(n_stops=a.stops, n_buses=a.buses, n_customers=a.customers, seed=a.seed, name=a.name)
    inst = instance_io.generate(cfg)
    out = a.output or f"{inst.name}.fmtp.json"
    instance_io.save(inst, out)
    print(f"wrote {out}")
    return EXIT_OK


def cmd_validate(a) -> int:
    try:
        inst = instance_io.load(a.file, validate=False)
    except FileNotFoundError:
        raise InputError(f"{a.file}: no such file") from None
    except InstanceFormatError as e:
        raise InputError(f"{a.file}: {e}") from None
    problems = validate_instance(inst)
    for v in problems:
        print(v)
    if problems:
        return EXIT_INPUT
    print("ok")
    return EXIT_OK


def solve_instance(inst, algo, time_limit, node_limit=None, toggles=None):
    from .baselines import oracle_solve, solve_so
    from .bpbc import BranchAndPrice, SolveOptions

    toggles = toggles or {}
    if algo == "oracle":
        return oracle_solve(inst)
    if algo == "so":
        return solve_so(inst, time_limit)
    from .model import UnservableCustomer

    mode = "root" if algo == "hbpbc" else "exact"
    try:
        solver = BranchAndPrice(inst, SolveOptions(mode=mode, time_limit=time_limit, node_limit=node_limit, **toggles))
    except UnservableCustomer:
        return solmod.infeasible(algo)
    return solver.solve()


def cmd_solve(a) -> int:
    from .bpbc import write_iteration_log, write_run_log

    inst = _load(a.file)
    toggles = {
        "warm_start": not a.no_warm_start,
        "fixing": not a.no_fixing,
        "valid_inequalities": not a.no_inequalities,
        "heuristics": not a.no_heuristics,
    }
    try:
        sol = solve_instance(inst, a.algo, a.time_limit, a.node_limit, toggles)
    except TooLarge as e:
        raise InputError(str(e)) from None
    if a.log:
        write_run_log(sol.stats, a.log)
    if a.iteration_log:
        write_iteration_log(sol.stats, a.iteration_log)
    if sol.has_incumbent and a.output:
        solmod.save(sol, a.output)
    lb = sol.stats.lower_bound
    lb_text = f"{lb:.6f}" if math.isfinite(lb) else "none"
    total = f"{sol.total:.6f}" if sol.has_incumbent else "none"
    print(f"status {sol.status} total {total} bound {lb_text} nodes {sol.stats.nodes} time {sol.stats.wall_time:.6f}")
    if sol.status == "Infeasible":
        return EXIT_INFEASIBLE
    if sol.status == "TimeLimit":
        return EXIT_TIME
    return EXIT_OK


def cmd_export(a) -> int:
    inst = _load(a.file)
    model = milp_export.build_milp1(inst)
    milp_export.export_lp_file(model, a.output)
    print(f"wrote {a.output}: {len(model.variables)} variables")
    return EXIT_OK


def cmd_verify(a) -> int:
    inst = _load(a.file)
    try:
        sol = solmod.load(a.solution)
    except FileNotFoundError:
        raise InputError(f"{a.solution}: no such file") from None
    except solmod.SolutionFormatError as e:
        raise InputError(f"{a.solution}: {e}") from None
    problems = milp_export.check_solution_feasible(sol, inst)
    for v in problems:
        print(v)
    if problems:
        return EXIT_INFEASIBLE
    print(f"ok total {sol.cost.total:.6f}")
    return EXIT_OK


def cmd_analyze(a) -> int:
    inst = _load(a.file)
    if a.analysis == "emissions":
        if a.solution:
            sol = solmod.load(a.solution)
        else:
            sol = solve_instance(inst, a.algo, a.time_limit)
        if not sol.has_incumbent:
            print("no solution", file=sys.stderr)
            return EXIT_INFEASIBLE
        e = analysis.emissions_bus_drone(sol, inst)
        truck = analysis.emissions_truck(inst)
        rows = [("bus_drone", e.bus, e.drone, None, e.total), ("truck", None, None, truck, truck)]
        _emit(analysis.csv_text(analysis.EMISSION_HEADER, rows), a.output)
    elif a.analysis == "sweep-costs":
        rows = analysis.sweep_costs(inst, a.bus_factors, a.drone_factors, a.algo, a.time_limit)
        _emit(analysis.csv_text(analysis.COST_HEADER, rows), a.output)
    else:
        try:
            rows = analysis.sweep_lockers(inst, a.subsets, a.algo, a.time_limit)
        except ValueError as e:
            raise InputError(str(e)) from None
        _emit(analysis.csv_text(analysis.LOCKER_HEADER, rows), a.output)
    return EXIT_OK


COMMANDS = {
    "generate": cmd_generate,
    "validate": cmd_validate,
    "solve": cmd_solve,
    "export-milp": cmd_export,
    "verify": cmd_verify,
    "analyze": cmd_analyze,
}


def _setup_logging() -> None:
    level = os.environ.get("FMTP_LOG", "").lower()
    if level in ("debug", "info"):
        logging.basicConfig(level=getattr(logging, level.upper()), format="%(levelname)s %(name)s: %(message)s")


def run(argv=None) -> int:
    _setup_logging()
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code == 0 else EXIT_INPUT
    try:
        return COMMANDS[args.command](args)
    except InputError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_INPUT
    except Exception as e:  # pragma: no cover - last-resort guard
        log.debug("internal error", exc_info=True)
        print(f"internal error: {type(e).__name__}: {e}", file=sys.stderr)
        return EXIT_INTERNAL


def main() -> None:
    sys.exit(run())


if __name__ == "__main__":
    main()
