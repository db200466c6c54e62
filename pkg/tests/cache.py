"""Process-wide memo of suite solves so several test files can share them."""

from __future__ import annotations

from functools import lru_cache

from fmtpbd.baselines import oracle_solve, solve_so
from fmtpbd.bpbc import solve
from suite import oracle_suite

ALL_OFF = dict(warm_start=False, fixing=False, valid_inequalities=False, heuristics=False)


@lru_cache(maxsize=None)
def solved(algo: str, idx: int, toggles: tuple = ()):
    inst = oracle_suite()[idx]
    if algo == "oracle":
        return oracle_solve(inst)
    if algo == "so":
        return solve_so(inst)
    mode = "root" if algo == "hbpbc" else "exact"
    return solve(inst, mode, **dict(toggles))
