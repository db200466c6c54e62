"""Seeded tiny instances shared by the oracle-backed tests."""

from __future__ import annotations

from functools import lru_cache

from fmtpbd.instance_io import GeneratorConfig, generate
from fmtpbd.model import UnservableCustomer, build_derived


def config_for(seed: int) -> GeneratorConfig:
    return GeneratorConfig(
        n_stops=1 + (seed // 4) % 3,
        n_buses=1 + (seed // 12) % 3,
        n_customers=3 + seed % 4,
        seed=seed,
    )


def _has_assignment(inst) -> bool:
    from fmtpbd.baselines import so_assignment

    try:
        net = build_derived(inst)
    except UnservableCustomer:
        return False
    return so_assignment(net)[0] is not None


@lru_cache(maxsize=None)
def oracle_suite(n: int = 50) -> tuple:
    """The first ``n`` generated instances (<= 6 customers, <= 3 buses,
    <= 3 stops) that admit a feasible assignment."""
    out = []
    seed = 0
    while len(out) < n:
        inst = generate(config_for(seed))
        if _has_assignment(inst):
            out.append(inst)
        seed += 1
    return tuple(out)
