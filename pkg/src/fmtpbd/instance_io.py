"""Instance files (JSON) and the synthetic instance generator."""

from __future__ import annotations

import json
import math
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path

from .model import (
    Bus,
    BusStop,
    Customer,
    FmtpError,
    Instance,
    Location,
    Params,
    validate_instance,
)

RNG_NAME = "splitmix64"
TOP_LEVEL_KEYS = ("name", "terminal", "stops", "buses", "customers", "params")
_MASK64 = (1 << 64) - 1


class InstanceFormatError(FmtpError):
    pass


class GenerationExhausted(FmtpError):
    pass


class SplitMix64:
    """Steele, Lea & Flood's SplitMix64; uniform() uses the top 53 bits."""

    def __init__(self, seed: int):
        self.state = seed & _MASK64

    def next_u64(self) -> int:
        self.state = (self.state + 0x9E3779B97F4A7C15) & _MASK64
        z = self.state
        z = ((z ^ (z >> 30)) * 0xBF58476D1CE4E5B9) & _MASK64
        z = ((z ^ (z >> 27)) * 0x94D049BB133111EB) & _MASK64
        return z ^ (z >> 31)

    def uniform(self, lo: float = 0.0, hi: float = 1.0) -> float:
        return lo + (hi - lo) * ((self.next_u64() >> 11) * 2.0**-53)

    def randbelow(self, n: int) -> int:
        return min(int(self.uniform() * n), n - 1)


def _r9(x: float) -> float:
    return float(f"{x:.9g}")


@dataclass
class GeneratorConfig:
    n_stops: int = 6
    n_buses: int = 6
    n_customers: int = 18
    seed: int = 0
    width: float = 20.0
    height: float = 16.0
    line_trip_minutes: float = 93.0
    line_speed: float = 15.0  # km/h
    window_minutes: float = 360.0  # off-peak window in which trips depart
    params: Params = field(default_factory=Params)
    name: str | None = None


def generate(config: GeneratorConfig) -> Instance:
    """Build a random instance: a straight bus line across the middle of the region,
    customers uniform over the rectangle and within drone range of some stop."""
    if min(config.n_stops, config.n_buses, config.n_customers) < 1:
        raise ValueError("counts must be >= 1")
    p = config.params
    rng = SplitMix64(config.seed)
    y_line = config.height / 2
    line_km = config.line_speed * config.line_trip_minutes / 60.0
    terminal = Location(0.0, _r9(y_line))
    stops = []
    for k in range(config.n_stops):
        x = config.width * (k + 0.5) / config.n_stops
        stops.append(BusStop(k, Location(_r9(x), _r9(y_line)), _r9(x * line_km / config.width)))
    buses = []
    for b in range(config.n_buses):
        depart = config.window_minutes * b / config.n_buses
        buses.append(
            Bus(b, {st.id: _r9(depart + st.route_km / config.line_speed * 60.0) for st in stops})
        )
    demands = [0.5 * k for k in range(1, 10)]
    customers = []
    for i in range(config.n_customers):
        for _ in range(10_000):
            loc = Location(_r9(rng.uniform(0, config.width)), _r9(rng.uniform(0, config.height)))
            earliest = math.inf
            coincident = False
            for st in stops:
                d = st.loc.distance(loc)
                if d < 1e-6:
                    coincident = True
                    break
                if d > p.radius:
                    continue
                t = d / p.speed * 60.0
                earliest = min(earliest, min(bus.arrival[st.id] for bus in buses) + p.tau_B + p.tau_S + t)
            if not coincident and earliest + 1.0 <= p.horizon_end:
                break
        else:
            raise GenerationExhausted(f"could not place customer {i} after 10000 draws")
        q = demands[rng.randbelow(len(demands))]
        lo = earliest + 1.0
        deadline = min(_r9(rng.uniform(lo, p.horizon_end)), p.horizon_end)
        customers.append(Customer(i, loc, q, max(deadline, _r9(lo))))
    name = config.name or f"C{config.n_customers}-S{config.n_stops}-B{config.n_buses}-{config.seed}"
    inst = Instance(terminal, tuple(stops), tuple(buses), tuple(customers), p, name)
    inst.__dict__["meta"] = {"rng": RNG_NAME, "seed": config.seed}
    return inst


def _num(x):
    if isinstance(x, bool):
        raise TypeError("boolean is not a number")
    if float(x).is_integer() and abs(x) < 2**53:
        return int(x)
    return _r9(x)


def instance_to_dict(instance: Instance) -> dict:
    out = {
        "name": instance.name,
        "terminal": {"x": _num(instance.terminal.x), "y": _num(instance.terminal.y)},
        "stops": [
            {"id": s.id, "x": _num(s.loc.x), "y": _num(s.loc.y), "route_km": _num(s.route_km)}
            for s in instance.stops
        ],
        "buses": [
            {"id": b.id, "arrival": {str(s): _num(t) for s, t in b.arrival.items()}}
            for b in instance.buses
        ],
        "customers": [
            {
                "id": c.id,
                "x": _num(c.loc.x),
                "y": _num(c.loc.y),
                "demand": _num(c.demand),
                "deadline": _num(c.deadline),
            }
            for c in instance.customers
        ],
        "params": {k: _num(v) for k, v in asdict(instance.params).items()},
    }
    meta = instance.__dict__.get("meta")
    if meta:
        out["meta"] = meta
    return out


def dumps(instance: Instance) -> str:
    return json.dumps(instance_to_dict(instance), indent=2) + "\n"


def save(instance: Instance, path) -> None:
    Path(path).write_text(dumps(instance))


def _field(obj, key, ctx, kind=(int, float)):
    if not isinstance(obj, dict):
        raise InstanceFormatError(f"{ctx}: expected an object")
    if key not in obj:
        raise InstanceFormatError(f"{ctx}: missing field '{key}'")
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, kind):
        raise InstanceFormatError(f"{ctx}.{key}: malformed value {v!r}")
    return v


def _check_keys(obj, allowed, ctx):
    extra = sorted(set(obj) - set(allowed))
    if extra:
        raise InstanceFormatError(f"{ctx}: unknown field '{extra[0]}'")


def instance_from_dict(data: dict, validate: bool = True) -> Instance:
    if not isinstance(data, dict):
        raise InstanceFormatError("top level: expected an object")
    _check_keys(data, TOP_LEVEL_KEYS + ("meta",), "top level")
    for key in TOP_LEVEL_KEYS:
        if key not in data:
            raise InstanceFormatError(f"top level: missing section '{key}'")
    t = data["terminal"]
    _check_keys(t, ("x", "y"), "terminal")
    terminal = Location(float(_field(t, "x", "terminal")), float(_field(t, "y", "terminal")))
    stops = []
    for k, s in enumerate(data["stops"]):
        ctx = f"stops[{k}]"
        _check_keys(s, ("id", "x", "y", "route_km"), ctx)
        stops.append(
            BusStop(
                _field(s, "id", ctx, int),
                Location(float(_field(s, "x", ctx)), float(_field(s, "y", ctx))),
                float(_field(s, "route_km", ctx)),
            )
        )
    buses = []
    for k, b in enumerate(data["buses"]):
        ctx = f"buses[{k}]"
        _check_keys(b, ("id", "arrival"), ctx)
        arr = _field(b, "arrival", ctx, dict)
        arrival = {}
        for sk, tv in arr.items():
            try:
                sid = int(sk)
            except ValueError:
                raise InstanceFormatError(f"{ctx}.arrival: stop key {sk!r} is not an integer") from None
            if isinstance(tv, bool) or not isinstance(tv, (int, float)):
                raise InstanceFormatError(f"{ctx}.arrival[{sk}]: malformed value {tv!r}")
            arrival[sid] = float(tv)
        buses.append(Bus(_field(b, "id", ctx, int), arrival))
    customers = []
    for k, c in enumerate(data["customers"]):
        ctx = f"customers[{k}]"
        _check_keys(c, ("id", "x", "y", "demand", "deadline"), ctx)
        cid = _field(c, "id", ctx, int)
        ctx = f"customer {cid}"
        customers.append(
            Customer(
                cid,
                Location(float(_field(c, "x", ctx)), float(_field(c, "y", ctx))),
                float(_field(c, "demand", ctx)),
                float(_field(c, "deadline", ctx)),
            )
        )
    pdata = data["params"]
    names = [f.name for f in fields(Params)]
    _check_keys(pdata, names, "params")
    params = Params(**{n: float(_field(pdata, n, "params")) for n in names})
    inst = Instance(terminal, tuple(stops), tuple(buses), tuple(customers), params, str(data["name"]))
    if "meta" in data:
        inst.__dict__["meta"] = data["meta"]
    if validate:
        problems = validate_instance(inst)
        if problems:
            raise InstanceFormatError("invalid instance: " + "; ".join(map(str, problems)))
    return inst


def loads(text: str, validate: bool = True) -> Instance:
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise InstanceFormatError(f"line {e.lineno}: {e.msg}") from None
    return instance_from_dict(data, validate)


def load(path, validate: bool = True) -> Instance:
    return loads(Path(path).read_text(), validate)
