"""Problem data for the bus-drone parcel delivery problem and its derived network.

All times are minutes since the start of the planning horizon, distances are
kilometres, weights are kilograms and costs are dollars.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from typing import Mapping

TOL = 1e-6


class FmtpError(Exception):
    """Base class for all package errors."""


class UnservableCustomer(FmtpError):
    def __init__(self, customer: int):
        super().__init__(f"customer {customer} has no feasible (bus, stop) pair")
        self.customer = customer


class InfeasiblePair(FmtpError):
    pass


@dataclass(frozen=True)
class Location:
    x: float
    y: float

    def distance(self, other: "Location") -> float:
        return math.hypot(self.x - other.x, self.y - other.y)


@dataclass(frozen=True)
class Customer:
    id: int
    loc: Location
    demand: float
    deadline: float


@dataclass(frozen=True)
class BusStop:
    id: int
    loc: Location
    route_km: float


@dataclass(frozen=True)
class Bus:
    id: int
    arrival: Mapping[int, float]  # stop id -> minutes


@dataclass(frozen=True)
class Params:
    Q_B: float = 50.0
    Q_S: float = 10.0
    radius: float = 8.0
    speed: float = 40.0
    Delta: float = 120.0
    tau_B: float = 1.0
    tau_S: float = 1.0
    tau_D: float = 1.0
    c_bus: float = 1.0
    c_drone: float = 2.0
    f_F: float = 40.0
    f_H: float = 1.0
    horizon_end: float = 480.0


@dataclass(frozen=True)
class Instance:
    terminal: Location
    stops: tuple[BusStop, ...]
    buses: tuple[Bus, ...]
    customers: tuple[Customer, ...]
    params: Params = field(default_factory=Params)
    name: str = "instance"

    def customer(self, i: int) -> Customer:
        return self._by_id("customers")[i]

    def stop(self, s: int) -> BusStop:
        return self._by_id("stops")[s]

    def bus(self, b: int) -> Bus:
        return self._by_id("buses")[b]

    def _by_id(self, attr):
        cache = self.__dict__.setdefault("_index", {})
        if attr not in cache:
            cache[attr] = {e.id: e for e in getattr(self, attr)}
        return cache[attr]

    def with_params(self, **changes) -> "Instance":
        return replace(self, params=replace(self.params, **changes))

    def with_stops(self, stop_ids) -> "Instance":
        """Copy keeping only the given stops (other lockers switched off)."""
        keep = set(stop_ids)
        stops = tuple(s for s in self.stops if s.id in keep)
        buses = tuple(
            Bus(b.id, {s: t for s, t in b.arrival.items() if s in keep}) for b in self.buses
        )
        return replace(self, stops=stops, buses=buses)

    def __eq__(self, other):
        if not isinstance(other, Instance):
            return NotImplemented
        return (
            self.name == other.name
            and self.terminal == other.terminal
            and self.stops == other.stops
            and self.customers == other.customers
            and self.params == other.params
            and [(b.id, dict(b.arrival)) for b in self.buses]
            == [(b.id, dict(b.arrival)) for b in other.buses]
        )

    __hash__ = None


@dataclass(frozen=True)
class Violation:
    kind: str
    entity: object
    message: str = ""

    def __str__(self):
        return f"{self.kind}({self.entity})" + (f": {self.message}" if self.message else "")


@dataclass(frozen=True)
class DerivedNetwork:
    """Precomputed travel times, reachability and costs.

    Keys: ``tau``, ``delta``, ``dist`` and ``c2`` by ``(s, i)``; ``feas_buses`` by
    ``(s, i)``; ``release`` by ``(i, b, s)``; ``c1`` by ``(b, s)``.
    """

    instance: Instance
    dist: dict
    tau: dict
    delta: dict
    reach: dict
    feas_buses: dict
    release: dict
    c1: dict
    c2: dict

    @property
    def params(self) -> Params:
        return self.instance.params

    def demand(self, i: int) -> float:
        return self.instance.customer(i).demand

    def deadline(self, i: int) -> float:
        return self.instance.customer(i).deadline

    def options(self, i: int) -> list[tuple[int, int]]:
        """All feasible (bus, stop) pairs for customer ``i``."""
        return [
            (b, s.id)
            for s in self.instance.stops
            if i in self.reach[s.id]
            for b in self.feas_buses[(s.id, i)]
        ]

    def stop_pairs(self, s: int) -> list[tuple[int, int]]:
        """All (customer, bus) pairs a drone at stop ``s`` could ever serve."""
        return [(i, b) for i in sorted(self.reach[s]) for b in self.feas_buses[(s, i)]]


def build_derived(instance: Instance) -> DerivedNetwork:
    p = instance.params
    dist, tau, delta, reach, feas, release, c1, c2 = {}, {}, {}, {}, {}, {}, {}, {}
    for st in instance.stops:
        s = st.id
        reach[s] = set()
        for b in instance.buses:
            c1[(b.id, s)] = p.c_bus * st.route_km
        for c in instance.customers:
            i = c.id
            d = st.loc.distance(c.loc)
            dist[(s, i)] = d
            t = d / p.speed * 60.0
            tau[(s, i)] = t
            delta[(s, i)] = p.tau_S + t + p.tau_D + t
            c2[(s, i)] = p.c_drone * 2.0 * d
            if d > p.radius + 1e-12:
                feas[(s, i)] = ()
                continue
            ok = []
            for b in instance.buses:
                e = b.arrival[s]
                release[(i, b.id, s)] = e + p.tau_B
                if e + p.tau_B + p.tau_S + t <= c.deadline + 1e-9:
                    ok.append(b.id)
            feas[(s, i)] = tuple(ok)
            if ok:
                reach[s].add(i)
    reach = {s: frozenset(v) for s, v in reach.items()}
    for c in instance.customers:
        if not any(c.id in reach[s.id] for s in instance.stops):
            raise UnservableCustomer(c.id)
    return DerivedNetwork(instance, dist, tau, delta, reach, feas, release, c1, c2)


def earliest_service_start(net: DerivedNetwork, i: int, b: int, s: int) -> float:
    if b not in net.feas_buses.get((s, i), ()):
        raise InfeasiblePair(f"bus {b} cannot bring customer {i}'s parcel to stop {s} in time")
    return net.release[(i, b, s)] + net.params.tau_S + net.tau[(s, i)]


def validate_instance(instance: Instance) -> list[Violation]:
    """Return every broken invariant; an empty list means the instance is usable."""
    out: list[Violation] = []
    p = instance.params
    for name in Params.__dataclass_fields__:
        v = getattr(p, name)
        if not (isinstance(v, (int, float)) and math.isfinite(v) and v > 0):
            out.append(Violation("NonPositiveParam", name, f"{name}={v!r}"))
    if not instance.stops:
        out.append(Violation("NoStops", instance.name))
    if not instance.buses:
        out.append(Violation("NoBuses", instance.name))
    for kind, items in (("Stop", instance.stops), ("Bus", instance.buses), ("Customer", instance.customers)):
        ids = [e.id for e in items]
        if len(set(ids)) != len(ids):
            out.append(Violation(f"Duplicate{kind}Id", sorted(ids)))
    for st in instance.stops:
        if not (math.isfinite(st.loc.x) and math.isfinite(st.loc.y)):
            out.append(Violation("NonFiniteLocation", f"stop {st.id}"))
    for a, b in zip(instance.stops, instance.stops[1:]):
        if b.route_km < a.route_km:
            out.append(Violation("NonMonotoneRoute", b.id, "route_km decreases along the line"))
    stop_ids = [s.id for s in instance.stops]
    timetable_ok = True
    for bus in instance.buses:
        missing = [s for s in stop_ids if s not in bus.arrival]
        if missing:
            out.append(Violation("MissingArrival", bus.id, f"stops {missing}"))
            timetable_ok = False
            continue
        times = [bus.arrival[s] for s in stop_ids]
        if any(not math.isfinite(t) or t < 0 for t in times):
            out.append(Violation("BadArrival", bus.id))
            timetable_ok = False
        if any(t2 <= t1 for t1, t2 in zip(times, times[1:])):
            out.append(Violation("NonMonotoneTimetable", bus.id))
    if timetable_ok:
        for b1, b2 in zip(instance.buses, instance.buses[1:]):
            if any(b2.arrival[s] <= b1.arrival[s] for s in stop_ids):
                out.append(Violation("BusOrder", b2.id, f"bus {b2.id} does not run after bus {b1.id}"))
    for c in instance.customers:
        if not (math.isfinite(c.loc.x) and math.isfinite(c.loc.y)):
            out.append(Violation("NonFiniteLocation", f"customer {c.id}"))
        if not c.demand > 0:
            out.append(Violation("NonPositiveDemand", c.id, f"demand={c.demand}"))
        elif c.demand > p.Q_S:
            out.append(Violation("DemandExceedsStopCap", c.id, f"{c.demand} > {p.Q_S}"))
        if not (0 <= c.deadline <= p.horizon_end):
            out.append(Violation("DeadlineOutsideHorizon", c.id, f"deadline={c.deadline}"))
    if out:
        return out
    for st in instance.stops:
        for c in instance.customers:
            d = st.loc.distance(c.loc)
            if d <= p.radius and 2 * d / p.speed * 60 + p.tau_S + p.tau_D > p.Delta:
                out.append(Violation("RoundTripExceedsDelta", (st.id, c.id)))
    for c in instance.customers:
        if not any(st.loc.distance(c.loc) <= p.radius for st in instance.stops):
            out.append(Violation("OutOfRange", c.id, "no stop within drone radius"))
            continue
        feasible = False
        for st in instance.stops:
            d = st.loc.distance(c.loc)
            if d > p.radius:
                continue
            t = d / p.speed * 60.0
            if any(bus.arrival[st.id] + p.tau_B + p.tau_S + t <= c.deadline + 1e-9 for bus in instance.buses):
                feasible = True
                break
        if not feasible:
            out.append(Violation("UnservableCustomer", c.id, "no bus reaches a covering stop before the deadline"))
    return out
