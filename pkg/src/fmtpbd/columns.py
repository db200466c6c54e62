"""Assignment and flight columns, and the earliest-start drone scheduler."""

from __future__ import annotations

from dataclasses import dataclass

from .model import DerivedNetwork, FmtpError, InfeasiblePair


class FlightInfeasible(FmtpError):
    pass


class DeadlineViolated(FlightInfeasible):
    def __init__(self, customer, service_start, deadline):
        super().__init__(f"customer {customer} served at {service_start:.6f} after deadline {deadline:.6f}")
        self.customer = customer


class DurationExceeded(FlightInfeasible):
    def __init__(self, duration, limit):
        super().__init__(f"flight duration {duration:.6f} exceeds {limit:.6f}")


@dataclass(frozen=True)
class AssignmentColumn:
    bus: int
    stop: int
    customers: frozenset
    load: float
    cost: float

    @property
    def key(self):
        return (self.bus, self.stop, tuple(sorted(self.customers)))


@dataclass(frozen=True)
class Trip:
    customer: int
    bus: int
    loading_start: float
    service_start: float
    return_time: float
    holding: float


@dataclass(frozen=True)
class FlightColumn:
    stop: int
    trips: tuple[Trip, ...]
    duration: float
    cost: float

    @property
    def sequence(self) -> tuple[tuple[int, int], ...]:
        return tuple((t.customer, t.bus) for t in self.trips)

    @property
    def key(self):
        return (self.stop, self.sequence)

    @property
    def customers(self) -> tuple[int, ...]:
        return tuple(t.customer for t in self.trips)

    def adjacencies(self) -> list[tuple[object, object]]:
        """Consecutive visits including the locker ends, written as ``"L"``."""
        seq = ["L", *self.customers, "L"]
        return list(zip(seq, seq[1:]))


def assignment_cost(net: DerivedNetwork, b: int, s: int, customers) -> float:
    total = 0.0
    for i in customers:
        if i not in net.reach[s] or b not in net.feas_buses[(s, i)]:
            raise InfeasiblePair(f"customer {i} cannot ride bus {b} to stop {s}")
        total += net.c1[(b, s)] * net.demand(i) + net.c2[(s, i)]
    return total


def make_assignment(net: DerivedNetwork, b: int, s: int, customers) -> AssignmentColumn:
    customers = frozenset(customers)
    load = sum(net.demand(i) for i in customers)
    if load > net.params.Q_S + 1e-9:
        raise FlightInfeasible(f"load {load} exceeds stop capacity {net.params.Q_S}")
    return AssignmentColumn(b, s, customers, load, assignment_cost(net, b, s, customers))


def schedule_flight(net: DerivedNetwork, s: int, trips) -> FlightColumn:
    """Earliest-start schedule of an ordered list of ``(customer, bus)`` trips.

    The drone is free at time 0; each trip loads at the later of the drone's
    return and the parcel's release time.
    """
    p = net.params
    seen = set()
    avail = 0.0
    duration = 0.0
    holding_cost = 0.0
    out = []
    for i, b in trips:
        if i in seen:
            raise FlightInfeasible(f"customer {i} repeated in flight")
        seen.add(i)
        if b not in net.feas_buses.get((s, i), ()):
            raise InfeasiblePair(f"bus {b} cannot bring customer {i} to stop {s} in time")
        release = net.release[(i, b, s)]
        start = max(avail, release)
        w = start + p.tau_S + net.tau[(s, i)]
        if w > net.deadline(i) + 1e-9:
            raise DeadlineViolated(i, w, net.deadline(i))
        d = net.delta[(s, i)]
        avail = start + d
        duration += d
        hold = start - release
        holding_cost += p.f_H * net.demand(i) * hold
        out.append(Trip(i, b, start, w, avail, hold))
    if duration > p.Delta + 1e-9:
        raise DurationExceeded(duration, p.Delta)
    return FlightColumn(s, tuple(out), duration, p.f_F + holding_cost)


def flight_cost(net: DerivedNetwork, flight: FlightColumn) -> float:
    p = net.params
    return p.f_F + sum(p.f_H * net.demand(t.customer) * t.holding for t in flight.trips)
