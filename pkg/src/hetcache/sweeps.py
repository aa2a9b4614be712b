"""Grid sweeps over cache sizes, emitted as CSV rows.

Rows are plain dicts of strings so the CSV output is byte-deterministic.
Every rational column ``x`` is written as ``p/q`` and followed by an
advisory ``x_decimal`` column.
"""

from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

from .errors import DomainError, PlanningError
from .planner import plan
from .rate_laws import (
    ProblemInstance,
    chen_bound_slack,
    cut_set_slacks,
    lhc_rate,
    rc_star,
    t_star,
    yang_bound,
)
from .rational import Q, dec, fmt

MODES = ("rate", "latency", "compare-lhc", "compare-bounds")

# Rational value columns per mode; every sweep also starts with N, M1, M2.
VALUE_COLUMNS = {
    "rate": ("rc_star",),
    "latency": ("Rc", "Rp1", "Rp2", "t_star", "rp1", "rp2", "rc"),
    "compare-lhc": ("rc_star", "lhc_rate", "gap"),
    "compare-bounds": ("rc_star", "yang_bound", "gap"),
}
EXTRA_COLUMNS = {"latency": ("case_label",)}


def columns(mode: str) -> list[str]:
    out = ["N", "M1", "M2"]
    for name in VALUE_COLUMNS[mode]:
        out += [name, f"{name}_decimal"]
    return out + list(EXTRA_COLUMNS.get(mode, ()))


def cache_grid(N: int, step) -> list[Fraction]:
    """``0, step, 2*step, ..., N``; ``step`` must divide ``N``."""
    step = Q(step)
    if step <= 0:
        raise DomainError(f"grid step must be positive, got {step}")
    count = N / step
    if count.denominator != 1:
        raise DomainError(f"grid step {step} does not divide N={N}")
    return [k * step for k in range(int(count) + 1)]


@dataclass
class SweepSpec:
    """What to sweep.

    ``step`` defaults to ``N/20`` for each ``N``. ``M1``/``M2`` pin one
    coordinate instead of sweeping it. ``links`` are ``(Rc, Rp1, Rp2)``
    triples, used by the latency mode only.
    """

    mode: str
    Ns: list[int]
    step: Fraction | None = None
    M1: Fraction | None = None
    M2: Fraction | None = None
    links: list[tuple[Fraction, Fraction, Fraction]] = field(default_factory=lambda: [(Fraction(1), Fraction(0), Fraction(0))])

    def __post_init__(self):
        if self.mode not in MODES:
            raise DomainError(f"unknown sweep mode {self.mode!r}")
        if self.mode in ("compare-lhc", "compare-bounds") and min(self.Ns) < 3:
            raise DomainError(f"{self.mode} needs N >= 3")

    def points(self):
        for N in self.Ns:
            step = self.step if self.step is not None else Fraction(N, 20)
            grid = cache_grid(N, step)
            m1s = [Q(self.M1)] if self.M1 is not None else grid
            m2s = [Q(self.M2)] if self.M2 is not None else grid
            for M1 in m1s:
                for M2 in m2s:
                    yield N, M1, M2


@dataclass
class SweepResult:
    mode: str
    rows: list[dict]
    failures: list[str]

    @property
    def ok(self) -> bool:
        return not self.failures

    def to_csv(self) -> str:
        buf = io.StringIO()
        writer = csv.DictWriter(buf, fieldnames=columns(self.mode), lineterminator="\n")
        writer.writeheader()
        writer.writerows(self.rows)
        return buf.getvalue()


def _row(N, M1, M2, values: dict, extra: dict | None = None) -> dict:
    row = {"N": str(N), "M1": fmt(M1), "M2": fmt(M2)}
    for name, v in values.items():
        row[name] = fmt(v)
        row[f"{name}_decimal"] = dec(v)
    row.update(extra or {})
    return row


def _rate_point(N, M1, M2, failures):
    r = rc_star(N, M1, M2)
    slacks = list(cut_set_slacks(N, M1, M2, r))
    if N >= 3:
        # With the pairwise bounds included, one constraint must be tight.
        slacks += [chen_bound_slack(N, M1, M2, r), chen_bound_slack(N, M2, M1, r)]
        if min(slacks) != 0:
            failures.append(f"N={N} M=({fmt(M1)},{fmt(M2)}): rc_star {fmt(r)} not tight against the bounds")
    if min(slacks) < 0:
        failures.append(f"N={N} M=({fmt(M1)},{fmt(M2)}): rc_star {fmt(r)} violates a bound")
    return _row(N, M1, M2, {"rc_star": r})


def _lhc_point(N, M1, M2, failures):
    ours, theirs = rc_star(N, M1, M2), lhc_rate(N, M1, M2)
    if ours > theirs:
        failures.append(f"N={N} M=({fmt(M1)},{fmt(M2)}): rc_star above the LHC rate")
    return _row(N, M1, M2, {"rc_star": ours, "lhc_rate": theirs, "gap": theirs - ours})


def _bounds_point(N, M1, M2, failures):
    ours, theirs = rc_star(N, M1, M2), yang_bound(N, M1, M2)
    if ours < theirs:
        failures.append(f"N={N} M=({fmt(M1)},{fmt(M2)}): rc_star below the earlier bound")
    return _row(N, M1, M2, {"rc_star": ours, "yang_bound": theirs, "gap": ours - theirs})


def _latency_point(N, M1, M2, links, failures):
    Rc, Rp1, Rp2 = links
    inst = ProblemInstance.create(N, M1, M2, Rc, Rp1, Rp2)
    target = t_star(inst)
    try:
        p = plan(inst)
    except PlanningError as exc:
        failures.append(f"N={N} M=({fmt(M1)},{fmt(M2)}): {exc}")
        return _row(N, M1, M2, {"Rc": Q(Rc), "Rp1": Q(Rp1), "Rp2": Q(Rp2), "t_star": target}, {"case_label": "failed"})
    values = {"Rc": Q(Rc), "Rp1": Q(Rp1), "Rp2": Q(Rp2), "t_star": target, "rp1": p.rp1, "rp2": p.rp2, "rc": p.rc}
    return _row(N, M1, M2, values, {"case_label": p.case_label})


def run_sweep(spec: SweepSpec) -> SweepResult:
    """Evaluate every grid point in order; failures collect consistency violations."""
    rows, failures = [], []
    for N, M1, M2 in spec.points():
        if spec.mode == "rate":
            rows.append(_rate_point(N, M1, M2, failures))
        elif spec.mode == "compare-lhc":
            rows.append(_lhc_point(N, M1, M2, failures))
        elif spec.mode == "compare-bounds":
            rows.append(_bounds_point(N, M1, M2, failures))
        else:
            for links in spec.links:
                rows.append(_latency_point(N, M1, M2, links, failures))
    return SweepResult(spec.mode, rows, failures)
