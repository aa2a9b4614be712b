"""Latency-optimal operating points ``(rp1, rp2, rc)``.

For an instance with ``Rp1 >= Rp2`` (otherwise the users are exchanged) put
``u_k = 1 - M_k/N`` and ``alpha = Rp2/Rp1``. Only the rectangle
``rp_k <= u_k`` matters, and the planner searches one of three segments:

* the ray ``rp2 = alpha*rp1`` from the origin, for balanced instances, where
  the three link ratios end up equal;
* the edge ``rp1 = u1`` when user 1 can take its whole residual demand
  privately (``edge-QR``);
* the edge ``rp2 = u2`` in the mirrored situation (``edge-SR``).

On each segment the balance condition reduces to a root of
``phi(r) = P*r - Q*f_bar(segment(r))``, which is nondecreasing in ``r``.
The root is bracketed by float bisection and then snapped to an exact
rational by solving the affine branch of ``f_bar`` that is active there.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import DomainError, PlanningError
from .rate_laws import ProblemInstance, f_bar, f_bar_affine_terms, latency, rc_star, t_star
from .rational import Q, fmt, parse, ratio

CASE_LABELS = ("balanced-line-OP", "edge-QR", "balanced-line-OP-mirror", "edge-SR", "trivial-reduction")
PLAN_SCHEMA = "hetcache.plan/1"

_BISECT_WIDTH = 2.0**-48
_ACTIVE_TOL = 1e-9

ZERO = Fraction(0)


@dataclass(frozen=True)
class Plan:
    """Operating point chosen for one instance."""

    rp1: Fraction
    rp2: Fraction
    rc: Fraction
    T: Fraction
    case_label: str

    def to_dict(self) -> dict:
        return {
            "schema": PLAN_SCHEMA,
            "rp1": fmt(self.rp1),
            "rp2": fmt(self.rp2),
            "rc": fmt(self.rc),
            "T": fmt(self.T),
            "case_label": self.case_label,
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_dict(cls, d: dict) -> "Plan":
        if d.get("case_label") not in CASE_LABELS:
            raise ValueError(f"unknown case label {d.get('case_label')!r}")
        return cls(parse(d["rp1"]), parse(d["rp2"]), parse(d["rc"]), parse(d["T"]), d["case_label"])


# ---------------------------------------------------------------------------
# Segments and the balance function


@dataclass(frozen=True)
class _Line:
    """``(rp1, rp2) = (x0 + x1*r, y0 + y1*r)`` for ``r`` in ``[lo, hi]``."""

    x0: Fraction
    x1: Fraction
    y0: Fraction
    y1: Fraction
    lo: Fraction
    hi: Fraction

    def at(self, r):
        return self.x0 + self.x1 * r, self.y0 + self.y1 * r


def _residuals(inst: ProblemInstance) -> tuple[Fraction, Fraction]:
    return 1 - inst.M1 / inst.N, 1 - inst.M2 / inst.N


def _segment(gid: str, inst: ProblemInstance) -> _Line:
    u1, u2 = _residuals(inst)
    alpha = inst.Rp2 / inst.Rp1 if inst.Rp1 else ZERO
    if gid in ("g1", "g3"):
        hi = u1 if gid == "g1" or alpha == 0 else min(u1, u2 / alpha)
        return _Line(ZERO, Fraction(1), ZERO, alpha, ZERO, hi)
    if gid == "g2":
        return _Line(u1, ZERO, ZERO, Fraction(1), ZERO, u2)
    if gid == "g4":
        return _Line(ZERO, Fraction(1), u2, ZERO, ZERO, u1)
    raise DomainError(f"unknown target function {gid!r}")


def _pieces(inst: ProblemInstance, line: _Line) -> list[tuple[Fraction, Fraction]]:
    """Affine pieces of ``f_bar`` restricted to ``line``, as ``(a, b)`` with value ``a + b*r``."""
    out = []
    for k0, k1, k2 in f_bar_affine_terms(inst.N, inst.M1, inst.M2):
        out.append((k0 + k1 * line.x0 + k2 * line.y0, k1 * line.x1 + k2 * line.y1))
    return out


def _f_on(inst: ProblemInstance, line: _Line, r: Fraction) -> Fraction:
    return f_bar(inst.N, inst.M1, inst.M2, *line.at(r))


def _phi(inst, line, P, Qc, r) -> Fraction:
    return P * r - Qc * _f_on(inst, line, r)


def _root_candidates(pieces, P, Qc, lo, hi):
    """Roots of ``P*r = Q*(a + b*r)`` for each piece, inside ``[lo, hi]``."""
    out = {lo}
    for a, b in pieces:
        den = P - Qc * b
        if den:
            r = Qc * a / den
            if lo <= r <= hi:
                out.add(r)
    return out


def _smallest_root(inst, line: _Line, P, Qc) -> Fraction | None:
    """Smallest exact root of ``phi`` on ``line`` or ``None`` if not bracketed.

    Bisection on floats narrows the root to width ``2**-48``; the affine
    pieces active there are then solved exactly and checked. If no active
    piece yields a verified root, every piece is tried.
    """
    lo, hi = line.lo, line.hi
    if _phi(inst, line, P, Qc, lo) >= 0:
        return lo
    if _phi(inst, line, P, Qc, hi) < 0:
        return None

    pieces = _pieces(inst, line)
    fp = [(float(a), float(b)) for a, b in pieces]
    Pf, Qf = float(P), float(Qc)

    def phi_f(r: float) -> float:
        return Pf * r - Qf * max(a + b * r for a, b in fp)

    a_, b_ = float(lo), float(hi)
    while b_ - a_ > _BISECT_WIDTH:
        mid = (a_ + b_) / 2
        if phi_f(mid) < 0:
            a_ = mid
        else:
            b_ = mid
    top = max(a + b * b_ for a, b in fp)
    active = [pc for pc, (a, b) in zip(pieces, fp) if top - (a + b * b_) <= _ACTIVE_TOL * (1 + abs(top))]

    for subset in (active, pieces):
        roots = [r for r in _root_candidates(subset, P, Qc, lo, hi) if _phi(inst, line, P, Qc, r) == 0]
        if roots:
            return min(roots)
    return None


# ---------------------------------------------------------------------------
# The four target functions


def g_value(gid: str, inst: ProblemInstance, r) -> Fraction:
    """Evaluate ``g1``..``g4`` at ``r`` for an instance with ``Rp1 > 0``.

    ``g1(r) = r / (f + alpha*r)`` and ``g3(r) = alpha*r / (f + r)`` along the
    ray ``rp2 = alpha*rp1``; ``g2(r) = f(u1, r) / r`` and
    ``g4(r) = f(r, u2) / r`` along the two edges. ``f`` is ``f_bar``.
    """
    r = Q(r)
    line = _segment(gid, inst)
    f = _f_on(inst, line, r)
    alpha = line.y1 if gid in ("g1", "g3") else None
    if gid == "g1":
        return ratio(r, f + alpha * r)
    if gid == "g3":
        return ratio(alpha * r, f + r)
    return ratio(f, r)


def _balance_coefficients(gid: str, inst: ProblemInstance, target) -> tuple[Fraction, Fraction]:
    """``(P, Q)`` such that ``g(r) = target`` iff ``P*r - Q*f = 0``."""
    target = Q(target)
    if gid == "g1":
        return 1 - target * _segment(gid, inst).y1, target
    if gid == "g3":
        return _segment(gid, inst).y1 - target, target
    return target, Fraction(1)


def solve_monotone(gid: str, inst: ProblemInstance, target, lo=None, hi=None) -> Fraction:
    """Exact ``r`` in ``[lo, hi]`` with ``g(r) = target``.

    ``lo``/``hi`` default to the ends of the segment belonging to ``gid``.
    Raises :class:`PlanningError` when no root exists in the interval.
    """
    if inst.Rp1 <= 0:
        raise DomainError("target functions need Rp1 > 0")
    line = _segment(gid, inst)
    if lo is not None or hi is not None:
        line = _Line(line.x0, line.x1, line.y0, line.y1,
                     line.lo if lo is None else Q(lo), line.hi if hi is None else Q(hi))
    P, Qc = _balance_coefficients(gid, inst, target)
    root = _smallest_root(inst, line, P, Qc)
    if root is None:
        raise PlanningError(f"{gid} = {fmt(Q(target))} has no root in [{fmt(line.lo)}, {fmt(line.hi)}]")
    return root


# ---------------------------------------------------------------------------
# Planning


def _select_case(inst: ProblemInstance) -> tuple[str, str]:
    """``(gid, label)`` for an instance with ``Rp1 >= Rp2``, ``Rp1 > 0``."""
    u1, u2 = _residuals(inst)
    Rc, R1, R2 = inst.Rc, inst.Rp1, inst.Rp2
    if R2 * u1 <= u2 * R1:
        # the ray leaves the rectangle through the edge rp1 = u1
        if R1 * u2 <= u1 * (Rc + R2):
            return "g1", "balanced-line-OP"
        return "g2", "edge-QR"
    if R2 * u1 <= u2 * (Rc + R1):
        return "g3", "balanced-line-OP-mirror"
    return "g4", "edge-SR"


def _point(inst: ProblemInstance, rp1, rp2, label) -> Plan:
    rc = f_bar(inst.N, inst.M1, inst.M2, rp1, rp2)
    T = latency(rc, rp1, rp2, inst.Rc, inst.Rp1, inst.Rp2)
    return Plan(rp1, rp2, rc, T, label)


def _plan_ordered(inst: ProblemInstance) -> Plan:
    gid, label = _select_case(inst)
    line = _segment(gid, inst)
    # Multiply the balance equations through by the link rates so that zero
    # capacities need no special casing.
    P, Qc = inst.Rc, (inst.Rp2 if gid == "g2" else inst.Rp1)
    r = _smallest_root(inst, line, P, Qc)
    if r is not None:
        found = _point(inst, *line.at(r), label)
        if found.T == t_star(inst):
            return found
    return _exhaustive(inst, label)


def _exhaustive(inst: ProblemInstance, label: str) -> Plan:
    """Best point among exact branch solutions on all three segments."""
    best = None
    for gid in ("g1", "g2", "g4"):
        line = _segment(gid, inst)
        pieces = _pieces(inst, line)
        candidates = {line.lo, line.hi}
        for P, Qc in ((inst.Rc, inst.Rp1), (inst.Rc, inst.Rp2)):
            candidates |= _root_candidates(pieces, P, Qc, line.lo, line.hi)
        for r in candidates:
            p = _point(inst, *line.at(r), label)
            if best is None or p.T < best.T:
                best = p
    return best


def plan(inst: ProblemInstance) -> Plan:
    """Operating point with latency ``t_star(inst)``.

    Raises :class:`PlanningError` if the chosen point misses ``t_star``,
    which would mean the achievable region and the bound disagree.
    """
    if not isinstance(inst, ProblemInstance):
        raise DomainError("plan expects a ProblemInstance")
    if inst.Rp1 == 0 and inst.Rp2 == 0:
        rc = rc_star(inst.N, inst.M1, inst.M2)
        result = Plan(ZERO, ZERO, rc, latency(rc, 0, 0, inst.Rc, 0, 0), "trivial-reduction")
    elif inst.Rp1 < inst.Rp2:
        p = _plan_ordered(inst.mirrored())
        result = Plan(p.rp2, p.rp1, p.rc, p.T, p.case_label)
    else:
        result = _plan_ordered(inst)
    target = t_star(inst)
    if result.T != target:
        raise PlanningError(f"planned T = {fmt(result.T)} but t_star = {fmt(target)}")
    return result
