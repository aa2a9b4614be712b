"""Memory sharing and time sharing among corner points.

For private rates ``rp1 >= rp2`` every file is viewed as three pieces of
sizes ``l1 = 1 - rp1``, ``l2 - l1`` and ``1 - l2`` (``l2 = 1 - rp2``). Nine
derived points combine a shared-link corner on the first piece with uncoded
private delivery of the rest; all nine sit at exactly ``(rp1, rp2)``, so the
lower envelope ``f_bar`` over ``(M1, M2)`` is obtained by memory sharing
among them. The case ``rp1 < rp2`` is handled by exchanging the users.

A :class:`SharePlan` records the resulting convex weights over base corner
schemes; :func:`compose` turns it into a :class:`ComposedCode` over files of
``F`` bits by giving each scheme a contiguous bit range of every file.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from itertools import combinations

from .bits import EMPTY, Bits
from .corner_schemes import (
    BASE_IDS,
    MIRROR,
    CacheContents,
    Library,
    Transcript,
    check_demand,
    get_scheme,
    signature,
)
from .errors import DecodeError, DomainError, SizingError
from .rate_laws import _check_caches, _check_n, _check_rates, f_bar, f_bar_terms
from .rational import Q, fmt, lcm, parse

SCHEMA = "hetcache.composed_code/1"

DERIVED_NAMES = ("A", "B", "B'", "C'", "D", "E'", "F", "G", "G'")

# Shared-link corner used on the l1 piece, and how the l2 - l1 piece is served:
# P_I sends it uncoded on the shared link, P_K caches it at user 2.
_RECIPES = {
    "A": ("P_A", "P_I"),
    "B": ("P_B", "P_I"),
    "B'": ("P_B", "P_K"),
    "C'": ("P_C", "P_K"),
    "D": ("P_D", "P_I"),
    "E'": ("P_E", "P_K"),
    "F": ("P_F", "P_I"),
    "G": ("P_G", "P_I"),
    "G'": ("P_G", "P_K"),
}

# Derived points spanning each region, in the rp1 >= rp2 frame.
REGION_VERTICES = {
    3: {
        "M1": ("A", "B", "F"),
        "M2": ("A", "B", "G"),
        "M3": ("B", "B'", "G", "G'"),
        "M4": ("B", "B'", "F", "D", "C'"),
        "M5": ("C'", "B'", "G'", "E'"),
        "M6": ("C'",),
    },
    # Labels for two files follow the order of the four-branch formula.
    2: {
        "M1": ("A", "F", "G"),
        "M2": ("F", "G", "B", "B'", "G'"),
        "M3": ("F", "B", "B'", "D", "C'"),
        "M4": ("B'", "G'", "E'", "C'"),
        "M6": ("C'",),
    },
}


@dataclass(frozen=True)
class DerivedPoint:
    name: str
    constituents: tuple[tuple[str, Fraction], ...]
    signature: tuple[Fraction, Fraction, Fraction, Fraction, Fraction]


@lru_cache(maxsize=4096)
def _nine_points(N: int, rp1: Fraction, rp2: Fraction) -> tuple[DerivedPoint, ...]:
    l1, l2 = 1 - rp1, 1 - rp2
    fractions = (l1, 1 - l2, l2 - l1)
    out = []
    for name in DERIVED_NAMES:
        base, third = _RECIPES[name]
        parts = tuple(zip((base, "P_H", third), fractions))
        sig = [Fraction(0)] * 5
        for scheme_id, frac in parts:
            for i, v in enumerate(signature(scheme_id, N)):
                sig[i] += frac * v
        out.append(DerivedPoint(name, parts, tuple(sig)))
    return tuple(out)


def nine_points(N, rp1, rp2) -> list[DerivedPoint]:
    """The nine derived points for private rates ``rp1 >= rp2``."""
    N = _check_n(N)
    rp1, rp2 = _check_rates(rp1, rp2)
    if rp1 < rp2:
        raise DomainError("nine_points expects rp1 >= rp2; exchange the users first")
    return list(_nine_points(N, rp1, rp2))


def region_of(N, M1, M2, rp1, rp2) -> str:
    """Label of the envelope region containing ``(M1, M2)`` at ``(rp1, rp2)``.

    ``M7``/``M8`` mean user 1/user 2 holds more cache than it can use,
    ``M6`` that both do. Otherwise the label is the lowest-index region
    formula that attains ``f_bar``.
    """
    N = _check_n(N)
    M1, M2 = _check_caches(N, M1, M2)
    rp1, rp2 = _check_rates(rp1, rp2)
    over1 = M1 > N * (1 - rp1)
    over2 = M2 > N * (1 - rp2)
    if over1 and over2:
        return "M6"
    if over1:
        return "M7"
    if over2:
        return "M8"
    values = f_bar_terms(N, M1, M2, rp1, rp2)
    best = max(max(values), Fraction(0))
    return f"M{values.index(best) + 1}"


# ---------------------------------------------------------------------------
# Plans


@dataclass(frozen=True)
class SharePlan:
    """Convex weights over base corner schemes realising one target.

    ``target`` is ``(N, M1, M2, rp1, rp2)``. ``derived`` lists the weights of
    the derived points used, named in the ``rp1 >= rp2`` frame (after the
    user exchange when ``mirrored`` is set).
    """

    entries: tuple[tuple[str, Fraction], ...]
    target: tuple
    predicted_rc: Fraction
    region: str
    derived: tuple[tuple[str, Fraction], ...] = ()
    mirrored: bool = False

    @property
    def N(self) -> int:
        return self.target[0]

    def achieved(self) -> tuple[Fraction, Fraction, Fraction, Fraction, Fraction]:
        """Weighted signature sum ``(M1, M2, rp1, rp2, rc)``."""
        out = [Fraction(0)] * 5
        for scheme_id, w in self.entries:
            for i, v in enumerate(signature(scheme_id, self.N)):
                out[i] += w * v
        return tuple(out)

    def mirror(self) -> "SharePlan":
        N, M1, M2, rp1, rp2 = self.target
        entries = sorted(((MIRROR[s], w) for s, w in self.entries), key=lambda e: BASE_IDS.index(e[0]))
        return SharePlan(
            tuple(entries),
            (N, M2, M1, rp2, rp1),
            self.predicted_rc,
            region_of(N, M2, M1, rp2, rp1),
            self.derived,
            not self.mirrored,
        )


def _barycentric(points, target):
    """Exact convex weights of ``target`` w.r.t. 1, 2 or 3 planar points."""
    tx, ty = target
    if len(points) == 1:
        return [Fraction(1)] if points[0] == target else None
    if len(points) == 2:
        (x0, y0), (x1, y1) = points
        dx, dy = x1 - x0, y1 - y0
        if dx == 0 and dy == 0:
            return None
        if dx * (ty - y0) != dy * (tx - x0):
            return None
        s = ((tx - x0) * dx + (ty - y0) * dy) / (dx * dx + dy * dy)
        return [1 - s, s] if 0 <= s <= 1 else None
    (x0, y0), (x1, y1), (x2, y2) = points
    det = (x1 - x0) * (y2 - y0) - (x2 - x0) * (y1 - y0)
    if det == 0:
        return None
    w1 = ((tx - x0) * (y2 - y0) - (x2 - x0) * (ty - y0)) / det
    w2 = ((x1 - x0) * (ty - y0) - (tx - x0) * (y1 - y0)) / det
    w = [1 - w1 - w2, w1, w2]
    return w if min(w) >= 0 else None


def _convex_combination(points: list[DerivedPoint], target, want_rc):
    """Weights over ``points`` hitting ``target`` caches with rate ``want_rc``."""
    unique, seen = [], set()
    for p in points:
        key = (p.signature[0], p.signature[1], p.signature[4])
        if key not in seen:
            seen.add(key)
            unique.append(p)
    for k in (3, 2, 1):
        for combo in combinations(unique, k):
            w = _barycentric([(p.signature[0], p.signature[1]) for p in combo], target)
            if w is None:
                continue
            if sum(wi * p.signature[4] for wi, p in zip(w, combo)) == want_rc:
                return [(p.name, wi) for p, wi in zip(combo, w) if wi]
    return None


def share_plan(N, M1, M2, rp1, rp2) -> SharePlan:
    """Plan achieving ``f_bar(N, M1, M2, rp1, rp2)`` on the shared link."""
    N = _check_n(N)
    M1, M2 = _check_caches(N, M1, M2)
    rp1, rp2 = _check_rates(rp1, rp2)
    if rp1 < rp2:
        return share_plan(N, M2, M1, rp2, rp1).mirror()

    l1, l2 = 1 - rp1, 1 - rp2
    # Cache beyond N*l_k cannot be used; the envelope is flat there.
    m1, m2 = min(M1, N * l1), min(M2, N * l2)
    want = f_bar(N, M1, M2, rp1, rp2)
    points = {p.name: p for p in _nine_points(N, rp1, rp2)}
    region = region_of(N, m1, m2, rp1, rp2)
    table = REGION_VERTICES[3 if N >= 3 else 2]
    vertex_names = table["M6"] if region == "M6" else table[region]
    weights = _convex_combination([points[n] for n in vertex_names], (m1, m2), want)
    if weights is None:
        # Degenerate rates collapse some vertices; widen to all nine points.
        weights = _convex_combination(list(points.values()), (m1, m2), want)
    if weights is None:
        raise DomainError(f"no convex combination reaches f_bar at {(N, M1, M2, rp1, rp2)}")

    totals: dict[str, Fraction] = {}
    for name, w in weights:
        for scheme_id, frac in points[name].constituents:
            if frac:
                totals[scheme_id] = totals.get(scheme_id, Fraction(0)) + w * frac
    entries = tuple((s, totals[s]) for s in BASE_IDS if totals.get(s))
    return SharePlan(
        entries,
        (N, M1, M2, rp1, rp2),
        want,
        region_of(N, M1, M2, rp1, rp2),
        tuple(weights),
    )


def min_file_size(plan: SharePlan) -> int:
    """Least ``F`` giving every scheme an integral, divisible segment."""
    need = []
    for scheme_id, w in plan.entries:
        d = get_scheme(scheme_id).divisibility
        # w*F must be an integer multiple of d.
        need.append(w.denominator * d // math.gcd(w.numerator, d))
    return lcm(*need)


# ---------------------------------------------------------------------------
# Composed codes


@dataclass(frozen=True)
class Segment:
    scheme: str
    start: int
    stop: int

    @property
    def length(self) -> int:
        return self.stop - self.start


class ComposedCode:
    """A concrete code on ``F``-bit files built from a :class:`SharePlan`.

    Caches and transcripts are concatenations of the per-segment ones, in
    segment order.
    """

    def __init__(self, plan: SharePlan, F: int, segments: tuple[Segment, ...]):
        self.plan = plan
        self.F = F
        self.segments = segments
        self._lengths = [get_scheme(s.scheme).expected_lengths(plan.N, s.length) for s in segments]
        self._totals = tuple(sum(col) for col in zip(*self._lengths)) if self._lengths else (0,) * 5
        # Per segment: scheme, length, and (offset, width) of its slice of
        # Z1, Z2, xp1, xp2 and xc.
        self._layout = []
        offsets = [0] * 5
        for seg, lens in zip(segments, self._lengths):
            spans = tuple((o, w) for o, w in zip(offsets, lens))
            self._layout.append((get_scheme(seg.scheme), seg.length, spans))
            offsets = [o + w for o, w in zip(offsets, lens)]

    @property
    def N(self) -> int:
        return self.plan.N

    def bit_counts(self) -> tuple[int, int, int, int, int]:
        """Total ``(|Z1|, |Z2|, |xp1|, |xp2|, |xc|)`` in bits."""
        return self._totals

    def achieved(self) -> tuple[Fraction, ...]:
        """Per-unit-file ``(M1, M2, rp1, rp2, rc)`` realised by the bit counts."""
        return tuple(Fraction(b, self.F) for b in self.bit_counts())

    def _check_library(self, library: Library) -> None:
        if library.N != self.N or library.F != self.F:
            raise SizingError(f"library is {library.N}x{library.F}, code needs {self.N}x{self.F}")

    def segment_libraries(self, library: Library) -> list[Library]:
        self._check_library(library)
        return [library.segment(s.start, s.stop) for s in self.segments]

    def place(self, library: Library, parts: list[Library] | None = None) -> tuple[CacheContents, CacheContents]:
        parts = parts or self.segment_libraries(library)
        z1, z2 = [], []
        for seg, sub in zip(self.segments, parts):
            c1, c2 = get_scheme(seg.scheme).place(sub)
            z1.append(c1.payload)
            z2.append(c2.payload)
        return CacheContents(1, Bits.join(z1)), CacheContents(2, Bits.join(z2))

    def deliver(self, library: Library, demand, parts: list[Library] | None = None) -> Transcript:
        parts = parts or self.segment_libraries(library)
        demand = check_demand(demand, self.N)
        xc, xp1, xp2 = [], [], []
        # Segment sizes were validated when the code was built.
        for seg, sub in zip(self.segments, parts):
            c, p1, p2 = get_scheme(seg.scheme)._deliver(sub, demand)
            xc.append(c)
            xp1.append(p1)
            xp2.append(p2)
        return Transcript(Bits.join(xc), Bits.join(xp1), Bits.join(xp2))

    def decode(self, user: int, cache: CacheContents, transcript: Transcript, demand) -> Bits:
        """Recover ``W_{d_user}`` from this user's cache and received messages."""
        return self.decoder(user, cache)(transcript, demand)

    def decoder(self, user: int, cache: CacheContents):
        """Decoding function for one user with a fixed cache.

        The cache is checked and split per segment once, which matters when
        the same cache is decoded against every demand.
        """
        if user not in (1, 2) or cache.user != user:
            raise DecodeError(f"cache of user {cache.user} handed to user {user}")
        totals = self.bit_counts()
        if cache.payload.n != totals[user - 1]:
            raise DecodeError("cache length does not match the composed code")
        N = self.N
        zi, pi = user - 1, user + 1
        plan = [
            (scheme, length, _take(cache.payload, spans[zi]), spans[4], spans[pi])
            for scheme, length, spans in self._layout
        ]

        def decode(transcript: Transcript, demand) -> Bits:
            demand = check_demand(demand, N)
            xc, private = transcript.xc, transcript.private(user)
            if xc.n != totals[4] or private.n != totals[pi]:
                raise DecodeError("transcript length does not match the composed code")
            # Totals match, so every per-segment slice has the length its
            # scheme expects and the unchecked decoders can be used directly.
            return Bits.join([
                scheme._decode(user, z, _take(xc, c_span), _take(private, p_span), demand, N, length)
                for scheme, length, z, c_span, p_span in plan
            ])

        return decode

    # -- serialisation -----------------------------------------------------

    def to_dict(self) -> dict:
        N, M1, M2, rp1, rp2 = self.plan.target
        return {
            "schema": SCHEMA,
            "N": N,
            "F": self.F,
            "target": {"M1": fmt(M1), "M2": fmt(M2), "rp1": fmt(rp1), "rp2": fmt(rp2)},
            "predicted_rc": fmt(self.plan.predicted_rc),
            "region": self.plan.region,
            "mirrored": self.plan.mirrored,
            "derived": [{"point": n, "weight": fmt(w)} for n, w in self.plan.derived],
            "entries": [
                {"scheme": s, "weight": fmt(w), "signature": [fmt(v) for v in signature(s, N)]}
                for s, w in self.plan.entries
            ],
            "segments": [{"scheme": s.scheme, "start": s.start, "stop": s.stop} for s in self.segments],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"

    @classmethod
    def from_json(cls, text: str) -> "ComposedCode":
        d = json.loads(text)
        if d.get("schema") != SCHEMA:
            raise ValueError(f"unsupported schema {d.get('schema')!r}")
        N = int(d["N"])
        t = d["target"]
        plan = SharePlan(
            tuple((e["scheme"], parse(e["weight"])) for e in d["entries"]),
            (N, parse(t["M1"]), parse(t["M2"]), parse(t["rp1"]), parse(t["rp2"])),
            parse(d["predicted_rc"]),
            d["region"],
            tuple((e["point"], parse(e["weight"])) for e in d["derived"]),
            bool(d["mirrored"]),
        )
        for e in d["entries"]:
            if [parse(v) for v in e["signature"]] != list(signature(e["scheme"], N)):
                raise ValueError(f"signature of {e['scheme']} does not match N={N}")
        segments = tuple(Segment(s["scheme"], int(s["start"]), int(s["stop"])) for s in d["segments"])
        code = cls(plan, int(d["F"]), segments)
        _check_segments(code)
        return code

    def __repr__(self) -> str:
        parts = ", ".join(f"{s}:{fmt(w)}" for s, w in self.plan.entries)
        return f"ComposedCode(N={self.N}, F={self.F}, [{parts}])"


def _take(bits: Bits, span: tuple[int, int]) -> Bits:
    return bits.take(*span) if span[1] else EMPTY


def _check_segments(code: ComposedCode) -> None:
    pos = 0
    weights = dict(code.plan.entries)
    for seg in code.segments:
        if seg.start != pos or seg.stop < seg.start:
            raise ValueError("segments must partition [0, F) in order")
        if Fraction(seg.length, code.F) != weights.get(seg.scheme):
            raise ValueError(f"segment for {seg.scheme} does not match its weight")
        get_scheme(seg.scheme).check_size(seg.length)
        pos = seg.stop
    if pos != code.F:
        raise ValueError("segments must cover [0, F)")


def compose(plan: SharePlan, F: int | None = None) -> ComposedCode:
    """Instantiate ``plan`` on ``F``-bit files (default: the smallest valid F)."""
    base = min_file_size(plan)
    if F is None:
        F = base
    if F <= 0 or F % base:
        raise SizingError(f"F={F} is not a multiple of the minimum file size {base}")
    segments, pos = [], 0
    for scheme_id, w in plan.entries:
        length = w * F
        segments.append(Segment(scheme_id, pos, pos + int(length)))
        pos += int(length)
    code = ComposedCode(plan, F, tuple(segments))
    _check_segments(code)
    return code
