"""Closed-form rates, latencies and bounds for the two-user caching problem.

Everything here is exact: inputs are coerced to :class:`fractions.Fraction`
and every expression is evaluated as a maximum over affine candidates,
clipped below at zero. The only floating point output comes from
:func:`distortion_levels`.

Notation follows the usual two-user model: ``N`` files of unit size, cache
sizes ``M1``/``M2`` in files, a shared link of capacity ``Rc`` and private
links of capacities ``Rp1``/``Rp2`` (files per unit time). Delivery rates
``rc``/``rp1``/``rp2`` are in files.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache

from .errors import DomainError
from .rational import INF, Q, ratio

ZERO = Fraction(0)
ONE = Fraction(1)


def _check_n(N, minimum: int = 2) -> int:
    if isinstance(N, bool) or int(N) != N:
        raise DomainError(f"N must be an integer, got {N!r}")
    N = int(N)
    if N < minimum:
        raise DomainError(f"N must be >= {minimum}, got {N}")
    return N


def _check_caches(N: int, *caches) -> list[Fraction]:
    out = []
    for m in caches:
        m = Q(m)
        if m < 0 or m > N:
            raise DomainError(f"cache size {m} outside [0, {N}]")
        out.append(m)
    return out


def _check_rates(*rates) -> list[Fraction]:
    out = []
    for r in rates:
        r = Q(r)
        if r < 0 or r > 1:
            raise DomainError(f"private delivery rate {r} outside [0, 1]")
        out.append(r)
    return out


# ---------------------------------------------------------------------------
# Problem instance and latency


@dataclass(frozen=True)
class ProblemInstance:
    """A problem ``(N, M1, M2, Rc, Rp1, Rp2)`` with unit-size files.

    Build instances with :meth:`create`, which validates and clips. Cache
    sizes above ``N`` are clipped to ``N`` (the excess can never help) and
    ``clipped`` records that this happened.
    """

    N: int
    M1: Fraction
    M2: Fraction
    Rc: Fraction
    Rp1: Fraction
    Rp2: Fraction
    clipped: bool = False

    @classmethod
    def create(cls, N, M1, M2, Rc, Rp1=0, Rp2=0) -> "ProblemInstance":
        N = _check_n(N)
        M1, M2, Rc, Rp1, Rp2 = (Q(v) for v in (M1, M2, Rc, Rp1, Rp2))
        for name, v in (("M1", M1), ("M2", M2), ("Rc", Rc), ("Rp1", Rp1), ("Rp2", Rp2)):
            if v < 0:
                raise DomainError(f"{name} must be >= 0, got {v}")
        clipped = False
        if M1 > N or M2 > N:
            warnings.warn("cache sizes above N are clipped to N", stacklevel=2)
            M1, M2 = min(M1, Fraction(N)), min(M2, Fraction(N))
            clipped = True
        if Rc + Rp1 == 0 and M1 < N:
            raise DomainError("user 1 has no link and an incomplete cache")
        if Rc + Rp2 == 0 and M2 < N:
            raise DomainError("user 2 has no link and an incomplete cache")
        return cls(N, M1, M2, Rc, Rp1, Rp2, clipped)

    def mirrored(self) -> "ProblemInstance":
        """The same instance with the user labels exchanged."""
        return ProblemInstance(self.N, self.M2, self.M1, self.Rc, self.Rp2, self.Rp1, self.clipped)


@dataclass(frozen=True)
class RateTriple:
    rp1: Fraction
    rp2: Fraction
    rc: Fraction


def latency(rc, rp1, rp2, Rc, Rp1, Rp2):
    """Delivery latency ``max{rc/Rc, rp1/Rp1, rp2/Rp2}``.

    ``0/0`` counts as 0 and ``x/0`` as ``inf`` for ``x > 0``.
    """
    return max(ratio(Q(rc), Q(Rc)), ratio(Q(rp1), Q(Rp1)), ratio(Q(rp2), Q(Rp2)), ZERO)


# ---------------------------------------------------------------------------
# Shared-link problem


def rc_star_terms(N, M1, M2) -> list[Fraction]:
    """Candidate expressions whose maximum is the optimal shared-link rate."""
    N = _check_n(N)
    M1, M2 = _check_caches(N, M1, M2)
    if N == 2:
        return [1 - M1 / 2, 1 - M2 / 2, 2 - (M1 + M2), Fraction(3, 2) - (M1 + M2) / 2]
    return [
        1 - M1 / N,
        1 - M2 / N,
        2 - 3 * M1 / N - (M2 - M1) / (N - 1),
        2 - 3 * M2 / N - (M1 - M2) / (N - 1),
    ]


def rc_star(N, M1, M2) -> Fraction:
    """Optimal shared-link delivery rate with no private links."""
    return max(max(rc_star_terms(N, M1, M2)), ZERO)


def lhc_rate(N, M1, M2) -> Fraction:
    """Rate of the layered baseline that memory-shares among five points only.

    The baseline uses no cache, the symmetric split, both-full, and the two
    one-full corners. Its lower envelope is the maximum of the four planes
    through those corner triangles.
    """
    N = _check_n(N, 3)
    M1, M2 = _check_caches(N, M1, M2)
    return max(
        2 - 2 * M2 / N - M1 / N,
        2 - 2 * M1 / N - M2 / N,
        1 - M2 / N,
        1 - M1 / N,
        ZERO,
    )


def yang_bound(N, M1, M2) -> Fraction:
    """Earlier converse for the shared-link problem (five terms)."""
    N = _check_n(N, 3)
    M1, M2 = _check_caches(N, M1, M2)
    half, third = N // 2, N // 3
    s = M1 + M2
    return max(
        1 - M1 / N,
        1 - M2 / N,
        2 - s / half,
        Fraction(3, 2) - s / (2 * half),
        2 - s / (2 * third),
        ZERO,
    )


def chen_bound_holds(N, Mi, Mj, rc) -> bool:
    """Check ``N*Mi + (2N-3)*Mj + N(N-1)*rc >= 2N(N-1)``."""
    N = _check_n(N, 3)
    Mi, Mj, rc = Q(Mi), Q(Mj), Q(rc)
    return N * Mi + (2 * N - 3) * Mj + N * (N - 1) * rc >= 2 * N * (N - 1)


def chen_bound_slack(N, Mi, Mj, rc) -> Fraction:
    """Left side minus right side of :func:`chen_bound_holds`."""
    N = _check_n(N, 3)
    Mi, Mj, rc = Q(Mi), Q(Mj), Q(rc)
    return N * Mi + (2 * N - 3) * Mj + N * (N - 1) * rc - 2 * N * (N - 1)


def cz_bound_holds(N, M1, M2, rc_plus_rp2, rp1) -> bool:
    """Check ``N^2 (rc+rp2) + N(N-1) rp1 >= N(2N-1) - 2(N-1) M1 - N M2``."""
    N = _check_n(N)
    M1, M2, s, rp1 = Q(M1), Q(M2), Q(rc_plus_rp2), Q(rp1)
    return N * N * s + N * (N - 1) * rp1 >= N * (2 * N - 1) - 2 * (N - 1) * M1 - N * M2


def cut_set_slacks(N, M1, M2, rc) -> tuple[Fraction, Fraction]:
    """Slack of the single-user cut-set bounds ``rc >= 1 - Mk/N``."""
    N = _check_n(N)
    M1, M2, rc = Q(M1), Q(M2), Q(rc)
    return rc - (1 - M1 / N), rc - (1 - M2 / N)


# ---------------------------------------------------------------------------
# Shared plus private links


def t_star_terms(inst: ProblemInstance) -> list:
    """The latency lower-bound terms for ``inst`` (before clipping at 0)."""
    N, M1, M2 = inst.N, inst.M1, inst.M2
    Rc, R1, R2 = inst.Rc, inst.Rp1, inst.Rp2
    if N == 2:
        pairs = [
            (1 - M1 / 2, Rc + R1),
            (1 - M2 / 2, Rc + R2),
            (2 - M1 - M2, Rc + R1 + R2),
            (3 - M1 - M2, 2 * (Rc + R2) + R1),
            (3 - M1 - M2, 2 * (Rc + R1) + R2),
        ]
    else:
        pairs = [
            (1 - M1 / N, Rc + R1),
            (1 - M2 / N, Rc + R2),
            (2 - 3 * M2 / N - (M1 - M2) / (N - 1), Rc + R1 + R2),
            (2 - 3 * M1 / N - (M2 - M1) / (N - 1), Rc + R1 + R2),
            (N * (2 * N - 1) - 2 * (N - 1) * M1 - N * M2, N * N * (Rc + R2) + N * (N - 1) * R1),
            (N * (2 * N - 1) - 2 * (N - 1) * M2 - N * M1, N * N * (Rc + R1) + N * (N - 1) * R2),
        ]
    return [ratio(num, den) for num, den in pairs]


def t_star(inst: ProblemInstance):
    """Minimum achievable worst-case delivery latency for ``inst``."""
    if not isinstance(inst, ProblemInstance):
        raise DomainError("t_star expects a ProblemInstance")
    return max(max(t_star_terms(inst)), ZERO)


def f_bar_affine_terms(N, M1, M2, order: str | None = None) -> list[tuple[Fraction, Fraction, Fraction]]:
    """Affine pieces ``(k0, k1, k2)`` of the lower envelope in ``(rp1, rp2)``.

    Each piece is ``k0 + k1*rp1 + k2*rp2`` for fixed caches. ``order``
    selects which of the two mirrored families to return: ``">="`` gives the
    region formulas valid when ``rp1 >= rp2`` (in region order), ``"<="`` the
    mirrored family, and ``None`` the union of both plus the zero piece. The
    maximum over the union equals the envelope everywhere.
    """
    N = _check_n(N)
    M1, M2 = _check_caches(N, M1, M2)
    common, fwd, bwd, tail = _affine_families(N, M1, M2)
    if order == ">=":
        return list(common + fwd + tail)
    if order == "<=":
        return list(common + bwd + tail)
    return list(common + fwd + bwd + tail + ((ZERO, ZERO, ZERO),))


@lru_cache(maxsize=65536)
def _affine_families(N: int, M1: Fraction, M2: Fraction):
    if N == 2:
        common = ((2 - M1 - M2, -ONE, -ONE),)
        fwd = (((3 - M1 - M2) / 2, Fraction(-1, 2), -ONE),)
        bwd = (((3 - M1 - M2) / 2, -ONE, Fraction(-1, 2)),)
        tail = ((1 - M2 / 2, ZERO, -ONE), (1 - M1 / 2, -ONE, ZERO))
    else:
        common = (
            (2 - 3 * M2 / N - (M1 - M2) / (N - 1), -ONE, -ONE),
            (2 - 3 * M1 / N - (M2 - M1) / (N - 1), -ONE, -ONE),
        )
        k0 = Fraction(2 * N - 1, N)
        fwd = ((k0 - 2 * (N - 1) * M1 / N**2 - M2 / N, -Fraction(N - 1, N), -ONE),)
        bwd = ((k0 - 2 * (N - 1) * M2 / N**2 - M1 / N, -ONE, -Fraction(N - 1, N)),)
        tail = ((1 - M2 / N, ZERO, -ONE), (1 - M1 / N, -ONE, ZERO))
    return common, fwd, bwd, tail


def f_bar_terms(N, M1, M2, rp1, rp2) -> list[Fraction]:
    """Region formulas of the envelope at ``(rp1, rp2)``, in region order.

    For ``N >= 3`` these are the five formulas labelled M1..M5; for ``N = 2``
    the four formulas labelled M1..M4.
    """
    N = _check_n(N)
    M1, M2 = _check_caches(N, M1, M2)
    rp1, rp2 = _check_rates(rp1, rp2)
    return list(_region_values(N, M1, M2, rp1, rp2))


@lru_cache(maxsize=65536)
def _region_values(N: int, M1: Fraction, M2: Fraction, rp1: Fraction, rp2: Fraction) -> tuple[Fraction, ...]:
    common, fwd, bwd, tail = _affine_families(N, M1, M2)
    pieces = common + (fwd if rp1 >= rp2 else bwd) + tail
    return tuple(k0 + k1 * rp1 + k2 * rp2 for k0, k1, k2 in pieces)


def f_bar(N, M1, M2, rp1, rp2) -> Fraction:
    """Smallest shared-link rate achievable with private rates ``rp1, rp2``."""
    return max(max(f_bar_terms(N, M1, M2, rp1, rp2)), ZERO)


# ---------------------------------------------------------------------------
# Heterogeneous distortion requirements


def distortion_levels(sigma2, D1, D2, base: float = 2) -> tuple[float, float]:
    """Layer rates ``l_k = 1/2 log(sigma2 / D_k)`` for a Gaussian source.

    ``base`` picks the logarithm (2 for bits, ``math.e`` for nats).
    """
    sigma2, D1, D2 = float(sigma2), float(D1), float(D2)
    if sigma2 <= 0:
        raise DomainError("source variance must be positive")
    for d in (D1, D2):
        if not 0 < d <= sigma2:
            raise DomainError(f"distortion {d} outside (0, {sigma2}]")
    return 0.5 * math.log(sigma2 / D1, base), 0.5 * math.log(sigma2 / D2, base)


def quantize(x: float, denominator: int = 2**20) -> Fraction:
    """Round ``x`` to the nearest multiple of ``1/denominator``."""
    return Fraction(round(x * denominator), denominator)


def distortion_rate(N, M1, M2, l1, l2) -> Fraction:
    """Optimal shared-link rate when users need ``l1 <= l2`` units per file."""
    N = _check_n(N, 3)
    M1, M2 = Q(M1), Q(M2)
    l1, l2 = Q(l1), Q(l2)
    if M1 < 0 or M2 < 0:
        raise DomainError("cache sizes must be nonnegative")
    if l1 < 0 or l2 < 0:
        raise DomainError("layer rates must be nonnegative")
    if l1 > l2:
        raise DomainError("order the users so that l1 <= l2")
    return max(
        l1 + l2 - 3 * M2 / N - (M1 - M2) / (N - 1),
        l1 + l2 - 3 * M1 / N - (M2 - M1) / (N - 1),
        l2 - M2 / N,
        l1 - M1 / N,
        Fraction(N - 1, N) * l1 + l2 - 2 * (N - 1) * M1 / N**2 - M2 / N,
        Fraction(N - 1, N) * l2 + l1 - 2 * (N - 1) * M2 / N**2 - M1 / N,
        ZERO,
    )


__all__ = [
    "INF",
    "ProblemInstance",
    "RateTriple",
    "latency",
    "rc_star",
    "rc_star_terms",
    "lhc_rate",
    "yang_bound",
    "chen_bound_holds",
    "chen_bound_slack",
    "cz_bound_holds",
    "cut_set_slacks",
    "t_star",
    "t_star_terms",
    "f_bar",
    "f_bar_terms",
    "f_bar_affine_terms",
    "distortion_levels",
    "distortion_rate",
    "quantize",
]
