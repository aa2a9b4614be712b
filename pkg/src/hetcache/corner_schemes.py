"""Executable codes for the twelve base corner points ``P_A`` .. ``P_L``.

Each corner point is a placement/delivery/decoding triple operating on a
:class:`Library` of equal-length bit files. Resource signatures are
``(M1, M2, rp1, rp2, rc)`` per unit of file size.

The shared-link points A..G of the no-private-link problem are the first
seven corners (``P_A`` .. ``P_G``) with both private rates at zero.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from functools import lru_cache
from typing import NamedTuple

from .bits import EMPTY, Bits
from .errors import DecodeError, DomainError, SizingError

BASE_IDS = ("P_A", "P_B", "P_C", "P_D", "P_E", "P_F", "P_G", "P_H", "P_I", "P_J", "P_K", "P_L")

# Relabelling of corner points under exchange of the two users.
MIRROR = {
    "P_A": "P_A", "P_B": "P_B", "P_C": "P_C", "P_D": "P_E", "P_E": "P_D",
    "P_F": "P_G", "P_G": "P_F", "P_H": "P_H", "P_I": "P_J", "P_J": "P_I",
    "P_K": "P_L", "P_L": "P_K",
}


@lru_cache(maxsize=1024)
def signature(scheme_id: str, N: int) -> tuple[Fraction, Fraction, Fraction, Fraction, Fraction]:
    """Published ``(M1, M2, rp1, rp2, rc)`` of a corner point for ``N`` files."""
    F = Fraction
    table = {
        "P_A": (0, 0, 0, 0, 2),
        "P_B": (F(N, 2), F(N, 2), 0, 0, F(1, 2)),
        "P_C": (N, N, 0, 0, 0),
        "P_D": (N, 0, 0, 0, 1),
        "P_E": (0, N, 0, 0, 1),
        "P_F": (N - 1, 0, 0, 0, 1),
        "P_G": (0, N - 1, 0, 0, 1),
        "P_H": (0, 0, 1, 1, 0),
        "P_I": (0, 0, 1, 0, 1),
        "P_J": (0, 0, 0, 1, 1),
        "P_K": (0, N, 1, 0, 0),
        "P_L": (N, 0, 0, 1, 0),
    }
    try:
        row = table[scheme_id]
    except KeyError:
        raise DomainError(f"unknown corner point {scheme_id!r}") from None
    return tuple(F(v) for v in row)


@lru_cache(maxsize=4096)
def _expected_lengths(scheme_id: str, N: int, F: int) -> tuple[int, int, int, int, int]:
    out = []
    for v in signature(scheme_id, N):
        bits = v * F
        if bits.denominator != 1:
            raise SizingError(f"{scheme_id}: {v} * {F} is not an integer bit count")
        out.append(int(bits))
    return tuple(out)


# ---------------------------------------------------------------------------
# Data carried through a code


@dataclass(frozen=True)
class Library:
    """``N`` files of ``F`` bits each; ``files[i-1]`` is file ``W_i``."""

    files: tuple[Bits, ...]

    def __post_init__(self):
        if not self.files:
            raise ValueError("empty library")
        n = self.files[0].n
        if any(f.n != n for f in self.files):
            raise ValueError("files must all have the same length")

    @property
    def N(self) -> int:
        return len(self.files)

    @property
    def F(self) -> int:
        return self.files[0].n

    def file(self, i: int) -> Bits:
        return self.files[i - 1]

    def segment(self, start: int, stop: int) -> "Library":
        """The sub-library made of bits ``[start, stop)`` of every file."""
        return Library(tuple(f[start:stop] for f in self.files))


class DemandPair(NamedTuple):
    d1: int
    d2: int


@dataclass(frozen=True)
class CacheContents:
    user: int
    payload: Bits

    def __len__(self) -> int:
        return self.payload.n


@dataclass(frozen=True)
class Transcript:
    xc: Bits
    xp1: Bits
    xp2: Bits

    def private(self, user: int) -> Bits:
        return self.xp1 if user == 1 else self.xp2

    def lengths(self) -> tuple[int, int, int]:
        """Bit counts ``(rc_bits, rp1_bits, rp2_bits)``."""
        return self.xc.n, self.xp1.n, self.xp2.n


def check_demand(demand, N: int) -> DemandPair:
    d1, d2 = demand
    if not (1 <= d1 <= N and 1 <= d2 <= N):
        raise DomainError(f"demand {tuple(demand)} outside [1, {N}]^2")
    return DemandPair(int(d1), int(d2))


# ---------------------------------------------------------------------------
# Scheme families


class CornerScheme:
    """Placement, delivery and decoding for one corner point."""

    divisibility = 1

    def __init__(self, scheme_id: str):
        self.id = scheme_id

    def signature(self, N: int):
        return signature(self.id, N)

    def check_size(self, F: int) -> None:
        if F < 0 or F % self.divisibility:
            raise SizingError(f"{self.id} needs F divisible by {self.divisibility}, got {F}")

    def expected_lengths(self, N: int, F: int) -> tuple[int, int, int, int, int]:
        """Exact bit counts ``(|Z1|, |Z2|, |xp1|, |xp2|, |xc|)`` at size ``F``."""
        return _expected_lengths(self.id, N, F)

    def place(self, library: Library) -> tuple[CacheContents, CacheContents]:
        self.check_size(library.F)
        z1, z2 = self._place(library)
        return CacheContents(1, z1), CacheContents(2, z2)

    def deliver(self, library: Library, demand) -> Transcript:
        self.check_size(library.F)
        return Transcript(*self._deliver(library, check_demand(demand, library.N)))

    def decode(self, user: int, cache: CacheContents, transcript: Transcript, demand, N: int, F: int) -> Bits:
        """Recover ``W_{d_user}``; raises :class:`DecodeError` on malformed input."""
        if user not in (1, 2) or cache.user != user:
            raise DecodeError(f"cache of user {cache.user} handed to user {user}")
        demand = check_demand(demand, N)
        z1, z2, p1, p2, c = self.expected_lengths(N, F)
        want_z = z1 if user == 1 else z2
        want_p = p1 if user == 1 else p2
        if cache.payload.n != want_z or transcript.xc.n != c or transcript.private(user).n != want_p:
            raise DecodeError(f"{self.id}: input lengths do not match the scheme at N={N}, F={F}")
        out = self._decode(user, cache.payload, transcript.xc, transcript.private(user), demand, N, F)
        if out.n != F:
            raise DecodeError(f"{self.id}: decoded {out.n} bits, expected {F}")
        return out

    # Subclass hooks. They skip validation and exchange raw Bits: _place
    # returns (Z1, Z2), _deliver returns (xc, xp1, xp2) and _decode gets the
    # user's own private message as xp.

    def _place(self, library):
        raise NotImplementedError

    def _deliver(self, library, demand):
        raise NotImplementedError

    def _decode(self, user, payload, xc, xp, demand, N, F):
        raise NotImplementedError


class DirectScheme(CornerScheme):
    """Each user is served uncoded: from a full cache, the shared link, or its private link."""

    def __init__(self, scheme_id: str, route1: str, route2: str):
        super().__init__(scheme_id)
        self.routes = (route1, route2)
        self._common = tuple(k for k, r in enumerate(self.routes) if r == "common")
        self._private = tuple(r == "private" for r in self.routes)

    def _place(self, library):
        full = Bits.join(library.files)
        return tuple(full if r == "cache" else EMPTY for r in self.routes)

    def _deliver(self, library, demand):
        files = library.files
        wanted = (files[demand[0] - 1], files[demand[1] - 1])
        common = self._common
        if not common:
            xc = EMPTY
        elif len(common) == 1:
            xc = wanted[common[0]]
        else:
            xc = wanted[0] + wanted[1]
        p1, p2 = self._private
        return xc, wanted[0] if p1 else EMPTY, wanted[1] if p2 else EMPTY

    def _decode(self, user, payload, xc, xp, demand, N, F):
        route = self.routes[user - 1]
        if route == "cache":
            return payload.take((demand[user - 1] - 1) * F, F)
        if route == "private":
            return xp
        slot = self.routes[:user - 1].count("common")
        return xc.take(slot * F, F)


class SplitScheme(CornerScheme):
    """Symmetric split: user k caches half k of every file; one XOR is sent."""

    divisibility = 2

    def _place(self, library):
        h = library.F // 2
        z1 = Bits.join(f[:h] for f in library.files)
        z2 = Bits.join(f[h:] for f in library.files)
        return z1, z2

    def _deliver(self, library, demand):
        h = library.F // 2
        xc = library.file(demand.d1)[h:] ^ library.file(demand.d2)[:h]
        return xc, EMPTY, EMPTY

    def _decode(self, user, payload, xc, xp, demand, N, F):
        h = F // 2
        d1, d2 = demand
        if user == 1:
            first = payload.take((d1 - 1) * h, h)
            second = xc ^ payload.take((d2 - 1) * h, h)
        else:
            first = xc ^ payload.take((d1 - 1) * h, h)
            second = payload.take((d2 - 1) * h, h)
        return first + second


def chain_path(start: int, target: int) -> list[tuple[int, int]]:
    """Successive-cancellation steps from ``W_start`` to ``W_target``.

    Each step is ``(link, next_index)``: XOR with the cached sum
    ``W_link + W_{link+1}`` to move to ``W_next_index``.
    """
    steps = []
    i = start
    while i > target:
        steps.append((i - 1, i - 1))
        i -= 1
    while i < target:
        steps.append((i, i + 1))
        i += 1
    return steps


class ChainScheme(CornerScheme):
    """One user caches the XOR of every two label-adjacent files.

    The other user's file goes out uncoded on the shared link, and the coded
    user walks the XOR chain from that file to its own.
    """

    def __init__(self, scheme_id: str, coded_user: int):
        super().__init__(scheme_id)
        self.coded = coded_user

    def _place(self, library):
        files = library.files
        chain = Bits.join(files[i] ^ files[i + 1] for i in range(len(files) - 1))
        return (chain, EMPTY) if self.coded == 1 else (EMPTY, chain)

    def _deliver(self, library, demand):
        other = demand.d2 if self.coded == 1 else demand.d1
        return library.file(other), EMPTY, EMPTY

    def _decode(self, user, payload, xc, xp, demand, N, F):
        if user != self.coded:
            return xc
        current = xc
        for link, _ in chain_path(demand[2 - user], demand[user - 1]):
            current = payload.take((link - 1) * F, F) ^ current
        return current


SCHEMES: dict[str, CornerScheme] = {
    "P_A": DirectScheme("P_A", "common", "common"),
    "P_B": SplitScheme("P_B"),
    "P_C": DirectScheme("P_C", "cache", "cache"),
    "P_D": DirectScheme("P_D", "cache", "common"),
    "P_E": DirectScheme("P_E", "common", "cache"),
    "P_F": ChainScheme("P_F", 1),
    "P_G": ChainScheme("P_G", 2),
    "P_H": DirectScheme("P_H", "private", "private"),
    "P_I": DirectScheme("P_I", "private", "common"),
    "P_J": DirectScheme("P_J", "common", "private"),
    "P_K": DirectScheme("P_K", "private", "cache"),
    "P_L": DirectScheme("P_L", "cache", "private"),
}


def get_scheme(scheme_id: str) -> CornerScheme:
    try:
        return SCHEMES[scheme_id]
    except KeyError:
        raise DomainError(f"unknown corner point {scheme_id!r}") from None


def place(scheme_id: str, library: Library) -> tuple[CacheContents, CacheContents]:
    return get_scheme(scheme_id).place(library)


def deliver(scheme_id: str, library: Library, demand) -> Transcript:
    return get_scheme(scheme_id).deliver(library, demand)


def decode(scheme_id: str, user: int, cache: CacheContents, transcript: Transcript, demand, N: int, F: int) -> Bits:
    return get_scheme(scheme_id).decode(user, cache, transcript, demand, N, F)
