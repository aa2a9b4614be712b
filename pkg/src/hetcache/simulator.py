"""End-to-end execution of composed codes on pseudo-random libraries.

Libraries come from a 64-bit linear congruential generator
``s <- (6364136223846793005 * s + 1442695040888963407) mod 2**64`` seeded
with ``seed mod 2**64``. Each step contributes the top 32 bits of the new
state, most significant bit first; file ``W_i`` is bits ``[(i-1)F, iF)`` of
that stream. The constants are Knuth's MMIX ones, so any implementation can
regenerate the same library.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .bits import Bits
from .composer import ComposedCode
from .corner_schemes import Library, Transcript, check_demand
from .errors import DecodeError
from .rate_laws import ProblemInstance, latency, t_star
from .rational import Q, dec, fmt

LCG_MULTIPLIER = 6364136223846793005
LCG_INCREMENT = 1442695040888963407
_MASK64 = (1 << 64) - 1

REPORT_SCHEMA = "hetcache.simulation_report/1"
CSV_COLUMNS = (
    "d1", "d2", "distinct", "rc_bits", "rp1_bits", "rp2_bits",
    "decode_ok_1", "decode_ok_2", "T", "T_decimal",
)


def lcg_words(seed: int, count: int) -> list[int]:
    """``count`` successive 32-bit outputs of the generator."""
    s = seed & _MASK64
    out = []
    for _ in range(count):
        s = (LCG_MULTIPLIER * s + LCG_INCREMENT) & _MASK64
        out.append(s >> 32)
    return out


@lru_cache(maxsize=64)
def make_library(N: int, F: int, seed: int = 0) -> Library:
    """Deterministic ``N x F`` bit library derived from ``seed``."""
    if F < 1 or N < 1:
        raise ValueError("need N >= 1 files of F >= 1 bits")
    total = N * F
    words = lcg_words(seed, (total + 31) // 32)
    stream = int.from_bytes(b"".join(w.to_bytes(4, "big") for w in words), "big")
    stream >>= 32 * len(words) - total
    mask = (1 << F) - 1
    files = tuple(Bits((stream >> ((N - 1 - i) * F)) & mask, F) for i in range(N))
    return Library(files)


@dataclass(frozen=True)
class DemandRow:
    demand: tuple[int, int]
    rc_bits: int
    rp1_bits: int
    rp2_bits: int
    decode_ok: tuple[bool, bool]
    error: str = ""

    @property
    def distinct(self) -> bool:
        return self.demand[0] != self.demand[1]


@dataclass(frozen=True)
class DemandResult:
    transcript: Transcript
    decoded: tuple
    row: DemandRow


def run_demand(code: ComposedCode, library: Library, demand, caches=None, parts=None) -> DemandResult:
    """Deliver one demand pair and decode it at both users.

    Decoding failures show up as ``decode_ok`` flags (with the message in
    ``row.error``), never as exceptions.
    """
    demand = check_demand(demand, code.N)
    parts = parts or code.segment_libraries(library)
    caches = caches or code.place(library, parts)
    transcript = code.deliver(library, demand, parts)
    return _decode_both(code, library, demand, caches, transcript)


def _decode_both(code, library, demand, caches, transcript, decoders=None) -> DemandResult:
    decoded, ok, errors = [], [], []
    for user in (1, 2):
        try:
            decode = decoders[user - 1] if decoders else code.decoder(user, caches[user - 1])
            w = decode(transcript, demand)
        except DecodeError as exc:
            w = None
            errors.append(f"user {user}: {exc}")
        decoded.append(w)
        ok.append(w is not None and w == library.file(demand[user - 1]))
    row = DemandRow(tuple(demand), *transcript.lengths(), tuple(ok), "; ".join(errors))
    return DemandResult(transcript, tuple(decoded), row)


@dataclass
class SimulationReport:
    """Per-demand accounting for one composed code.

    ``worst_case_T`` is taken over distinct demands only; equal-demand rows
    are kept in ``rows`` and summarised by ``equal_demand_T``.
    """

    N: int
    F: int
    Rc: Fraction
    Rp1: Fraction
    Rp2: Fraction
    predicted: tuple[Fraction, Fraction, Fraction]  # (rc, rp1, rp2) per unit file
    rows: list[DemandRow] = field(default_factory=list)

    def row_latency(self, row: DemandRow, Rc=None, Rp1=None, Rp2=None):
        Rc = self.Rc if Rc is None else Rc
        Rp1 = self.Rp1 if Rp1 is None else Rp1
        Rp2 = self.Rp2 if Rp2 is None else Rp2
        F = self.F
        return latency(Fraction(row.rc_bits, F), Fraction(row.rp1_bits, F), Fraction(row.rp2_bits, F), Rc, Rp1, Rp2)

    @property
    def worst_case_T(self):
        return max((self.row_latency(r) for r in self.rows if r.distinct), default=Fraction(0))

    @property
    def equal_demand_T(self):
        return max((self.row_latency(r) for r in self.rows if not r.distinct), default=Fraction(0))

    @property
    def all_decoded(self) -> bool:
        return all(all(r.decode_ok) for r in self.rows)

    def rates_match(self) -> bool:
        """Distinct-demand bit counts equal the predicted rates times ``F``."""
        rc, rp1, rp2 = (v * self.F for v in self.predicted)
        return all(
            (r.rc_bits, r.rp1_bits, r.rp2_bits) == (rc, rp1, rp2) for r in self.rows if r.distinct
        )

    @property
    def formula_match(self) -> bool:
        return self.all_decoded and self.rates_match()

    def to_csv(self) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(CSV_COLUMNS)
        for r in self.rows:
            T = self.row_latency(r)
            w.writerow([
                r.demand[0], r.demand[1], int(r.distinct), r.rc_bits, r.rp1_bits, r.rp2_bits,
                int(r.decode_ok[0]), int(r.decode_ok[1]), fmt(T), dec(T),
            ])
        return buf.getvalue()

    def to_dict(self) -> dict:
        rc, rp1, rp2 = self.predicted
        return {
            "schema": REPORT_SCHEMA,
            "N": self.N,
            "F": self.F,
            "links": {"Rc": fmt(self.Rc), "Rp1": fmt(self.Rp1), "Rp2": fmt(self.Rp2)},
            "predicted": {"rc": fmt(rc), "rp1": fmt(rp1), "rp2": fmt(rp2)},
            "worst_case_T": fmt(self.worst_case_T),
            "equal_demand_T": fmt(self.equal_demand_T),
            "all_decoded": self.all_decoded,
            "formula_match": self.formula_match,
            "rows": [
                {
                    "d1": r.demand[0], "d2": r.demand[1], "rc_bits": r.rc_bits,
                    "rp1_bits": r.rp1_bits, "rp2_bits": r.rp2_bits,
                    "decode_ok": list(r.decode_ok),
                }
                for r in self.rows
            ],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=2) + "\n"


def run_all(code: ComposedCode, library: Library, Rc=1, Rp1=0, Rp2=0) -> SimulationReport:
    """Run every one of the ``N^2`` demand pairs, sorted by demand."""
    parts = code.segment_libraries(library)
    caches = code.place(library, parts)
    _, _, rp1, rp2, _ = code.plan.achieved()
    predicted = (code.plan.predicted_rc, rp1, rp2)
    report = SimulationReport(code.N, code.F, Q(Rc), Q(Rp1), Q(Rp2), predicted)
    decoders = [code.decoder(user, caches[user - 1]) for user in (1, 2)]
    for d1 in range(1, code.N + 1):
        for d2 in range(1, code.N + 1):
            transcript = code.deliver(library, (d1, d2), parts)
            report.rows.append(_decode_both(code, library, (d1, d2), caches, transcript, decoders).row)
    return report


def verify_against_formula(report: SimulationReport, inst: ProblemInstance) -> bool:
    """True when every demand decodes, rates match the plan, and T <= t_star."""
    if not report.formula_match:
        return False
    worst = max(
        (report.row_latency(r, inst.Rc, inst.Rp1, inst.Rp2) for r in report.rows if r.distinct),
        default=Fraction(0),
    )
    return worst <= t_star(inst)
