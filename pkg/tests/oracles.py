"""Independent reference computations used by the tests.

The rate and latency oracles solve linear programs over the convex hull of
the twelve corner signatures, written out here as literal tables so they do
not share code with the package. Cache and private-rate budgets are upper
bounds (unused cache and unused private capacity can always be discarded).
"""

from __future__ import annotations

import numpy as np
from scipy.optimize import linprog

TOL = 1e-9


def corner_table(N: int) -> np.ndarray:
    """Rows ``(M1, M2, rp1, rp2, rc)`` of the twelve corner points."""
    return np.array(
        [
            [0, 0, 0, 0, 2],
            [N / 2, N / 2, 0, 0, 0.5],
            [N, N, 0, 0, 0],
            [N, 0, 0, 0, 1],
            [0, N, 0, 0, 1],
            [N - 1, 0, 0, 0, 1],
            [0, N - 1, 0, 0, 1],
            [0, 0, 1, 1, 0],
            [0, 0, 1, 0, 1],
            [0, 0, 0, 1, 1],
            [0, N, 1, 0, 0],
            [N, 0, 0, 1, 0],
        ],
        dtype=float,
    )


def hull_rate(N, M1, M2, rp1=0, rp2=0, shared_only=False) -> float:
    """Least ``rc`` in the hull with caches ``<= M`` and private rates ``<= rp``."""
    pts = corner_table(N)
    if shared_only:
        pts = pts[:7]
    k = len(pts)
    A_ub = np.vstack([pts[:, 0], pts[:, 1], pts[:, 2], pts[:, 3]])
    b_ub = [float(M1), float(M2), float(rp1), float(rp2)]
    res = linprog(pts[:, 4], A_ub=A_ub, b_ub=b_ub, A_eq=np.ones((1, k)), b_eq=[1.0], bounds=[(0, None)] * k)
    assert res.status == 0, res.message
    return float(res.fun)


def hull_latency(N, M1, M2, Rc, Rp1, Rp2) -> float:
    """Least worst-case latency ``T`` over the hull, as an LP in ``(lambda, T)``."""
    pts = corner_table(N)
    k = len(pts)
    c = np.zeros(k + 1)
    c[-1] = 1.0
    rows, rhs = [], []
    for col, cap in ((4, Rc), (2, Rp1), (3, Rp2)):
        rows.append(np.append(pts[:, col], -float(cap)))
        rhs.append(0.0)
    for col, m in ((0, M1), (1, M2)):
        rows.append(np.append(pts[:, col], 0.0))
        rhs.append(float(m))
    A_eq = np.append(np.ones(k), 0.0)[None, :]
    res = linprog(c, A_ub=np.array(rows), b_ub=rhs, A_eq=A_eq, b_eq=[1.0], bounds=[(0, None)] * (k + 1))
    assert res.status == 0, res.message
    return float(res.fun)


def lcg_library_bits(N: int, F: int, seed: int) -> list[str]:
    """Files as ``'0'/'1'`` strings from the 64-bit MMIX generator, via numpy uint64 wraparound."""
    a = np.uint64(6364136223846793005)
    c = np.uint64(1442695040888963407)
    s = np.uint64(seed % 2**64)
    words = []
    with np.errstate(over="ignore"):
        for _ in range((N * F + 31) // 32):
            s = a * s + c
            words.append(format(int(s >> np.uint64(32)), "032b"))
    stream = "".join(words)
    return [stream[i * F:(i + 1) * F] for i in range(N)]
