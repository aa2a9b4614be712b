import random
from fractions import Fraction as F

import pytest

from hetcache.composer import (
    ComposedCode,
    SharePlan,
    compose,
    min_file_size,
    nine_points,
    region_of,
    share_plan,
)
from hetcache.corner_schemes import place, signature
from hetcache.errors import DomainError, SizingError
from hetcache.rate_laws import f_bar, f_bar_terms, rc_star
from hetcache.simulator import make_library, run_all


def _plan(entries, N=4):
    return SharePlan(tuple(entries), (N, 0, 0, 0, 0), F(0), "M1")


def _check_plan(p):
    N, M1, M2, rp1, rp2 = p.target
    weights = [w for _, w in p.entries]
    assert all(0 < w <= 1 for w in weights) and sum(weights) == 1
    aM1, aM2, arp1, arp2, arc = p.achieved()
    assert (arp1, arp2) == (rp1, rp2)
    assert aM1 <= M1 and aM2 <= M2
    assert arc == p.predicted_rc == f_bar(N, M1, M2, rp1, rp2)


# -- derived points --------------------------------------------------------


def test_nine_points_signatures():
    N, rp1, rp2 = 4, F(1, 2), F(1, 4)
    l1, l2 = 1 - rp1, 1 - rp2
    pts = {p.name: p for p in nine_points(N, rp1, rp2)}
    assert pts["B"].signature == (N * l1 / 2, N * l1 / 2, rp1, rp2, l2 - l1 / 2)
    assert pts["B'"].signature == (N * l1 / 2, N * l2 - N * l1 / 2, rp1, rp2, l1 / 2)
    assert pts["C'"].signature == (N * l1, N * l2, rp1, rp2, 0)
    for p in pts.values():
        assert [f for _, f in p.constituents] == [l1, 1 - l2, l2 - l1]
    with pytest.raises(DomainError):
        nine_points(N, rp2, rp1)


def test_nine_points_collapse_at_zero_rate():
    pts = {p.name: p.signature for p in nine_points(5, 0, 0)}
    assert pts["B'"] == pts["B"] and pts["G'"] == pts["G"]
    assert pts["C'"] == signature("P_C", 5)
    assert pts["E'"] == signature("P_E", 5)
    assert pts["A"] == signature("P_A", 5)


# -- regions ---------------------------------------------------------------


def test_region_examples():
    rp1, rp2 = F(1, 2), F(1, 4)
    assert region_of(4, 0, 0, 0, 0) == "M1"
    assert region_of(4, 4 * (1 - rp1), 0, rp1, rp2) == "M4"
    assert region_of(4, 0, 4 * (1 - rp2), rp1, rp2) == "M5"
    assert region_of(4, 4, 4, rp1, rp2) == "M6"
    assert region_of(4, 3, 0, rp1, rp2) == "M7"
    assert region_of(4, 0, 4, rp1, rp2) == "M8"


def test_region_formula_agrees_with_max_form():
    rng = random.Random(20)
    for _ in range(10_000):
        N = rng.randint(3, 7)
        den = rng.choice([1, 2, 3, 4, 6, 8])
        rp = sorted((F(rng.randint(0, den), den), F(rng.randint(0, den), den)), reverse=True)
        M1 = F(rng.randint(0, N * den), den) * (1 - rp[0])
        M2 = F(rng.randint(0, N * den), den) * (1 - rp[1])
        label = region_of(N, M1, M2, *rp)
        if label in ("M6", "M7", "M8"):
            continue
        value = f_bar_terms(N, M1, M2, *rp)[int(label[1:]) - 1]
        assert max(value, 0) == f_bar(N, M1, M2, *rp)


# -- plans -----------------------------------------------------------------


def test_share_plan_examples():
    p = share_plan(4, 1, 1, 0, 0)
    assert p.predicted_rc == rc_star(4, 1, 1) == F(5, 4)
    _check_plan(p)
    p = share_plan(4, 0, 0, 0, 0)
    assert p.entries == (("P_A", 1),)
    # a derived point's own caches give a single derived weight
    B = {q.name: q for q in nine_points(4, F(1, 2), F(1, 4))}["B"]
    p = share_plan(4, B.signature[0], B.signature[1], F(1, 2), F(1, 4))
    assert p.derived == (("B", 1),)


@pytest.mark.parametrize("N", [2, 3, 4, 5])
def test_plans_collapse_to_shared_link_rates(N):
    for a in range(0, 4 * N + 1):
        for b in range(0, 4 * N + 1):
            p = share_plan(N, F(a, 4), F(b, 4), 0, 0)
            assert p.predicted_rc == rc_star(N, F(a, 4), F(b, 4))
            _check_plan(p)


def test_random_plans_are_convex_and_exact():
    rng = random.Random(7)
    for _ in range(1500):
        N = rng.randint(2, 7)
        den = rng.choice([2, 3, 4, 5, 8])
        args = (
            F(rng.randint(0, N * den), den),
            F(rng.randint(0, N * den), den),
            F(rng.randint(0, den), den),
            F(rng.randint(0, den), den),
        )
        _check_plan(share_plan(N, *args))


def test_mirrored_plan_swaps_users():
    p = share_plan(4, F(1, 2), 3, F(1, 8), F(5, 8))
    q = share_plan(4, 3, F(1, 2), F(5, 8), F(1, 8))
    assert p.mirrored and not q.mirrored
    assert p.predicted_rc == q.predicted_rc
    a, b = p.achieved(), q.achieved()
    assert (a[0], a[1], a[2], a[3], a[4]) == (b[1], b[0], b[3], b[2], b[4])


def test_share_plan_domain():
    with pytest.raises(DomainError):
        share_plan(4, 0, 0, F(3, 2), 0)


# -- sizing and composition ------------------------------------------------


def test_min_file_size_examples():
    assert min_file_size(_plan([("P_B", F(1))])) == 2
    assert min_file_size(_plan([("P_A", F(2, 3)), ("P_B", F(1, 3))])) == 6
    assert min_file_size(_plan([("P_H", F(1))])) == 1


def test_compose_half_and_half():
    code = compose(_plan([("P_A", F(1, 2)), ("P_C", F(1, 2))]), 2)
    lib = make_library(4, 2, seed=3)
    z1, z2 = code.place(lib)
    assert z1.payload == z2.payload
    assert [str(b) for b in z1.payload.chunks(1)] == [str(f[1:2]) for f in lib.files]
    assert code.achieved()[4] == 1


def test_compose_single_entry_matches_base_scheme():
    code = compose(_plan([("P_F", F(1))]), 3)
    lib = make_library(4, 3, seed=9)
    assert code.place(lib) == place("P_F", lib)


def test_compose_rejects_bad_file_size():
    with pytest.raises(SizingError):
        compose(_plan([("P_B", F(1))]), 3)


def test_point_b_composition_transcript():
    # B = {(P_B, l1), (P_H, 1 - l2), (P_I, l2 - l1)} at l1 = 1/2, l2 = 3/4
    p = share_plan(4, 1, 1, F(1, 2), F(1, 4))
    assert dict(p.entries) == {"P_B": F(1, 2), "P_H": F(1, 4), "P_I": F(1, 4)}
    code = compose(p)
    assert code.F == 4
    lib = make_library(4, 4, seed=1)
    t = code.deliver(lib, (1, 2))
    w1, w2 = lib.file(1), lib.file(2)
    # P_B on bits [0, 2), P_H on [2, 3), P_I on [3, 4); P_I serves user 1
    # privately and user 2 on the shared link
    assert t.xc == (w1[1:2] ^ w2[0:1]) + w2[3:4]
    assert t.xp1 == w1[2:4] and t.xp2 == w2[2:3]


def test_json_round_trip_is_byte_exact():
    for args in [(4, 1, 1, 0, 0), (5, F(7, 4), F(1, 3), F(3, 8), F(5, 8)), (2, 1, 0, F(1, 2), 0)]:
        code = compose(share_plan(*args))
        text = code.to_json()
        again = ComposedCode.from_json(text)
        assert again.to_json() == text
        assert again.bit_counts() == code.bit_counts()


def test_from_json_rejects_wrong_schema():
    text = compose(share_plan(4, 1, 1, 0, 0)).to_json().replace("composed_code/1", "composed_code/9")
    with pytest.raises(ValueError):
        ComposedCode.from_json(text)


@pytest.mark.parametrize("args", [(4, 1, 1, 0, 0), (3, F(1, 2), 2, F(1, 4), F(1, 2)), (2, F(1, 2), F(3, 2), 0, F(1, 3))])
def test_composed_codes_decode_and_hit_predicted_rates(args):
    p = share_plan(*args)
    code = compose(p, 2 * min_file_size(p))
    report = run_all(code, make_library(args[0], code.F, seed=11))
    assert report.all_decoded and report.rates_match
    assert code.achieved()[4] == p.predicted_rc
