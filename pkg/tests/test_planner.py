import json
import random
from fractions import Fraction as F

import pytest

from hetcache.errors import DomainError, PlanningError
from hetcache.planner import CASE_LABELS, Plan, g_value, plan, solve_monotone
from hetcache.rate_laws import ProblemInstance, f_bar, latency, rc_star, t_star

from oracles import TOL, hull_latency


def inst(*args):
    return ProblemInstance.create(*args)


def test_trivial_reduction():
    i = inst(4, 1, 1, 2)
    p = plan(i)
    assert (p.rp1, p.rp2, p.rc, p.case_label) == (0, 0, rc_star(4, 1, 1), "trivial-reduction")
    assert p.T == F(5, 8)


def test_private_links_only():
    p = plan(inst(4, 0, 0, 0, 1, 1))
    assert (p.rp1, p.rp2, p.rc, p.T) == (1, 1, 0, 1)


def test_g_function_endpoints():
    i = inst(4, 1, F(1, 2), 1, 1, F(1, 2))
    u1, u2 = F(3, 4), F(7, 8)
    assert g_value("g1", i, 0) == 0
    assert g_value("g1", i, u1) == F(4 - 1, 4 - F(1, 2))
    assert g_value("g2", i, u2) == 0


def test_case_1a_balances_all_three_links():
    i = inst(4, 0, 0, 1, 1, F(1, 2))
    p = plan(i)
    assert p.case_label == "balanced-line-OP"
    assert p.rp1 / i.Rp1 == p.rp2 / i.Rp2 == p.rc / i.Rc == p.T


def test_case_1b_contract():
    i = inst(4, 1, 0, 1, 3, F(1, 2))
    p = plan(i)
    assert p.case_label == "edge-QR"
    assert p.rp2 / i.Rp2 == p.rc / i.Rc >= p.rp1 / i.Rp1
    assert p.T == (1 - i.M2 / i.N) / (i.Rc + i.Rp2)


def test_case_2a_label():
    p = plan(inst(4, 0, 3, 10, 1, 1))
    assert p.case_label == "balanced-line-OP-mirror"


def test_case_2b_contract():
    i = inst(4, 0, 3, 1, 1, 1)
    p = plan(i)
    assert p.case_label == "edge-SR"
    assert p.T == (1 - i.M1 / i.N) / (i.Rc + i.Rp1)


def test_mirrored_instances_give_mirrored_plans():
    i = inst(5, F(1, 2), 2, F(2, 3), F(1, 4), F(3, 2))
    p, q = plan(i), plan(i.mirrored())
    assert (p.rp1, p.rp2, p.rc, p.T) == (q.rp2, q.rp1, q.rc, q.T)


def test_solve_monotone_exact_roots():
    i = inst(4, 1, F(1, 2), 1, 1, F(1, 2))
    for target in (F(1, 5), F(1, 2), F(3, 4)):
        r = solve_monotone("g1", i, target)
        assert g_value("g1", i, r) == target
    r = solve_monotone("g2", i, F(3, 2))
    assert g_value("g2", i, r) == F(3, 2)


def test_solve_monotone_without_root():
    i = inst(4, 1, F(1, 2), 1, 1, F(1, 2))
    with pytest.raises(PlanningError):
        solve_monotone("g1", i, 5)
    with pytest.raises(DomainError):
        solve_monotone("g1", inst(4, 1, 1, 1), F(1, 2))


def test_plan_json_round_trip():
    p = plan(inst(4, F(1, 3), 2, 1, F(1, 2), F(1, 4)))
    d = json.loads(p.to_json())
    assert d["schema"] == "hetcache.plan/1" and d["case_label"] in CASE_LABELS
    assert Plan.from_dict(d) == p
    with pytest.raises(ValueError):
        Plan.from_dict({**d, "case_label": "nope"})


def _random_instance(rng):
    N = rng.randint(2, 6)
    den = rng.choice([1, 2, 3, 4, 5, 6, 8])
    M1, M2 = (F(rng.randint(0, N * den), den) for _ in range(2))
    Rc, Rp1, Rp2 = (F(rng.randint(0, 3 * den), den) for _ in range(3))
    try:
        return ProblemInstance.create(N, M1, M2, Rc, Rp1, Rp2)
    except DomainError:
        return None


def test_random_plans_are_optimal_and_on_the_envelope():
    rng = random.Random(3)
    checked = 0
    while checked < 300:
        i = _random_instance(rng)
        if i is None:
            continue
        checked += 1
        p = plan(i)
        assert p.T == t_star(i)
        assert abs(float(p.T) - hull_latency(i.N, i.M1, i.M2, i.Rc, i.Rp1, i.Rp2)) < TOL
        assert p.rc == f_bar(i.N, i.M1, i.M2, p.rp1, p.rp2)
        assert p.T == latency(p.rc, p.rp1, p.rp2, i.Rc, i.Rp1, i.Rp2)
        assert p.rp1 <= 1 - i.M1 / i.N and p.rp2 <= 1 - i.M2 / i.N
