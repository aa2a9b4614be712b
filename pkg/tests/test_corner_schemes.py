from fractions import Fraction as F

import pytest

from hetcache.bits import Bits
from hetcache.corner_schemes import (
    BASE_IDS,
    MIRROR,
    CacheContents,
    Library,
    Transcript,
    chain_path,
    decode,
    deliver,
    get_scheme,
    place,
    signature,
)
from hetcache.errors import DecodeError, DomainError, SizingError
from hetcache.simulator import make_library


def demands(N):
    return [(d1, d2) for d1 in range(1, N + 1) for d2 in range(1, N + 1)]


def test_signature_examples():
    assert signature("P_I", 4) == (0, 0, 1, 0, 1)
    assert signature("P_F", 4) == (3, 0, 0, 0, 1)
    assert signature("P_C", 4) == (4, 4, 0, 0, 0)
    with pytest.raises(DomainError):
        signature("P_Z", 4)


def test_mirror_swaps_user_coordinates():
    for s in BASE_IDS:
        M1, M2, p1, p2, c = signature(s, 5)
        assert signature(MIRROR[s], 5) == (M2, M1, p2, p1, c)


@pytest.mark.parametrize("scheme_id", BASE_IDS)
@pytest.mark.parametrize("N", range(2, 9))
def test_every_scheme_decodes_every_demand_with_exact_budgets(scheme_id, N):
    F_bits = 6
    lib = make_library(N, F_bits, seed=N)
    z1, z2 = place(scheme_id, lib)
    M1, M2, p1, p2, c = signature(scheme_id, N)
    assert (len(z1), len(z2)) == (M1 * F_bits, M2 * F_bits)
    for d in demands(N):
        t = deliver(scheme_id, lib, d)
        assert t.lengths() == (c * F_bits, p1 * F_bits, p2 * F_bits)
        assert decode(scheme_id, 1, z1, t, d, N, F_bits) == lib.file(d[0])
        assert decode(scheme_id, 2, z2, t, d, N, F_bits) == lib.file(d[1])


def test_point_f_placement_is_adjacent_xors():
    lib = make_library(4, 8, seed=1)
    z1, z2 = place("P_F", lib)
    w = lib.files
    assert z1.payload == Bits.join([w[0] ^ w[1], w[1] ^ w[2], w[2] ^ w[3]])
    assert len(z2) == 0


def test_point_f_delivery_and_chain_for_demand_1_4():
    lib = make_library(4, 8, seed=2)
    t = deliver("P_F", lib, (1, 4))
    assert t.xc == lib.file(4)
    # W_3 from (W_3 xor W_4, W_4), then W_2, then W_1
    assert [nxt for _, nxt in chain_path(4, 1)] == [3, 2, 1]


@pytest.mark.parametrize("N", range(2, 9))
def test_chain_never_exceeds_n_minus_one_steps(N):
    for start in range(1, N + 1):
        for target in range(1, N + 1):
            assert len(chain_path(start, target)) <= N - 1
            assert len(chain_path(start, target)) == abs(start - target)


def test_point_b_halves_and_xor():
    lib = make_library(3, 10, seed=3)
    z1, z2 = place("P_B", lib)
    assert z1.payload == Bits.join(f[:5] for f in lib.files)
    assert z2.payload == Bits.join(f[5:] for f in lib.files)
    t = deliver("P_B", lib, (1, 3))
    assert t.xc == lib.file(1)[5:] ^ lib.file(3)[:5]
    # user 2 recovers the missing first half as xc ^ W_{d1}^2
    assert t.xc ^ lib.file(1)[5:] == lib.file(3)[:5]


def test_point_k_serves_user_one_privately():
    lib = make_library(4, 4, seed=4)
    t = deliver("P_K", lib, (2, 3))
    assert t.xp1 == lib.file(2)
    assert len(t.xc) == len(t.xp2) == 0


def test_point_h_and_c_caches():
    lib = make_library(3, 4, seed=5)
    z1, z2 = place("P_H", lib)
    assert len(z1) == len(z2) == 0
    z1, z2 = place("P_C", lib)
    assert z1.payload == z2.payload == Bits.join(lib.files)


def test_point_b_needs_even_file_size():
    lib = make_library(3, 5, seed=0)
    with pytest.raises(SizingError):
        place("P_B", lib)


def test_decode_rejects_inconsistent_inputs():
    lib = make_library(4, 6, seed=6)
    z1, z2 = place("P_F", lib)
    t = deliver("P_F", lib, (1, 2))
    with pytest.raises(DecodeError):
        decode("P_F", 1, z2, t, (1, 2), 4, 6)
    short = Transcript(t.xc[:5], t.xp1, t.xp2)
    with pytest.raises(DecodeError):
        decode("P_F", 1, z1, short, (1, 2), 4, 6)
    with pytest.raises(DecodeError):
        decode("P_F", 1, CacheContents(1, z1.payload[:-1]), t, (1, 2), 4, 6)
    with pytest.raises(DomainError):
        deliver("P_F", lib, (0, 2))


def test_flipped_transcript_bit_breaks_decoding():
    lib = make_library(4, 6, seed=7)
    z1, _ = place("P_F", lib)
    t = deliver("P_F", lib, (1, 4))
    bad = Transcript(t.xc.flip(0), t.xp1, t.xp2)
    assert decode("P_F", 1, z1, bad, (1, 4), 4, 6) != lib.file(1)


def test_library_validation():
    with pytest.raises(ValueError):
        Library((Bits.from_str("01"), Bits.from_str("011")))
    lib = Library((Bits.from_str("0110"), Bits.from_str("1001")))
    assert (lib.N, lib.F) == (2, 4)
    assert lib.segment(1, 3).files == (Bits.from_str("11"), Bits.from_str("00"))


def test_direct_scheme_expected_lengths():
    assert get_scheme("P_I").expected_lengths(5, 7) == (0, 0, 7, 0, 7)
    with pytest.raises(SizingError):
        get_scheme("P_B").expected_lengths(3, 3)
    assert signature("P_B", 3)[0] == F(3, 2)
