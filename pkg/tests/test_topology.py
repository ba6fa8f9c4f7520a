import pytest
from hypothesis import given, strategies as st

from prflow.topology import adams_rho, ferus_check, ferus_number


@pytest.mark.parametrize("n, rho", [(1, 1), (2, 2), (3, 1), (4, 4), (8, 8), (16, 9),
                                    (32, 10), (64, 12), (128, 16), (256, 17), (12, 4)])
def test_known_values(n, rho):
    assert adams_rho(n).rho == rho


@given(st.integers(min_value=0, max_value=200), st.integers(min_value=0, max_value=40))
def test_decomposition_roundtrip(odd_seed, v):
    odd = 2 * odd_seed + 1
    n = odd << v
    dec = adams_rho(n)
    assert dec.odd_part * 2 ** (4 * dec.d + dec.c) == n
    assert dec.odd_part % 2 == 1 and 0 <= dec.c <= 3
    assert dec.rho == 8 * dec.d + 2 ** dec.c


@given(st.integers(min_value=1, max_value=10**6))
def test_rho_depends_on_two_adic_part_only(n):
    odd = n
    while odd % 2 == 0:
        odd //= 2
    assert adams_rho(n).rho == adams_rho(n // odd).rho


@pytest.mark.parametrize("bad", [0, -3, 2.0, True])
def test_rho_rejects(bad):
    with pytest.raises(ValueError):
        adams_rho(bad)


@pytest.mark.parametrize("l, F", [(2, 0), (3, 1), (4, 0), (6, 2), (7, 3), (8, 0), (15, 7),
                                  (16, 0), (24, 8), (25, 1)])
def test_ferus_numbers(l, F):
    assert ferus_number(l) == F


def _rho_brute(n):
    v = 0
    while n % 2 == 0:
        n //= 2
        v += 1
    return 8 * (v // 4) + 2 ** (v % 4)


@given(st.integers(min_value=2, max_value=3000))
def test_ferus_matches_full_scan(l):
    assert ferus_number(l) == max(s for s in range(l) if s < _rho_brute(l - s))


def test_ferus_basic():
    assert ferus_check(1, 2)
    assert not ferus_check(1, 7)
    assert ferus_check(7, 8) and not ferus_check(8, 8)
    with pytest.raises(ValueError):
        ferus_check(0, 4)
    with pytest.raises(ValueError):
        ferus_number(1)
