"""Adams and Ferus numbers.

The Adams number rho(n) counts (one more than) the maximal number of
pointwise independent vector fields on S^{n-1}.  It depends only on the
2-adic valuation of n.
"""
from dataclasses import dataclass


@dataclass(frozen=True)
class AdamsDecomposition:
    n: int
    odd_part: int
    d: int
    c: int
    rho: int


def _two_adic_valuation(n: int) -> int:
    return (n & -n).bit_length() - 1


def adams_rho(n: int) -> AdamsDecomposition:
    """Decompose n = odd * 2**(4d + c) and return rho(n) = 8d + 2**c."""
    if not isinstance(n, int) or isinstance(n, bool) or n < 1:
        raise ValueError(f"n must be a positive integer, got {n!r}")
    v = _two_adic_valuation(n)
    d, c = divmod(v, 4)
    return AdamsDecomposition(n=n, odd_part=n >> v, d=d, c=c, rho=8 * d + (1 << c))


def _rho(n: int) -> int:
    d, c = divmod(_two_adic_valuation(n), 4)
    return 8 * d + (1 << c)


def ferus_number(l: int) -> int:
    """F(l) = max{s : s < rho(l - s)} over 0 <= s <= l - 1.

    rho(k) <= 2*log2(k) + 2, so the predicate can only hold for
    s <= 2*bit_length(l) + 1; the scan is restricted to that range.
    """
    if not isinstance(l, int) or isinstance(l, bool) or l < 2:
        raise ValueError(f"l must be an integer >= 2, got {l!r}")
    s_max = min(l - 1, 2 * l.bit_length() + 1)
    for s in range(s_max, -1, -1):
        if s < _rho(l - s):
            return s
    raise AssertionError("unreachable: s = 0 always qualifies")


def ferus_check(p: int, n: int) -> bool:
    """Whether p <= rho(n) - 1 holds."""
    if p < 1 or n < 1:
        raise ValueError("p and n must be positive integers")
    return p <= adams_rho(n).rho - 1
