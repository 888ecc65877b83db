import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artin_iwasawa.errors import DomainError, NotSimpleRoot, PrimeMismatch, PrecisionExhausted
from artin_iwasawa.padic import (
    PadicValue,
    ZeroTest,
    exp_p,
    hensel_lift,
    inv,
    log_iw,
    teichmuller,
    vp,
)

PRIMES = st.sampled_from([3, 5, 7])


def pv(x, p=5, M=10):
    return PadicValue.from_rational(x, p, M)


def series_mod(terms, p, M):
    """Sum of Fractions reduced mod p^M (independent oracle)."""
    total = sum(terms, Fraction(0))
    return total.numerator * pow(total.denominator, -1, p**M) % p**M


# examples


def test_one_times_one():
    assert (pv(1) * pv(1)).equals(pv(1))
    assert (pv(1) * pv(1)).precision == 10


def test_inverse_of_two():
    x = inv(PadicValue.from_rational(2, 5, 6))
    # frozen from the extended Euclid oracle
    assert x.residue() == 7813 == pow(2, -1, 5**6)


def test_cancellation_is_unresolved_zero():
    a = PadicValue.from_rational(5, 5, 4) + PadicValue.from_rational(-5, 5, 4)
    assert a.mantissa == 0 and a.precision == 4
    assert a.is_zero() is ZeroTest.UNKNOWN
    assert str(a) == "O(5^4)"


def test_inverse_of_zero_raises():
    with pytest.raises(PrecisionExhausted):
        PadicValue.zero(5, 6).inverse()


def test_prime_mismatch():
    with pytest.raises(PrimeMismatch):
        pv(1, 5) + pv(1, 7)


def test_even_prime_rejected():
    with pytest.raises(DomainError):
        PadicValue.from_rational(1, 2, 5)


def test_log_of_p_and_torsion_is_zero():
    assert log_iw(pv(5)).mantissa == 0
    for a in range(1, 5):
        assert log_iw(teichmuller(a, 5, 10)).mantissa == 0


def test_log_one_plus_p_series_oracle():
    terms = [Fraction((-1) ** (k + 1) * 5**k, k) for k in range(1, 40)]
    expect = series_mod(terms, 5, 10)
    assert log_iw(pv(6)).residue(10) == expect
    assert expect == 6970555  # frozen


def test_exp_examples():
    assert exp_p(PadicValue.zero(5, 8)).equals(pv(1, 5, 8))
    assert exp_p(log_iw(pv(6))).equals(pv(6))
    terms = [Fraction(5**k, math.factorial(k)) for k in range(40)]
    assert exp_p(pv(5, 5, 8)).residue(8) == series_mod(terms, 5, 8)


def test_exp_domain():
    with pytest.raises(DomainError):
        exp_p(pv(1))


def test_teichmuller_examples():
    assert teichmuller(1, 7, 12).equals(pv(1, 7, 12))
    for a in range(1, 7):
        t = teichmuller(a, 7, 12)
        assert (t ** 6).equals(pv(1, 7, 12))
        assert t.residue(1) == a
    # brute-force oracle: the unique x = 2 mod 5 with x^4 = 1 mod 5^6
    roots = [x for x in range(2, 5**6, 5) if pow(x, 4, 5**6) == 1]
    assert roots == [teichmuller(2, 5, 6).residue()]
    with pytest.raises(DomainError):
        teichmuller(5, 5, 6)


def test_hensel_examples():
    r = hensel_lift([-2, 0, 1], 3, 7, 12)
    assert r.residue() ** 2 % 7**12 == 2 and r.residue() % 7 == 3
    assert hensel_lift([-11, 1], 11, 5, 8).equals(pv(11, 5, 8))
    for a in range(1, 5):
        assert hensel_lift([-1, 0, 0, 0, 1], a, 5, 9).equals(teichmuller(a, 5, 9))
    with pytest.raises(NotSimpleRoot):
        hensel_lift([-2, 0, 1], 2, 7, 5)
    with pytest.raises(NotSimpleRoot):
        hensel_lift([0, 0, 1], 0, 7, 5)


def test_vp():
    assert vp(250, 5) == 3
    assert vp(Fraction(3, 25), 5) == -2
    assert vp(0, 5) is None


# properties


def values(p, M):
    return st.builds(lambda a, r, v: PadicValue(p, a * p + r, v, M),
                     st.integers(0, p**M), st.integers(1, p - 1), st.integers(0, 3))


@given(PRIMES.flatmap(lambda p: st.tuples(st.just(p), values(p, 12), values(p, 12),
                                          st.integers(2, 11))))
def test_precision_soundness(data):
    p, a, b, M2 = data
    for op in (lambda x, y: x + y, lambda x, y: x * y, lambda x, y: x - y):
        hi = op(a, b).truncate(M2)
        lo = op(a.truncate(M2), b.truncate(M2))
        assert hi.equals(lo)
        # truncation never reports more digits than a direct computation
        assert hi.precision <= lo.precision


@settings(max_examples=1000)
@given(PRIMES.flatmap(lambda p: st.tuples(st.just(p), values(p, 10), values(p, 10))))
def test_log_homomorphism(data):
    p, a, b = data
    assert log_iw(a * b).equals(log_iw(a) + log_iw(b))


@given(PRIMES, st.integers(0, 10**9), st.integers(1, 5))
def test_exp_log_inverse(p, n, v):
    M = 10
    x = PadicValue(p, n, v, M)
    u = PadicValue.one(p, M) + x
    assert exp_p(log_iw(u)).equals(u, M - 1)
    assert log_iw(exp_p(x)).equals(x, M - 1)
