import random

import pytest
import sympy
from hypothesis import given, settings
from hypothesis import strategies as st

from artin_iwasawa.cyclofield import FiniteOrderCharacter, characters_of_gamma, make_ring
from artin_iwasawa.errors import InsufficientVanishing, LevelUnavailable, NotDivisible
from artin_iwasawa.measures import FractionalMeasure, IwasawaMeasure, amice_eval
from artin_iwasawa.padic import PadicValue, ZeroTest, log_iw

P, M_MAX, PREC = 3, 2, 8


def random_measure(seed: int, p: int = P, m_max: int = M_MAX, prec: int = PREC) -> IwasawaMeasure:
    rng = random.Random(seed)
    return IwasawaMeasure.from_top(p, [rng.randrange(p**prec) for _ in range(p**m_max)], prec)


def random_unit_measure(seed: int, p: int, m_max: int, prec: int) -> IwasawaMeasure:
    mu = random_measure(seed, p, m_max, prec)
    top = list(mu.top())
    top[0] += 1 - sum(top)  # total mass 1
    return IwasawaMeasure.from_top(p, top, prec)


seeds = st.integers(0, 10**6)
etas = st.sampled_from(characters_of_gamma(P, M_MAX))


# Amice transform


def test_amice_dirac():
    assert IwasawaMeasure.dirac(P, 1, 2, PREC).amice(2)[:2] == [1, 1]
    assert not any(IwasawaMeasure.dirac(P, 1, 2, PREC).amice(2)[2:])
    assert IwasawaMeasure.dirac(P, 0, 2, PREC).amice(2) == [1] + [0] * 8


@given(seeds, seeds)
@settings(max_examples=25)
def test_amice_convolution_oracle(s1, s2):
    # direct group-algebra convolution, then reduction with sympy
    lam, mu = random_measure(s1), random_measure(s2)
    T = sympy.Symbol("T")
    mod = P**PREC
    omega = sympy.Poly((1 + T) ** (P**2) - 1, T)
    poly = lambda m: sympy.Poly(sum(c * (1 + T) ** j for j, c in enumerate(m.level(2))), T)
    oracle = (poly(lam) * poly(mu)).rem(omega)
    got = (lam * mu).amice(2)
    coeffs = oracle.all_coeffs()[::-1]
    coeffs += [0] * (len(got) - len(coeffs))
    assert [int(c) % mod for c in coeffs] == [int(g) % mod for g in got]


def test_level_unavailable():
    with pytest.raises(LevelUnavailable):
        random_measure(1).amice(3)
    with pytest.raises(LevelUnavailable):
        random_measure(1).eval_character(FiniteOrderCharacter(P, 4, 1))


# evaluation


def test_gamma_minus_one_at_trivial():
    g = IwasawaMeasure.gamma_minus_one(P, 2, PREC)
    assert g.eval_character(FiniteOrderCharacter(P, 0)).is_zero() is ZeroTest.UNKNOWN


@given(seeds)
def test_eval_trivial_is_total_mass(seed):
    lam = random_measure(seed)
    assert lam.eval_character(FiniteOrderCharacter(P, 0)).to_padic().equals(lam.total_mass())
    assert lam.total_mass().equals(PadicValue.from_rational(sum(lam.top()), P, PREC))


@pytest.mark.parametrize("k", [0, 1, 2, 5, 8])
def test_eval_dirac(k):
    eta = FiniteOrderCharacter(P, 3, 1)
    r = make_ring(1, 3, P, PREC)
    got = IwasawaMeasure.dirac(P, k, 2, PREC).eval_character(eta, r)
    assert got.equals(eta.root_in(r, 1) ** k)


def test_eval_kappa_examples():
    one = FiniteOrderCharacter(P, 0)
    assert IwasawaMeasure.dirac(P, 1, 2, PREC).eval_kappa(one, 1).to_padic().equals(
        PadicValue.from_rational(1 + P, P, 3), 3)
    got = IwasawaMeasure.dirac(P, 3, 2, PREC).eval_kappa_value(2)
    assert got.equals(PadicValue.from_rational((1 + P) ** 6, P, got.precision))


@given(seeds, etas)
@settings(max_examples=30)
def test_eval_kappa_s0_is_eval_character(seed, eta):
    lam = random_measure(seed)
    assert lam.eval_kappa(eta, 0).equals(lam.eval_character(eta))


@given(seeds, etas)
@settings(max_examples=30)
def test_eval_amice_consistency(seed, eta):
    lam = random_measure(seed)
    val = lam.eval_character(eta)
    r = val.ring
    assert amice_eval(lam.amice(2), eta.root_in(r, eta.gamma_exponent(1)) - r.one()).equals(val)


@given(seeds, seeds, etas)
@settings(max_examples=30)
def test_eval_ring_homomorphism(s1, s2, eta):
    lam, mu = random_measure(s1), random_measure(s2)
    assert (lam * mu).eval_character(eta).equals(lam.eval_character(eta) * mu.eval_character(eta))


@given(seeds)
def test_projection_compatibility(seed):
    assert random_measure(seed).is_compatible()


# derivatives and the augmentation ideal


def test_derivative_examples():
    p, m = 5, 4
    L = log_iw(PadicValue(p, 1 + p, 0, 20))
    g = IwasawaMeasure.gamma_minus_one(p, m, 12)
    d1 = g.derivative_at_trivial(1)
    assert d1.value.equals(L, d1.certified_digits)
    d2 = (g * g).derivative_at_trivial(2)
    # binomial expansion: (gamma - 1)^2 = gamma^2 - 2 gamma + 1, so (4 - 2) L^2 / 2
    assert d2.value.equals(L * L, d2.certified_digits)
    assert d2.certified_digits >= m
    lam = random_unit_measure(3, p, m, 12)
    assert lam.derivative_at_trivial(0).value.equals(lam.total_mass(), lam.derivative_at_trivial(0).certified_digits)


def test_insufficient_vanishing():
    lam = random_unit_measure(4, 5, 3, 10)
    with pytest.raises(InsufficientVanishing):
        lam.derivative_at_trivial(1)


def test_vanishing_orders():
    p, m, prec = 5, 3, 10
    u = random_unit_measure(5, p, m, prec)
    assert u.vanishing_order() == (0, True)
    g = IwasawaMeasure.gamma_minus_one(p, m, prec)
    assert (g**3 * u).vanishing_order() == (3, True)


@given(seeds, etas)
@settings(max_examples=30)
def test_division_round_trip(seed, eta):
    mu = random_measure(seed)
    g = IwasawaMeasure.gamma_minus_one(P, M_MAX, PREC)
    q = (g * mu).divide_gamma_minus_1()
    assert (g * q).equals(g * mu)
    if not eta.is_trivial:
        assert q.eval_character(eta).equals(mu.eval_character(eta), PREC - 2)


def test_not_divisible():
    with pytest.raises(NotDivisible):
        random_unit_measure(6, P, 2, PREC).divide_gamma_minus_1()


# involution and twists


@given(seeds)
def test_involution_is_involutive(seed):
    lam = random_measure(seed)
    assert lam.involution().involution().equals(lam)


def test_twist_minus1_dirac():
    got = IwasawaMeasure.dirac(P, 1, 2, PREC).twist_minus1()
    inv = pow(1 + P, -1, P**PREC)
    assert got.equals(IwasawaMeasure.dirac(P, 1, 2, PREC).scale(inv))


@given(seeds, etas, st.integers(-3, 3))
@settings(max_examples=30)
def test_twist_minus1_shifts_s(seed, eta, s):
    lam = random_measure(seed)
    a = lam.twist_minus1().eval_kappa(eta, s)
    b = lam.eval_kappa(eta, s - 1)
    assert a.equals(b, min(a.prec, b.prec))


# fractional measures


@given(seeds, st.integers(0, 2))
@settings(max_examples=20)
def test_pole_bookkeeping(seed, k):
    frac = FractionalMeasure(random_measure(seed), k)
    assert frac.times_gamma_minus_one(k).pole_order == 0
    assert isinstance(frac.times_gamma_minus_one(k).as_measure(), IwasawaMeasure)


def test_fractional_eval():
    mu = random_measure(7)
    g = IwasawaMeasure.gamma_minus_one(P, M_MAX, PREC)
    eta = FiniteOrderCharacter(P, 2, 1)
    assert FractionalMeasure(g * mu, 1).eval_character(eta).equals(mu.eval_character(eta), PREC - 2)
    with pytest.raises(NotDivisible):
        FractionalMeasure(mu, 1).eval_character(FiniteOrderCharacter(P, 0))


# serialization


@given(seeds)
@settings(max_examples=20)
def test_json_round_trip(seed):
    lam = random_measure(seed)
    data = lam.to_json()
    assert set(data) >= {"prime", "coeff_ring", "m_max", "levels", "precision"}
    assert all(isinstance(c, str) for lv in data["levels"] for c in lv)
    assert IwasawaMeasure.from_json(data) == lam
