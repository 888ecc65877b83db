import math
import random
from fractions import Fraction

import mpmath
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from artin_iwasawa.characters import (
    ArtinAbelian,
    CyclotomicNumber,
    DirichletData,
    PAdicEmbedding,
    UnitTerm,
    UnitVector,
    cyclotomic_unit,
)
from artin_iwasawa.cyclofield import FiniteOrderCharacter
from artin_iwasawa.errors import (
    EigenvalueListMismatch,
    IncompleteOrbit,
    SingularOMinus,
    SingularWithinBound,
    TrivialCharacter,
)
from artin_iwasawa.measures import IwasawaMeasure
from artin_iwasawa.padic import PadicValue, ZeroTest
from artin_iwasawa.stark import (
    PStabilization,
    RegulatorInput,
    combine_theta,
    complex_regulator,
    determinant,
    euler_factor,
    is_admissible,
    l_invariant,
    l_invariant_matrices,
    monomial_unit_projection,
    padic_regulator,
    stabilization_decompose,
    stark_rationality_ratio,
)

P, W = 5, 12
EMB = PAdicEmbedding(P, 1, 0, W)
# even quadratic characters with chi(5) = -1
RHO3 = ArtinAbelian(tuple(DirichletData.quadratic(D) for D in (12, 8, 13)))
RHO2 = ArtinAbelian(tuple(DirichletData.quadratic(D) for D in (12, 8)))
TOL = mpmath.mpf(10) ** -50


@pytest.fixture(autouse=True)
def high_precision():
    with mpmath.workdps(90):
        yield


def random_unit_vector(rng: random.Random, terms: int = 2) -> UnitVector:
    out = []
    for t in range(terms):
        c = CyclotomicNumber.rational(Fraction(rng.randint(-9, 9) or 1, rng.randint(1, 4)))
        padic = EMB.ring.from_rational(1 + P * rng.randrange(1, P**6))
        log_abs = mpmath.mpf(rng.randint(1, 10**6)) / 10**5
        out.append(UnitTerm(c, log_abs, padic, Fraction(0), f"u{t}"))
    return UnitVector(out)


def random_input(seed: int, d: int = 2) -> RegulatorInput:
    rng = random.Random(seed)
    cols = [[random_unit_vector(rng) for _ in range(d)] for _ in range(d)]
    return RegulatorInput(cols, tuple(range(d)))


def regs(inp: RegulatorInput, rho: ArtinAbelian = RHO2):
    stab = PStabilization.from_indices(rho, P, range(inp.d_plus))
    return padic_regulator(inp, stab, EMB)[0], complex_regulator(inp).value


def combine_columns(inp: RegulatorInput, g: list[list[Fraction]]) -> RegulatorInput:
    """psi'_j = sum_k g[k][j] psi_k."""
    d = len(g)
    cols = []
    for row in inp.columns:
        new = []
        for j in range(d):
            acc = UnitVector([])
            for k in range(d):
                if g[k][j]:
                    acc = acc + row[k].scale(g[k][j])
            new.append(acc)
        cols.append(new)
    return RegulatorInput(cols, inp.omega_inf, inp.omega_inf_scale)


seeds = st.integers(0, 10**9)
fracs = st.fractions(min_value=-5, max_value=5, max_denominator=6)


# property suites (200 cases each)


@given(seeds, seeds, st.integers(0, 1), fracs.filter(bool))
@settings(max_examples=200)
def test_regulator_multilinear(s1, s2, j, c):
    # psi_j -> psi_j + c psi'_j on every basis vector
    inp = random_input(s1)
    rng = random.Random(s2)
    extra = [random_unit_vector(rng) for _ in inp.columns]
    summed = RegulatorInput([list(r) for r in inp.columns], inp.omega_inf)
    other = RegulatorInput([list(r) for r in inp.columns], inp.omega_inf)
    for i, x in enumerate(extra):
        summed.columns[i][j] = inp.columns[i][j] + x.scale(c)
        other.columns[i][j] = x
    p0, c0 = regs(inp)
    ps, cs = regs(summed)
    po, co = regs(other)
    assert ps.equals(p0 + po * c, W - 2)
    assert abs(cs - (c0 + co * mpmath.mpf(c.numerator) / c.denominator)) < TOL * (1 + abs(cs))


@given(seeds)
@settings(max_examples=200)
def test_regulator_alternating(seed):
    inp = random_input(seed)
    swapped = RegulatorInput([row[::-1] for row in inp.columns], inp.omega_inf)
    p0, c0 = regs(inp)
    p1, c1 = regs(swapped)
    assert p1.equals(-p0)
    assert abs(c1 + c0) < TOL * (1 + abs(c0))
    dup = RegulatorInput([[row[0], row[0]] for row in inp.columns], inp.omega_inf)
    stab = PStabilization.from_indices(RHO2, P, [0, 1])
    assert padic_regulator(dup, stab, EMB)[1] is ZeroTest.UNKNOWN
    with pytest.raises(SingularWithinBound):
        complex_regulator(dup)


@given(seeds, st.lists(fracs, min_size=4, max_size=4))
@settings(max_examples=200)
def test_regulator_quotient_basis_independent(seed, entries):
    g = [entries[:2], entries[2:]]
    det_g = determinant(g, Fraction(1))
    if det_g == 0:
        g, det_g = [[Fraction(1), entries[1]], [Fraction(0), Fraction(1)]], Fraction(1)
    inp = random_input(seed)
    p0, c0 = regs(inp)
    p1, c1 = regs(combine_columns(inp, g))
    assert p1.equals(p0 * det_g, W - 4)
    assert abs(c1 - c0 * mpmath.mpf(det_g.numerator) / det_g.denominator) < TOL * (1 + abs(c1))
    # rescaling omega_inf by a and omega_p by b moves the quotient by a/b
    a = entries[0] or Fraction(1)
    scaled = RegulatorInput(inp.columns, inp.omega_inf, a)
    assert abs(complex_regulator(scaled).value - c0 * mpmath.mpf(a.numerator) / a.denominator) \
        < TOL * (1 + abs(c0))


@given(st.lists(st.sampled_from([12, 8, 13, -3, -7, 17]), min_size=1, max_size=4, unique=True),
       st.data())
@settings(max_examples=200)
def test_e_zero_gives_trivial_l_invariant(discs, data):
    rho = ArtinAbelian(tuple(DirichletData.quadratic(D) for D in discs))
    k = data.draw(st.integers(0, len(discs)))
    idx = data.draw(st.lists(st.integers(0, len(discs) - 1), min_size=k, max_size=k, unique=True))
    stab = PStabilization.from_indices(rho, P, idx)
    assert stab.e == 0
    assert l_invariant(stab, None, P, W).equals(PadicValue.one(P, W))


@given(seeds, fracs, fracs)
@settings(max_examples=200)
def test_stabilization_change_linear(seed, ca, cb):
    rng = random.Random(seed)
    inp = RegulatorInput([[random_unit_vector(rng)] for _ in range(3)], (0,))
    coeffs = {(0,): ca, (1,): cb}
    if not ca and not cb:
        coeffs = {(0,): Fraction(1)}
    stab = PStabilization.from_coefficients(RHO3, P, coeffs)
    total = padic_regulator(inp, stab, EMB)[0]
    expected = EMB.ring.zero()
    for alpha, c in stabilization_decompose(stab).items():
        expected = expected + padic_regulator(inp, PStabilization.from_indices(RHO3, P, alpha), EMB)[0] * c
    assert total.equals(expected)
    # the same combination of measures, evaluated at a character
    mus = {(i,): IwasawaMeasure.from_top(3, [rng.randrange(3**8) for _ in range(9)], 8)
           for i in range(2)}
    eta = FiniteOrderCharacter(3, 3, 1)
    comb = combine_theta(mus, stabilization_decompose(stab), stab)
    direct = sum((mus[a].eval_character(eta) * c for a, c in stabilization_decompose(stab).items()),
                 start=comb.eval_character(eta).ring.zero())
    assert comb.eval_character(eta).equals(direct)


# stabilizations and Euler factors


def test_pure_wedge_decomposition():
    stab = PStabilization.from_indices(RHO3, P, [1])
    assert stabilization_decompose(stab) == {(1,): 1}
    both = PStabilization.from_coefficients(RHO3, P, {(0,): 1, (1,): 1})
    assert stabilization_decompose(both) == {(0,): 1, (1,): 1}


def test_eigenvalue_list_mismatch():
    rho = ArtinAbelian((DirichletData.quadratic(12), DirichletData.quadratic(-11)))
    with pytest.raises(EigenvalueListMismatch):
        PStabilization.from_coefficients(rho, P, {(0,): 1, (1,): 1})


def test_euler_factor_examples():
    full = PStabilization.from_indices(RHO2, P, [0, 1])
    assert euler_factor(full) == Fraction(6, 5) ** 2
    # weight-one shape: plus eigenvalue beta = -1, minus eigenvalue alpha = -1
    half = PStabilization.from_indices(RHO2, P, [0])
    assert euler_factor(half) == (1 - Fraction(-1, 5)) * (1 - Fraction(1, -1))
    # eigenvalue 1 on W^- is excluded and counted by e
    rho = ArtinAbelian((DirichletData.quadratic(12), DirichletData.quadratic(-11)))
    stab = PStabilization.from_indices(rho, P, [0])
    assert stab.e == 1 and stab.f == 1
    assert euler_factor(stab) == Fraction(6, 5)


# regulators


def test_complex_regulator_mod5():
    chi = DirichletData.quadratic(5)
    emb = PAdicEmbedding.for_orders(11, [5], 8)
    inp = RegulatorInput([[cyclotomic_unit(chi, emb)]], (0,))
    reg = complex_regulator(inp).value
    log_eps = mpmath.log((1 + mpmath.sqrt(5)) / 2)
    assert abs(abs(reg) - 2 * log_eps) < TOL


def test_complex_regulator_scaling_and_permutation():
    inp = random_input(11)
    c0 = complex_regulator(inp).value
    assert abs(complex_regulator(RegulatorInput(inp.columns, (0, 1), Fraction(3))).value - 3 * c0) < TOL
    assert abs(complex_regulator(RegulatorInput([r[::-1] for r in inp.columns], (0, 1))).value + c0) < TOL


def test_padic_regulator_rank_one_two_paths():
    chi = DirichletData.quadratic(12)
    emb = PAdicEmbedding.for_orders(5, [12], 10)
    u = cyclotomic_unit(chi, emb)
    stab = PStabilization.from_indices(ArtinAbelian((chi,)), 5, [0])
    reg, zt = padic_regulator(RegulatorInput([[u]], (0,)), stab, emb)
    direct = emb.ring.zero()
    for t in u.terms:
        direct = direct + t.padic.log_iw() * t.coeff.rational_value()
    assert zt is ZeroTest.NONZERO and reg.equals(direct, 8)


def test_admissibility():
    chi = DirichletData.quadratic(12)
    emb = PAdicEmbedding.for_orders(5, [12], 10)
    stab = PStabilization.from_indices(ArtinAbelian((chi,)), 5, [0])
    assert is_admissible(RegulatorInput([[cyclotomic_unit(chi, emb)]], (0,)), stab, emb) == "admissible"
    zero = UnitVector([UnitTerm(CyclotomicNumber.rational(1), mpmath.mpf(0), emb.ring.one())])
    assert is_admissible(RegulatorInput([[zero]], (0,)), stab, emb) == "unknown"


# L-invariants


def _pv(x):
    return PadicValue.from_rational(x, P, W)


def test_gross_shape():
    log_u, ord_u = _pv(5 * 17), _pv(2)
    got = l_invariant_matrices([], [], [], [[log_u]], [[ord_u]], P, W)
    assert got.equals(log_u / ord_u)


@given(st.lists(st.integers(1, 10**6).filter(lambda x: x % P), min_size=10, max_size=10))
@settings(max_examples=50)
def test_l_invariant_block_diagonal(vals):
    a1, b1, c1, d1, o1, a2, b2, c2, d2, o2 = map(_pv, vals)
    z = _pv(0)
    l1 = l_invariant_matrices([[a1]], [[b1]], [[c1]], [[d1]], [[o1]], P, W)
    l2 = l_invariant_matrices([[a2]], [[b2]], [[c2]], [[d2]], [[o2]], P, W)
    both = l_invariant_matrices([[a1, z], [z, a2]], [[b1, z], [z, b2]], [[c1, z], [z, c2]],
                                [[d1, z], [z, d2]], [[o1, z], [z, o2]], P, W)
    assert both.equals(l1 * l2, W - 4)


def test_singular_o_minus():
    with pytest.raises(SingularOMinus):
        l_invariant_matrices([], [], [], [[_pv(3)]], [[_pv(0)]], P, W)


# monomial projections


def _term(log_abs, val=0):
    return UnitTerm(CyclotomicNumber.rational(1), mpmath.mpf(log_abs), EMB.ring.one(), Fraction(val))


def test_monomial_projection_quadratic_orbit():
    chi = {0: CyclotomicNumber.rational(1), 1: CyclotomicNumber.rational(-1)}
    u, ubar = monomial_unit_projection(chi, {0: _term(3, 1), 1: _term(2, 0)})
    assert abs(u.log_infinity() + (3 - 2)) < TOL
    assert ubar.log_infinity() == u.log_infinity()
    assert u.ord_p(EMB).to_padic().equals(_pv(1))


def test_monomial_projection_errors():
    with pytest.raises(TrivialCharacter):
        monomial_unit_projection({0: CyclotomicNumber.rational(1)}, {0: _term(1)})
    with pytest.raises(IncompleteOrbit):
        monomial_unit_projection({0: CyclotomicNumber.rational(1), 1: CyclotomicNumber.rational(-1)},
                                 {0: _term(1)})


# Stark rationality


@pytest.mark.parametrize("D", [5, 12, 8, 13])
def test_stark_rationality(D):
    assert abs(stark_rationality_ratio(D) - 1) < mpmath.mpf(10) ** -40


def test_math_sanity():
    assert math.isclose(float(2 * mpmath.log((1 + mpmath.sqrt(5)) / 2)), 0.9624236501192069)
