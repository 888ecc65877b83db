"""Acceptance criteria. Each test prints one PASS/FAIL line."""
import json
import random
import time
from importlib import resources

import mpmath
import pytest

import test_stark
from artin_iwasawa.characters import DirichletData
from artin_iwasawa.cli import main
from artin_iwasawa.coleman import (
    PowerSeries,
    coleman_extended,
    coleman_operator,
    coleman_operator_precision,
    constant_term_check,
    cyclotomic_unit_family,
    extended_constant_term,
    gamma_power_twist_family,
    special_value_check,
    unramified_twist_family,
    uniformizer_family,
    verify_coleman_series,
)
from artin_iwasawa.cyclofield import FiniteOrderCharacter, make_ring
from artin_iwasawa.lfunctions import (
    QuadraticPUnit,
    deligne_ribet,
    gamma_characters,
    odd_theta,
    verify_EX,
    verify_EZC_gross,
    verify_interpolation,
)
from artin_iwasawa.stark import stark_rationality_ratio


@pytest.fixture
def report(capsys):
    def emit(number: int, name: str, passed: bool, detail: str = "") -> None:
        with capsys.disabled():
            print(f"\ncriterion {number} {'PASS' if passed else 'FAIL'}: {name} {detail}".rstrip())
        assert passed, f"criterion {number} failed: {detail}"
    return emit


def test_criterion_1_interpolation(report):
    start = time.perf_counter()
    dr = deligne_ribet(DirichletData.quadratic(12), 5, 4, None, 12)
    etas = gamma_characters(5, [0, 2])
    checks = verify_interpolation(dr, etas, [1, 2, 3, 4], required=8)
    elapsed = time.perf_counter() - start
    worst = min(c.residual_valuation for c in checks)
    ok = len(etas) == 5 and len(checks) == 20 and all(c.passed for c in checks) and worst >= 8 and elapsed < 60
    report(1, "Kubota-Leopoldt interpolation", ok,
           f"cases={len(checks)} min_residual={worst} time={elapsed:.1f}s")


def test_criterion_2_coleman_operator(report):
    start = time.perf_counter()
    p, N, M = 3, 27, 10
    base = make_ring(1, 0, p, coleman_operator_precision(M, N, p))
    rng = random.Random(2024)
    failures = 0
    for _ in range(100):
        f, g = (_random_unit_series(rng, base, N, p) for _ in range(2))
        lf, lg, lfg = coleman_operator(f), coleman_operator(g), coleman_operator(f * g)
        if not (lf.k == lg.k == lfg.k == 0 and lfg.residual_valuation(lf + lg) >= M):
            failures += 1
    family = cyclotomic_unit_family(p, 2, 3, M + 6, delta_normed=False)
    series_ok = all(r.passed for r in verify_coleman_series(family, M=M))
    elapsed = time.perf_counter() - start
    ok = failures == 0 and series_ok and elapsed < 30
    report(2, "Coleman operator suite", ok,
           f"random_failures={failures}/100 depth3_series={series_ok} time={elapsed:.1f}s")


def _random_unit_series(rng: random.Random, base, N: int, p: int) -> PowerSeries:
    coeffs = [rng.randrange(p**base.M) for _ in range(N)]
    if coeffs[0] % p == 0:
        coeffs[0] += 1
    return PowerSeries.from_ints(base, coeffs, N)


def test_criterion_3_special_value(report):
    p, M = 3, 10
    family = cyclotomic_unit_family(p, 2, 3, M + 6)
    results = [special_value_check(family, FiniteOrderCharacter(p, 2, k), M) for k in (1, 2)]
    worst = min(r.residual_valuation for r in results)
    twisted = constant_term_check(unramified_twist_family(p, 4, 2, M + 6), M)
    ok = (all(r.passed for r in results) and worst >= 8
          and twisted.passed and not twisted.detail["u0_is_one"])
    report(3, "special-value lemma", ok,
           f"cond9_min_residual={worst} u0_ne_1_constant_term={twisted.passed}")


def test_criterion_4_extended_constant_term(report):
    p, M = 3, 10
    pi = uniformizer_family(p, 2, M + 6)
    target = extended_constant_term(1, 1, p, M)
    F1 = coleman_extended(pi, 1, 1, M, gamma_power_twist_family(p, 1, 2, M + 6))
    F2 = coleman_extended(pi, 2, 1, M, gamma_power_twist_family(p, 2, 2, M + 6))
    const_ok = pi.entry(1).valuation() == 1 and F1.numerator.total_mass().equals(target, M - 2)
    invariant = F1.pole_order == F2.pole_order == 1 and F1.numerator.equals(F2.numerator)
    report(4, "extended-map constant term", const_ok and invariant,
           f"constant_term={const_ok} gamma_vs_gamma2={invariant}")


def test_criterion_5_leopoldt_ex(report):
    dr = deligne_ribet(DirichletData.quadratic(12), 5, 4, None, 12)
    rep = verify_EX(DirichletData.quadratic(12), dr, gamma_characters(5, [0, 2]))
    worst = min(c.residual_valuation for c in rep.checks)
    ok = rep.passed and worst >= 8 and bool(rep.constant)
    report(5, "Leopoldt/EX even case", ok, f"min_residual={worst} constant={rep.constant}")


def test_criterion_6_gross_stark(report):
    start = time.perf_counter()
    data = resources.files("artin_iwasawa.data").joinpath("gross_mod11_p5.json").read_text()
    unit = QuadraticPUnit.from_json(json.loads(data))
    chi, m_max = DirichletData.quadratic(-11), 4
    theta = odd_theta(chi, 5, m_max, None, 12)
    rep = verify_EZC_gross(chi, 5, unit, m_max, 12, theta=theta)
    elapsed = time.perf_counter() - start
    level = next(c for c in rep.checks if c.name == "ezc_derivative_level")
    ok = (rep.e == 1 and rep.passed and level.residual_valuation >= m_max - 1
          and "level" in level.detail and elapsed < 60)
    report(6, "Gross-Stark trivial zero", ok,
           f"residual={level.residual_valuation} level={level.detail.get('level')} time={elapsed:.1f}s")


def test_criterion_7_stark_rationality(report):
    errors = {}
    with mpmath.workprec(256):
        for D in (5, 12):
            errors[D] = abs(stark_rationality_ratio(D) - 1)
        ok = all(e < mpmath.mpf(10) ** -40 for e in errors.values())
    report(7, "Stark rationality", ok,
           " ".join(f"D={D}:|ratio-1|={mpmath.nstr(e, 3)}" for D, e in errors.items()))


PROPERTY_SUITES = [
    test_stark.test_regulator_multilinear,
    test_stark.test_regulator_alternating,
    test_stark.test_regulator_quotient_basis_independent,
    test_stark.test_e_zero_gives_trivial_l_invariant,
    test_stark.test_stabilization_change_linear,
]


def test_criterion_8_regulator_properties(report):
    counts = {}
    for suite in PROPERTY_SUITES:
        inner = suite.hypothesis.inner_test
        n = 0

        def counted(*args, _inner=inner, **kwargs):
            nonlocal n
            n += 1
            return _inner(*args, **kwargs)

        suite.hypothesis.inner_test = counted
        try:
            with mpmath.workdps(90):
                suite()
        finally:
            suite.hypothesis.inner_test = inner
        counts[suite.__name__.removeprefix("test_")] = n
    ok = all(n >= 200 for n in counts.values())
    report(8, "regulator and L-invariant properties", ok,
           " ".join(f"{k}={v}" for k, v in counts.items()))


def test_criterion_9_determinism(report, tmp_path, monkeypatch):
    monkeypatch.chdir(tmp_path)
    codes = [main(["verify", "all", "--out", name]) for name in ("a.json", "b.json")]
    same = (tmp_path / "a.json").read_bytes() == (tmp_path / "b.json").read_bytes()
    report(9, "determinism of verify all", same and codes == [0, 0],
           f"exit_codes={codes} identical={same}")
