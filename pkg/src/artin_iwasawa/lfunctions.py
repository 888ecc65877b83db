"""Kubota-Leopoldt measures, their odd-case twist, and the EX/EZC harnesses.

The even measure is built from the c-regularized Bernoulli measure E_{1,c} on
Z/d x Z_p.  On a ball b + M Z_p (M = d p^N) the moments

    m_t(b) = integral over the ball of (x - b)^t dE_{1,c}

are exact rationals, so integrals of <x>^k over each ball are available to any
p-adic precision through the binomial expansion of <x>^k around <b>.  Summing
over the balls in each coset of Gamma_m gives the level-m element of Lambda;
evaluating the moment sums directly gives exact values at eta kappa^n.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable, Sequence

import mpmath

from .characters import (
    CyclotomicNumber,
    DirichletData,
    PAdicEmbedding,
    bernoulli_general,
    bernoulli_numbers,
    cyclotomic_unit,
    gauss_sum_global,
    l_value_at_one,
    l_value_at_one_digamma,
)
from .cyclofield import (
    FiniteOrderCharacter,
    LocalElement,
    LocalRing,
    gamma_log,
    make_ring,
)
from .errors import (
    DegenerateRegularizer,
    DomainError,
    IntegralityViolation,
    MissingUnitData,
    OddCharacter,
    TrivialCharacter,
)
from .measures import IwasawaMeasure, group_algebra_inverse
from .padic import PadicValue, hensel_lift, log_iw, residue_mod, vp

GUARD = 3


# ---------------------------------------------------------------------------
# reports


@dataclass
class Check:
    """One comparison: inputs, both sides, residual and the digits certified."""

    name: str
    inputs: dict
    lhs: object
    rhs: object
    residual_valuation: Fraction
    certificate: int
    required: int
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual_valuation >= self.required

    def to_json(self) -> dict:
        def enc(x):
            if hasattr(x, "to_json"):
                return x.to_json()
            return str(x)

        return {"name": self.name, "inputs": {k: str(v) for k, v in sorted(self.inputs.items())},
                "lhs": enc(self.lhs), "rhs": enc(self.rhs),
                "residual_valuation": str(self.residual_valuation),
                "certificate": str(self.certificate), "required": str(self.required),
                "detail": self.detail, "pass": self.passed}


def _residual(a: LocalElement, b: LocalElement) -> Fraction:
    if a.ring.key != b.ring.key:
        # compare in the larger ring
        if (a.ring.d, a.ring.n) <= (b.ring.d, b.ring.n):
            a = _to_ring(a, b.ring)
        else:
            b = _to_ring(b, a.ring)
    return a.residual_valuation(b)


def _to_ring(x: LocalElement, ring: LocalRing) -> LocalElement:
    if x.ring.key == ring.key:
        return x
    if x.ring.M != ring.M:
        x = x.at_precision(ring.M)
    if x.ring.key == ring.key:
        return x
    return x.lift(ring)


def _teich(a: int, p: int, mod_exp: int) -> int:
    return pow(a, p ** (mod_exp - 1), p**mod_exp)


def _binomial_int(k: int, t: int) -> Fraction:
    num = 1
    for r in range(t):
        num *= k - r
    return Fraction(num, math.factorial(t))


# ---------------------------------------------------------------------------
# the even measure


@dataclass
class _Ball:
    j: int            # coset of Gamma_m containing <b>
    weight: int       # chi_0 omega^{i-1}(b) mod P
    angle: int        # <b> mod P
    binv: int         # b^{-1} mod P
    moments: list[int]  # p^G m_t(b) mod P


@dataclass
class DeligneRibetMeasure:
    """theta with eta kappa^n(theta) = L_p(1-n, chi eta), chi = chi_0 omega^i even."""

    chi: DirichletData
    omega_power: int
    p: int
    m_max: int
    c: int
    precision: int
    measure: IwasawaMeasure
    theta_c: IwasawaMeasure
    chi_c: int
    embedding: PAdicEmbedding
    _balls: list[_Ball] = field(repr=False, default_factory=list)
    _G: int = 0
    _W: int = 0

    @property
    def W(self) -> int:
        return self._W

    # exact route

    def class_sums(self, k: int) -> list[int]:
        """A_k[j] = sum over balls in coset j of chi_0 omega^{i-1}(b) int <x>^k dE_{1,c},
        modulo p^W.  ``k`` is an integer (any representative of a p-adic exponent)."""
        p, G, W = self.p, self._G, self._W
        P = p ** (W + G)
        T = len(self._balls[0].moments) - 1
        binoms = []
        for t in range(T + 1):
            bt = _binomial_int(k, t)
            binoms.append(_frac_mod(bt, p, W + G))
        size = p**self.m_max
        acc = [0] * size
        for ball in self._balls:
            J = 0
            pw = 1
            for t, mt in enumerate(ball.moments):
                if t:
                    pw = pw * ball.binv % P
                J += binoms[t] * pw % P * mt
            acc[ball.j] += ball.weight * pow(ball.angle, k, P) % P * (J % P)
        pG = p**G
        out = []
        for a in acc:
            a %= P
            if a % pG:
                raise IntegralityViolation(f"class sum not divisible by p^{G}")
            out.append(a // pG)
        return out

    def _angle_c_power(self, n: int, mod_exp: int) -> int:
        p = self.p
        mod = p**mod_exp
        ang = self.c * pow(_teich(self.c, p, mod_exp), -1, mod) % mod
        return pow(ang, n, mod)

    def evaluate(self, eta: FiniteOrderCharacter, n: int) -> LocalElement:
        """eta kappa^n(theta) through the ball moments (full working precision)."""
        p, W = self.p, self._W
        A = self.class_sums(n - 1)
        num_mu = IwasawaMeasure.from_top(p, A, W)
        ring = make_ring(1, max(eta.conductor_exp, 0), p, W)
        num = num_mu.eval_character(eta, ring)
        den = ring.one() - eta.value(ring, self.c) * (self.chi_c * self._angle_c_power(n, W))
        val = -(num / den)
        return val.with_precision(min(val.prec, self.precision))

    def twisted_measure(self, k: int) -> IwasawaMeasure:
        """Exact level-m projection of Tw_k(theta) = -A_{k-1} * (1 - chi(c)<c>^k [<c>])^{-1}."""
        p, prec = self.p, self.precision
        top = [a % p**prec for a in self.class_sums(k - 1)]
        num = IwasawaMeasure.from_top(p, top, prec)
        jc = gamma_log(self.c, p, self.m_max + 1)
        r = [0] * p**self.m_max
        r[0] = 1
        r[jc] = (r[jc] - self.chi_c * self._angle_c_power(k, prec)) % p**prec
        return -(num * group_algebra_inverse(IwasawaMeasure.from_top(p, r, prec)))

    def evaluate_level(self, eta: FiniteOrderCharacter, n: int,
                       level: int | None = None) -> tuple[LocalElement, int]:
        """eta kappa^n of the level-m element of Lambda, with its digit certificate."""
        m = self.m_max if level is None else level
        ring = make_ring(1, max(eta.conductor_exp, 0), self.p, self.precision)
        val = self.measure.eval_kappa(eta, n, level=m, ring=ring)
        cert = self.precision if n == 0 else min(self.precision, m + 1)
        return val, cert

    def eval_character(self, eta: FiniteOrderCharacter) -> LocalElement:
        ring = make_ring(1, max(eta.conductor_exp, 0), self.p, self.precision)
        return self.measure.eval_character(eta, ring)

    # oracle

    def psi(self, eta: FiniteOrderCharacter, n: int) -> DirichletData:
        """chi eta omega^{-n} as a primitive Dirichlet character."""
        emb = self.embedding
        out = self.chi * DirichletData.teichmuller(emb, self.omega_power - n)
        if not eta.is_trivial:
            out = out * DirichletData.from_gamma_character(eta)
        return out.primitive()

    def oracle(self, eta: FiniteOrderCharacter, n: int) -> LocalElement:
        """-(1 - psi(p) p^{n-1}) B_{n,psi}/n with psi = chi eta omega^{-n}."""
        psi = self.psi(eta, n)
        B = bernoulli_general(n, psi)
        factor = CyclotomicNumber.rational(1) - psi.value(self.p) * Fraction(self.p) ** (n - 1)
        exact = -(factor * B) * Fraction(1, n)
        return self.embedding_for(eta).image(exact)

    def embedding_for(self, eta: FiniteOrderCharacter) -> PAdicEmbedding:
        n = max(eta.conductor_exp, 0)
        if n <= self.embedding.n:
            return self.embedding
        return PAdicEmbedding(self.p, self.embedding.D, n, self.embedding.M)

    def to_json(self) -> dict:
        return {"chi": self.chi.to_config(), "omega_power": str(self.omega_power),
                "p": str(self.p), "c": str(self.c), "m_max": str(self.m_max),
                "precision": str(self.precision), "measure": self.measure.to_json()}


def _frac_mod(q: Fraction, p: int, k: int) -> int:
    if q.denominator % p == 0:
        raise DomainError(f"{q} is not {p}-integral")
    return residue_mod(q, p, k)


def _character_zp_values(chi: DirichletData, emb: PAdicEmbedding, p: int, W: int) -> dict[int, int]:
    """chi(a) for a mod d as Teichmuller integers modulo p^W."""
    if (p - 1) % chi.order:
        raise DomainError("character values must lie in Z_p (order dividing p-1)")
    out = {}
    for a in range(chi.modulus):
        e = chi.exponent(a)
        if e is None:
            continue
        z = emb.zeta(chi.order, e)
        out[a] = _teich(z.c[0] % p, p, W) if chi.order > 2 else (1 if e == 0 else p**W - 1)
    return out


def choose_regularizer(chi: DirichletData, p: int, omega_power: int = 0,
                       embedding: PAdicEmbedding | None = None,
                       exclude: Sequence[int] = ()) -> int:
    """Smallest c > 1 prime to dp with chi_0 omega^i(c) != 1 mod p."""
    d = chi.modulus
    if embedding is None:
        embedding = PAdicEmbedding.for_orders(p, [chi.order, p - 1, d], 4)
    c = 2
    while True:
        if math.gcd(c, d * p) == 1 and c not in exclude:
            e = chi.exponent(c)
            val = embedding.zeta(chi.order, e).c[0] * pow(c, omega_power, p) % p
            if val != 1:
                return c
        c += 1


def deligne_ribet(chi: DirichletData, p: int, m_max: int = 4, c: int | None = None,
                  precision: int = 12, omega_power: int = 0,
                  embedding: PAdicEmbedding | None = None) -> DeligneRibetMeasure:
    """Build theta for chi = chi_0 omega^i (chi_0 = ``chi`` of conductor prime to p)."""
    chi = chi.primitive()
    d = chi.modulus
    if d % p == 0:
        raise DomainError("the tame character must have conductor prime to p")
    if chi.parity * (-1) ** omega_power != 1:
        raise OddCharacter("chi omega^i must be even")
    if chi.is_trivial and omega_power % (p - 1) == 0:
        raise TrivialCharacter("the trivial character has a pole")
    N = m_max + 1
    W = precision + GUARD
    if embedding is None:
        embedding = PAdicEmbedding.for_orders(p, [chi.order, p - 1, d], W)
    if c is None:
        c = choose_regularizer(chi, p, omega_power, embedding)
    if math.gcd(c, d * p) != 1:
        raise DegenerateRegularizer(f"c={c} must be prime to {d * p}")
    chi_vals = _character_zp_values(chi, embedding, p, W + 2 * N + 8)

    # chi(c) = chi_0(c) omega^i(c) in Z_p
    chi_c = chi_vals[c % d] * pow(_teich(c, p, W + 2 * N + 8), omega_power, p ** (W + 2 * N + 8))
    if (chi_c - 1) % p == 0:
        raise DegenerateRegularizer(f"chi(c) = 1 mod p for c={c}")

    M = d * p**N
    T = -(-(W + 2) // N) + 1
    B = bernoulli_numbers(T + 2)
    g0 = 0
    for t in range(T + 1):
        g0 = max(g0, -(vp(B[t + 1] / (t + 1), p) or 0), vp(t + 1, p) or 0)
    G = N + g0
    Wext = W + G
    P = p**Wext
    pG = Fraction(p) ** G
    alpha = [_frac_mod(pG * Fraction(M) ** t * B[t + 1] / (t + 1), p, Wext) for t in range(T + 1)]
    beta = [_frac_mod(-((-1) ** (t + 1)) * pG / (M * (t + 1)), p, Wext) for t in range(T + 1)]
    cinv_P = pow(c, -1, P)
    cinv_M = pow(c, -1, M)
    cpow = [pow(c, t + 1, P) for t in range(T + 1)]
    binom = [[math.comb(t, s) for s in range(T + 1)] for t in range(T + 1)]

    teich_cache = {a: _teich(a, p, Wext) for a in range(1, p)}
    omega_w = {a: pow(teich_cache[a], omega_power - 1, P) for a in range(1, p)}
    chi_w = {a: v % P for a, v in chi_vals.items()}

    def S(b: int) -> list[int]:
        out = []
        bp = b
        for t in range(T + 1):
            bp = bp * b % P if t else b
            out.append((alpha[t] + beta[t] * bp) % P)
        return out

    balls = []
    for b in range(1, M):
        if b % p == 0 or math.gcd(b, d) != 1:
            continue
        bprime = b * cinv_M % M
        delta = (c * bprime - b) * cinv_P % P
        Sb, Sbp = S(b), S(bprime)
        dpow = [1]
        for _ in range(T):
            dpow.append(dpow[-1] * delta % P)
        mts = []
        for t in range(T + 1):
            inner = 0
            for s in range(t + 1):
                inner += binom[t][s] * dpow[t - s] * Sbp[s]
            mts.append((Sb[t] - cpow[t] * inner) % P)
        tb = teich_cache[b % p]
        ang = b * pow(tb, -1, P) % P
        w = chi_w[b % d] * omega_w[b % p] % P
        balls.append(_Ball(gamma_log(b, p, N), w, ang, pow(b, -1, P), mts))

    dr = DeligneRibetMeasure(chi, omega_power, p, m_max, c, precision,
                             IwasawaMeasure.from_top(p, [0] * p**m_max, precision),
                             IwasawaMeasure.from_top(p, [0] * p**m_max, precision),
                             chi_c % p**W, embedding, balls, G, W)
    top = dr.class_sums(-1)
    theta_c = IwasawaMeasure.from_top(p, [a % p**precision for a in top], precision)
    jc = gamma_log(c, p, N)
    r = [0] * p**m_max
    r[0] = 1
    r[jc] = (r[jc] - chi_c) % p**precision
    r_c = IwasawaMeasure.from_top(p, r, precision)
    theta = -(theta_c * group_algebra_inverse(r_c))
    dr.theta_c = theta_c
    dr.measure = theta
    return dr


def gamma_characters(p: int, conductors: Iterable[int]) -> list[FiniteOrderCharacter]:
    """All characters of Gamma with conductor p^n for n in ``conductors`` (0 = trivial)."""
    out = []
    for n in conductors:
        if n <= 1:
            out.append(FiniteOrderCharacter(p, 0))
            continue
        for k in range(p ** (n - 1)):
            if k % p:
                out.append(FiniteOrderCharacter(p, n, k))
    return out


def conductor_exponent(cond: int, p: int) -> int:
    if cond == 1:
        return 0
    n = vp(cond, p)
    if p**n != cond:
        raise DomainError(f"{cond} is not a power of {p}")
    return n


def verify_interpolation(dr: DeligneRibetMeasure, etas: Sequence[FiniteOrderCharacter],
                         ns: Sequence[int], required: int = 8,
                         level_path: bool = True) -> list[Check]:
    """eta kappa^n(theta) against the exact Bernoulli expression."""
    checks = []
    for eta in etas:
        emb = dr.embedding_for(eta)
        for n in ns:
            lhs = _to_ring(dr.evaluate(eta, n), emb.ring)
            rhs = dr.oracle(eta, n)
            res = _residual(lhs, rhs)
            detail = {}
            if level_path:
                lv, cert = dr.evaluate_level(eta, n)
                detail["level_residual"] = str(_residual(_to_ring(lv, emb.ring), rhs))
                detail["level_certificate"] = str(cert)
            checks.append(Check("interpolation", {"eta": eta.label(), "n": n, "c": dr.c},
                                lhs, rhs, min(res, Fraction(dr.precision)), dr.precision,
                                required, detail))
    return checks


def regularizer_independence(chi: DirichletData, p: int, c1: int, c2: int,
                             etas: Sequence[FiniteOrderCharacter], ns: Sequence[int],
                             m_max: int = 4, precision: int = 12, required: int = 10,
                             omega_power: int = 0) -> list[Check]:
    a = deligne_ribet(chi, p, m_max, c1, precision, omega_power)
    b = deligne_ribet(chi, p, m_max, c2, precision, omega_power)
    checks = []
    for eta in etas:
        for n in ns:
            x, y = a.evaluate(eta, n), b.evaluate(eta, n)
            checks.append(Check("regularizer_independence",
                                {"eta": eta.label(), "n": n, "c": f"{c1},{c2}"},
                                x, y, min(_residual(x, y), Fraction(precision)), precision,
                                required))
    return checks


def level_stability(dr: DeligneRibetMeasure, etas: Sequence[FiniteOrderCharacter],
                    ns: Sequence[int], level: int | None = None) -> list[Check]:
    """Level m-1 and level m evaluations agree modulo the coarser certificate."""
    m = dr.m_max if level is None else level
    checks = []
    for eta in etas:
        emb = dr.embedding_for(eta)
        for n in ns:
            a, ca = dr.evaluate_level(eta, n, m - 1)
            b, cb = dr.evaluate_level(eta, n, m)
            cert = min(ca, cb)
            res = _residual(_to_ring(a, emb.ring), _to_ring(b, emb.ring))
            checks.append(Check("level_stability", {"eta": eta.label(), "n": n,
                                                    "levels": f"{m - 1},{m}"},
                                a, b, min(res, Fraction(cert)), cert, cert))
    return checks


def lp_eval(dr: DeligneRibetMeasure, s) -> PadicValue:
    """L_p(s, chi) = kappa^{1-s}(theta) for s in Z_p, with precision certificate."""
    p = dr.p
    if isinstance(s, PadicValue):
        if s.valuation < 0:
            raise DomainError("s must lie in Z_p")
        width = dr.W + dr._G + 4
        if s.precision < width:
            width = s.precision
        n = (1 - s.residue(min(s.precision, width))) % p**width
        cert = min(dr.precision, s.precision)
    else:
        s = Fraction(s)
        if s.denominator != 1:
            width = dr.W + dr._G + 4
            n = (1 - residue_mod(s, p, width)) % p**width
        else:
            n = 1 - int(s)
        cert = dr.precision
    val = dr.evaluate(FiniteOrderCharacter(p, 0), n).to_padic()
    return val.truncate(min(cert, val.precision))


# ---------------------------------------------------------------------------
# the odd case


@dataclass
class OddTheta:
    """theta = Tw_{-1} iota(theta^DR of chi^{-1} omega) for odd chi.

    Tw_{-1} iota = iota Tw_1, and Tw_1 of theta^DR is projected exactly to
    level m from the ball moments, so ``measure`` is exact at its level.
    ``stickelberger`` is the same element built directly from E_{1,c}.
    """

    chi: DirichletData
    p: int
    dr: DeligneRibetMeasure
    measure: IwasawaMeasure
    stickelberger: IwasawaMeasure

    def eval_character(self, eta: FiniteOrderCharacter) -> LocalElement:
        """eta(theta) = (eta^{-1} kappa)(theta^DR), exact."""
        return self.dr.evaluate(eta.inverse(), 1)

    def eval_character_level(self, eta: FiniteOrderCharacter) -> LocalElement:
        ring = make_ring(1, max(eta.conductor_exp, 0), self.p, self.dr.precision)
        return self.measure.eval_character(eta, ring)

    def oracle(self, eta: FiniteOrderCharacter) -> LocalElement:
        """L(chi^{-1} eta^{-1}, 0) = -B_{1, chi^{-1} eta^{-1}} (eta nontrivial)."""
        if eta.is_trivial:
            raise TrivialCharacter("the Euler factor at p is not 1 for trivial eta")
        psi = self.chi.inverse() * DirichletData.from_gamma_character(eta.inverse())
        exact = -bernoulli_general(1, psi.primitive())
        return self.dr.embedding_for(eta).image(exact)

    def derivative_exact(self, digits: int | None = None) -> PadicValue:
        """d/ds kappa^s(theta) at 0 = -(d/dn) kappa^n(theta^DR) at n=1, by a
        symmetric difference with step p^t through the exact route."""
        dr = self.dr
        p = self.p
        t = max(1, dr.W // 3) if digits is None else digits
        h = p**t
        one = FiniteOrderCharacter(p, 0)
        fp = dr.evaluate(one, 1 + h).to_padic()
        fm = dr.evaluate(one, 1 - h).to_padic()
        return -(fp - fm) / (2 * h)


def odd_theta(chi: DirichletData, p: int, m_max: int = 4, c: int | None = None,
              precision: int = 12) -> OddTheta:
    chi = chi.primitive()
    if chi.is_even:
        raise DomainError("odd_theta needs an odd character")
    dual = chi.inverse()
    dr = deligne_ribet(dual, p, m_max, c, precision, omega_power=1)
    theta = dr.twisted_measure(1).involution()
    return OddTheta(chi, p, dr, theta, stickelberger_odd(chi, p, m_max, dr.c, precision))


def stickelberger_odd(chi: DirichletData, p: int, m_max: int, c: int,
                      precision: int) -> IwasawaMeasure:
    """-(1 - chi^{-1}(c) c [<c>^{-1}])^{-1} sum_b chi^{-1}(b) E_{1,c}(b) [<b>^{-1}]."""
    d = chi.modulus
    N = m_max + 1
    M = d * p**N
    W = precision
    P = p**W
    inv = chi.inverse()
    if (p - 1) % inv.order:
        raise DomainError("character values must lie in Z_p")
    emb = PAdicEmbedding.for_orders(p, [inv.order, p - 1], W)
    vals = _character_zp_values(inv, emb, p, W)
    cinv = pow(c, -1, M)
    size = p**m_max
    acc = [Fraction(0)] * size
    for b in range(1, M):
        if b % p == 0 or math.gcd(b, d) != 1:
            continue
        bp = b * cinv % M
        e1c = (Fraction(b, M) - Fraction(1, 2)) - c * (Fraction(bp, M) - Fraction(1, 2))
        j = (-gamma_log(b, p, N)) % size
        acc[j] += e1c * vals[b % d]
    top = [_frac_mod(a, p, W) for a in acc]
    S = IwasawaMeasure.from_top(p, top, W)
    jc = (-gamma_log(c, p, N)) % size
    r = [0] * size
    r[0] = 1
    r[jc] = (r[jc] - vals[c % d] * c) % P
    return -(S * group_algebra_inverse(IwasawaMeasure.from_top(p, r, W)))


# ---------------------------------------------------------------------------
# EX harness (even abelian case)


@dataclass
class ExReport:
    checks: list[Check]
    constant: str | None
    constants_seen: list[str]
    mode: str

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks) and self.constant is not None

    def to_json(self) -> dict:
        return {"mode": self.mode, "matched_constant": self.constant,
                "constants_per_eta": self.constants_seen,
                "checks": [c.to_json() for c in self.checks], "pass": self.passed}


def leopoldt_value(psi: DirichletData, emb: PAdicEmbedding) -> tuple[LocalElement, LocalElement]:
    """(L_p(1, psi), log_p(eps_psi)) with L_p(1, psi) = -(1 - psi(p)/p)(g(psi)/f) log_p(eps_psi)."""
    psi = psi.primitive()
    f = psi.modulus
    eps = cyclotomic_unit(psi, emb)
    logp = eps.log_p(emb)
    factor = CyclotomicNumber.rational(1) - psi.value(emb.p) * Fraction(1, emb.p)
    coeff = -(factor * gauss_sum_global(psi)) * Fraction(1, f)
    return emb.image(coeff) * logp, logp


def _ex_candidates(d: int) -> list[tuple[str, Fraction]]:
    out = []
    for sign in (1, -1):
        for e in (d, -d, 0):
            val = Fraction(sign) * Fraction(2) ** e
            name = f"{'-' if sign < 0 else ''}2^{e}" if e else ("-1" if sign < 0 else "1")
            out.append((name, val))
    # (-2)^d first so it wins ties
    target = Fraction(-2) ** d
    out.sort(key=lambda kv: kv[1] != target)
    return out


def verify_EX(chi: DirichletData, dr: DeligneRibetMeasure, etas: Sequence[FiniteOrderCharacter],
              eigenvalues_plus: Sequence[CyclotomicNumber] | None = None,
              required: int = 8, scale: int = 1, mode: str = "exact",
              bits: int = 256) -> ExReport:
    """Compare eta(theta^DR) with the EX right side and with Leopoldt's formula.

    EX right side: E * log_p(eps) * j(L(psi, 1)/(2 log_inf(eps))), where the
    quotient L/log_inf = 1/g(psi^{-1}) is exact and checked numerically.
    ``scale`` multiplies theta by a unit (mode "unit" then only asks for a
    constant unit ratio).
    """
    from .stark import euler_factor_exact

    chi = chi.primitive()
    p = dr.p
    d = 1
    if eigenvalues_plus is None:
        eigenvalues_plus = [chi.value(p)]
    checks: list[Check] = []
    constants = []
    ratios = []
    for eta in etas:
        emb = dr.embedding_for(eta)
        psi = chi if eta.is_trivial else (chi * DirichletData.from_gamma_character(eta)).primitive()
        lhs = _to_ring(dr.eval_character(eta), emb.ring) * scale
        leo, logp = leopoldt_value(psi, emb)
        # exact algebraic quotient and its numerical confirmation
        q = gauss_sum_global(psi.inverse()).inverse()
        eps = cyclotomic_unit(psi, emb, bits)
        with mpmath.workprec(bits):
            Linf = l_value_at_one(psi, bits)
            direct = l_value_at_one_digamma(psi, bits)
            reg_inf = eps.log_infinity(bits)
            err = abs(direct / reg_inf - q.to_complex(bits))
            err_l = abs(direct - Linf)
        E = euler_factor_exact(eigenvalues_plus, [], p) if eta.is_trivial else CyclotomicNumber.rational(1)
        rhs = emb.image(E * q * Fraction(1, 2)) * logp
        matched = None
        if mode == "exact":
            for name, C in _ex_candidates(d):
                if _residual(lhs, rhs * C) >= required:
                    matched = name
                    break
            constants.append(matched)
            C = dict(_ex_candidates(d)).get(matched, Fraction(-2) ** d) if matched else Fraction(-2) ** d
            res = _residual(lhs, rhs * C)
        else:
            ratio = lhs / rhs
            ratios.append(ratio)
            res = _residual(ratio, ratios[0])
            v = ratio.valuation()
            constants.append("unit" if v == 0 else f"valuation {v}")
        inputs = {"eta": eta.label(), "psi_modulus": psi.modulus}
        detail = {"complex_quotient_error": mpmath.nstr(err, 5),
                  "complex_L_error": mpmath.nstr(err_l, 5),
                  "complex_quotient_ok": bool(err < mpmath.mpf(2) ** (-bits // 2)),
                  "euler_factor": str(E.rational_value()) if E.rational_value() is not None else "algebraic"}
        checks.append(Check("ex", inputs, lhs, rhs, min(res, Fraction(dr.precision)),
                            dr.precision, required, detail))
        if scale == 1:
            checks.append(Check("leopoldt", inputs, lhs, leo,
                                min(_residual(lhs, leo), Fraction(dr.precision)),
                                dr.precision, required))
    if mode == "exact":
        ok = constants and all(c == constants[0] for c in constants) and constants[0] is not None
        constant = constants[0] if ok else None
    else:
        ok = all(c == "unit" for c in constants)
        constant = "unit" if ok else None
    return ExReport(checks, constant, [str(c) for c in constants], mode)


# ---------------------------------------------------------------------------
# EZC harness (Gross case)


@dataclass(frozen=True)
class QuadraticPUnit:
    """u = alpha/alpha_bar for alpha = a + b sqrt(D) in Q(sqrt(D)) of norm +-p^k."""

    D: int
    a: Fraction
    b: Fraction
    p: int
    sqrt_seed: int
    label: str = ""

    @classmethod
    def from_json(cls, data: dict) -> "QuadraticPUnit":
        try:
            return cls(int(data["D"]), Fraction(data["alpha"][0]), Fraction(data["alpha"][1]),
                       int(data["p"]), int(data["sqrt_seed"]), data.get("label", ""))
        except KeyError as exc:
            raise MissingUnitData(f"unit data lacks {exc}") from exc

    def to_json(self) -> dict:
        return {"D": str(self.D), "alpha": [str(self.a), str(self.b)], "p": str(self.p),
                "sqrt_seed": str(self.sqrt_seed), "label": self.label}

    def norm(self) -> Fraction:
        return self.a**2 - self.D * self.b**2

    def sqrt(self, M: int) -> PadicValue:
        return hensel_lift([-self.D, 0, 1], self.sqrt_seed, self.p, M)

    def columns(self, M: int) -> tuple[PadicValue, int]:
        """(log_p(iota_p(u)), ord_p(iota_p(u))) for u = alpha/alpha_bar."""
        s = self.sqrt(M + 4)
        alpha = s * self.b + self.a
        alpha_bar = -(s * self.b) + self.a
        ordp = alpha.valuation - alpha_bar.valuation
        lg = log_iw(alpha.unit_part()) - log_iw(alpha_bar.unit_part())
        return lg.truncate(min(lg.precision, M)), ordp


@dataclass
class EzcReport:
    checks: list[Check]
    e: int
    l_invariant: PadicValue | None
    vanishing: dict

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks)

    def to_json(self) -> dict:
        return {"e": str(self.e),
                "l_invariant": None if self.l_invariant is None else self.l_invariant.to_json(),
                "vanishing": self.vanishing,
                "checks": [c.to_json() for c in self.checks], "pass": self.passed}


def verify_EZC_gross(chi: DirichletData, p: int, unit: QuadraticPUnit | None,
                     m_max: int = 4, precision: int = 12, c: int | None = None,
                     theta: OddTheta | None = None) -> EzcReport:
    """(1/e!) L_p^{(e)}(chi^{-1} omega, 0) against (-1)^e L E L(chi^{-1}, 0)."""
    from .stark import l_invariant_matrices

    chi = chi.primitive()
    if chi.is_even:
        raise DomainError("the Gross case needs an odd character")
    if theta is None:
        theta = odd_theta(chi, p, m_max, c, precision)
    chi_p = chi.inverse().value(p)
    e = 1 if chi_p == 1 else 0
    L0 = -bernoulli_general(1, chi.inverse())
    L0q = L0.rational_value()
    checks = []
    one = FiniteOrderCharacter(p, 0)
    if e == 0:
        # no trivial zero: value at the trivial character with the Euler factor
        E = CyclotomicNumber.rational(1) - chi_p
        rhs = theta.dr.embedding.image(E * L0)
        lhs = _to_ring(theta.eval_character(one), rhs.ring)
        checks.append(Check("ezc_value", {"chi": chi.label, "e": 0}, lhs, rhs,
                            min(_residual(lhs, rhs), Fraction(precision)), precision,
                            precision - 2))
        return EzcReport(checks, 0, None, {})
    if unit is None:
        raise MissingUnitData("the Gross case needs the p-unit columns")
    if L0q is None:
        raise DomainError("L(chi^{-1}, 0) must be rational here")
    W = precision + GUARD
    logu, ordu = unit.columns(W)
    Linv = l_invariant_matrices([], [], [], [[logu]], [[PadicValue.from_rational(ordu, p, W)]], p, W)
    rhs = -(Linv * L0q)
    order, certain = theta.measure.vanishing_order()
    at_one = theta.measure.eval_character(one)
    vanishing = {"order": str(order), "certain": certain,
                 "eval_at_trivial_zero_at_precision": at_one.valuation() is None or
                 at_one.valuation() >= precision}
    der = theta.measure.derivative_at_trivial(1)
    res = _padic_residual(der.value, rhs)
    checks.append(Check("ezc_derivative_level", {"chi": chi.label, "e": 1, "m_max": m_max},
                        der.value, rhs, min(res, Fraction(der.certified_digits)),
                        der.certified_digits, m_max - 1,
                        {"level": str(der.level)}))
    exact = theta.derivative_exact()
    checks.append(Check("ezc_derivative_exact", {"chi": chi.label, "e": 1},
                        exact, rhs, min(_padic_residual(exact, rhs), Fraction(exact.precision)),
                        exact.precision, max(m_max - 1, exact.precision - 2)))
    return EzcReport(checks, 1, Linv, vanishing)


def _padic_residual(a: PadicValue, b: PadicValue) -> Fraction:
    diff = a - b
    if diff.mantissa == 0:
        return Fraction(diff.precision)
    return Fraction(diff.valuation)
