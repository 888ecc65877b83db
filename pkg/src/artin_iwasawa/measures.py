"""Finite-level Iwasawa measures on Gamma = 1 + pZ_p.

A measure is stored as a tower: level m holds the coefficients c_0..c_{p^m-1}
of sum_j c_j [gamma_0^j] in O[Gamma_m], with gamma_0 the generator acting by
kappa(gamma_0) = 1 + p.  Coefficients are integers modulo p^precision (scaled
by a common denominator p^k), or LocalElements when the coefficient ring is a
finite extension.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .cyclofield import FiniteOrderCharacter, LocalElement, LocalRing, make_ring
from .errors import InsufficientVanishing, LevelUnavailable, NotDivisible
from .padic import PadicValue, ZeroTest, log_iw, vp


def _ilog(n: int, p: int) -> int:
    t = 0
    while p ** (t + 1) <= n:
        t += 1
    return t


@dataclass(frozen=True)
class IwasawaMeasure:
    """O[[Gamma]] element known at levels 0..m_max.

    ``levels[m]`` is a tuple of p^m coefficients; values are c / p^denominator
    modulo p^precision.
    """

    p: int
    levels: tuple[tuple[int, ...], ...]
    precision: int
    denominator: int = 0
    coeff_ring: str = "Zp"

    def __post_init__(self):
        mod = self.p ** (self.precision + self.denominator)
        lv = tuple(tuple(int(c) % mod for c in level) for level in self.levels)
        for m, level in enumerate(lv):
            if len(level) != self.p**m:
                raise ValueError(f"level {m} needs {self.p**m} coefficients")
        object.__setattr__(self, "levels", lv)

    # constructors

    @classmethod
    def from_top(cls, p: int, top: Sequence[int], precision: int,
                 denominator: int = 0) -> "IwasawaMeasure":
        """Build the whole tower from the top level by projection."""
        m = round(math.log(len(top), p)) if len(top) > 1 else 0
        if p**m != len(top):
            raise ValueError("top level length must be a power of p")
        mod = p ** (precision + denominator)
        levels = [tuple(int(c) % mod for c in top)]
        for j in range(m, 0, -1):
            cur = levels[0]
            size = p ** (j - 1)
            levels.insert(0, tuple(sum(cur[i::size]) % mod for i in range(size)))
        return cls(p, tuple(levels), precision, denominator)

    @classmethod
    def dirac(cls, p: int, j: int, m_max: int, precision: int) -> "IwasawaMeasure":
        top = [0] * p**m_max
        top[j % p**m_max] = 1
        return cls.from_top(p, top, precision)

    @classmethod
    def gamma_minus_one(cls, p: int, m_max: int, precision: int, c: int = 1) -> "IwasawaMeasure":
        """[gamma_0^c] - 1."""
        top = [0] * p**m_max
        top[c % p**m_max] += 1
        top[0] -= 1
        return cls.from_top(p, top, precision)

    # basic data

    @property
    def m_max(self) -> int:
        return len(self.levels) - 1

    @property
    def modulus(self) -> int:
        return self.p ** (self.precision + self.denominator)

    def level(self, m: int) -> tuple[int, ...]:
        if m < 0 or m > self.m_max:
            raise LevelUnavailable(f"level {m} not in 0..{self.m_max}")
        return self.levels[m]

    def coefficient(self, m: int, j: int) -> PadicValue:
        return PadicValue(self.p, self.level(m)[j], -self.denominator, self.precision)

    def top(self) -> tuple[int, ...]:
        return self.levels[-1]

    def is_compatible(self) -> bool:
        p, mod = self.p, self.modulus
        for m in range(1, len(self.levels)):
            cur, low = self.levels[m], self.levels[m - 1]
            size = p ** (m - 1)
            if any((sum(cur[i::size]) - low[i]) % mod for i in range(size)):
                return False
        return True

    def _same(self, other: "IwasawaMeasure") -> tuple[int, int, int]:
        if other.p != self.p:
            raise ValueError("prime mismatch")
        m = min(self.m_max, other.m_max)
        prec = min(self.precision, other.precision)
        den = max(self.denominator, other.denominator)
        return m, prec, den

    def _scaled_top(self, m: int, den: int) -> list[int]:
        s = self.p ** (den - self.denominator)
        return [c * s for c in self.level(m)]

    # ring structure

    def __add__(self, other: "IwasawaMeasure") -> "IwasawaMeasure":
        m, prec, den = self._same(other)
        a, b = self._scaled_top(m, den), other._scaled_top(m, den)
        return IwasawaMeasure.from_top(self.p, [x + y for x, y in zip(a, b)], prec, den)

    def __neg__(self) -> "IwasawaMeasure":
        return IwasawaMeasure.from_top(self.p, [-c for c in self.top()], self.precision,
                                       self.denominator)

    def __sub__(self, other: "IwasawaMeasure") -> "IwasawaMeasure":
        return self + (-other)

    def scale(self, a) -> "IwasawaMeasure":
        """Multiply by a p-adic scalar (int, Fraction or PadicValue)."""
        if isinstance(a, PadicValue):
            q = a.to_fraction()
            prec = min(self.precision + a.valuation, a.precision + self.valuation_lower_bound())
        else:
            q = Fraction(a)
            prec = self.precision + (vp(q, self.p) if q else self.precision)
        if q == 0:
            return IwasawaMeasure.from_top(self.p, [0] * len(self.top()), self.precision)
        v = vp(q, self.p)
        unit = q / Fraction(self.p) ** v
        den = self.denominator + max(0, -v)
        mod = self.p ** (prec + den)
        u = unit.numerator * pow(unit.denominator, -1, mod)
        shift = self.p ** max(0, v)
        top = [c * u * shift * self.p ** (den - self.denominator - max(0, -v)) for c in self.top()]
        return IwasawaMeasure.from_top(self.p, top, prec, den)

    def valuation_lower_bound(self) -> int:
        vals = [vp(c, self.p) for c in self.top() if c]
        return (min(vals) if vals else self.precision) - self.denominator

    def __mul__(self, other: "IwasawaMeasure") -> "IwasawaMeasure":
        """Convolution in O[Gamma_m] at the common top level."""
        if not isinstance(other, IwasawaMeasure):
            return self.scale(other)
        m, prec, _ = self._same(other)
        size = self.p**m
        a, b = self.level(m), other.level(m)
        den = self.denominator + other.denominator
        mod = self.p ** (prec + den)
        out = [0] * size
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    if bj:
                        out[(i + j) % size] += ai * bj
        prec = min(self.precision + other.valuation_lower_bound(),
                   other.precision + self.valuation_lower_bound())
        return IwasawaMeasure.from_top(self.p, [c % mod for c in out], prec, den)

    __rmul__ = __mul__

    def __pow__(self, e: int) -> "IwasawaMeasure":
        out = IwasawaMeasure.dirac(self.p, 0, self.m_max, self.precision)
        for _ in range(e):
            out = out * self
        return out

    def truncate(self, m: int) -> "IwasawaMeasure":
        return IwasawaMeasure(self.p, self.levels[: m + 1], self.precision, self.denominator)

    def equals(self, other: "IwasawaMeasure") -> bool:
        d = self - other
        return not any(d.top())

    # evaluations

    def total_mass(self) -> PadicValue:
        return self.coefficient(0, 0)

    def amice(self, m: int | None = None) -> list[Fraction]:
        """Coefficients of sum_j c_j (1+T)^j reduced mod (1+T)^{p^m} - 1.

        Returned in the T-basis, degree < p^m.
        """
        m = self.m_max if m is None else m
        c = self.level(m)
        size = len(c)
        out = [0] * size
        for j, cj in enumerate(c):
            if cj:
                for i in range(j + 1):
                    out[i] += cj * math.comb(j, i)
        den = self.p**self.denominator
        mod = self.modulus
        return [Fraction(v % mod, den) for v in out]

    def eval_character(self, eta: FiniteOrderCharacter, ring: LocalRing | None = None) -> LocalElement:
        """sum_j c_j eta(gamma_0)^j."""
        n = eta.conductor_exp
        m = max(n - 1, 0)
        if m > self.m_max:
            raise LevelUnavailable(f"{eta.label()} needs level {m}")
        if ring is None:
            ring = make_ring(1, max(n, 0), self.p, self.precision + self.denominator)
        c = self.level(m)
        out = [0] * (ring.E * ring.f)
        for j, cj in enumerate(c):
            if cj:
                t = eta.gamma_exponent(j) * (ring.pn // eta.order) if not eta.is_trivial else 0
                ring._add_zeta_power(out, t % ring.pn if ring.n else 0,
                                     [cj] + [0] * (ring.f - 1))
        return ring.element(out, k=self.denominator,
                            prec=min(self.precision, ring.M - self.denominator))

    def eval_kappa(self, eta: FiniteOrderCharacter, s, level: int | None = None,
                   ring: LocalRing | None = None) -> LocalElement:
        """sum_j c_j eta(gamma_0)^j (1+p)^{j s} at the given (default deepest) level.

        Exact for s = 0; otherwise accurate modulo p^{level+1} times a unit.
        """
        m = self.m_max if level is None else level
        n = eta.conductor_exp
        if max(n - 1, 0) > m:
            raise LevelUnavailable(f"{eta.label()} needs level {n - 1}")
        if ring is None:
            ring = make_ring(1, max(n, 0), self.p, self.precision + self.denominator)
        p = self.p
        mod = p ** (self.precision + self.denominator)
        c = self.level(m)
        if isinstance(s, PadicValue):
            s_res = s.residue()
        else:
            s_res = int(s)
        gen = pow(1 + p, s_res, mod) if s_res >= 0 else pow(pow(1 + p, -1, mod), -s_res, mod)
        out = [0] * (ring.E * ring.f)
        w = 1
        for j, cj in enumerate(c):
            if cj:
                t = eta.gamma_exponent(j) * (ring.pn // eta.order) if not eta.is_trivial else 0
                ring._add_zeta_power(out, t % ring.pn if ring.n else 0,
                                     [cj * w % mod] + [0] * (ring.f - 1))
            w = w * gen % mod
        prec = self.precision if s_res == 0 else min(self.precision, m + 1 + self.valuation_lower_bound())
        return ring.element(out, k=self.denominator, prec=min(prec, ring.M - self.denominator))

    def eval_kappa_value(self, s) -> PadicValue:
        """eval_kappa at the trivial character as a p-adic number."""
        return self.eval_kappa(FiniteOrderCharacter(self.p, 0), s).to_padic()

    # augmentation ideal

    def amice_at_trivial(self, m: int | None = None) -> list[PadicValue]:
        """Amice coefficients a_i at level m with certified precision.

        The level-m series agrees with the true one modulo
        omega_m(T) = (1+T)^{p^m} - 1, whose T^i coefficient has valuation
        m - v_p(i); so a_i is certified modulo p^{m - floor(log_p i)}.
        """
        m = self.m_max if m is None else m
        series = self.amice(m)
        out = []
        for i, a in enumerate(series):
            cert = self.precision
            if i:
                cert = min(cert, m - _ilog(i, self.p) - self.denominator)
            if cert <= 0:
                break
            out.append(PadicValue.from_rational(a, self.p, cert))
        return out

    def vanishing_order(self) -> tuple[int, bool]:
        """(order, certain): order of vanishing at the trivial character.

        The order is the first i with a_i nonzero at precision, where a_i is the
        Amice coefficient; ``certain`` is False when every checked coefficient
        is zero at precision.
        """
        for i, a in enumerate(self.amice_at_trivial()):
            if a.is_zero() is ZeroTest.NONZERO:
                return i, True
        return len(self.top()), False

    def divide_gamma_minus_1(self) -> "IwasawaMeasure":
        """mu with ([gamma_0] - 1) mu = self.

        At a finite level the quotient is only defined up to the norm element
        sum_j [gamma_0^j]; we return the tower whose top level has vanishing
        coefficient at the identity.  Its evaluations at nontrivial characters
        are exact and its total mass is the level-m derivative sum_j j c_j.
        """
        if self.total_mass().is_zero() is ZeroTest.NONZERO:
            raise NotDivisible("measure does not vanish at the trivial character")
        top = self.top()
        mu = [0] * len(top)
        acc = 0
        for j in range(1, len(top)):
            acc += top[j]
            mu[j] = -acc
        return IwasawaMeasure.from_top(self.p, mu, self.precision, self.denominator)

    def derivative_at_trivial(self, e: int, level: int | None = None) -> "Derivative":
        """(1/e!) d^e/ds^e kappa^s at s = 0, with a level certificate."""
        m = self.m_max if level is None else level
        order, certain = self.vanishing_order()
        if order < e and certain:
            raise InsufficientVanishing(f"vanishing order {order} < {e}")
        p = self.p
        c = self.level(m)
        W = self.precision + self.denominator + 2 * e + _ilog(max(e, 1), p) + 2
        L = log_iw(PadicValue(p, 1 + p, 0, W))
        total = PadicValue.zero(p, W)
        for j, cj in enumerate(c):
            if cj:
                total = total + PadicValue.from_rational(cj * j**e, p, W)
        value = total * (L**e) / math.factorial(e) / Fraction(p) ** self.denominator
        # (j + p^m t)^e - j^e is divisible by p^m and log(1+p)^e by p^e
        cert = m + e - vp(math.factorial(e), p) + self.valuation_lower_bound()
        cert = min(cert, value.precision)
        return Derivative(value.truncate(cert), cert, m)

    # twists

    def involution(self) -> "IwasawaMeasure":
        top = self.top()
        size = len(top)
        return IwasawaMeasure.from_top(self.p, [top[(-j) % size] for j in range(size)],
                                       self.precision, self.denominator)

    def twist(self, s: int) -> "IwasawaMeasure":
        """c_j -> c_j kappa(gamma_0^j)^s at the top level (exact at the level's
        own precision only modulo p^{m+1} for the projections)."""
        p, mod = self.p, self.modulus
        base = pow(1 + p, s, mod) if s >= 0 else pow(pow(1 + p, -1, mod), -s, mod)
        top = self.top()
        out = []
        w = 1
        for cj in top:
            out.append(cj * w % mod)
            w = w * base % mod
        return IwasawaMeasure.from_top(p, out, self.precision, self.denominator)

    def twist_minus1(self) -> "IwasawaMeasure":
        return self.twist(-1)

    # serialization

    def to_json(self) -> dict:
        return {"prime": str(self.p), "coeff_ring": self.coeff_ring,
                "m_max": str(self.m_max), "denominator_exponent": str(self.denominator),
                "levels": [[str(c) for c in level] for level in self.levels],
                "precision": str(self.precision)}

    @classmethod
    def from_json(cls, data: dict) -> "IwasawaMeasure":
        return cls(int(data["prime"]), tuple(tuple(int(c) for c in lv) for lv in data["levels"]),
                   int(data["precision"]), int(data.get("denominator_exponent", 0)),
                   data.get("coeff_ring", "Zp"))


@dataclass(frozen=True)
class Derivative:
    """Derivative value plus the number of p-adic digits certified by the level."""

    value: PadicValue
    certified_digits: int
    level: int


def group_algebra_inverse(mu: IwasawaMeasure) -> IwasawaMeasure:
    """Inverse of a measure of unit total mass, at the top level."""
    p = mu.p
    if mu.total_mass().is_zero() is not ZeroTest.NONZERO or mu.total_mass().valuation != 0:
        raise NotDivisible("total mass is not a unit")
    one = IwasawaMeasure.dirac(p, 0, mu.m_max, mu.precision)
    # Newton iteration x <- x (2 - mu x)
    t0 = mu.total_mass().inverse()
    x = one.scale(t0)
    two = one.scale(2)
    for _ in range((mu.precision * p**mu.m_max).bit_length() + 2):
        x = x * (two - mu * x)
    return x


@dataclass(frozen=True)
class FractionalMeasure:
    """numerator / ([gamma_0] - 1)^pole_order."""

    numerator: IwasawaMeasure
    pole_order: int = 0

    def as_measure(self) -> IwasawaMeasure:
        if self.pole_order:
            raise NotDivisible("measure has a pole at the trivial character")
        return self.numerator

    def times_gamma_minus_one(self, k: int = 1) -> "FractionalMeasure":
        g = IwasawaMeasure.gamma_minus_one(self.numerator.p, self.numerator.m_max,
                                           self.numerator.precision)
        if k <= self.pole_order:
            return FractionalMeasure(self.numerator, self.pole_order - k)
        return FractionalMeasure(self.numerator * g ** (k - self.pole_order), 0)

    def eval_character(self, eta: FiniteOrderCharacter) -> LocalElement:
        if eta.is_trivial and self.pole_order:
            raise NotDivisible("pole at the trivial character")
        val = self.numerator.eval_character(eta)
        if not self.pole_order:
            return val
        r = val.ring
        den = (eta.root_in(r, eta.gamma_exponent(1)) - r.one()) ** self.pole_order
        return val * den.inverse()

    def normalized(self) -> "FractionalMeasure":
        """Cancel ([gamma_0]-1) factors from the numerator when possible."""
        num, k = self.numerator, self.pole_order
        while k > 0 and num.total_mass().is_zero() is ZeroTest.UNKNOWN:
            num = num.divide_gamma_minus_1()
            k -= 1
        return FractionalMeasure(num, k)

    def __add__(self, other: "FractionalMeasure") -> "FractionalMeasure":
        k = max(self.pole_order, other.pole_order)
        a = self.numerator
        b = other.numerator
        g = IwasawaMeasure.gamma_minus_one(a.p, min(a.m_max, b.m_max), min(a.precision, b.precision))
        if self.pole_order < k:
            a = a * g ** (k - self.pole_order)
        if other.pole_order < k:
            b = b * g ** (k - other.pole_order)
        return FractionalMeasure(a + b, k)

    def scale(self, a) -> "FractionalMeasure":
        return FractionalMeasure(self.numerator.scale(a), self.pole_order)


def amice_eval(series: Sequence[Fraction], t: LocalElement) -> LocalElement:
    """Evaluate a (finite) power series at t."""
    r = t.ring
    acc = r.zero()
    for a in reversed(series):
        acc = acc * t + r.from_rational(a)
    return acc


def mul_series_mod_omega(a: Sequence[int], b: Sequence[int], p: int, m: int, mod: int) -> list[int]:
    """Product of two (1+T)-basis group-algebra elements, returned in the
    T-basis, reduced modulo (1+T)^{p^m} - 1 (used as an independent path)."""
    size = p**m
    prod = [0] * size
    for i, x in enumerate(a):
        for j, y in enumerate(b):
            prod[(i + j) % size] += x * y
    out = [0] * size
    for j, cj in enumerate(prod):
        for i in range(j + 1):
            out[i] += cj * math.comb(j, i)
    return [v % mod for v in out]
