"""p-adic numbers with explicit absolute precision.

A value is stored as ``p**valuation * mantissa + O(p**precision)`` with the
mantissa a unit modulo ``p**(precision - valuation)``.  A mantissa of 0 is an
unresolved zero: all we know is that the value lies in ``p**precision * Z_p``.
"""

from __future__ import annotations

import enum
import functools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Union

from .errors import DomainError, NotSimpleRoot, PrecisionExhausted, PrimeMismatch

Rational = Union[int, Fraction]


class ZeroTest(enum.Enum):
    ZERO = "zero"
    NONZERO = "nonzero"
    UNKNOWN = "zero at precision"


def vp(n: Rational, p: int) -> int | None:
    """p-adic valuation of a rational number (None for 0)."""
    if n == 0:
        return None
    if isinstance(n, Fraction):
        return vp(n.numerator, p) - vp(n.denominator, p)
    n = abs(n)
    v = 0
    while n % p == 0:
        n //= p
        v += 1
    return v


def residue_mod(q: Rational, p: int, k: int) -> int:
    """Image of a p-integral rational in Z/p^k."""
    mod = p**k
    if isinstance(q, Fraction):
        if q.denominator % p == 0:
            raise DomainError(f"{q} is not {p}-integral")
        return q.numerator * pow(q.denominator, -1, mod) % mod
    return q % mod


def log_series_mod(z: int, p: int, k: int) -> int:
    """log(1 + z) modulo p^k for an integer z divisible by p.

    Computed with guard digits so that the division by the index does not
    lose information.
    """
    if z % p:
        raise DomainError("log series needs z = 0 mod p")
    if z == 0 or k <= 0:
        return 0
    nterms = k + 2
    while nterms - _ilog(nterms, p) < k:
        nterms += 1
    guard = _ilog(nterms, p) + 1
    mod = p ** (k + guard)
    total = 0
    power = 1
    for i in range(1, nterms + 1):
        power = power * z % mod
        t = vp(i, p)
        unit = i // p**t
        term = (power // p**t) * pow(unit, -1, mod)
        total += -term if i % 2 == 0 else term
    return total % p**k


@functools.lru_cache(maxsize=None)
def _is_odd_prime(p: int) -> bool:
    return p > 2 and all(p % q for q in range(2, int(p**0.5) + 1))


def _ilog(n: int, p: int) -> int:
    """Largest t with p^t <= n."""
    t = 0
    while p ** (t + 1) <= n:
        t += 1
    return t


@dataclass(frozen=True)
class PadicValue:
    prime: int
    mantissa: int
    valuation: int
    precision: int

    def __post_init__(self):
        p = self.prime
        if not _is_odd_prime(p):
            raise DomainError(f"prime must be an odd prime, got {p}")
        m, v, prec = self.mantissa, self.valuation, self.precision
        if m != 0:
            while m % p == 0:
                m //= p
                v += 1
        if m == 0 or v >= prec:
            object.__setattr__(self, "mantissa", 0)
            object.__setattr__(self, "valuation", prec)
            return
        object.__setattr__(self, "mantissa", m % p ** (prec - v))
        object.__setattr__(self, "valuation", v)

    # constructors

    @classmethod
    def from_rational(cls, q: Rational, p: int, precision: int) -> "PadicValue":
        q = Fraction(q)
        if q == 0:
            return cls(p, 0, precision, precision)
        v = vp(q, p)
        if v >= precision:
            return cls(p, 0, precision, precision)
        unit = q / Fraction(p) ** v
        return cls(p, residue_mod(unit, p, precision - v), v, precision)

    @classmethod
    def zero(cls, p: int, precision: int) -> "PadicValue":
        return cls(p, 0, precision, precision)

    @classmethod
    def one(cls, p: int, precision: int) -> "PadicValue":
        return cls(p, 1, 0, precision)

    # inspection

    def is_zero(self) -> ZeroTest:
        return ZeroTest.UNKNOWN if self.mantissa == 0 else ZeroTest.NONZERO

    @property
    def relative_precision(self) -> int:
        return self.precision - self.valuation

    def to_fraction(self) -> Fraction:
        """A rational representative (exact up to the stored precision)."""
        return self.mantissa * Fraction(self.prime) ** self.valuation

    def residue(self, k: int | None = None) -> int:
        """Integer representative modulo p^k (default: the precision)."""
        k = self.precision if k is None else k
        if k > self.precision:
            raise PrecisionExhausted(f"asked for p^{k}, have p^{self.precision}")
        if self.valuation < 0:
            raise DomainError("value is not integral")
        return self.mantissa * self.prime**self.valuation % self.prime**k

    def unit_part(self) -> "PadicValue":
        return PadicValue(self.prime, self.mantissa, 0, self.relative_precision)

    def truncate(self, precision: int) -> "PadicValue":
        if precision > self.precision:
            raise PrecisionExhausted("cannot raise precision")
        return PadicValue(self.prime, self.mantissa, self.valuation, precision)

    def __str__(self) -> str:
        p = self.prime
        if self.mantissa == 0:
            return f"O({p}^{self.precision})"
        if self.valuation >= 0:
            return f"{self.residue()} + O({p}^{self.precision})"
        return f"{self.mantissa}/{p}^{-self.valuation} + O({p}^{self.precision})"

    def to_json(self) -> dict:
        return {"p": str(self.prime), "value": str(self.to_fraction()),
                "valuation": str(self.valuation), "precision": str(self.precision)}

    # arithmetic

    def _coerce(self, other, extra: int = 0) -> "PadicValue":
        if isinstance(other, PadicValue):
            if other.prime != self.prime:
                raise PrimeMismatch(f"{self.prime} vs {other.prime}")
            return other
        if isinstance(other, (int, Fraction)):
            # exact input: give it more precision than can ever matter here
            v = vp(other, self.prime) or 0
            prec = self.precision + abs(self.valuation) + abs(v) + extra + 1
            return PadicValue.from_rational(other, self.prime, prec)
        return NotImplemented

    def __add__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.precision, other.precision)
        v = min(self.valuation, other.valuation)
        total = (self.mantissa * self.prime ** (self.valuation - v)
                 + other.mantissa * self.prime ** (other.valuation - v))
        return PadicValue(self.prime, total, v, prec)

    __radd__ = __add__

    def __neg__(self):
        return PadicValue(self.prime, -self.mantissa, self.valuation, self.precision)

    def __sub__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        other = self._coerce(other)
        if other is NotImplemented:
            return other
        prec = min(self.precision + other.valuation, other.precision + self.valuation)
        return PadicValue(self.prime, self.mantissa * other.mantissa,
                          self.valuation + other.valuation, prec)

    __rmul__ = __mul__

    def inverse(self) -> "PadicValue":
        if self.mantissa == 0:
            raise PrecisionExhausted("cannot invert a value that is zero at precision")
        rel = self.relative_precision
        inv = pow(self.mantissa, -1, self.prime**rel)
        return PadicValue(self.prime, inv, -self.valuation, rel - self.valuation)

    def __truediv__(self, other):
        other = self._coerce(other, extra=0)
        if other is NotImplemented:
            return other
        return self * other.inverse()

    def __rtruediv__(self, other):
        return self.inverse() * other

    def __pow__(self, k: int):
        if k < 0:
            return self.inverse() ** (-k)
        result = PadicValue.one(self.prime, self.precision + abs(self.valuation) * k + 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base
            k >>= 1
        return result

    def equals(self, other, at: int | None = None) -> bool:
        """True when the difference is zero at the common (or given) precision."""
        diff = self - other
        if at is not None:
            return diff.mantissa == 0 or diff.valuation >= at
        return diff.mantissa == 0


def inv(a: PadicValue) -> PadicValue:
    return a.inverse()


def log_iw(u):
    """Iwasawa logarithm (log p = 0, torsion is killed).

    Accepts a PadicValue or a cyclofield element.
    """
    if not isinstance(u, PadicValue):
        return u.log_iw()
    if u.mantissa == 0:
        raise PrecisionExhausted("log of a value that is zero at precision")
    p = u.prime
    rel = u.relative_precision
    w = pow(u.mantissa, p - 1, p ** (rel + 2)) - 1
    val = log_series_mod(w, p, rel + 1)
    # log(u) = log(u^(p-1)) / (p-1)
    val = val * pow(p - 1, -1, p ** (rel + 1)) % p ** (rel + 1)
    return PadicValue(p, val, 0, rel)


def exp_p(x: PadicValue) -> PadicValue:
    """exp on pZ_p (p odd)."""
    p, prec = x.prime, x.precision
    if x.mantissa == 0:
        return PadicValue.one(p, prec)
    if x.valuation < 1:
        raise DomainError("exp_p needs valuation >= 1")
    z = x.residue()
    # v(z^k / k!) >= k * (p-2)/(p-1)
    nterms = 1
    while nterms * (p - 2) < prec * (p - 1):
        nterms += 1
    nterms += 1
    guard = (nterms - 1) // (p - 1) + 2
    mod = p ** (prec + guard)
    total = 1
    power = 1
    fact_unit = 1
    fact_v = 0
    for k in range(1, nterms + 1):
        power = power * z % mod
        t = vp(k, p)
        fact_v += t
        fact_unit = fact_unit * (k // p**t) % mod
        total += (power // p**fact_v) * pow(fact_unit, -1, mod)
    return PadicValue(p, total, 0, prec)


def teichmuller(a: int, p: int, precision: int) -> PadicValue:
    if a % p == 0:
        raise DomainError("Teichmuller lift of 0 mod p")
    return PadicValue(p, pow(a, p ** (precision - 1), p**precision), 0, precision)


def _poly_eval(coeffs: Sequence[int], x: int, mod: int) -> int:
    acc = 0
    for c in reversed(coeffs):
        acc = (acc * x + c) % mod
    return acc


def hensel_lift(coeffs: Sequence[int], a0: int, p: int, precision: int) -> PadicValue:
    """Lift a simple root a0 of f mod p (coefficients low degree first)."""
    deriv = [i * c for i, c in enumerate(coeffs)][1:]
    if _poly_eval(coeffs, a0, p) != 0:
        raise NotSimpleRoot(f"{a0} is not a root mod {p}")
    if _poly_eval(deriv, a0, p) == 0:
        raise NotSimpleRoot(f"f'({a0}) = 0 mod {p}")
    x = a0 % p
    k = 1
    while k < precision:
        k = min(2 * k, precision)
        mod = p**k
        x = (x - _poly_eval(coeffs, x, mod) * pow(_poly_eval(deriv, x, mod), -1, mod)) % mod
    return PadicValue(p, x, 0, precision)
