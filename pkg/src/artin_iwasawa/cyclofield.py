"""Local cyclotomic rings R(d, n) = Z_p[mu_d]-component [zeta_{p^n}].

An element is a polynomial in zeta = zeta_{p^n} of degree < phi(p^n) whose
coefficients lie in the unramified ring Z_p[x]/h(x), where h is the factor of
the d-th cyclotomic polynomial selected by the embedding iota_p.  Values are
stored as ``c / p^k`` with integer coefficients ``c``; the absolute precision
``prec`` says the value is known modulo ``p^prec``.
"""

from __future__ import annotations

import functools
import math
import os
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from sympy import Poly, cyclotomic_poly, symbols
from sympy.polys.domains import ZZ
from sympy.polys.factortools import dup_zz_hensel_lift
from sympy.polys.galoistools import gf_factor_sqf

from .errors import (
    BadGaloisIndex,
    BadModulus,
    DomainError,
    LevelMismatch,
    NotPrimitive,
    PrecisionExhausted,
)
from .padic import PadicValue, ZeroTest, log_series_mod, residue_mod, vp

SEED_POLICIES = ("smallest", "largest")


def seed_policy() -> str:
    policy = os.environ.get("IWF_SEED_POLICY", "smallest")
    if policy not in SEED_POLICIES:
        raise DomainError(f"IWF_SEED_POLICY must be one of {SEED_POLICIES}")
    return policy


def multiplicative_order(a: int, d: int) -> int:
    if d == 1:
        return 1
    k, x = 1, a % d
    while x != 1:
        x = x * a % d
        k += 1
    return k


def _coprime_list(m: int) -> list[int]:
    return [a for a in range(1, m + 1) if math.gcd(a, m) == 1]


# ---------------------------------------------------------------------------
# unramified base


@functools.lru_cache(maxsize=None)
def _select_factor(d: int, p: int, policy: str) -> tuple[int, ...]:
    """Monic factor of Phi_d mod p (high degree first) chosen by the policy."""
    x = symbols("x")
    phi = [ZZ(int(c)) for c in Poly(cyclotomic_poly(d, x), x).all_coeffs()]
    _, factors = gf_factor_sqf([c % p for c in phi], p, ZZ)
    facs = [tuple(int(c) % p for c in fac) for fac in factors]

    def seed(fac):
        # linear factors are ordered by their root, i.e. the Teichmuller seed
        return ((-fac[1]) % p,) if len(fac) == 2 else fac

    facs.sort(key=seed)
    return facs[0] if policy == "smallest" else facs[-1]


@functools.lru_cache(maxsize=None)
def _lifted_factor(d: int, p: int, M: int, policy: str) -> tuple[int, ...]:
    """Hensel lift of the selected factor; returned low degree first, mod p^M."""
    chosen = _select_factor(d, p, policy)
    if d == 1:
        return (-1 % p**M, 1)
    x = symbols("x")
    phi = [ZZ(int(c)) for c in Poly(cyclotomic_poly(d, x), x).all_coeffs()]
    _, factors = gf_factor_sqf([c % p for c in phi], p, ZZ)
    factors = [[ZZ(int(c) % p) for c in fac] for fac in factors]
    ordered = [f for f in factors if tuple(int(c) for c in f) == chosen]
    ordered += [f for f in factors if tuple(int(c) for c in f) != chosen]
    if len(ordered) == 1:
        lifted = [phi]
    else:
        lifted = dup_zz_hensel_lift(ZZ(p), phi, ordered, M, ZZ)
    mod = p**M
    return tuple(int(c) % mod for c in reversed(lifted[0]))


class LocalRing:
    """Descriptor for R(d, n) at storage precision p^M."""

    def __init__(self, d: int, n: int, p: int, M: int, policy: str | None = None):
        if d < 1 or d % p == 0:
            raise BadModulus(f"p={p} divides d={d}")
        if n < 0:
            raise DomainError("level must be >= 0")
        self.d, self.n, self.p, self.M = d, n, p, M
        self.policy = policy or seed_policy()
        self.mod = p**M
        self.f = multiplicative_order(p, d)
        self.E = (p - 1) * p ** (n - 1) if n >= 1 else 1
        self.pn = p**n
        self.h = _lifted_factor(d, p, M, self.policy)
        f = self.f
        # x^t mod h for f <= t <= 2f-2
        self._xred = {}
        vec = [0] * f
        vec[f - 1] = 1
        for t in range(f, 2 * f - 1):
            vec = self._shift_x(vec)
            self._xred[t] = list(vec)
        self._frob = [self._base_pow_x(j * p) for j in range(f)]
        self._frob_cache = {}
        width = 2 * M * p.bit_length() + (self.E * f).bit_length() + 2
        self._width_bytes = (width + 7) // 8

    def __repr__(self):
        return f"LocalRing(d={self.d}, n={self.n}, p={self.p}, M={self.M})"

    @property
    def key(self):
        return (self.d, self.n, self.p, self.M, self.policy)

    def describe(self) -> dict:
        """Embedding data recorded in reports."""
        return {"d": self.d, "n": self.n, "p": self.p, "precision": self.M,
                "seed_policy": self.policy, "f": self.f,
                "h_mod_p": [c % self.p for c in self.h]}

    # base ring helpers

    def _shift_x(self, vec: list[int]) -> list[int]:
        """Multiply a base vector by x and reduce mod h."""
        f, mod = self.f, self.mod
        top = vec[f - 1]
        out = [0] + vec[: f - 1]
        return [(out[j] - top * self.h[j]) % mod for j in range(f)]

    def _base_pow_x(self, e: int) -> list[int]:
        f = self.f
        result = [1] + [0] * (f - 1)
        base = [0] * f
        if f == 1:
            base = [(-self.h[0]) % self.mod]
        else:
            base[1] = 1
        while e:
            if e & 1:
                result = self._base_mul(result, base)
            base = self._base_mul(base, base)
            e >>= 1
        return result

    def _base_mul(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        f = self.f
        prod = [0] * (2 * f - 1)
        for i, ai in enumerate(a):
            if ai:
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
        return self._base_reduce(prod)

    def _base_reduce(self, prod: Sequence[int]) -> list[int]:
        f, mod = self.f, self.mod
        out = [c % mod for c in prod[:f]]
        for t in range(f, len(prod)):
            ct = prod[t] % mod
            if ct:
                red = self._xred[t]
                for j in range(f):
                    out[j] = (out[j] + ct * red[j]) % mod
        return out

    # element constructors

    def element(self, coeffs: Sequence[int], k: int = 0, prec: int | None = None) -> "LocalElement":
        size = self.E * self.f
        c = list(coeffs) + [0] * (size - len(coeffs))
        if len(c) != size:
            raise DomainError("too many coefficients")
        prec = self.M - k if prec is None else prec
        return LocalElement(self, c, k, prec)

    def zero(self) -> "LocalElement":
        return self.element([])

    def one(self) -> "LocalElement":
        return self.element([1])

    def from_rational(self, q) -> "LocalElement":
        if isinstance(q, PadicValue):
            return self.from_padic(q)
        q = Fraction(q)
        if q == 0:
            return self.zero()
        k = max(0, -vp(q, self.p))
        num = q * self.p**k
        return self.element([residue_mod(num, self.p, self.M)], k=k)

    def from_padic(self, a: PadicValue) -> "LocalElement":
        if a.prime != self.p:
            raise DomainError("prime mismatch")
        if a.mantissa == 0:
            return LocalElement(self, [0] * (self.E * self.f), 0, min(a.precision, self.M))
        k = max(0, -a.valuation)
        prec = min(a.precision, self.M - k)
        rep = a.mantissa * self.p ** (a.valuation + k)
        return self.element([rep % self.mod], k=k, prec=prec)

    def from_base(self, vec: Sequence[int]) -> "LocalElement":
        """Element of the unramified part given by coefficients of 1, x, ..."""
        return self.element([int(v) % self.mod for v in vec])

    def zeta_power(self, i: int) -> "LocalElement":
        """zeta_{p^n}^i."""
        c = [0] * (self.E * self.f)
        self._add_zeta_power(c, i % self.pn if self.n else 0, [1] + [0] * (self.f - 1))
        return LocalElement(self, [v % self.mod for v in c], 0, self.M)

    @property
    def zeta(self) -> "LocalElement":
        return self.zeta_power(1)

    @property
    def y(self) -> "LocalElement":
        return self.zeta - self.one()

    def x_power(self, j: int) -> "LocalElement":
        """iota_p(zeta_d)^j."""
        return self.from_base(self._base_pow_x(j % self.d))

    def root_of_unity(self, N: int, a: int = 1) -> "LocalElement":
        """iota_p(exp(2 pi i a / N)) for N | d p^n, using CRT on the components."""
        d, pn = self.d, self.pn
        if (d * pn) % N:
            raise LevelMismatch(f"mu_{N} not contained in R({d}, {self.n})")
        e = (d * pn) // N * a
        # exp(2 pi i e/(d p^n)) = zeta_d^s * zeta_{p^n}^t with s pn + t d = e
        s = e * pow(pn, -1, d) % d if d > 1 else 0
        t = e * pow(d, -1, pn) % pn if pn > 1 else 0
        return self.x_power(s) * self.zeta_power(t)

    def _add_zeta_power(self, c: list[int], i: int, base: Sequence[int], sign: int = 1):
        """c += sign * base * zeta^i with 0 <= i < p^n, reducing by Phi_{p^n}."""
        f, E = self.f, self.E
        if i < E:
            for j, b in enumerate(base):
                c[i * f + j] += sign * b
            return
        r = i - E
        step = self.pn // self.p
        for t in range(self.p - 1):
            idx = r + t * step
            for j, b in enumerate(base):
                c[idx * f + j] -= sign * b

    def _mul_coeffs(self, a: Sequence[int], b: Sequence[int]) -> list[int]:
        f, E, mod = self.f, self.E, self.mod
        wb = self._width_bytes
        g = 2 * f - 1
        slots = E * g
        ba = bytearray(slots * wb)
        bb = bytearray(slots * wb)
        for i in range(E):
            for j in range(f):
                s = (i * g + j) * wb
                va, vb = a[i * f + j], b[i * f + j]
                if va:
                    ba[s:s + wb] = va.to_bytes(wb, "little")
                if vb:
                    bb[s:s + wb] = vb.to_bytes(wb, "little")
        prod = int.from_bytes(ba, "little") * int.from_bytes(bb, "little")
        nslots = (2 * E - 1) * g
        raw = prod.to_bytes(nslots * wb + wb, "little")
        out = [0] * (E * f)
        for i in range(2 * E - 1):
            poly = [int.from_bytes(raw[(i * g + j) * wb:(i * g + j + 1) * wb], "little")
                    for j in range(g)]
            if not any(poly):
                continue
            base = self._base_reduce(poly) if f > 1 else [poly[0] % mod]
            ii = i % self.pn if self.n else 0
            self._add_zeta_power(out, ii, base)
        return [v % mod for v in out]

    def _frob_matrix(self, t: int) -> list[list[int]]:
        t %= self.f
        if t not in self._frob_cache:
            self._frob_cache[t] = [self._base_pow_x(j * self.p**t) for j in range(self.f)]
        return self._frob_cache[t]


@functools.lru_cache(maxsize=None)
def _cached_ring(d: int, n: int, p: int, M: int, policy: str) -> LocalRing:
    return LocalRing(d, n, p, M, policy)


def make_ring(d: int, n: int, p: int, M: int) -> LocalRing:
    return _cached_ring(d, n, p, M, seed_policy())


# ---------------------------------------------------------------------------
# elements


class LocalElement:
    """Element ``c / p^k`` of a LocalRing, known modulo ``p^prec``."""

    __slots__ = ("ring", "c", "k", "prec")

    def __init__(self, ring: LocalRing, c: list[int], k: int, prec: int):
        p = ring.p
        prec = min(prec, ring.M - k)
        mod = p ** max(prec + k, 0)
        c = [v % mod for v in c]
        while k > 0 and all(v % p == 0 for v in c):
            c = [v // p for v in c]
            k -= 1
        self.ring, self.c, self.k, self.prec = ring, c, k, prec

    # bookkeeping

    def _lower_bound(self) -> int:
        """Cheap lower bound for the valuation."""
        p = self.ring.p
        vals = [vp(v, p) for v in self.c if v]
        if not vals:
            return self.prec
        return min(vals) - self.k

    def _check_ring(self, other) -> "LocalElement":
        if isinstance(other, LocalElement):
            if other.ring.key[:3] != self.ring.key[:3] or other.ring.policy != self.ring.policy:
                raise LevelMismatch(f"{self.ring} vs {other.ring}")
            return other
        if isinstance(other, (int, Fraction, PadicValue)):
            return self.ring.from_rational(other)
        return NotImplemented

    def __add__(self, other):
        other = self._check_ring(other)
        if other is NotImplemented:
            return other
        k = max(self.k, other.k)
        p = self.ring.p
        sa, sb = p ** (k - self.k), p ** (k - other.k)
        c = [a * sa + b * sb for a, b in zip(self.c, other.c)]
        return LocalElement(self.ring, c, k, min(self.prec, other.prec))

    __radd__ = __add__

    def __neg__(self):
        return LocalElement(self.ring, [-v for v in self.c], self.k, self.prec)

    def __sub__(self, other):
        other = self._check_ring(other)
        if other is NotImplemented:
            return other
        return self + (-other)

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, int):
            lb = vp(other, self.ring.p) if other else self.prec
            return LocalElement(self.ring, [v * other for v in self.c], self.k, self.prec + lb)
        other = self._check_ring(other)
        if other is NotImplemented:
            return other
        prec = min(self.prec + other._lower_bound(), other.prec + self._lower_bound())
        c = self.ring._mul_coeffs(self.c, other.c)
        return LocalElement(self.ring, c, self.k + other.k, prec)

    __rmul__ = __mul__

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        result = self.ring.one()
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def div_p(self, t: int = 1) -> "LocalElement":
        """Exact division by p^t (moves the value into the fraction field)."""
        return LocalElement(self.ring, list(self.c), self.k + t, self.prec - t)

    def __truediv__(self, other):
        if isinstance(other, PadicValue):
            return self * self.ring.from_padic(other.inverse())
        if isinstance(other, (int, Fraction)):
            q = Fraction(other)
            v = vp(q, self.ring.p)
            unit = q / Fraction(self.ring.p) ** v
            out = self * self.ring.from_rational(1 / unit)
            return out.div_p(v) if v >= 0 else out * self.ring.p ** (-v)
        return self * other.inverse()

    def with_precision(self, prec: int) -> "LocalElement":
        """Declare a (smaller or recomputed) absolute precision."""
        return LocalElement(self.ring, list(self.c), self.k, prec)

    # inspection

    def is_zero(self) -> ZeroTest:
        return ZeroTest.UNKNOWN if not any(self.c) else ZeroTest.NONZERO

    def base_coefficients(self) -> list[Fraction]:
        """Coefficient vectors on zeta^i x^j as rationals."""
        den = self.ring.p**self.k
        return [Fraction(v, den) for v in self.c]

    def constant_padic(self) -> PadicValue:
        """The coefficient of zeta^0 x^0 as a p-adic number."""
        p = self.ring.p
        return PadicValue(p, self.c[0], -self.k, self.prec)

    def to_padic(self) -> PadicValue:
        """Value of an element lying in Z_p (other coefficients zero at precision)."""
        p = self.ring.p
        mod = p ** (self.prec + self.k)
        if any(v % mod for v in self.c[1:]):
            raise DomainError("element is not in Q_p")
        return self.constant_padic()

    def y_coefficients(self) -> list[list[int]]:
        """Coefficients in the basis y^j x^l, y = zeta - 1 (stored scale)."""
        r = self.ring
        f, E = r.f, r.E
        out = [[0] * f for _ in range(E)]
        for i in range(E):
            for l in range(f):
                v = self.c[i * f + l]
                if v:
                    for j in range(i + 1):
                        out[j][l] += v * math.comb(i, j)
        mod = r.p ** (self.prec + self.k)
        return [[v % mod for v in row] for row in out]

    def valuation(self) -> Fraction | None:
        """Exact valuation normalized by v(p)=1, or None if zero at precision."""
        r = self.ring
        best = None
        for j, row in enumerate(self.y_coefficients()):
            vals = [vp(v, r.p) for v in row if v]
            if vals:
                cand = Fraction(min(vals)) + Fraction(j, r.E)
                if best is None or cand < best:
                    best = cand
        if best is None:
            return None
        best -= self.k
        return best if best < self.prec else None

    def residual_valuation(self, other) -> Fraction:
        """Valuation of self - other, capped by the joint precision."""
        diff = self - other
        v = diff.valuation()
        return Fraction(diff.prec) if v is None else v

    def equals(self, other, at: int | None = None) -> bool:
        diff = self - other
        if at is None:
            return diff.is_zero() is ZeroTest.UNKNOWN
        v = diff.valuation()
        return v is None or v >= at

    def __repr__(self):
        return f"LocalElement({self.ring!r}, k={self.k}, prec={self.prec}, c={self.c})"

    def to_json(self) -> dict:
        return {"ring": self.ring.describe(), "denominator_exponent": str(self.k),
                "precision": str(self.prec), "coefficients": [str(v) for v in self.c]}

    # Galois structure

    def frobenius(self, t: int = 1) -> "LocalElement":
        """phi^t on the unramified coefficients; zeta is fixed."""
        r = self.ring
        if r.f == 1:
            return self
        mat = r._frob_matrix(t)
        f = r.f
        out = [0] * len(self.c)
        for i in range(r.E):
            blk = self.c[i * f:(i + 1) * f]
            for j, v in enumerate(blk):
                if v:
                    img = mat[j]
                    for l in range(f):
                        out[i * f + l] += v * img[l]
        return LocalElement(r, out, self.k, self.prec)

    def sigma(self, b: int) -> "LocalElement":
        """zeta_{p^n} -> zeta_{p^n}^b, unramified part fixed."""
        r = self.ring
        if b % r.p == 0:
            raise BadGaloisIndex(f"{b} is divisible by p")
        if r.n == 0:
            return self
        f = r.f
        out = [0] * len(self.c)
        for i in range(r.E):
            blk = self.c[i * f:(i + 1) * f]
            if any(blk):
                r._add_zeta_power(out, i * b % r.pn, blk)
        return LocalElement(r, out, self.k, self.prec)

    def galois(self, a: int) -> "LocalElement":
        """sigma_a: zeta_d -> zeta_d^a, zeta_{p^n} -> zeta_{p^n}^a."""
        r = self.ring
        if math.gcd(a, r.d * r.p) != 1:
            raise BadGaloisIndex(f"{a} not coprime to {r.d * r.p}")
        t = None
        for s in range(r.f):
            if pow(r.p, s, r.d) == a % r.d:
                t = s
                break
        if t is None:
            raise BadGaloisIndex(f"{a} mod {r.d} does not fix the chosen component")
        return self.frobenius(t).sigma(a)

    def _kernel_indices(self) -> list[int]:
        r = self.ring
        if r.n == 0:
            raise LevelMismatch("no level below 0")
        if r.n == 1:
            return list(range(1, r.p))
        step = r.pn // r.p
        return [1 + step * t for t in range(r.p)]

    def _descend(self) -> "LocalElement":
        r = self.ring
        lower = _cached_ring(r.d, r.n - 1, r.p, r.M, r.policy)
        f = r.f
        stride = r.p if r.n >= 2 else 0
        out = []
        for i in range(lower.E):
            idx = i * stride
            out.extend(self.c[idx * f:(idx + 1) * f])
        return LocalElement(lower, out, self.k, self.prec)

    def norm_down(self) -> "LocalElement":
        acc = None
        for b in self._kernel_indices():
            s = self.sigma(b)
            acc = s if acc is None else acc * s
        return acc._descend()

    def trace_down(self) -> "LocalElement":
        acc = None
        for b in self._kernel_indices():
            s = self.sigma(b)
            acc = s if acc is None else acc + s
        return acc._descend()

    def lift(self, ring: LocalRing) -> "LocalElement":
        """Inclusion R(d, n) -> R(d', n') for n <= n' (d' = d, or d = 1)."""
        r = self.ring
        if ring.p != r.p or ring.n < r.n or (r.d != 1 and ring.key[0] != r.d) \
                or (r.d != 1 and ring.policy != r.policy):
            raise LevelMismatch(f"cannot include {r} in {ring}")
        scale = ring.pn // r.pn
        out = [0] * (ring.E * ring.f)
        for i in range(r.E):
            blk = self.c[i * r.f:(i + 1) * r.f]
            if not any(blk):
                continue
            if r.f != ring.f:
                blk = blk + [0] * (ring.f - r.f)
            ring._add_zeta_power(out, (i * scale) % ring.pn if ring.n else 0, blk)
        return LocalElement(ring, out, self.k, min(self.prec, ring.M - self.k))

    def descend(self, ring: LocalRing) -> "LocalElement":
        """Inverse of ``lift`` for elements lying in the smaller ring."""
        el = self
        while el.ring.n > ring.n:
            el = el._descend()
        if el.ring.f != ring.f:
            f = el.ring.f
            mod = ring.p ** (el.prec + el.k)
            if any(v % mod for i, v in enumerate(el.c) if i % f):
                raise LevelMismatch("element has unramified coefficients")
            return LocalElement(ring, el.c[::f], el.k, min(el.prec, ring.M - el.k))
        return LocalElement(ring, list(el.c), el.k, min(el.prec, ring.M - el.k))

    def at_precision(self, M: int) -> "LocalElement":
        """Same element viewed in the sibling ring with storage precision M."""
        r = self.ring
        ring = _cached_ring(r.d, r.n, r.p, M, r.policy)
        if M >= r.M:
            return LocalElement(ring, list(self.c), self.k, self.prec)
        return LocalElement(ring, list(self.c), self.k, min(self.prec, M - self.k))

    def exact_in(self, M: int) -> "LocalElement":
        """Treat the stored representative as exact in a higher-precision sibling."""
        r = self.ring
        ring = _cached_ring(r.d, r.n, r.p, M, r.policy)
        return LocalElement(ring, list(self.c), self.k, M - self.k)

    # inversion and logarithm

    def _residue_unit_inverse(self) -> "LocalElement":
        """Inverse modulo the maximal ideal, lifted to a base element."""
        r = self.ring
        p, f = r.p, r.f
        # reduction mod (p, y): sum of zeta-coefficients
        red = [0] * f
        for i in range(r.E):
            for j in range(f):
                red[j] = (red[j] + self.c[i * f + j]) % p
        if not any(red):
            raise PrecisionExhausted("element is not a unit")
        # inverse in F_q = F_p[x]/h by exponentiation
        q = p**f
        inv = [1] + [0] * (f - 1)
        base = red
        e = q - 2
        hmod = [c % p for c in r.h]

        def mulp(a, b):
            prod = [0] * (2 * f - 1)
            for i, ai in enumerate(a):
                for j, bj in enumerate(b):
                    prod[i + j] += ai * bj
            for t in range(2 * f - 2, f - 1, -1):
                ct = prod[t] % p
                if ct:
                    for l in range(f + 1):
                        prod[t - f + l] -= ct * hmod[l]
            return [v % p for v in prod[:f]]

        while e:
            if e & 1:
                inv = mulp(inv, base)
            base = mulp(base, base)
            e >>= 1
        return r.from_base(inv)

    def inverse(self) -> "LocalElement":
        r = self.ring
        v = self.valuation()
        if v is None:
            raise PrecisionExhausted("cannot invert a value that is zero at precision")
        if v != 0:
            # u^{-1} = conj / N(u) with N(u) = u * conj in the unramified base
            conj = r.one()
            for b in (_coprime_list(r.pn)[1:] if r.n else []):
                conj = conj * self.sigma(b)
            norm = conj * self
            nv = int(v * r.E)
            shift = nv + norm.k
            if shift >= 0:
                unit = LocalElement(r, [x // r.p**shift for x in norm.c], 0, norm.prec - nv)
            else:
                unit = LocalElement(r, [x * r.p ** (-shift) for x in norm.c], 0, norm.prec - nv)
            out = conj * unit.inverse()
            return out.div_p(nv) if nv >= 0 else out * r.p ** (-nv)
        # a unit has k = 0 after normalization; Newton iteration x <- x (2 - u x)
        x = self._residue_unit_inverse()
        two = r.from_rational(2)
        steps = max(1, (r.M * r.E).bit_length() + 1)
        for _ in range(steps):
            x = x * (two - self * x)
        return LocalElement(r, x.c, 0, self.prec)

    def log_iw(self, target: int | None = None) -> "LocalElement":
        """Iwasawa logarithm: log p = 0 and roots of unity go to 0."""
        r = self.ring
        p, E = r.p, r.E
        v = self.valuation()
        if v is None:
            raise PrecisionExhausted("log of a value that is zero at precision")
        rel = self.prec - v
        target = math.floor(rel) if target is None else min(target, math.floor(rel))
        q = p**r.f
        # make the argument integral (log p = 0)
        s = max(0, math.ceil(-v))
        x = self if s == 0 else self * p**s
        num = (v + s) * E
        if num.denominator != 1:
            raise DomainError("valuation not in (1/e)Z")
        num = int(num)
        # w = x^E / p^num is a unit; w^(q-1) - 1 has valuation >= 1/E
        j = 0
        vz = Fraction(1, E)
        while vz <= Fraction(1, p - 1):
            vz = min(p * vz, vz + 1)
            j += 1
        nterms = 1
        while nterms * vz - _ilog(nterms, p) < target + 1:
            nterms += 1
        nterms += 2
        scale = E * (q - 1) * p**j
        t = vp(scale, p)
        W = target + t + _ilog(nterms, p) + 3
        x = x.exact_in(max(W, r.M))
        w = x**E
        if num:
            w = LocalElement(w.ring, [c // p ** (num - w.k) if num >= w.k else c for c in w.c],
                             0, w.ring.M) if num >= w.k else w.div_p(num)
        w = LocalElement(w.ring, w.c, w.k, w.ring.M - w.k)
        z = w ** ((q - 1) * p**j) - w.ring.one()
        total = log_series_element(z, nterms)
        total = total * pow(scale // p**t, -1, w.ring.mod)
        if t:
            total = total.div_p(t)
        out = LocalElement(total.ring, total.c, total.k, target)
        return out.at_precision(r.M) if out.ring.M != r.M else out


def _ilog(n: int, p: int) -> int:
    t = 0
    while p ** (t + 1) <= n:
        t += 1
    return t


# ---------------------------------------------------------------------------
# characters of Gamma and idempotents


@functools.lru_cache(maxsize=None)
def gamma_log_table(p: int, n: int) -> dict[int, int]:
    """a mod p^n (p not dividing a) -> j mod p^(n-1) with <a> = (1+p)^j."""
    mod = p**n
    table = {}
    powers = {}
    g = 1
    for j in range(p ** max(n - 1, 0)):
        powers[g] = j
        g = g * (1 + p) % mod
    for a in range(1, mod):
        if a % p:
            omega = pow(a, p ** (n - 1), mod) if n >= 1 else 1
            table[a] = powers[a * pow(omega, -1, mod) % mod]
    return table


def gamma_log(a: int, p: int, n: int) -> int:
    if n <= 1:
        return 0
    return gamma_log_table(p, n)[a % p**n]


@dataclass(frozen=True)
class FiniteOrderCharacter:
    """Character eta of Gamma = Gal(Q(mu_{p^infty})^Delta / Q).

    ``conductor_exp`` is n with conductor p^n; eta(gamma_0) is the root of
    unity exp(2 pi i k / p^(n-1)), with gamma_0 acting as 1+p.
    """

    p: int
    conductor_exp: int
    k: int = 0

    def __post_init__(self):
        n = self.conductor_exp
        if n <= 1:
            # Gamma has no nontrivial character of conductor dividing p
            object.__setattr__(self, "conductor_exp", 0)
            object.__setattr__(self, "k", 0)
            return
        if self.k % self.p == 0:
            raise NotPrimitive("eta(gamma_0) must have exact order p^(n-1)")
        object.__setattr__(self, "k", self.k % self.p ** (n - 1))

    @property
    def is_trivial(self) -> bool:
        return self.conductor_exp == 0

    @property
    def order(self) -> int:
        return self.p ** max(self.conductor_exp - 1, 0)

    def inverse(self) -> "FiniteOrderCharacter":
        return FiniteOrderCharacter(self.p, self.conductor_exp, -self.k)

    def exponent_at(self, a: int) -> int:
        """t with eta(a) = exp(2 pi i t / p^(n-1))."""
        n = self.conductor_exp
        if n <= 1:
            return 0
        return self.k * gamma_log(a, self.p, n) % self.p ** (n - 1)

    def gamma_exponent(self, j: int) -> int:
        """Exponent of eta(gamma_0^j)."""
        if self.is_trivial:
            return 0
        return self.k * j % self.order

    def value(self, ring: LocalRing, a: int) -> LocalElement:
        return self.root_in(ring, self.exponent_at(a))

    def root_in(self, ring: LocalRing, t: int) -> LocalElement:
        """exp(2 pi i t / p^(n-1)) in the given ring."""
        if self.is_trivial:
            return ring.one()
        n = self.conductor_exp
        if ring.n < n - 1:
            raise LevelMismatch(f"R(., {ring.n}) does not contain mu_p^{n - 1}")
        return ring.zeta_power(t * p_power(ring.p, ring.n - n + 1))

    def label(self) -> str:
        return f"eta(p={self.p}, cond=p^{self.conductor_exp}, k={self.k})"


def p_power(p: int, e: int) -> int:
    return p**e


def characters_of_gamma(p: int, m: int) -> list[FiniteOrderCharacter]:
    """All characters factoring through Gamma_m (order dividing p^m)."""
    out = [FiniteOrderCharacter(p, 0)]
    for n in range(2, m + 2):
        for k in range(p ** (n - 1)):
            if k % p:
                out.append(FiniteOrderCharacter(p, n, k))
    return out


def e_eta_project(eta: FiniteOrderCharacter, u: LocalElement) -> LocalElement:
    """e_eta u = p^{1-N} sum_{g in Gamma_{N-1}} eta(g^{-1}) g(u), N the level of u."""
    r = u.ring
    N = r.n
    if not eta.is_trivial and eta.conductor_exp > N:
        raise LevelMismatch(f"{eta.label()} does not factor through level {N}")
    if N <= 1:
        return u
    p = r.p
    size = p ** (N - 1)
    gen = 1 + p
    acc = r.zero()
    g = 1
    for j in range(size):
        term = u.sigma(g)
        if not eta.is_trivial:
            term = term * eta.root_in(r, -eta.gamma_exponent(j))
        acc = acc + term
        g = g * gen % r.pn
    return acc.div_p(N - 1)


def gauss_sum_local(eta: FiniteOrderCharacter, ring: LocalRing | None = None,
                    M: int = 12) -> LocalElement:
    """g(eta) = sum_{a mod p^n} eta(a) zeta_{p^n}^a in R(1, n)."""
    n = eta.conductor_exp
    if ring is None:
        ring = make_ring(1, max(n, 0), eta.p, M)
    if eta.is_trivial:
        return ring.one()
    if ring.n < n:
        raise LevelMismatch("ring level below the conductor")
    p = eta.p
    pn = p**n
    scale = ring.pn // pn
    c = [0] * (ring.E * ring.f)
    for a in range(1, pn):
        if a % p:
            t = eta.exponent_at(a)  # zeta_{p^(n-1)}^t = zeta_{p^n}^{p t}
            ring._add_zeta_power(c, (p * t + a) * scale % ring.pn, [1] + [0] * (ring.f - 1))
    return ring.element([v % ring.mod for v in c])


def norm_of_zeta_minus_one(p: int, M: int = 10) -> PadicValue:
    r = make_ring(1, 1, p, M)
    return (r.zeta - r.one()).norm_down().to_padic()


def log_series_element(z: LocalElement, nterms: int) -> LocalElement:
    """sum_{i<=nterms} (-1)^{i+1} z^i / i (no convergence control)."""
    r = z.ring
    total = r.zero()
    power = r.one()
    for i in range(1, nterms + 1):
        power = power * z
        t = vp(i, r.p)
        term = power * pow(i // r.p**t, -1, r.mod)
        if t:
            term = term.div_p(t)
        total = total + term if i % 2 else total - term
    return total


def frobenius_eigen_split(u: LocalElement, beta_root: LocalElement) -> LocalElement:
    """Projection (1/f) sum_k beta^{-k} phi^k(u) onto the beta-eigenspace of phi."""
    r = u.ring
    acc = r.zero()
    binv = beta_root.inverse()
    coeff = r.one()
    for t in range(r.f):
        acc = acc + coeff * u.frobenius(t)
        coeff = coeff * binv
    return acc / r.f


__all__ = [
    "LocalRing", "LocalElement", "make_ring", "FiniteOrderCharacter",
    "characters_of_gamma", "e_eta_project", "gauss_sum_local", "gamma_log",
    "multiplicative_order", "log_series_mod",
]
