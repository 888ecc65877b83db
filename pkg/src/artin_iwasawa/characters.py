"""Dirichlet characters, exact cyclotomic numbers and unit vectors.

Characters are given by the images of canonical generators of (Z/m)^x as
exponents into mu_order (zeta_order = exp(2 pi i / order) under the complex
embedding).  Exact values live in Q(mu_N) as ``CyclotomicNumber``; the complex
image uses mpmath and the p-adic image goes through ``PAdicEmbedding``, which
sends exp(2 pi i / N) to ``root_of_unity(N)`` of a fixed ring R(D, n).
"""

from __future__ import annotations

import functools
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Iterable

import mpmath
from sympy import cyclotomic_poly, factorint, primitive_root

from .cyclofield import FiniteOrderCharacter, LocalElement, make_ring
from .errors import (
    DomainError,
    MissingUnitData,
    NotPrimitive,
    OddCharacter,
    RamifiedAtP,
    TrivialCharacter,
)
from .padic import vp

DEFAULT_BITS = 256


# ---------------------------------------------------------------------------
# exact cyclotomic numbers


@functools.lru_cache(maxsize=None)
def _cyclotomic_coeffs(N: int) -> tuple[int, ...]:
    """Phi_N, low degree first."""
    from sympy import Poly, Symbol

    x = Symbol("x")
    return tuple(int(c) for c in reversed(Poly(cyclotomic_poly(N, x), x).all_coeffs()))


class CyclotomicNumber:
    """sum_k c_k zeta_N^k with rational c_k (zeta_N = exp(2 pi i / N))."""

    __slots__ = ("N", "coeffs")

    def __init__(self, N: int, coeffs: dict[int, Fraction] | None = None):
        self.N = N
        clean = {}
        for k, c in (coeffs or {}).items():
            c = Fraction(c)
            if c:
                kk = k % N
                clean[kk] = clean.get(kk, Fraction(0)) + c
        self.coeffs = {k: c for k, c in clean.items() if c}

    @classmethod
    def rational(cls, q, N: int = 1) -> "CyclotomicNumber":
        return cls(N, {0: Fraction(q)})

    @classmethod
    def root(cls, N: int, k: int = 1) -> "CyclotomicNumber":
        return cls(N, {k: Fraction(1)})

    def lift(self, N: int) -> "CyclotomicNumber":
        if N % self.N:
            raise DomainError(f"Q(mu_{self.N}) is not contained in Q(mu_{N})")
        s = N // self.N
        return CyclotomicNumber(N, {k * s: c for k, c in self.coeffs.items()})

    def _common(self, other) -> tuple["CyclotomicNumber", "CyclotomicNumber"]:
        if not isinstance(other, CyclotomicNumber):
            other = CyclotomicNumber.rational(other, self.N)
        N = math.lcm(self.N, other.N)
        return self.lift(N), other.lift(N)

    def __add__(self, other):
        a, b = self._common(other)
        out = dict(a.coeffs)
        for k, c in b.coeffs.items():
            out[k] = out.get(k, Fraction(0)) + c
        return CyclotomicNumber(a.N, out)

    __radd__ = __add__

    def __neg__(self):
        return CyclotomicNumber(self.N, {k: -c for k, c in self.coeffs.items()})

    def __sub__(self, other):
        return self + (-other if isinstance(other, CyclotomicNumber) else -Fraction(other))

    def __rsub__(self, other):
        return (-self) + other

    def __mul__(self, other):
        if isinstance(other, (int, Fraction)):
            return CyclotomicNumber(self.N, {k: c * other for k, c in self.coeffs.items()})
        a, b = self._common(other)
        out: dict[int, Fraction] = {}
        for i, x in a.coeffs.items():
            for j, y in b.coeffs.items():
                k = (i + j) % a.N
                out[k] = out.get(k, Fraction(0)) + x * y
        return CyclotomicNumber(a.N, out).reduced()

    __rmul__ = __mul__

    def __truediv__(self, other):
        if isinstance(other, (int, Fraction)):
            return self * (1 / Fraction(other))
        return self * other.inverse()

    def __pow__(self, e: int):
        if e < 0:
            return self.inverse() ** (-e)
        out = CyclotomicNumber.rational(1, self.N)
        base = self
        while e:
            if e & 1:
                out = out * base
            base = base * base
            e >>= 1
        return out

    def reduced(self) -> "CyclotomicNumber":
        """Canonical representative: polynomial of degree < phi(N) modulo Phi_N."""
        N = self.N
        phi = _cyclotomic_coeffs(N)
        deg = len(phi) - 1
        if all(k < deg for k in self.coeffs):
            return CyclotomicNumber(N, self.coeffs)
        # integer arithmetic over a common denominator (Phi_N is monic)
        den = math.lcm(*(c.denominator for c in self.coeffs.values()))
        poly = [0] * N
        for k, c in self.coeffs.items():
            poly[k] += c.numerator * (den // c.denominator)
        nz = [j for j in range(deg) if phi[j]]
        for i in range(N - 1, deg - 1, -1):
            c = poly[i]
            if c:
                poly[i] = 0
                base = i - deg
                for j in nz:
                    poly[base + j] -= c * phi[j]
        return CyclotomicNumber(N, {k: Fraction(c, den) for k, c in enumerate(poly[:deg]) if c})

    def is_zero(self) -> bool:
        return not self.reduced().coeffs

    def __eq__(self, other) -> bool:
        if not isinstance(other, (CyclotomicNumber, int, Fraction)):
            return NotImplemented
        return (self - other).is_zero()

    def __hash__(self):
        r = self.reduced()
        return hash((r.N, tuple(sorted(r.coeffs.items()))))

    def key(self) -> tuple:
        r = self.reduced()
        return (r.N, tuple(sorted(r.coeffs.items())))

    def conjugate(self) -> "CyclotomicNumber":
        return CyclotomicNumber(self.N, {-k: c for k, c in self.coeffs.items()})

    def galois(self, a: int) -> "CyclotomicNumber":
        if math.gcd(a, self.N) != 1:
            raise DomainError("Galois index must be prime to N")
        return CyclotomicNumber(self.N, {a * k: c for k, c in self.coeffs.items()})

    def norm(self) -> Fraction:
        """Norm from Q(mu_N) to Q."""
        acc = CyclotomicNumber.rational(1, self.N)
        for a in range(1, self.N + 1):
            if math.gcd(a, self.N) == 1:
                acc = acc * self.galois(a)
        r = acc.reduced()
        if any(k for k in r.coeffs):
            raise DomainError("norm is not rational")
        return r.coeffs.get(0, Fraction(0))

    def inverse(self) -> "CyclotomicNumber":
        """1/x = (prod of the other conjugates) / norm."""
        acc = CyclotomicNumber.rational(1, self.N)
        for a in range(2, self.N + 1):
            if math.gcd(a, self.N) == 1:
                acc = acc * self.galois(a)
        nrm = (acc * self).reduced()
        if any(k for k in nrm.coeffs) or not nrm.coeffs:
            raise DomainError("cannot invert zero")
        return acc * (1 / nrm.coeffs[0])

    def rational_value(self) -> Fraction | None:
        r = self.reduced()
        if not r.coeffs:
            return Fraction(0)
        if set(r.coeffs) == {0}:
            return r.coeffs[0]
        return None

    def to_complex(self, bits: int = DEFAULT_BITS) -> mpmath.mpc:
        with mpmath.workprec(bits + 16):
            total = mpmath.mpc(0)
            for k, c in self.coeffs.items():
                total += mpmath.mpf(c.numerator) / c.denominator * mpmath.expjpi(mpmath.mpf(2 * k) / self.N)
            return +total

    def to_padic(self, emb: "PAdicEmbedding") -> LocalElement:
        return emb.image(self)

    def to_json(self) -> dict:
        r = self.reduced()
        return {"N": str(r.N), "coefficients": {str(k): str(c) for k, c in sorted(r.coeffs.items())}}

    def __repr__(self):
        return f"CyclotomicNumber({self.N}, {self.reduced().coeffs})"


# ---------------------------------------------------------------------------
# the p-adic embedding


class PAdicEmbedding:
    """iota_p: exp(2 pi i / N) -> root_of_unity(N) in R(D, n) for N | D p^n."""

    def __init__(self, p: int, D: int, n: int, M: int):
        if D % p == 0:
            raise DomainError("D must be prime to p")
        self.p, self.D, self.n, self.M = p, D, n, M
        self.ring = make_ring(D, n, p, M)
        self._roots: dict[int, list[LocalElement]] = {}

    @classmethod
    def for_orders(cls, p: int, orders: Iterable[int], M: int) -> "PAdicEmbedding":
        D, n = 1, 0
        for N in orders:
            t = vp(N, p) or 0
            n = max(n, t)
            D = math.lcm(D, N // p**t)
        return cls(p, D, n, M)

    def contains(self, N: int) -> bool:
        return (self.D * self.p**self.n) % N == 0

    def zeta(self, N: int, k: int = 1) -> LocalElement:
        if not self.contains(N):
            raise DomainError(f"mu_{N} not in R({self.D}, {self.n})")
        if N not in self._roots:
            z = self.ring.root_of_unity(N, 1)
            powers = [self.ring.one()]
            for _ in range(N - 1):
                powers.append(powers[-1] * z)
            self._roots[N] = powers
        return self._roots[N][k % N]

    def image(self, x: CyclotomicNumber) -> LocalElement:
        r = self.ring
        acc = r.zero()
        for k, c in x.coeffs.items():
            acc = acc + self.zeta(x.N, k) * c
        return acc


# ---------------------------------------------------------------------------
# Dirichlet characters


@functools.lru_cache(maxsize=None)
def canonical_generators(m: int) -> tuple[tuple[int, int], ...]:
    """(generator mod m, its order) for (Z/m)^x, one or two per prime power.

    Odd prime powers use the smallest primitive root; 4 uses -1; 2^k (k >= 3)
    uses -1 and 5.  Each generator is lifted by CRT to be 1 at the other
    prime powers.
    """
    gens = []
    for ell, k in sorted(factorint(m).items()):
        q = ell**k
        rest = m // q
        if ell == 2:
            local = [] if k == 1 else ([(q - 1, 2)] if k == 2 else [(q - 1, 2), (5, q // 4)])
        else:
            local = [(int(primitive_root(q)), (ell - 1) * ell ** (k - 1))]
        for g, order in local:
            a = g if rest == 1 else (g * rest * pow(rest, -1, q) + q * pow(q, -1, rest)) % m
            gens.append((a % m, order))
    return tuple(gens)


@functools.lru_cache(maxsize=None)
def _dlog_table(m: int) -> dict[int, tuple[int, ...]]:
    gens = canonical_generators(m)
    table = {1 % m: tuple(0 for _ in gens)}
    # enumerate the product of cyclic groups
    elems = [(1 % m, ())]
    for g, order in gens:
        new = []
        for a, exps in elems:
            x = a
            for e in range(order):
                new.append((x, exps + (e,)))
                x = x * g % m
        elems = new
    table = {a: exps for a, exps in elems}
    return table


def kronecker(D: int, n: int) -> int:
    """Kronecker symbol (D/n) for n >= 0."""
    if n == 0:
        return 1 if abs(D) == 1 else 0
    if n == 1:
        return 1
    result = 1
    for ell, k in factorint(n).items():
        if ell == 2:
            if D % 2 == 0:
                return 0
            s = 1 if D % 8 in (1, 7) else -1
        else:
            r = D % ell
            if r == 0:
                return 0
            s = 1 if pow(r, (ell - 1) // 2, ell) == 1 else -1
        result *= s**k
    return result


@dataclass(frozen=True)
class DirichletData:
    """chi mod m with chi(g_i) = zeta_order^{images[i]} on canonical generators."""

    modulus: int
    order: int
    images: tuple[int, ...]
    label: str = ""

    def __post_init__(self):
        gens = canonical_generators(self.modulus)
        if len(gens) != len(self.images):
            raise DomainError(f"mod {self.modulus} needs {len(gens)} generator images")
        for (g, o), e in zip(gens, self.images):
            if (e * o) % self.order:
                raise DomainError(f"image of {g} is not an {o}-th root of unity")
        object.__setattr__(self, "images", tuple(e % self.order for e in self.images))

    # constructors

    @classmethod
    def trivial(cls, m: int = 1) -> "DirichletData":
        return cls(m, 1, tuple(0 for _ in canonical_generators(m)), "trivial")

    @classmethod
    def from_exponent_function(cls, m: int, order: int, fn, label: str = "") -> "DirichletData":
        return cls(m, order, tuple(fn(g) % order for g, _ in canonical_generators(m)), label)

    @classmethod
    def quadratic(cls, D: int, label: str = "") -> "DirichletData":
        """Kronecker character of the fundamental discriminant D (modulus |D|)."""
        m = abs(D)
        return cls.from_exponent_function(m, 2, lambda g: 0 if kronecker(D, g) == 1 else 1,
                                          label or f"kronecker({D})")

    @classmethod
    def from_gamma_character(cls, eta: FiniteOrderCharacter) -> "DirichletData":
        """eta as a Dirichlet character mod p^n, trivial on mu_{p-1}."""
        if eta.is_trivial:
            return cls.trivial(1)
        p, n = eta.p, eta.conductor_exp
        return cls.from_exponent_function(p**n, p ** (n - 1), eta.exponent_at, eta.label())

    @classmethod
    def teichmuller(cls, emb: PAdicEmbedding, power: int = 1) -> "DirichletData":
        """omega^power, with omega(a) = iota_p^{-1}(Teichmuller lift of a)."""
        p = emb.p
        z = emb.zeta(p - 1, 1)
        c = z.c[0] % p
        if any(v % p for v in z.c[1:]):
            raise DomainError("zeta_{p-1} not in Z_p")
        logs = {}
        x = 1
        for e in range(p - 1):
            logs[x] = e
            x = x * c % p
        return cls.from_exponent_function(p, p - 1, lambda g: power * logs[g % p],
                                          f"omega^{power}")

    @classmethod
    def from_config(cls, data: dict) -> "DirichletData":
        return cls(int(data["modulus"]), int(data["order"]),
                   tuple(int(e) for e in data["generator_images"]), data.get("label", ""))

    def to_config(self) -> dict:
        return {"modulus": self.modulus, "order": self.order,
                "generator_images": list(self.images), "label": self.label}

    # values

    def exponent(self, a: int) -> int | None:
        """e with chi(a) = zeta_order^e, or None when gcd(a, m) > 1."""
        m = self.modulus
        if m == 1:
            return 0
        a %= m
        if math.gcd(a, m) != 1:
            return None
        exps = _dlog_table(m)[a]
        return sum(e * x for e, x in zip(self.images, exps)) % self.order

    def value(self, a: int) -> CyclotomicNumber:
        e = self.exponent(a)
        if e is None:
            return CyclotomicNumber.rational(0, self.order)
        return CyclotomicNumber.root(self.order, e)

    def complex_value(self, a: int, bits: int = DEFAULT_BITS) -> mpmath.mpc:
        e = self.exponent(a)
        if e is None:
            return mpmath.mpc(0)
        with mpmath.workprec(bits + 16):
            return mpmath.expjpi(mpmath.mpf(2 * e) / self.order)

    def padic_value(self, a: int, emb: PAdicEmbedding) -> LocalElement:
        e = self.exponent(a)
        if e is None:
            return emb.ring.zero()
        return emb.zeta(self.order, e)

    @property
    def is_trivial(self) -> bool:
        return all(e == 0 for e in self.images)

    @property
    def parity(self) -> int:
        e = self.exponent(-1)
        if e == 0:
            return 1
        if 2 * e == self.order:
            return -1
        raise DomainError("chi(-1) must be +-1")

    @property
    def is_even(self) -> bool:
        return self.parity == 1

    def __mul__(self, other: "DirichletData") -> "DirichletData":
        m = math.lcm(self.modulus, other.modulus)
        order = math.lcm(self.order, other.order)
        sa, sb = order // self.order, order // other.order

        def fn(g):
            ea, eb = self.exponent(g), other.exponent(g)
            return ea * sa + eb * sb

        label = f"{self.label}*{other.label}" if self.label and other.label else ""
        return DirichletData.from_exponent_function(m, order, fn, label)._minimal_order()

    def inverse(self) -> "DirichletData":
        return DirichletData(self.modulus, self.order, tuple(-e for e in self.images),
                             f"{self.label}^-1" if self.label else "")

    def _minimal_order(self) -> "DirichletData":
        g = self.order
        for e in self.images:
            g = math.gcd(g, e)
        if g in (0, self.order):
            return DirichletData(self.modulus, 1, tuple(0 for _ in self.images), self.label)
        return DirichletData(self.modulus, self.order // g, tuple(e // g for e in self.images),
                             self.label)

    def induced(self, m: int) -> "DirichletData":
        if m % self.modulus:
            raise DomainError("new modulus must be a multiple")
        return DirichletData.from_exponent_function(m, self.order, lambda g: self.exponent(g),
                                                    self.label)

    @functools.cached_property
    def conductor(self) -> int:
        m = self.modulus
        for f in sorted(d for d in range(1, m + 1) if m % d == 0):
            ok = True
            for a in range(1 + f, m, f) if f < m else []:
                if math.gcd(a, m) == 1 and self.exponent(a) != 0:
                    ok = False
                    break
            if ok:
                return f
        return m

    @property
    def is_primitive(self) -> bool:
        return self.conductor == self.modulus

    def primitive(self) -> "DirichletData":
        f = self.conductor
        if f == self.modulus:
            return self
        m = self.modulus

        def fn(g):
            a = g
            while math.gcd(a, m) != 1:
                a += f
            return self.exponent(a)

        return DirichletData.from_exponent_function(f, self.order, fn, self.label)._minimal_order()

    def complex_values(self, bits: int = DEFAULT_BITS) -> list:
        return [self.complex_value(a, bits) for a in range(self.modulus)]


# ---------------------------------------------------------------------------
# abelian Artin data


@dataclass(frozen=True)
class ArtinAbelian:
    """rho = sum of Dirichlet characters (the trivial character excluded)."""

    summands: tuple[DirichletData, ...]
    label: str = ""

    def __post_init__(self):
        for chi in self.summands:
            if chi.primitive().is_trivial:
                raise TrivialCharacter("rho must not contain the trivial representation")

    @property
    def d(self) -> int:
        return len(self.summands)

    @property
    def d_plus(self) -> int:
        return sum(1 for chi in self.summands if chi.is_even)

    @property
    def d_minus(self) -> int:
        return self.d - self.d_plus

    @property
    def conductor(self) -> int:
        out = 1
        for chi in self.summands:
            out *= chi.conductor
        return out

    def frobenius_eigenvalues(self, p: int) -> list[CyclotomicNumber]:
        """sigma_p eigenvalues chi_i(p), one per summand."""
        out = []
        for chi in self.summands:
            if chi.conductor % p == 0:
                raise RamifiedAtP(f"{chi.label} is ramified at {p}")
            out.append(chi.primitive().value(p))
        return out

    def infinity_eigenvalues(self) -> list[int]:
        return [chi.parity for chi in self.summands]

    def dual(self) -> "ArtinAbelian":
        return ArtinAbelian(tuple(chi.inverse() for chi in self.summands), f"{self.label}*")


# ---------------------------------------------------------------------------
# Gauss sums


def gauss_sum_global(chi: DirichletData) -> CyclotomicNumber:
    """g(chi) = sum_a chi(a) exp(2 pi i a / m) for primitive chi."""
    if not chi.is_primitive:
        raise NotPrimitive(f"{chi.label or chi} is not primitive")
    m = chi.modulus
    if m == 1:
        return CyclotomicNumber.rational(1)
    N = math.lcm(chi.order, m)
    so, sm = N // chi.order, N // m
    coeffs: dict[int, Fraction] = {}
    for a in range(m):
        e = chi.exponent(a)
        if e is not None:
            k = (e * so + a * sm) % N
            coeffs[k] = coeffs.get(k, Fraction(0)) + 1
    return CyclotomicNumber(N, coeffs).reduced()


def galois_gauss_sum_character(chi: DirichletData) -> CyclotomicNumber:
    """tau(chi) = g(chi^{-1})."""
    return gauss_sum_global(chi.primitive().inverse())


def galois_gauss_sum(rho: ArtinAbelian, eta: FiniteOrderCharacter | None = None,
                     p: int | None = None) -> CyclotomicNumber:
    """tau(rho (x) eta) = tau(rho) g(eta^{-1})^d det(rho)^{-1}(sigma_p^n) eta^{-1}(N)."""
    tau = CyclotomicNumber.rational(1)
    for chi in rho.summands:
        tau = tau * galois_gauss_sum_character(chi)
    if eta is None or eta.is_trivial:
        return tau
    p = eta.p
    n = eta.conductor_exp
    N = rho.conductor
    if N % p == 0:
        raise RamifiedAtP("rho must be unramified at p")
    eta_d = DirichletData.from_gamma_character(eta)
    g_inv = gauss_sum_global(eta_d.inverse())
    det_p = CyclotomicNumber.rational(1)
    for ev in rho.frobenius_eigenvalues(p):
        det_p = det_p * ev
    factor = g_inv ** rho.d * det_p.inverse() ** n * eta_d.inverse().value(N)
    return tau * factor


def galois_gauss_sum_direct(rho: ArtinAbelian, eta: FiniteOrderCharacter) -> CyclotomicNumber:
    """prod_i g((chi_i eta)^{-1}) computed from the twisted characters themselves."""
    eta_d = DirichletData.from_gamma_character(eta)
    tau = CyclotomicNumber.rational(1)
    for chi in rho.summands:
        tau = tau * gauss_sum_global((chi.primitive() * eta_d).primitive().inverse())
    return tau


# ---------------------------------------------------------------------------
# Bernoulli numbers and L-values


@functools.lru_cache(maxsize=None)
def bernoulli_numbers(n: int) -> tuple[Fraction, ...]:
    """B_0..B_n with B_1 = -1/2."""
    B = [Fraction(1)]
    for k in range(1, n + 1):
        B.append(-sum(math.comb(k + 1, j) * B[j] for j in range(k)) / (k + 1))
    return tuple(B)


@functools.lru_cache(maxsize=None)
def bernoulli_polynomial(n: int) -> tuple[Fraction, ...]:
    """Coefficients of B_n(x), low degree first."""
    B = bernoulli_numbers(n)
    return tuple(math.comb(n, k) * B[n - k] for k in range(n + 1))


def bernoulli_poly_eval(n: int, x: Fraction) -> Fraction:
    acc = Fraction(0)
    for c in reversed(bernoulli_polynomial(n)):
        acc = acc * x + c
    return acc


def bernoulli_general(n: int, chi: DirichletData) -> CyclotomicNumber:
    """B_{n,chi} = f^{n-1} sum_{a=1}^f chi(a) B_n(a/f) for the primitive chi mod f."""
    if n < 1:
        raise DomainError("n must be >= 1")
    chi = chi.primitive()
    f = chi.modulus
    coeffs: dict[int, Fraction] = {}
    for a in range(1, f + 1):
        e = chi.exponent(a)
        if e is None:
            continue
        coeffs[e] = coeffs.get(e, Fraction(0)) + bernoulli_poly_eval(n, Fraction(a, f))
    scale = Fraction(f) ** (n - 1)
    return CyclotomicNumber(chi.order, {k: v * scale for k, v in coeffs.items()}).reduced()


def l_value_nonpositive(chi: DirichletData, n: int) -> CyclotomicNumber:
    """L(chi, 1-n) = -B_{n,chi}/n (n >= 1)."""
    if chi.primitive().is_trivial:
        raise TrivialCharacter("use the Riemann zeta function")
    return bernoulli_general(n, chi) * Fraction(-1, n)


def l_value_at_one(chi: DirichletData, bits: int = DEFAULT_BITS) -> mpmath.mpc:
    """L(chi, 1) for primitive nontrivial chi by the finite formulas.

    even: -(g(chi)/f) sum chi^{-1}(a) log|1 - zeta^a|
    odd:  pi i g(chi)/f^2 sum chi^{-1}(a) a
    """
    chi = chi.primitive()
    if chi.is_trivial:
        raise TrivialCharacter("L(1, trivial) has a pole")
    f = chi.modulus
    with mpmath.workprec(bits + 32):
        g = gauss_sum_global(chi).to_complex(bits + 32)
        inv = chi.inverse()
        total = mpmath.mpc(0)
        if chi.is_even:
            for a in range(1, f):
                if math.gcd(a, f) == 1:
                    total += inv.complex_value(a, bits + 32) * mpmath.log(2 * abs(mpmath.sin(mpmath.pi * a / f)))
            val = -g / f * total
        else:
            for a in range(1, f):
                if math.gcd(a, f) == 1:
                    total += inv.complex_value(a, bits + 32) * a
            val = mpmath.pi * 1j * g / f**2 * total
        return +val


def l_value_at_one_digamma(chi: DirichletData, bits: int = DEFAULT_BITS) -> mpmath.mpc:
    """L(chi, 1) = -(1/f) sum_a chi(a) digamma(a/f), for nontrivial primitive chi."""
    chi = chi.primitive()
    if chi.is_trivial:
        raise TrivialCharacter("L(1, trivial) has a pole")
    f = chi.modulus
    with mpmath.workprec(bits + 32):
        total = mpmath.mpc(0)
        for a in range(1, f):
            if math.gcd(a, f) == 1:
                total += chi.complex_value(a, bits + 32) * mpmath.digamma(mpmath.mpf(a) / f)
        return +(-total / f)


def l_leading_at_zero(chi: DirichletData, bits: int = DEFAULT_BITS) -> mpmath.mpc:
    """Leading term of L(chi^{-1}, s) at s = 0 from the functional equation:
    tau(chi) / 2^{d+} * L(chi, 1) / (i pi)^{d-}, tau(chi) = g(chi^{-1})."""
    chi = chi.primitive()
    with mpmath.workprec(bits + 32):
        tau = galois_gauss_sum_character(chi).to_complex(bits + 32)
        L1 = l_value_at_one(chi, bits + 32)
        if chi.is_even:
            return +(tau / 2 * L1)
        return +(tau * L1 / (1j * mpmath.pi))


def class_number_ratio(D: int, h: int, epsilon: tuple[Fraction, Fraction],
                       bits: int = DEFAULT_BITS) -> mpmath.mpf:
    """L(chi_D, 1) sqrt(D) / (2 h log eps) for a real quadratic field of
    discriminant D, eps = a + b sqrt(D') given as (a, b) with D' the squarefree
    part of D."""
    chi = DirichletData.quadratic(D)
    a, b = epsilon
    sq = D if D % 4 == 1 else D // 4
    with mpmath.workprec(bits + 32):
        eps = mpmath.mpf(a.numerator) / a.denominator + mpmath.mpf(b.numerator) / b.denominator * mpmath.sqrt(sq)
        L1 = l_value_at_one(chi, bits + 32)
        return +(mpmath.re(L1) * mpmath.sqrt(D) / (2 * h * mpmath.log(eps)))


# ---------------------------------------------------------------------------
# unit vectors


@dataclass(frozen=True)
class UnitTerm:
    """c (x) u with u described by log|iota_inf(u)|, iota_p(u) and ord_p(u)."""

    coeff: CyclotomicNumber
    log_abs: mpmath.mpf | None
    padic: LocalElement | None
    valuation: Fraction = Fraction(0)
    tag: str = ""


@dataclass
class UnitVector:
    """Formal sum sum_a c_a (x) u_a, written additively."""

    terms: list[UnitTerm] = field(default_factory=list)
    label: str = ""

    def __add__(self, other: "UnitVector") -> "UnitVector":
        return UnitVector(self.terms + other.terms, f"{self.label}+{other.label}")

    def scale(self, c) -> "UnitVector":
        return UnitVector([UnitTerm(t.coeff * c, t.log_abs, t.padic, t.valuation, t.tag)
                           for t in self.terms], self.label)

    def log_infinity(self, bits: int = DEFAULT_BITS) -> mpmath.mpc:
        """-sum c log|iota_inf(u)|."""
        with mpmath.workprec(bits + 16):
            total = mpmath.mpc(0)
            for t in self.terms:
                if t.log_abs is None:
                    raise MissingUnitData(f"no complex value for {t.tag}")
                total -= t.coeff.to_complex(bits) * t.log_abs
            return +total

    def _grouped(self) -> dict:
        groups: dict = {}
        for t in self.terms:
            if t.padic is None:
                raise MissingUnitData(f"no p-adic value for {t.tag}")
            k = t.coeff.key()
            if k in groups:
                c, u, v = groups[k]
                groups[k] = (c, u * t.padic, v + t.valuation)
            else:
                groups[k] = (t.coeff, t.padic, t.valuation)
        return groups

    def log_p(self, emb: PAdicEmbedding) -> LocalElement:
        """sum c log_p(iota_p(u)), terms with equal coefficients multiplied first."""
        acc = emb.ring.zero()
        for c, u, _ in self._grouped().values():
            lg = u.log_iw()
            lg = _to_ring(lg, emb)
            acc = acc + emb.image(c) * lg
        return acc

    def ord_p(self, emb: PAdicEmbedding) -> LocalElement:
        acc = emb.ring.zero()
        for t in self.terms:
            if t.valuation:
                acc = acc + emb.image(t.coeff) * t.valuation
        return acc

    def to_json(self) -> dict:
        return {"label": self.label, "terms": [
            {"coeff": t.coeff.to_json(), "tag": t.tag, "valuation": str(t.valuation),
             "complex_log": None if t.log_abs is None else mpmath.nstr(t.log_abs, 30)}
            for t in self.terms]}


def _to_ring(x: LocalElement, emb: PAdicEmbedding) -> LocalElement:
    if x.ring.key == emb.ring.key:
        return x
    if x.ring.M != emb.ring.M:
        x = x.at_precision(emb.ring.M)
    if x.ring.key == emb.ring.key:
        return x
    return x.lift(emb.ring)


def cyclotomic_unit(psi: DirichletData, emb: PAdicEmbedding,
                    bits: int = DEFAULT_BITS) -> UnitVector:
    """sum_a psi^{-1}(a) (x) (zeta_M^a - 1) for even nontrivial primitive psi mod M."""
    psi = psi.primitive()
    if psi.is_trivial:
        raise TrivialCharacter("trivial character has no cyclotomic unit")
    if not psi.is_even:
        raise OddCharacter("cyclotomic units need an even character")
    M = psi.modulus
    p = emb.p
    inv = psi.inverse()
    t = vp(M, p) or 0
    prime_power = M == p**t
    terms = []
    with mpmath.workprec(bits + 16):
        for a in range(1, M):
            if math.gcd(a, M) != 1:
                continue
            z = emb.zeta(M, a) - emb.ring.one()
            val = Fraction(1, (p - 1) * p ** (t - 1)) if prime_power else Fraction(0)
            la = mpmath.log(2 * abs(mpmath.sin(mpmath.pi * a / M)))
            terms.append(UnitTerm(inv.value(a), la, z, val, f"zeta_{M}^{a}-1"))
    return UnitVector(terms, f"cyc({psi.label or psi.modulus})")

