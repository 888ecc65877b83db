"""Coleman power series, the operator L, and Coleman maps into measures.

Power series have coefficients in O_K = Z_p[x]/h(x) (the unramified ring of
R(d, 0)) and are truncated at T^N.  Closed-form Coleman series are supplied by
the built-in families below; the inverse construction (series from an
arbitrary tower) is not implemented.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Sequence

from .cyclofield import (
    FiniteOrderCharacter,
    LocalElement,
    LocalRing,
    _cached_ring,
    e_eta_project,
    gamma_log,
    gauss_sum_local,
    make_ring,
)
from .errors import (
    DepthExhausted,
    DomainError,
    IntegralityViolation,
    LevelMismatch,
    MissingSeries,
    NotInIsotypicPart,
    NotStabilizable,
    SingularAtPrecision,
    TruncationTooShort,
)
from .measures import FractionalMeasure, IwasawaMeasure, group_algebra_inverse
from .padic import PadicValue, ZeroTest, vp


def _ilog(n: int, p: int) -> int:
    t = 0
    while p ** (t + 1) <= n:
        t += 1
    return t


def teichmuller_int(b: int, p: int, K: int) -> int:
    """omega(b) modulo p^K as a nonnegative integer."""
    return pow(b, p ** (K - 1), p**K)


# ---------------------------------------------------------------------------
# power series over O_K


class PowerSeries:
    """sum_{i<N} a_i T^i with a_i in O_K, stored as c / p^k modulo p^(prec+k)."""

    __slots__ = ("base", "c", "k", "N", "prec")

    def __init__(self, base: LocalRing, c: list[int], N: int, k: int = 0,
                 prec: int | None = None):
        if base.n != 0:
            raise LevelMismatch("series coefficients live in the unramified ring")
        p = base.p
        prec = base.M - k if prec is None else min(prec, base.M - k)
        mod = p ** (prec + k)
        size = N * base.f
        c = [v % mod for v in c[:size]] + [0] * max(0, size - len(c))
        while k > 0 and all(v % p == 0 for v in c):
            c = [v // p for v in c]
            k -= 1
        self.base, self.c, self.k, self.N, self.prec = base, c, k, N, prec

    # constructors

    @classmethod
    def from_ints(cls, base: LocalRing, coeffs: Sequence[int], N: int) -> "PowerSeries":
        f = base.f
        c = [0] * (N * f)
        for i, a in enumerate(coeffs[:N]):
            c[i * f] = int(a)
        return cls(base, c, N)

    @classmethod
    def from_base_coeffs(cls, base: LocalRing, coeffs: Sequence[Sequence[int]], N: int) -> "PowerSeries":
        f = base.f
        c = [0] * (N * f)
        for i, vec in enumerate(coeffs[:N]):
            for j, v in enumerate(vec):
                c[i * f + j] = int(v)
        return cls(base, c, N)

    @classmethod
    def constant(cls, a: LocalElement, N: int) -> "PowerSeries":
        if a.ring.n != 0:
            raise LevelMismatch("constant must lie in the unramified ring")
        return cls(a.ring, list(a.c), N, a.k, a.prec)

    @property
    def f(self) -> int:
        return self.base.f

    def coefficient(self, i: int) -> LocalElement:
        f = self.f
        return LocalElement(self.base, self.c[i * f:(i + 1) * f], self.k, self.prec)

    def constant_term(self) -> LocalElement:
        return self.coefficient(0)

    def _like(self, c, k=None, prec=None) -> "PowerSeries":
        return PowerSeries(self.base, c, self.N, self.k if k is None else k,
                           self.prec if prec is None else prec)

    # arithmetic

    def _align(self, other: "PowerSeries"):
        if other.base.key[:4] != self.base.key[:4] and other.base.key[:3] != self.base.key[:3]:
            raise LevelMismatch("different coefficient rings")
        if other.N != self.N:
            raise TruncationTooShort("different truncation orders")
        k = max(self.k, other.k)
        p = self.base.p
        a = [v * p ** (k - self.k) for v in self.c]
        b = [v * p ** (k - other.k) for v in other.c]
        return a, b, k, min(self.prec, other.prec)

    def __add__(self, other: "PowerSeries") -> "PowerSeries":
        a, b, k, prec = self._align(other)
        return self._like([x + y for x, y in zip(a, b)], k, prec)

    def __sub__(self, other: "PowerSeries") -> "PowerSeries":
        a, b, k, prec = self._align(other)
        return self._like([x - y for x, y in zip(a, b)], k, prec)

    def __neg__(self) -> "PowerSeries":
        return self._like([-v for v in self.c])

    def scale_int(self, a: int) -> "PowerSeries":
        return self._like([v * a for v in self.c])

    def div_p(self, t: int = 1) -> "PowerSeries":
        return self._like(list(self.c), self.k + t, self.prec - t)

    def __mul__(self, other: "PowerSeries") -> "PowerSeries":
        if isinstance(other, int):
            return self.scale_int(other)
        if other.N != self.N:
            raise TruncationTooShort("different truncation orders")
        base = self.base
        c = _series_mul(base, self.c, other.c, self.N)
        lb_a, lb_b = self._lower_bound(), other._lower_bound()
        prec = min(self.prec + lb_b, other.prec + lb_a)
        return PowerSeries(base, c, self.N, self.k + other.k, prec)

    def _lower_bound(self) -> int:
        vals = [vp(v, self.base.p) for v in self.c if v]
        return (min(vals) if vals else self.prec) - self.k

    def __pow__(self, e: int) -> "PowerSeries":
        if e < 0:
            return self.inverse() ** (-e)
        result = PowerSeries.from_ints(self.base, [1], self.N)
        base = self
        while e:
            if e & 1:
                result = result * base
            e >>= 1
            if e:
                base = base * base
        return result

    def shift_down(self, t: int = 1) -> "PowerSeries":
        """Divide by T^t (the first t coefficients must vanish)."""
        f = self.f
        mod = self.base.p ** (self.prec + self.k)
        if any(v % mod for v in self.c[: t * f]):
            raise DomainError("series is not divisible by T^t")
        return self._like(self.c[t * f:] + [0] * (t * f))

    def frobenius(self, t: int = 1) -> "PowerSeries":
        base = self.base
        if base.f == 1:
            return self
        f = base.f
        mat = base._frob_matrix(t)
        out = [0] * len(self.c)
        for i in range(self.N):
            for j in range(f):
                v = self.c[i * f + j]
                if v:
                    for l in range(f):
                        out[i * f + l] += v * mat[j][l]
        return self._like(out)

    def inverse(self) -> "PowerSeries":
        a0 = self.constant_term()
        if a0.valuation() != 0:
            raise DomainError("constant term is not a unit")
        x = PowerSeries.constant(a0.inverse(), self.N)
        two = PowerSeries.from_ints(self.base, [2], self.N)
        steps = max(1, self.N.bit_length() + 1)
        for _ in range(steps):
            x = x * (two - self * x)
        return x

    def compose(self, g: "PowerSeries") -> "PowerSeries":
        """self(g(T)) for g with zero constant term (Horner)."""
        if g.constant_term().is_zero() is ZeroTest.NONZERO:
            raise DomainError("inner series must have zero constant term")
        acc = PowerSeries(self.base, [0] * len(self.c), self.N)
        for i in range(self.N - 1, -1, -1):
            acc = acc * g + PowerSeries.constant(self.coefficient(i), self.N)
        return acc

    def derivative(self) -> "PowerSeries":
        f = self.f
        out = [0] * len(self.c)
        for i in range(1, self.N):
            for j in range(f):
                out[(i - 1) * f + j] = self.c[i * f + j] * i
        return self._like(out)

    def integral(self) -> "PowerSeries":
        """Antiderivative with zero constant term (denominators are tracked)."""
        p, f = self.base.p, self.f
        vmax = max((vp(i, p) for i in range(1, self.N)), default=0)
        mod = self.base.p ** (self.base.M)
        out = [0] * len(self.c)
        for i in range(1, self.N):
            t = vp(i, p)
            unit_inv = pow(i // p**t, -1, mod)
            scale = unit_inv * p ** (vmax - t)
            for j in range(f):
                out[i * f + j] = self.c[(i - 1) * f + j] * scale
        return self._like(out, self.k + vmax, self.prec - vmax)

    def log(self) -> "PowerSeries":
        """log_p of a unit series: log(a_0) + integral(F'/F), log(mu(K)) = 0."""
        a0 = self.constant_term()
        lg0 = a0.log_iw()
        rest = (self.derivative() * self.inverse()).integral()
        return rest + PowerSeries.constant(lg0, self.N)

    def truncated(self, N: int) -> "PowerSeries":
        f = self.f
        return PowerSeries(self.base, self.c[: N * f], N, self.k, self.prec)

    def evaluate(self, t: LocalElement) -> LocalElement:
        """Evaluate at t (an element of R(d, n) with the same d)."""
        ring = t.ring
        acc = ring.zero()
        for i in range(self.N - 1, -1, -1):
            acc = acc * t + self.coefficient(i).lift(ring)
        return acc

    def residual_valuation(self, other: "PowerSeries") -> int:
        d = self - other
        vals = [vp(v, self.base.p) for v in d.c if v]
        return (min(vals) - d.k) if vals else d.prec

    def with_storage(self, M: int) -> "PowerSeries":
        base = _cached_ring(self.base.d, 0, self.base.p, M, self.base.policy)
        return PowerSeries(base, list(self.c), self.N, self.k, min(self.prec, M - self.k))

    def to_json(self) -> dict:
        return {"p": str(self.base.p), "d": str(self.base.d), "N": str(self.N),
                "denominator_exponent": str(self.k), "precision": str(self.prec),
                "coefficients": [str(v) for v in self.c]}


def _series_mul(base: LocalRing, a: Sequence[int], b: Sequence[int], N: int) -> list[int]:
    f = base.f
    g = 2 * f - 1
    width = 2 * (base.M + 4) * base.p.bit_length() + (N * f).bit_length() + 8
    ma = max((abs(v) for v in a), default=0).bit_length()
    mb = max((abs(v) for v in b), default=0).bit_length()
    width = max(width, ma + mb + (N * f).bit_length() + 2)
    wb = (width + 7) // 8
    ba = bytearray(N * g * wb)
    bb = bytearray(N * g * wb)
    for i in range(N):
        for j in range(f):
            s = (i * g + j) * wb
            va, vb = a[i * f + j], b[i * f + j]
            if va:
                ba[s:s + wb] = va.to_bytes(wb, "little")
            if vb:
                bb[s:s + wb] = vb.to_bytes(wb, "little")
    prod = int.from_bytes(ba, "little") * int.from_bytes(bb, "little")
    raw = prod.to_bytes((2 * N * g + 1) * wb, "little")
    out = [0] * (N * f)
    for i in range(N):
        poly = [int.from_bytes(raw[(i * g + j) * wb:(i * g + j + 1) * wb], "little")
                for j in range(g)]
        if f == 1:
            out[i] = poly[0]
        else:
            red = base._base_reduce(poly)
            out[i * f:(i + 1) * f] = red
    return out


def binomial_series(W: int, N: int, base: LocalRing) -> PowerSeries:
    """(1+T)^W truncated at T^N (W a nonnegative integer)."""
    coeffs = [1]
    b = 1
    for i in range(1, N):
        b = b * (W - i + 1) // i
        coeffs.append(b)
    return PowerSeries.from_ints(base, coeffs, N)


def padic_exponent(w: int, p: int, N: int, M: int) -> int:
    """Nonnegative integer W = w mod p^K with K large enough that
    (1+T)^W and (1+T)^w agree modulo p^M up to T^N."""
    K = M + _ilog(max(N, 1), p) + 1
    return w % p**K


# ---------------------------------------------------------------------------
# the operator L


def coleman_operator(f: PowerSeries, valuation_at_zero: int = 0) -> PowerSeries:
    """L(f) = (1/p) log(f^p / phi(f)((1+T)^p - 1)) for a unit series f."""
    if valuation_at_zero:
        raise DomainError("L is defined on unit power series only")
    base = f.base
    p = base.p
    g = binomial_series(p, f.N, base) - PowerSeries.from_ints(base, [1], f.N)
    ratio = (f**p) * f.frobenius().compose(g).inverse()
    lg = ratio.log()
    mod = p ** (lg.prec + lg.k)
    if lg.k == 0 and any(v % p for v in lg.c if v % mod):
        raise IntegralityViolation("log(f^p / phi(f)(...)) is not divisible by p")
    out = lg.div_p(1)
    if out.k > 0:
        # integrality: after dividing by p, no denominators may remain
        raise IntegralityViolation(f"L(f) has denominator p^{out.k}")
    return out


def coleman_operator_precision(M: int, N: int, p: int) -> int:
    """Storage precision that yields L(f) correct modulo p^M."""
    return M + 2 * _ilog(max(N, 1), p) + 4


# ---------------------------------------------------------------------------
# norm-coherent sequences


@dataclass
class NormCoherentSequence:
    """u_n for 1 <= n <= depth, u_n in R(d, n); optional Coleman series.

    ``series_factory(N, M)`` returns the Coleman power series truncated at T^N
    with storage precision M.
    """

    p: int
    d: int
    entries: dict[int, LocalElement]
    series_factory: Callable[[int, int], PowerSeries] | None = None
    kind: str = "units"
    label: str = ""

    @property
    def depth(self) -> int:
        return max(self.entries)

    def entry(self, n: int) -> LocalElement:
        if n not in self.entries:
            raise DepthExhausted(f"level {n} not stored (depth {self.depth})")
        return self.entries[n]

    def series(self, N: int, M: int) -> PowerSeries:
        if self.series_factory is None:
            raise MissingSeries(f"no Coleman series for {self.label or 'sequence'}")
        return self.series_factory(N, M)

    def is_coherent(self, at: int | None = None) -> bool:
        for n in range(2, self.depth + 1):
            if n - 1 in self.entries and not self.entries[n].norm_down().equals(
                    self.entries[n - 1], at):
                return False
        return True

    def times(self, other: "NormCoherentSequence") -> "NormCoherentSequence":
        entries = {n: self.entries[n] * other.entries[n]
                   for n in self.entries if n in other.entries}
        fa, fb = self.series_factory, other.series_factory
        if fa is not None and fb is not None:
            def factory(N, M):
                return fa(N, M) * fb(N, M)
        else:
            factory = None
        return NormCoherentSequence(self.p, self.d, entries, factory, self.kind,
                                    f"({self.label})*({other.label})")

    def power(self, e: int) -> "NormCoherentSequence":
        entries = {n: u**e for n, u in self.entries.items()}
        fa = self.series_factory
        factory = None if fa is None else (lambda N, M: fa(N, M) ** e)
        return NormCoherentSequence(self.p, self.d, entries, factory, self.kind,
                                    f"({self.label})^{e}")

    def to_json(self) -> dict:
        return {"p": str(self.p), "d": str(self.d), "depth": str(self.depth),
                "kind": self.kind, "label": self.label,
                "entries": {str(n): u.to_json() for n, u in sorted(self.entries.items())}}

    @classmethod
    def from_json(cls, data: dict, M: int | None = None) -> "NormCoherentSequence":
        p, d = int(data["p"]), int(data["d"])
        entries = {}
        for key, item in data["entries"].items():
            n = int(key)
            coeffs = [int(c) for c in item["coefficients"]]
            prec = int(item.get("precision", M or 10))
            k = int(item.get("denominator_exponent", 0))
            ring = make_ring(d, n, p, M or prec + k)
            entries[n] = ring.element(coeffs, k=k, prec=prec)
        return cls(p, d, entries, None, data.get("kind", "units"), data.get("label", ""))


def delta_norm(v: LocalElement) -> LocalElement:
    """N_Delta(v) = prod over Delta = Gal(K(mu_{p^n})/K_{n-1}) of sigma(v)."""
    r = v.ring
    p = r.p
    acc = None
    for b in range(1, p):
        s = v.sigma(teichmuller_int(b, p, max(r.n, 1)) % r.pn if r.n else 1)
        acc = s if acc is None else acc * s
    return acc


def _twisted_ratio(a_exp: int, b_exp: int, N: int, base: LocalRing) -> PowerSeries:
    """((1+T)^{a} - 1) / ((1+T)^{b} - 1) for integer exponents with v_p(b) = 0."""
    one = PowerSeries.from_ints(base, [1], N + 1)
    num = (binomial_series(a_exp, N + 1, base) - one).shift_down().truncated(N)
    den = (binomial_series(b_exp, N + 1, base) - one).shift_down().truncated(N)
    return num * den.inverse()


def cyclotomic_unit_family(p: int, a: int, depth: int, M: int,
                           delta_normed: bool = True) -> NormCoherentSequence:
    """c_n(a) = (zeta_n^a - 1)/(zeta_n - 1), or its Delta-norm (default).

    Coleman series: ((1+T)^a - 1)/T, resp. prod_delta of its twists by the
    Teichmuller characters.
    """
    if a % p == 0:
        raise DomainError("a must be prime to p")
    entries = {}
    for n in range(1, depth + 1):
        r = make_ring(1, n, p, M)
        v = (r.zeta_power(a) - r.one()) * (r.zeta - r.one()).inverse()
        entries[n] = delta_norm(v) if delta_normed else v

    def factory(N: int, W: int) -> PowerSeries:
        base = make_ring(1, 0, p, W)
        if not delta_normed:
            return _twisted_ratio(a, 1, N, base)
        acc = None
        for b in range(1, p):
            w = padic_exponent(teichmuller_int(b, p, W + 8), p, N, W)
            term = _twisted_ratio(a * w, w, N, base)
            acc = term if acc is None else acc * term
        return acc

    label = f"N_Delta c_n({a})" if delta_normed else f"c_n({a})"
    return NormCoherentSequence(p, 1, entries, factory, "principal-units" if delta_normed
                                else "units", label)


def unramified_twist_family(p: int, d: int, depth: int, M: int) -> NormCoherentSequence:
    """Delta-norm of v_n = phi^{-n}(zeta_d) zeta_n - 1 over K = Q_p(mu_d).

    Coleman series zeta_d (1+T) - 1 before the norm; here u_0 != 1.
    """
    entries = {}
    f = make_ring(d, 0, p, M).f
    for n in range(1, depth + 1):
        r = make_ring(d, n, p, M)
        zd = r.x_power(1).frobenius(-n % f)
        v = zd * r.zeta - r.one()
        entries[n] = delta_norm(v)

    def factory(N: int, W: int) -> PowerSeries:
        base = make_ring(d, 0, p, W)
        x = base.x_power(1)
        acc = None
        for b in range(1, p):
            w = padic_exponent(teichmuller_int(b, p, W + 8), p, N, W)
            term = binomial_series(w, N, base) * PowerSeries.constant(x, N) \
                - PowerSeries.from_ints(base, [1], N)
            acc = term if acc is None else acc * term
        return acc

    return NormCoherentSequence(p, d, entries, factory, "units", f"N_Delta(zeta_{d} zeta_n - 1)")


def uniformizer_family(p: int, depth: int, M: int) -> NormCoherentSequence:
    """pi_n = N_Delta(zeta_n - 1); v_1 = p has ord_p = 1.  Series T^{p-1} U(T)."""
    entries = {}
    for n in range(1, depth + 1):
        r = make_ring(1, n, p, M)
        entries[n] = delta_norm(r.zeta - r.one())
    return NormCoherentSequence(p, 1, entries, None, "nonzero", "N_Delta(zeta_n - 1)")


def gamma_power_twist_family(p: int, c: int, depth: int, M: int) -> NormCoherentSequence:
    """(gamma_0^c - 1) pi as a unit sequence: sigma_chi(pi_n) / pi_n with chi = (1+p)^c.

    Coleman series prod_delta ((1+T)^{chi w} - 1)/((1+T)^{w} - 1).
    """
    entries = {}
    for n in range(1, depth + 1):
        r = make_ring(1, n, p, M)
        pi = delta_norm(r.zeta - r.one())
        chi = pow(1 + p, c, r.pn)
        entries[n] = pi.sigma(chi) * pi.inverse()

    def factory(N: int, W: int) -> PowerSeries:
        base = make_ring(1, 0, p, W)
        acc = None
        for b in range(1, p):
            K = W + _ilog(max(N, 1), p) + 1
            w = padic_exponent(teichmuller_int(b, p, K + 8), p, N, W)
            chi = pow(1 + p, c, p**K)
            term = _twisted_ratio(chi * w % p**K, w, N, base)
            acc = term if acc is None else acc * term
        return acc

    return NormCoherentSequence(p, 1, entries, factory, "principal-units",
                                f"(gamma_0^{c} - 1) N_Delta(zeta_n - 1)")


# ---------------------------------------------------------------------------
# the Coleman map


def default_truncation(p: int, n: int, M: int) -> int:
    """T-degree so that truncation error vanishes modulo p^M in O[Z/p^n]."""
    return p**n * (M + n + 1)


@dataclass
class ColemanMeasure:
    """Col(u) at level m = n - 1 together with diagnostic data.

    ``coords[j]`` is the Z_p-measure of the x^j coordinate of the O_K-valued
    measure (a single coordinate when K = Q_p).
    """

    p: int
    d: int
    coords: list[IwasawaMeasure]
    support_residual: int
    base: LocalRing

    @property
    def measure(self) -> IwasawaMeasure:
        if len(self.coords) != 1:
            raise DomainError("O_K-valued measure; use coords or coleman_isotypic")
        return self.coords[0]

    def total_mass(self) -> LocalElement:
        vec = [c.level(0)[0] * c.p ** (max(x.denominator for x in self.coords) - c.denominator)
               for c in self.coords]
        den = max(x.denominator for x in self.coords)
        prec = min(x.precision for x in self.coords)
        return LocalElement(self.base, vec, den, prec)

    def eval_character(self, eta: FiniteOrderCharacter) -> LocalElement:
        """int eta dmu as an element of R(d, n)."""
        n = max(eta.conductor_exp, 0)
        ring = make_ring(self.d, n, self.p, self.base.M)
        acc = ring.zero()
        cyc = make_ring(1, n, self.p, self.base.M)
        for j, mu in enumerate(self.coords):
            acc = acc + mu.eval_character(eta, cyc).lift(ring) * ring.x_power(j)
        return acc


def coleman_map(u: NormCoherentSequence, level: int, M: int = 10,
                N: int | None = None) -> ColemanMeasure:
    """Col(u) restricted to Gamma, at level `level` (group Gamma_level).

    Computed from L(f_u) reduced modulo (1+T)^{p^n} - 1, n = level + 1, then
    pushed forward along Z_p^x -> Gamma with the 1/(p-1) averaging.
    """
    p = u.p
    n = level + 1
    N = default_truncation(p, n, M) if N is None else N
    W = coleman_operator_precision(M, N, p) + n
    f = u.series(N, W)
    L = coleman_operator(f)
    base = L.base
    fdim = base.f
    size = p**n
    mod = p ** (L.prec + L.k)
    # T-basis -> (1+T)-basis, folded modulo X^{p^n} = 1
    lam = [[0] * fdim for _ in range(size)]
    for j in range(fdim):
        s = [L.c[i * fdim + j] for i in range(N)]
        for x in range(N):
            acc = 0
            for i in range(x, N):
                if s[i]:
                    term = s[i] * math.comb(i, x)
                    acc += -term if (i - x) % 2 else term
            lam[x % size][j] += acc
    lam = [[v % mod for v in row] for row in lam]
    support = min((vp(lam[x][j], p) for x in range(0, size, p) for j in range(fdim)
                   if lam[x][j]), default=L.prec + L.k) - L.k
    inv = pow(p - 1, -1, mod)
    coords = []
    gsize = p**level
    for j in range(fdim):
        top = [0] * gsize
        for x in range(1, size):
            if x % p:
                top[gamma_log(x, p, n) % gsize if n >= 2 else 0] += lam[x][j]
        top = [v * inv % mod for v in top]
        coords.append(IwasawaMeasure.from_top(p, top, min(M, L.prec), L.k))
    return ColemanMeasure(p, u.d, coords, support, base)


# ---------------------------------------------------------------------------
# verification of Coleman's characterization


@dataclass
class CheckResult:
    name: str
    residual_valuation: Fraction | int
    required: int
    detail: dict = field(default_factory=dict)

    @property
    def passed(self) -> bool:
        return self.residual_valuation >= self.required

    def to_json(self) -> dict:
        return {"name": self.name, "residual_valuation": str(self.residual_valuation),
                "certificate": str(self.required), "pass": self.passed,
                **{k: v for k, v in self.detail.items()}}


def verify_coleman_series(u: NormCoherentSequence, M: int = 10, N: int | None = None,
                          frobenius_power: bool = True) -> list[CheckResult]:
    """Check f(zeta_n - 1) = phi^n(u_n) for stored n, and the norm relation
    prod_i f(zeta_1^i (1+T) - 1) = phi(f)((1+T)^p - 1) modulo (p^M, T^N)."""
    p, d = u.p, u.d
    results = []
    depth = u.depth
    Nval = N or (p - 1) * p ** (depth - 1) * (M + 2) + 1
    W = M + 6
    f = u.series(Nval, W)
    for n in range(1, depth + 1):
        ring = make_ring(d, n, p, W)
        lhs = f.evaluate(ring.zeta - ring.one())
        target = u.entry(n).at_precision(W)
        if frobenius_power:
            target = target.frobenius(n)
        res = lhs.residual_valuation(target)
        results.append(CheckResult(f"f(zeta_{n}-1) = phi^{n}(u_{n})", res, M))
    # norm relation over R(d, 1)[[T]]
    Nrel = N or 4 * p
    results.append(_distribution_check(u, Nrel, M))
    return results


def _distribution_check(u: NormCoherentSequence, N: int, M: int) -> CheckResult:
    p, d = u.p, u.d
    W = M + 6
    # substituting zeta - 1 (valuation 1/(p-1)) needs the series to this degree
    Nf = max(N, (p - 1) * (M + 4))
    f = u.series(Nf, W)
    ring = make_ring(d, 1, p, W)
    coeffs = [f.coefficient(i).lift(ring) for i in range(Nf)]
    prod = None
    for i in range(p):
        z = ring.zeta_power(i)
        # f(z (1+T) - 1) = sum_k a_k (z - 1 + z T)^k
        lin = [z - ring.one(), z]
        acc = [ring.zero() for _ in range(N)]
        for a in reversed(coeffs):
            acc = _ser_mul(acc, lin, N, ring)
            acc[0] = acc[0] + a
        prod = acc if prod is None else _ser_mul(prod, acc, N, ring)
    g = binomial_series(p, Nf, f.base) - PowerSeries.from_ints(f.base, [1], Nf)
    rhs = f.frobenius().compose(g)
    res = min(prod[i].residual_valuation(rhs.coefficient(i).lift(ring)) for i in range(N))
    return CheckResult("prod_i f(zeta_1^i(1+T)-1) = phi(f)((1+T)^p-1)", res, M,
                       {"truncation": str(N)})


def _ser_mul(a: list, b: list, N: int, ring: LocalRing) -> list:
    out = [ring.zero() for _ in range(N)]
    for i, x in enumerate(a):
        if x.is_zero() is ZeroTest.UNKNOWN:
            continue
        for j, y in enumerate(b):
            if i + j >= N:
                break
            out[i + j] = out[i + j] + x * y
    return out


# ---------------------------------------------------------------------------
# special values


def special_value_rhs(u: NormCoherentSequence, eta: FiniteOrderCharacter, M: int) -> LocalElement:
    """p^{n-1}/g(eta^{-1}) * phi^n(e_eta log u_n), using
    1/g(eta^{-1}) = eta(-1) g(eta) / p^n."""
    n = eta.conductor_exp
    if n > u.depth:
        raise DepthExhausted(f"need level {n}, depth {u.depth}")
    p = u.p
    W = M + 2 * n + 4
    un = u.entry(n).at_precision(W)
    ring = un.ring
    lg = un.log_iw()
    proj = e_eta_project(eta, lg).frobenius(n)
    g = gauss_sum_local(eta, make_ring(1, n, p, W)).lift(ring)
    sign = eta.value(ring, -1)
    return (proj * g * sign).div_p(1)


def special_value_check(u: NormCoherentSequence, eta: FiniteOrderCharacter, M: int = 10,
                        required: int | None = None) -> CheckResult:
    """Compare int eta dCol(u) with the special-value formula in R(d, n)."""
    required = M - 2 if required is None else required
    if eta.is_trivial:
        return constant_term_check(u, M, required)
    n = eta.conductor_exp
    if n > u.depth:
        raise DepthExhausted(f"need level {n}, depth {u.depth}")
    col = coleman_map(u, n - 1, M + 2)
    lhs = col.eval_character(eta)
    rhs = special_value_rhs(u, eta, M + 2)
    ring = rhs.ring
    lhs = lhs.at_precision(ring.M) if lhs.ring.M != ring.M else lhs
    res = lhs.lift(ring).residual_valuation(rhs) if lhs.ring.key != ring.key else \
        lhs.residual_valuation(rhs)
    return CheckResult(f"special value at {eta.label()}", res, required,
                       {"lhs": lhs.to_json(), "rhs": rhs.to_json()})


def constant_term_check(u: NormCoherentSequence, M: int = 10,
                        required: int | None = None) -> CheckResult:
    """(1 - phi^{-1}) int dCol(u) = (1 - phi/p) log(u_1) in K.

    The stated formula divides by 1 - phi^{-1}, which is only invertible on
    the trace-zero part of K; the identity is checked after multiplying
    through, which is equivalent there.
    """
    required = M - 2 if required is None else required
    col = coleman_map(u, 0, M + 2)
    mass = col.total_mass()
    u1 = u.entry(1)
    f = mass.ring.f
    W = mass.ring.M
    u1b = u1.descend(_cached_ring(u.d, 0, u.p, u1.ring.M, u1.ring.policy))
    lg = u1b.at_precision(W).log_iw()
    lhs = mass - mass.frobenius(-1 % f)
    rhs = lg - lg.frobenius(1).div_p(1)
    res = lhs.residual_valuation(rhs)
    # u_0 = (1 - phi^{-1}) f(0), written multiplicatively
    f0 = u.series(1, W).constant_term()
    u0 = f0 * f0.frobenius(-1 % f).inverse()
    v0 = (u0 - u0.ring.one()).valuation()
    detail = {"u0_is_one": v0 is None}
    return CheckResult("constant term (1-phi^-1) int mu = (1-phi/p) log u_1", res, required,
                       detail)


# ---------------------------------------------------------------------------
# isotypic components


def _beta_root(base: LocalRing, beta: int) -> LocalElement:
    return base.from_rational(beta)


def isotypic_project(x: LocalElement, beta: int) -> LocalElement:
    """m(e_delta x) = (1/f) sum_k beta^{-k} phi^k(x) for delta(phi) = beta."""
    f = x.ring.f
    acc = x.ring.zero()
    for k in range(f):
        acc = acc + x.frobenius(k) * Fraction(1, beta**k)
    return acc / f


def coleman_isotypic(u: NormCoherentSequence, beta: int, level: int, M: int = 10,
                     project: bool = True) -> ColemanMeasure:
    """Col^delta(u) for delta(phi) = beta, beta a root of unity in Z_p.

    With ``project`` the delta-part of Col(u) is taken; otherwise Col(u) must
    already lie in it.
    """
    col = coleman_map(u, level, M)
    f = col.base.f
    if pow(beta, f) != 1:
        raise NotInIsotypicPart(f"beta={beta} is not an f-th root of unity")
    if beta == 1 and f > 1 and not project:
        pass
    p = u.p
    size = p**level
    coords = [[0] * size for _ in range(f)]
    den = max(c.denominator for c in col.coords)
    prec = min(c.precision for c in col.coords)
    base = col.base
    for j in range(size):
        vec = [c.level(level)[j] * p ** (den - c.denominator) for c in col.coords]
        el = LocalElement(base, vec, den, prec)
        proj = isotypic_project(el, beta) if project else el
        if not project:
            if not proj.frobenius(1).equals(proj * beta, prec - 1):
                raise NotInIsotypicPart("Col(u) is not in the beta-eigenspace of phi")
        kk = proj.k
        for t in range(f):
            coords[t][j] = proj.c[t] * p ** (max(den, kk) - kk)
    kk = max(den, 0)
    measures = [IwasawaMeasure.from_top(p, coords[t], prec, max(den, kk)) for t in range(f)]
    return ColemanMeasure(p, u.d, measures, col.support_residual, base)


def isotypic_constant_term_check(u: NormCoherentSequence, beta: int, M: int = 10,
                                 required: int | None = None) -> CheckResult:
    """int Col^delta(u) = (1 - beta/p)/(1 - beta^{-1}) m(e_delta log u_1), beta != 1."""
    required = M - 2 if required is None else required
    if beta == 1:
        raise NotInIsotypicPart("beta = 1 forces delta trivial")
    col = coleman_isotypic(u, beta, 0, M + 2)
    lhs = col.total_mass()
    u1 = u.entry(1).descend(_cached_ring(u.d, 0, u.p, u.entry(1).ring.M, u.entry(1).ring.policy))
    lg = u1.at_precision(lhs.ring.M).log_iw()
    factor = (1 - Fraction(beta, u.p)) / (1 - Fraction(1, beta))
    rhs = isotypic_project(lg, beta) * factor
    return CheckResult(f"isotypic constant term (beta={beta})", lhs.residual_valuation(rhs),
                       required)


# ---------------------------------------------------------------------------
# extended map for p-units


def coleman_extended(v: NormCoherentSequence, c: int, level: int, M: int = 10,
                     twisted: NormCoherentSequence | None = None) -> FractionalMeasure:
    """(1/a) Col(a v) with a = gamma_0^c - 1, normalized to a pole at gamma_0 - 1.

    ``twisted`` is the unit sequence a v with its Coleman series; for unit
    sequences v (kind "units") the plain Coleman map is returned.
    """
    if v.kind in ("units", "principal-units") and twisted is None:
        return FractionalMeasure(coleman_map(v, level, M).measure, 0)
    if twisted is None:
        raise NotStabilizable("need the Coleman series of (gamma^c - 1) v")
    p = v.p
    if c % p == 0:
        raise NotStabilizable("c must be prime to p")
    mu = coleman_map(twisted, level, M).measure
    # gamma^c - 1 = (gamma - 1)(1 + gamma + ... + gamma^{c-1})
    top = [0] * p**level
    for i in range(c):
        top[i % p**level] += 1
    geo = IwasawaMeasure.from_top(p, top, mu.precision)
    num = mu * group_algebra_inverse(geo)
    return FractionalMeasure(num, 1)


def extended_constant_term(v1_ord: int, c: int, p: int, M: int) -> PadicValue:
    """(1 - 1/p) log_p(chi_cyc(gamma_0^c)) ord_p(v_1)."""
    from .padic import log_iw
    L = log_iw(PadicValue(p, 1 + p, 0, M + 2))
    return L * c * v1_ord * Fraction(p - 1, p)


# ---------------------------------------------------------------------------
# wedge determinants


def determinant(matrix: list[list], one=None):
    """Laplace expansion (any commutative ring elements)."""
    n = len(matrix)
    if n == 0:
        return one
    if n == 1:
        return matrix[0][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * determinant(minor, one)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def wedge_coleman_det(psi: list[list[NormCoherentSequence]], betas: Sequence[int],
                      eta: FiniteOrderCharacter, M: int = 10) -> dict:
    """Two paths for det(int eta dCol^{delta_i}(Psi_j(t_i))):

    left: determinant of the per-entry Coleman evaluations;
    right: (p^{n-1}/g(eta^{-1}))^{d+} prod beta_i^n det(m(e_delta e_eta log Psi_j(t_i)_n)).
    """
    if eta.is_trivial:
        raise DomainError("eta must be nontrivial")
    d = len(psi)
    n = eta.conductor_exp
    for row in psi:
        for s in row:
            if s.depth < n:
                raise DepthExhausted(f"need level {n}")
    p = psi[0][0].p
    W = M + 2 * n + 4
    left_entries = []
    right_entries = []
    for i in range(d):
        lrow, rrow = [], []
        for j in range(d):
            seq = psi[i][j]
            col = coleman_isotypic(seq, betas[i], n - 1, M + 2) if seq.d > 1 else \
                coleman_map(seq, n - 1, M + 2)
            lrow.append(col.eval_character(eta))
            un = seq.entry(n).at_precision(W)
            proj = e_eta_project(eta, un.log_iw())
            if un.ring.f > 1:
                proj = isotypic_project(proj, betas[i])
            rrow.append(proj)
        left_entries.append(lrow)
        right_entries.append(rrow)
    ring = right_entries[0][0].ring
    left = determinant([[x.at_precision(ring.M).lift(ring) if x.ring.key != ring.key else x
                         for x in row] for row in left_entries])
    g = gauss_sum_local(eta, make_ring(1, n, p, W)).lift(ring)
    scalar = (g * eta.value(ring, -1)).div_p(1)
    beta_prod = 1
    for b in betas:
        beta_prod *= b**n
    right = determinant(right_entries) * (scalar**d) * beta_prod
    res = left.residual_valuation(right)
    if left.valuation() is None and right.valuation() is None:
        raise SingularAtPrecision("both determinants vanish at precision")
    return {"left": left, "right": right, "residual_valuation": res}
