"""p-stabilizations, Stark regulators, Euler factors and L-invariants.

For abelian rho = chi_1 + ... + chi_d the eigenbasis of sigma_p is the list of
summand lines, so a p-stabilization spanned by eigenvectors is a set of d+
summand indices; a general one is a linear combination of such wedges.
Determinants are taken with rows and columns in increasing index order.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import mpmath

from .characters import (
    ArtinAbelian,
    CyclotomicNumber,
    PAdicEmbedding,
    UnitTerm,
    UnitVector,
    class_number_ratio,
)
from .errors import (
    EigenvalueListMismatch,
    IncompleteOrbit,
    InadmissibleStabilization,
    SingularOMinus,
    SingularWithinBound,
    TrivialCharacter,
)
from .measures import FractionalMeasure, IwasawaMeasure
from .padic import PadicValue, ZeroTest


# ---------------------------------------------------------------------------
# determinants over any commutative ring of Python values


def determinant(matrix: Sequence[Sequence], one=1):
    """Laplace expansion along the first row; the empty matrix has det ``one``."""
    n = len(matrix)
    if n == 0:
        return one
    if any(len(row) != n for row in matrix):
        raise ValueError("matrix must be square")
    if n == 1:
        return matrix[0][0]
    if n == 2:
        return matrix[0][0] * matrix[1][1] - matrix[0][1] * matrix[1][0]
    total = None
    for j in range(n):
        minor = [row[:j] + row[j + 1:] for row in matrix[1:]]
        term = matrix[0][j] * determinant(minor, one)
        if j % 2:
            term = -term
        total = term if total is None else total + term
    return total


def _zero_test(x) -> ZeroTest:
    if isinstance(x, (int, Fraction)):
        return ZeroTest.ZERO if x == 0 else ZeroTest.NONZERO
    return x.is_zero()


# ---------------------------------------------------------------------------
# stabilizations


@dataclass(frozen=True)
class PStabilization:
    """W_p^+ given by wedge coefficients {alpha: c_alpha}, alpha a d+-subset."""

    rho: ArtinAbelian
    p: int
    coefficients: tuple[tuple[tuple[int, ...], Fraction], ...]
    label: str = ""

    @classmethod
    def from_indices(cls, rho: ArtinAbelian, p: int, indices: Sequence[int],
                     label: str = "") -> "PStabilization":
        return cls(rho, p, ((tuple(sorted(indices)), Fraction(1)),), label)

    @classmethod
    def from_coefficients(cls, rho: ArtinAbelian, p: int,
                          coeffs: dict[tuple[int, ...], Fraction], label: str = "") -> "PStabilization":
        items = tuple(sorted((tuple(sorted(a)), Fraction(c)) for a, c in coeffs.items() if c))
        stab = cls(rho, p, items, label)
        stab.check_eigenvalue_lists()
        return stab

    @classmethod
    def from_config(cls, rho: ArtinAbelian, p: int, data: dict) -> "PStabilization":
        if "eigenbasis_indices" in data:
            return cls.from_indices(rho, p, data["eigenbasis_indices"], data.get("label", ""))
        coeffs = {tuple(int(i) for i in k.split(",")): Fraction(v)
                  for k, v in data["coefficients"].items()}
        return cls.from_coefficients(rho, p, coeffs, data.get("label", ""))

    @property
    def d_plus(self) -> int:
        return len(self.coefficients[0][0]) if self.coefficients else 0

    @property
    def eigenvalues(self) -> list[CyclotomicNumber]:
        return self.rho.frobenius_eigenvalues(self.p)

    def _eig_list(self, alpha: tuple[int, ...]) -> list:
        ev = self.eigenvalues
        return sorted(ev[i].key() for i in alpha)

    def check_eigenvalue_lists(self):
        if not self.coefficients:
            return
        ref = self._eig_list(self.coefficients[0][0])
        for alpha, _ in self.coefficients[1:]:
            if self._eig_list(alpha) != ref:
                raise EigenvalueListMismatch(f"{alpha} has a different sigma_p spectrum")

    @property
    def plus_indices(self) -> tuple[int, ...]:
        return self.coefficients[0][0] if self.coefficients else ()

    @property
    def plus_eigenvalues(self) -> list[CyclotomicNumber]:
        ev = self.eigenvalues
        return [ev[i] for i in self.plus_indices]

    @property
    def minus_eigenvalues(self) -> list[CyclotomicNumber]:
        ev = self.eigenvalues
        return [ev[i] for i in range(self.rho.d) if i not in self.plus_indices]

    @property
    def e(self) -> int:
        return sum(1 for b in self.minus_eigenvalues if b == 1)

    @property
    def f(self) -> int:
        return sum(1 for b in self.eigenvalues if b == 1)

    def to_json(self) -> dict:
        return {"label": self.label, "p": str(self.p),
                "coefficients": {",".join(map(str, a)): str(c) for a, c in self.coefficients},
                "e": str(self.e), "d_plus": str(self.d_plus)}


def wrong_eigenvalue_stabilization(stab: PStabilization,
                                   eigenvalues: Sequence[CyclotomicNumber]) -> "ExplicitEigenvalues":
    """A stabilization record carrying a supplied (possibly wrong) eigenvalue list."""
    return ExplicitEigenvalues(list(eigenvalues), stab.minus_eigenvalues)


@dataclass
class ExplicitEigenvalues:
    plus: list[CyclotomicNumber]
    minus: list[CyclotomicNumber]


# ---------------------------------------------------------------------------
# Euler factors


def euler_factor_exact(plus: Sequence[CyclotomicNumber], minus: Sequence[CyclotomicNumber],
                       p: int) -> CyclotomicNumber:
    """prod_{W+}(1 - beta/p) prod_{W- minus W^{-,0}}(1 - beta^{-1})."""
    out = CyclotomicNumber.rational(1)
    for b in plus:
        out = out * (CyclotomicNumber.rational(1) - b * Fraction(1, p))
    for b in minus:
        if b == 1:
            continue
        out = out * (CyclotomicNumber.rational(1) - b.inverse())
    return out


def euler_factor(stab: PStabilization) -> CyclotomicNumber:
    return euler_factor_exact(stab.plus_eigenvalues, stab.minus_eigenvalues, stab.p)


# ---------------------------------------------------------------------------
# regulators


@dataclass(frozen=True)
class ComplexValue:
    value: mpmath.mpc
    error: mpmath.mpf
    bits: int

    def to_json(self) -> dict:
        return {"re": mpmath.nstr(mpmath.re(self.value), self.bits * 3 // 10),
                "im": mpmath.nstr(mpmath.im(self.value), self.bits * 3 // 10),
                "error_bound": mpmath.nstr(self.error, 5), "bits": str(self.bits)}


@dataclass
class RegulatorInput:
    """columns[i][j] = psi_j(w_i) for the eigenbasis vectors w_i (d rows, d+ columns)."""

    columns: list[list[UnitVector]]
    omega_inf: tuple[int, ...]
    omega_inf_scale: Fraction = Fraction(1)

    @property
    def d_plus(self) -> int:
        return len(self.columns[0]) if self.columns else 0


def _complex_det(inp: RegulatorInput, bits: int) -> mpmath.mpc:
    with mpmath.workprec(bits + 32):
        mat = [[inp.columns[i][j].log_infinity(bits) for j in range(inp.d_plus)]
               for i in inp.omega_inf]
        return determinant(mat, mpmath.mpc(1)) * inp.omega_inf_scale


def complex_regulator(inp: RegulatorInput, bits: int = 256) -> ComplexValue:
    """det(log_inf psi_j(w_i)) for w_i in omega_inf^+, with a two-precision error bound."""
    if inp.d_plus == 0:
        return ComplexValue(mpmath.mpc(1), mpmath.mpf(0), bits)
    a = _complex_det(inp, bits)
    b = _complex_det(inp, bits + 64)
    with mpmath.workprec(bits + 64):
        err = abs(a - b) + mpmath.mpf(2) ** (-bits + 8) * (1 + abs(b))
        if abs(b) <= err:
            raise SingularWithinBound(f"|det| <= {mpmath.nstr(err, 5)}")
        return ComplexValue(b, err, bits)


def padic_regulator(inp: RegulatorInput, stab: PStabilization, emb: PAdicEmbedding):
    """sum_alpha c_alpha det(log_p psi_j(w_i))_{i in alpha}; returns (value, ZeroTest)."""
    total = None
    for alpha, c in stab.coefficients:
        mat = [[inp.columns[i][j].log_p(emb) for j in range(inp.d_plus)] for i in alpha]
        det = determinant(mat, emb.ring.one()) * c
        total = det if total is None else total + det
    if total is None:
        total = emb.ring.one()
    return total, total.is_zero()


def is_admissible(inp: RegulatorInput, stab: PStabilization, emb: PAdicEmbedding) -> str:
    """'admissible' when the regulator is nonzero; otherwise 'unknown' (never 'inadmissible')."""
    if stab.d_plus == 0:
        return "admissible"
    _, zt = padic_regulator(inp, stab, emb)
    return "admissible" if zt is ZeroTest.NONZERO else "unknown"


def regulator_quotient(log_p_matrix: Sequence[Sequence], log_inf_matrix: Sequence[Sequence],
                       one_p=1, one_inf=1):
    """Reg_p / Reg_inf for matching matrices (rows: basis vectors, columns: homomorphisms)."""
    return determinant(log_p_matrix, one_p), determinant(log_inf_matrix, one_inf)


# ---------------------------------------------------------------------------
# L-invariants


def l_invariant_matrices(A_plus, B_plus, A_minus, B_minus, O_minus, p: int, W: int):
    """det[[A+, B+], [A-, B-]] / (det A+ det O-); blocks are lists of rows."""
    dp = len(A_plus)
    e = len(B_minus)
    one = PadicValue.one(p, W)
    if e == 0:
        return one
    A_minus = A_minus or [[] for _ in range(e)]
    B_plus = B_plus or [[] for _ in range(dp)]
    top = [list(A_plus[i]) + list(B_plus[i]) for i in range(dp)]
    bottom = [list(A_minus[i]) + list(B_minus[i]) for i in range(e)]
    full = determinant(top + bottom, one)
    detA = determinant(A_plus, one)
    detO = determinant(O_minus, one)
    if _zero_test(detA) is not ZeroTest.NONZERO:
        raise InadmissibleStabilization("det A+ is zero at precision")
    if _zero_test(detO) is not ZeroTest.NONZERO:
        raise SingularOMinus("O- is singular at precision")
    return full / (detA * detO)


@dataclass
class LInvariantData:
    """Columns psi_j (in ker ord) and psi'_j, evaluated on t^+_i and t^-_i."""

    log_psi_plus: list[list]      # A+
    log_psi_prime_plus: list[list]  # B+
    log_psi_minus: list[list]     # A-
    log_psi_prime_minus: list[list]  # B-
    ord_psi_prime_minus: list[list]  # O-

    def to_json(self) -> dict:
        def enc(m):
            return [[x.to_json() if hasattr(x, "to_json") else str(x) for x in row] for row in m]

        return {"A_plus": enc(self.log_psi_plus), "B_plus": enc(self.log_psi_prime_plus),
                "A_minus": enc(self.log_psi_minus), "B_minus": enc(self.log_psi_prime_minus),
                "O_minus": enc(self.ord_psi_prime_minus)}


def l_invariant(stab: PStabilization, data: LInvariantData | None, p: int, W: int):
    """L(rho, rho+); equals 1 when e = 0."""
    if stab.e == 0:
        return PadicValue.one(p, W)
    if data is None:
        raise SingularOMinus("e > 0 needs the p-unit columns")
    return l_invariant_matrices(data.log_psi_plus, data.log_psi_prime_plus,
                                data.log_psi_minus, data.log_psi_prime_minus,
                                data.ord_psi_prime_minus, p, W)


# ---------------------------------------------------------------------------
# change of stabilization


def stabilization_decompose(stab: PStabilization) -> dict[tuple[int, ...], Fraction]:
    stab.check_eigenvalue_lists()
    return {a: c for a, c in stab.coefficients}


def combine_theta(thetas: dict[tuple[int, ...], IwasawaMeasure | FractionalMeasure],
                  coeffs: dict[tuple[int, ...], Fraction],
                  stab: PStabilization | None = None) -> FractionalMeasure:
    """sum_alpha c_alpha theta_alpha."""
    if stab is not None:
        ref = None
        for alpha in coeffs:
            lst = stab._eig_list(alpha)
            if ref is None:
                ref = lst
            elif lst != ref:
                raise EigenvalueListMismatch(f"{alpha} has a different sigma_p spectrum")
    total = None
    for alpha, c in sorted(coeffs.items()):
        th = thetas[alpha]
        if isinstance(th, IwasawaMeasure):
            th = FractionalMeasure(th, 0)
        term = th.scale(c)
        total = term if total is None else total + term
    return total


# ---------------------------------------------------------------------------
# monomial projections


def monomial_unit_projection(character_values: dict[int, CyclotomicNumber],
                             orbit: dict[int, UnitTerm], label: str = "") -> tuple[UnitVector, UnitVector]:
    """u_chi = sum_g chi(g) (x) g^{-1}(u) and its complex-conjugate companion.

    ``character_values`` maps group elements g to chi(g); ``orbit`` maps g to the
    data of g^{-1}(u).
    """
    if all(v == 1 for v in character_values.values()):
        raise TrivialCharacter("the projection needs a nontrivial character")
    missing = [g for g in character_values if g not in orbit]
    if missing:
        raise IncompleteOrbit(f"no conjugate data for {missing}")
    terms, conj = [], []
    for g in sorted(character_values):
        t = orbit[g]
        terms.append(UnitTerm(character_values[g], t.log_abs, t.padic, t.valuation, f"g={g}"))
        conj.append(UnitTerm(character_values[g].conjugate(), t.log_abs, t.padic, t.valuation,
                             f"g={g}"))
    return UnitVector(terms, label), UnitVector(conj, f"{label}-bar")


# ---------------------------------------------------------------------------
# Stark rationality


REAL_QUADRATIC_DATA = {
    5: {"h": 1, "epsilon": (Fraction(1, 2), Fraction(1, 2))},
    12: {"h": 1, "epsilon": (Fraction(2), Fraction(1))},
    8: {"h": 1, "epsilon": (Fraction(1), Fraction(1))},
    13: {"h": 1, "epsilon": (Fraction(3, 2), Fraction(1, 2))},
}


def stark_rationality_ratio(D: int, bits: int = 256) -> mpmath.mpf:
    """L(chi_D, 1) sqrt(D) / (2 h log eps), which the class number formula makes 1."""
    data = REAL_QUADRATIC_DATA[D]
    return class_number_ratio(D, data["h"], data["epsilon"], bits)
