"""Command-line driver: configuration, verification suites, evaluations and goldens.

Exit status: 0 all checks pass, 1 a check or golden comparison failed,
2 configuration or usage error, 3 a computation raised.
"""

from __future__ import annotations

import argparse
import difflib
import json
import random
import sys
import tempfile
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from fractions import Fraction
from importlib import resources
from pathlib import Path

import jsonschema
import mpmath

from .characters import (
    ArtinAbelian,
    CyclotomicNumber,
    DirichletData,
    PAdicEmbedding,
    UnitTerm,
    UnitVector,
    cyclotomic_unit,
)
from .coleman import (
    CheckResult,
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
from .cyclofield import FiniteOrderCharacter, LocalElement, make_ring, seed_policy
from .errors import (
    ArtinIwasawaError,
    ComputationError,
    ConfigError,
    GoldenMismatch,
    IntegralityViolation,
    SingularWithinBound,
)
from .lfunctions import (
    QuadraticPUnit,
    choose_regularizer,
    conductor_exponent,
    deligne_ribet,
    gamma_characters,
    level_stability,
    lp_eval,
    regularizer_independence,
    verify_EX,
    verify_EZC_gross,
    verify_interpolation,
)
from .padic import PadicValue, ZeroTest, vp
from .stark import (
    LInvariantData,
    PStabilization,
    RegulatorInput,
    complex_regulator,
    l_invariant,
    padic_regulator,
)

REPORT_VERSION = "1"
SUITES = ("coleman", "leopoldt", "ex", "ezc")
DATA = resources.files("artin_iwasawa") / "data"
SCHEMAS = resources.files("artin_iwasawa") / "schemas"


def conventions() -> dict:
    return {"gamma_0": "kappa(gamma_0) = 1 + p",
            "bernoulli_B1": "-1/2",
            "hensel_seed_policy": seed_policy(),
            "numbers": "decimal strings; complex values carry error bounds",
            "regularizer": "smallest c > 1 prime to dp with chi(c) != 1 mod p unless configured"}


# ---------------------------------------------------------------------------
# JSON helpers


def _read_json(path) -> dict:
    try:
        return json.loads(Path(path).read_text())
    except FileNotFoundError as exc:
        raise ConfigError(f"file not found: {path}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError(f"{path}: invalid JSON ({exc})") from exc


def schema(name: str) -> dict:
    return json.loads((SCHEMAS / f"{name}.schema.json").read_text())


def validate(data, name: str, where: str = ""):
    try:
        jsonschema.validate(data, schema(name))
    except jsonschema.ValidationError as exc:
        loc = "/".join(str(x) for x in exc.absolute_path)
        raise ConfigError(f"{where or name}: {loc or '<root>'}: {exc.message}") from exc


def dumps(obj) -> str:
    """Canonical serialization used for reports and goldens."""
    return json.dumps(obj, indent=2, sort_keys=True, ensure_ascii=True) + "\n"


def resolve_path(name: str, base: Path | None = None) -> Path:
    """A referenced file: absolute, relative to the config directory, or shipped data."""
    cands = [Path(name)]
    if base is not None:
        cands.append(base / name)
    cands.append(Path(str(DATA / name)))
    for c in cands:
        if c.is_file():
            return c
    raise ConfigError(f"referenced file does not exist: {name}")


# ---------------------------------------------------------------------------
# characters and unit data


def load_characters(path: str | None = None, base: Path | None = None) -> dict:
    table = json.loads((DATA / "characters.json").read_text())
    if path:
        extra = _read_json(resolve_path(path, base))
        validate(extra, "characters", str(path))
        table.update(extra)
    return table


def resolve_character(ref, table: dict) -> DirichletData:
    if isinstance(ref, str):
        if ref not in table:
            raise ConfigError(f"unknown character {ref!r}; known: {', '.join(sorted(table))}")
        data = dict(table[ref])
        data.setdefault("label", ref)
    else:
        data = ref
    try:
        return DirichletData.from_config(data)
    except (ValueError, ArtinIwasawaError) as exc:
        raise ConfigError(f"bad character {ref!r}: {exc}") from exc


def load_unit_input(data: dict) -> tuple[RegulatorInput, PAdicEmbedding, tuple[int, ...]]:
    """Unit-data JSON into regulator input; p-adic values live in R(D, 0)."""
    validate(data, "unit_data")
    p = int(data["p"])
    M = int(data.get("precision", 10))
    N = int(data.get("coeff_order", 1))
    emb = PAdicEmbedding.for_orders(p, [N, int(data.get("d", 1))], M)
    if emb.n:
        raise ConfigError("coeff_order and d must be prime to p")
    columns = []
    for row in data["rows"]:
        vecs = []
        for vec in row:
            terms = []
            for t in vec["terms"]:
                coeff = CyclotomicNumber.root(N, int(t["coeff_exponent"])) * \
                    Fraction(t.get("coeff_scale", "1"))
                log_abs = None if t.get("complex_log") is None else mpmath.mpf(t["complex_log"])
                padic = emb.ring.element([int(c) for c in t["padic_poly"]])
                terms.append(UnitTerm(coeff, log_abs, padic, Fraction(t.get("valuation", "0"))))
            vecs.append(UnitVector(terms, vec.get("label", "")))
        columns.append(vecs)
    if not columns or any(len(r) != len(columns[0]) for r in columns):
        raise ConfigError("unit rows must be non-empty and of equal length")
    omega = tuple(data.get("omega_inf", range(len(columns[0]))))
    return RegulatorInput(columns, omega), emb, omega


# ---------------------------------------------------------------------------
# configuration


@dataclass
class RunConfig:
    suites: tuple[str, ...]
    params: dict
    characters: dict
    output: str | None
    base: Path | None
    stabilization: dict | None = None

    def to_json(self) -> dict:
        out = {}
        for s in self.suites:
            prm = dict(self.params[s])
            if "character" in prm:
                prm["character"] = resolve_character(prm["character"], self.characters).to_config()
            out[s] = prm
        return out


def default_config() -> dict:
    return json.loads((DATA / "default_config.json").read_text())


FLAG_KEYS = {"p": "prime", "precision": "precision", "mmax": "m_max", "depth": "depth",
             "char": "character"}
SUITE_KEYS = {
    "coleman": {"prime", "precision", "depth"},
    "leopoldt": {"prime", "precision", "m_max", "character"},
    "ex": {"prime", "precision", "m_max", "character"},
    "ezc": {"prime", "precision", "m_max", "character"},
}


def build_config(args) -> RunConfig:
    cfg = default_config()
    base = None
    if getattr(args, "config", None):
        path = Path(args.config)
        user = _read_json(path)
        validate(user, "config", str(path))
        base = path.resolve().parent
        for key, val in user.items():
            if key in SUITES:
                cfg[key].update(val)
            else:
                cfg[key] = val
    suite = getattr(args, "suite", None)
    if suite is None:
        raise ConfigError("no suite selected (choose one of coleman, leopoldt, ex, ezc, all)")
    suites = tuple(cfg["suites"]) if suite == "all" else (suite,)
    if not suites:
        raise ConfigError("empty suite selection")
    for flag, key in FLAG_KEYS.items():
        val = getattr(args, flag, None)
        if val is None:
            continue
        for s in suites:
            if key in SUITE_KEYS[s]:
                cfg[s][key] = val
    cfg.pop("output", None)
    validate({k: v for k, v in cfg.items()}, "config", "effective configuration")
    characters = load_characters(cfg.get("character_file"), base)
    for s in suites:
        if "character" in cfg[s]:
            resolve_character(cfg[s]["character"], characters)
        if "unit_data" in cfg[s]:
            unit = _read_json(resolve_path(cfg[s]["unit_data"], base))
            validate(unit, "quadratic_p_unit", cfg[s]["unit_data"])
    output = getattr(args, "out", None)
    if output is None and getattr(args, "config", None):
        output = _read_json(args.config).get("output")
    return RunConfig(suites, {s: cfg[s] for s in suites}, characters, output, base,
                     cfg.get("stabilization"))


# ---------------------------------------------------------------------------
# suites


def _uniform(r: CheckResult, inputs: dict) -> dict:
    """A Coleman-module check in the common report layout."""
    d = r.to_json()
    return {"name": d.pop("name"), "inputs": {k: str(v) for k, v in sorted(inputs.items())},
            "lhs": d.pop("lhs", None), "rhs": d.pop("rhs", None),
            "residual_valuation": d.pop("residual_valuation"),
            "certificate": d.pop("certificate"), "required": str(r.required),
            "pass": d.pop("pass"), "detail": d}


def _measure_residual(a, b) -> int:
    diff = (a - b).top()
    vals = [vp(x, a.p) for x in diff if x]
    return min(vals) if vals else min(a.precision, b.precision)


def _random_unit_series(rng: random.Random, base, N: int) -> PowerSeries:
    p, W = base.p, base.M
    coeffs = [rng.randrange(1, p) + p * rng.randrange(p ** (W - 1))]
    coeffs += [rng.randrange(p**W) for _ in range(N - 1)]
    return PowerSeries.from_ints(base, coeffs, N)


def operator_checks(p: int, N: int, M: int, samples: int, seed: int) -> list[CheckResult]:
    """L(fg) = L(f) + L(g) and integrality of L on random unit series."""
    rng = random.Random(seed)
    base = make_ring(1, 0, p, coleman_operator_precision(M, N, p))
    worst_add = Fraction(M)
    integral_failures = 0
    for _ in range(samples):
        f = _random_unit_series(rng, base, N)
        g = _random_unit_series(rng, base, N)
        try:
            lf, lg, lfg = coleman_operator(f), coleman_operator(g), coleman_operator(f * g)
        except IntegralityViolation:
            integral_failures += 1
            continue
        diff = lfg - lf - lg
        zero = PowerSeries.from_ints(base, [0], N)
        worst_add = min(worst_add, Fraction(diff.residual_valuation(zero)))
    detail = {"samples": str(samples), "truncation": str(N), "seed": str(seed)}
    return [CheckResult("L additive on random unit series", worst_add, M, detail),
            CheckResult("L integral on random unit series",
                        M if integral_failures == 0 else 0, M,
                        {**detail, "failures": str(integral_failures)})]


def _special_value_etas(p: int, depth: int) -> list[FiniteOrderCharacter]:
    out = []
    for n in range(2, depth + 1):
        ks = [k for k in range(1, p ** (n - 1)) if k % p]
        out += [FiniteOrderCharacter(p, n, k) for k in (ks if n == 2 else ks[:1])]
    return out


def suite_coleman(prm: dict) -> dict:
    p, depth, M = prm["prime"], prm["depth"], prm["precision"]
    store = M + 6
    checks = []
    for r in operator_checks(p, prm["operator_truncation"], M, prm["operator_samples"],
                             prm["seed"]):
        checks.append(_uniform(r, {"p": p, "M": M}))
    u = cyclotomic_unit_family(p, prm["unit_a"], depth, store)
    fam = {"family": u.label, "p": p, "depth": depth}
    for r in verify_coleman_series(u, M=M):
        checks.append(_uniform(r, fam))
    for eta in _special_value_etas(p, depth):
        checks.append(_uniform(special_value_check(u, eta, M), {**fam, "eta": eta.label()}))
    checks.append(_uniform(constant_term_check(u, M), fam))
    w = unramified_twist_family(p, prm["twist_d"], min(depth, 2), store)
    checks.append(_uniform(constant_term_check(w, M), {"family": w.label, "p": p}))
    # extended map on the uniformizer tower, for gamma_0^c - 1 with two values of c
    pi = uniformizer_family(p, 2, store)
    ordp = pi.entry(1).valuation()
    target = extended_constant_term(ordp, 1, p, M)
    numerators = []
    for c in prm["extended_c"]:
        F = coleman_extended(pi, c, 1, M, gamma_power_twist_family(p, c, 2, store))
        numerators.append(F.numerator)
        mass = F.numerator.total_mass()
        diff = mass - target
        res = diff.precision if diff.mantissa == 0 else diff.valuation
        checks.append(_uniform(CheckResult("extended constant term", res, M - 2,
                                           {"lhs": mass.to_json(), "rhs": target.to_json()}),
                               {"family": pi.label, "c": c, "ord_p(v_1)": ordp}))
    c1, c2 = prm["extended_c"]
    res = _measure_residual(numerators[0], numerators[1])
    checks.append(_uniform(CheckResult("extended map independent of gamma power", res,
                                       numerators[0].precision),
                           {"family": pi.label, "c": f"{c1},{c2}"}))
    return {"checks": checks, "pass": all(c["pass"] for c in checks)}


def _dr_for(prm: dict, characters: dict, c: int | None = None):
    chi = resolve_character(prm["character"], characters)
    return chi, deligne_ribet(chi, prm["prime"], prm["m_max"], c, prm["precision"])


def _etas(prm: dict) -> list[FiniteOrderCharacter]:
    p = prm["prime"]
    return gamma_characters(p, [conductor_exponent(c, p) for c in prm["conductors"]])


def suite_leopoldt(prm: dict, characters: dict) -> dict:
    regs = prm.get("regularizers")
    chi, dr = _dr_for(prm, characters, regs[0] if regs else None)
    etas = _etas(prm)
    checks = verify_interpolation(dr, etas, prm["n"], prm["required"])
    checks += level_stability(dr, etas, prm["n"])
    c2 = regs[1] if regs else choose_regularizer(chi, prm["prime"], exclude=(dr.c,))
    checks += regularizer_independence(chi, prm["prime"], dr.c, c2, etas, prm["n"][:2],
                                       prm["m_max"], prm["precision"], prm["required"])
    out = [c.to_json() for c in checks]
    return {"regularizer": str(dr.c), "checks": out, "pass": all(c["pass"] for c in out)}


def suite_ex(prm: dict, characters: dict) -> dict:
    chi, dr = _dr_for(prm, characters)
    rep = verify_EX(chi, dr, _etas(prm), required=prm["required"])
    return {"regularizer": str(dr.c), **rep.to_json()}


def suite_ezc(prm: dict, characters: dict, base: str | None) -> dict:
    chi = resolve_character(prm["character"], characters)
    unit = QuadraticPUnit.from_json(_read_json(resolve_path(prm["unit_data"],
                                                            Path(base) if base else None)))
    rep = verify_EZC_gross(chi, prm["prime"], unit, prm["m_max"], prm["precision"])
    return {"unit": unit.to_json(), **rep.to_json()}


def run_suite(name: str, prm: dict, characters: dict, base: str | None) -> dict:
    try:
        if name == "coleman":
            return suite_coleman(prm)
        if name == "leopoldt":
            return suite_leopoldt(prm, characters)
        if name == "ex":
            return suite_ex(prm, characters)
        if name == "ezc":
            return suite_ezc(prm, characters, base)
    except ConfigError:
        raise
    except ArtinIwasawaError as exc:
        raise ComputationError(f"suite {name}: {type(exc).__name__}: {exc}") from exc
    raise ConfigError(f"unknown suite {name}")


def run_verify(cfg: RunConfig, jobs: int = 1) -> dict:
    base = str(cfg.base) if cfg.base else None
    work = [(s, cfg.params[s], cfg.characters, base) for s in cfg.suites]
    if jobs > 1 and len(work) > 1:
        with ProcessPoolExecutor(max_workers=min(jobs, len(work))) as pool:
            results = list(pool.map(run_suite, *zip(*work)))
    else:
        results = [run_suite(*w) for w in work]
    suites = dict(zip(cfg.suites, results))
    return {"version": REPORT_VERSION, "conventions": conventions(), "config": cfg.to_json(),
            "suites": suites, "pass": all(r["pass"] for r in results)}


# ---------------------------------------------------------------------------
# evaluations


def fmt(x) -> str:
    if isinstance(x, PadicValue):
        return str(x)
    if isinstance(x, LocalElement):
        try:
            return str(x.to_padic())
        except ArtinIwasawaError:
            r = x.ring
            return (f"[{', '.join(str(v) for v in x.c)}] / {r.p}^{x.k} + O({r.p}^{x.prec})"
                    f" in R({r.d}, {r.n})")
    return str(x)


def _eval_params(args, cfg: dict) -> dict:
    prm = dict(cfg["leopoldt"])
    for flag, key in FLAG_KEYS.items():
        val = getattr(args, flag, None)
        if val is not None:
            prm[key] = val
    return prm


def eval_lp(args, cfg: dict, characters: dict) -> dict:
    prm = _eval_params(args, cfg)
    if args.s is None:
        raise ConfigError("eval lp needs --s")
    try:
        s = Fraction(args.s)
    except ValueError as exc:
        raise ConfigError(f"--s must be an integer or fraction, got {args.s!r}") from exc
    chi, dr = _dr_for(prm, characters)
    val = lp_eval(dr, s)
    out = {"object": "lp",
           "inputs": {"character": chi.to_config(), "p": str(dr.p), "s": str(s),
                      "m_max": str(dr.m_max), "precision": str(dr.precision), "c": str(dr.c)},
           "value": val.to_json()}
    lines = [f"L_p({s}, {chi.label}) = {val}"]
    if s.denominator == 1 and s <= 0:
        n = 1 - int(s)
        exact = dr.oracle(FiniteOrderCharacter(dr.p, 0), n).to_padic()
        exact = exact.truncate(min(exact.precision, val.precision))
        diff = val - exact
        res = diff.precision if diff.mantissa == 0 else diff.valuation
        out["bernoulli"] = {"value": exact.to_json(), "residual_valuation": str(res),
                            "formula": "-(1 - psi(p) p^(n-1)) B_{n,psi}/n, psi = chi omega^-n"}
        lines.append(f"Bernoulli value: {exact}  (residual valuation {res})")
    return {"json": out, "lines": lines}


def eval_measure(args, cfg: dict, characters: dict) -> dict:
    prm = _eval_params(args, cfg)
    _, dr = _dr_for(prm, characters)
    data = dr.to_json()
    return {"json": {"object": "measure", **data}, "lines": [dumps(data).rstrip()]}


def eval_regulator(args, cfg: dict, characters: dict) -> dict:
    side = args.side or "p"
    if args.units:
        inp, emb, omega = load_unit_input(_read_json(resolve_path(args.units)))
        stab = PStabilization(None, emb.p, ((omega, Fraction(1)),), "from unit data")
        source = args.units
    else:
        prm = _eval_params(args, cfg)
        chi = resolve_character(prm["character"], characters)
        if not chi.is_even:
            raise ConfigError("the built-in regulator uses an even character")
        emb = PAdicEmbedding.for_orders(prm["prime"], [chi.modulus], prm["precision"])
        inp = RegulatorInput([[cyclotomic_unit(chi, emb)]], (0,))
        stab = PStabilization.from_indices(ArtinAbelian((chi,)), emb.p, [0])
        source = f"cyclotomic unit of {chi.label}"
    out = {"object": "regulator", "side": side, "inputs": {"source": source}}
    if side == "p":
        val, zt = padic_regulator(inp, stab, emb)
        out.update({"value": val.to_json(), "zero_test": zt.value})
        lines = [f"Reg_p = {fmt(val)}", f"status: {zt.value}"]
    else:
        try:
            cv = complex_regulator(inp)
            out.update({"value": cv.to_json(), "zero_test": ZeroTest.NONZERO.value})
            lines = [f"Reg_inf = {mpmath.nstr(cv.value, 30)} (error <= {mpmath.nstr(cv.error, 5)})",
                     f"status: {ZeroTest.NONZERO.value}"]
        except SingularWithinBound as exc:
            out.update({"value": None, "zero_test": ZeroTest.UNKNOWN.value, "detail": str(exc)})
            lines = [f"Reg_inf: {exc}", f"status: {ZeroTest.UNKNOWN.value}"]
    return {"json": out, "lines": lines}


def eval_linv(args, cfg: dict, characters: dict, stab_cfg: dict | None) -> dict:
    prm = _eval_params(args, cfg)
    chi = resolve_character(prm["character"], characters)
    p, W = prm["prime"], prm["precision"]
    rho = ArtinAbelian((chi,))
    if stab_cfg is not None:
        stab = PStabilization.from_config(rho, p, stab_cfg)
    else:
        stab = PStabilization.from_indices(rho, p, [0] if chi.is_even else [])
    data = None
    if stab.e:
        unit_file = args.units or cfg["ezc"]["unit_data"]
        unit = QuadraticPUnit.from_json(_read_json(resolve_path(unit_file)))
        logu, ordu = unit.columns(W + 4)
        data = LInvariantData([], [], [], [[logu]], [[PadicValue.from_rational(ordu, p, W + 4)]])
    val = l_invariant(stab, data, p, W)
    out = {"object": "linv", "inputs": {"character": chi.to_config(), "p": str(p)},
           "stabilization": stab.to_json(), "e": str(stab.e), "value": val.to_json()}
    if data is not None:
        out["matrices"] = data.to_json()
    return {"json": out, "lines": [f"L-invariant = {fmt(val)}  (e = {stab.e})"]}


def run_eval(args) -> dict:
    cfg = default_config()
    if args.config:
        user = _read_json(args.config)
        validate(user, "config", args.config)
        for key, val in user.items():
            if key in SUITES:
                cfg[key].update(val)
            else:
                cfg[key] = val
    characters = load_characters(cfg.get("character_file"),
                                 Path(args.config).resolve().parent if args.config else None)
    try:
        if args.object == "lp":
            return eval_lp(args, cfg, characters)
        if args.object == "measure":
            return eval_measure(args, cfg, characters)
        if args.object == "regulator":
            return eval_regulator(args, cfg, characters)
        return eval_linv(args, cfg, characters, cfg.get("stabilization"))
    except ConfigError:
        raise
    except ArtinIwasawaError as exc:
        raise ComputationError(f"eval {args.object}: {type(exc).__name__}: {exc}") from exc


# ---------------------------------------------------------------------------
# goldens


def golden_dir(path: str | None) -> Path:
    return Path(path) if path else Path(str(DATA / "goldens"))


def golden_manifest(directory: Path) -> list[dict]:
    return _read_json(directory / "manifest.json")["goldens"]


def produce(argv: list[str]) -> str:
    """Canonical report text for a verify or eval invocation."""
    args = build_parser().parse_args(argv)
    if args.command == "verify":
        return dumps(run_verify(build_config(args)))
    return dumps(run_eval(args)["json"])


def run_goldens(action: str, directory: Path, only: list[str] | None, diff_dir: Path) -> list[str]:
    lines = []
    entries = [g for g in golden_manifest(directory) if not only or g["name"] in only]
    if only and len(entries) != len(set(only)):
        raise ConfigError(f"unknown golden in {only}")
    mismatches = []
    for g in entries:
        path = directory / f"{g['name']}.json"
        text = produce(g["argv"])
        if action == "update":
            path.write_text(text)
            lines.append(f"updated {path}")
            continue
        if not path.is_file():
            raise ConfigError(f"golden store incomplete: {path} missing")
        stored = path.read_text()
        if stored == text:
            lines.append(f"OK {g['name']}")
            continue
        diff_dir.mkdir(parents=True, exist_ok=True)
        dpath = diff_dir / f"{g['name']}.diff"
        dpath.write_text("".join(difflib.unified_diff(
            stored.splitlines(True), text.splitlines(True), str(path), "fresh run")))
        lines.append(f"MISMATCH {g['name']}: diff at {dpath}")
        mismatches.append(g["name"])
    if mismatches:
        raise GoldenMismatch("\n".join(lines))
    return lines


# ---------------------------------------------------------------------------
# entry point


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--p", type=int, help="the prime p")
    common.add_argument("--precision", type=int, help="p-adic working precision (digits)")
    common.add_argument("--mmax", type=int, help="top level m_max of measures")
    common.add_argument("--config", help="run configuration JSON")
    common.add_argument("--out", help="write the JSON report here")
    common.add_argument("--char", help="character name from the character table")

    parser = argparse.ArgumentParser(prog="artin-iwasawa", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    v = sub.add_parser("verify", parents=[common], help="run verification suites")
    v.add_argument("suite", nargs="?", choices=SUITES + ("all",))
    v.add_argument("--depth", type=int, help="tower depth for the coleman suite")
    v.add_argument("--jobs", type=int, default=1, help="worker processes across suites")

    e = sub.add_parser("eval", parents=[common], help="evaluate one object")
    e.add_argument("object", choices=("lp", "measure", "regulator", "linv"))
    e.add_argument("--s", help="point s in Z_p (integer or fraction) for lp")
    e.add_argument("--side", choices=("p", "inf"), help="regulator side")
    e.add_argument("--units", help="unit-data JSON (regulator) or p-unit JSON (linv)")

    g = sub.add_parser("goldens", help="golden-report regression")
    g.add_argument("action", choices=("update", "check"))
    g.add_argument("--dir", help="golden store (default: shipped goldens)")
    g.add_argument("--only", action="append", help="restrict to a named golden")
    g.add_argument("--diff-dir", help="where mismatch diffs are written")
    return parser


def _write(path: str | None, text: str):
    if path:
        Path(path).parent.mkdir(parents=True, exist_ok=True)
        Path(path).write_text(text)


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    try:
        if args.command == "verify":
            cfg = build_config(args)
            report = run_verify(cfg, max(1, args.jobs))
            for name, suite in report["suites"].items():
                for c in suite["checks"]:
                    tag = "PASS" if c["pass"] else "FAIL"
                    inputs = ", ".join(f"{k}={v}" for k, v in c["inputs"].items())
                    print(f"{tag} {name}:{c['name']} [{inputs}] residual="
                          f"{c['residual_valuation']} certificate={c['certificate']}")
            if "matched_constant" in report["suites"].get("ex", {}):
                print(f"ex matched constant: {report['suites']['ex']['matched_constant']}")
            out = cfg.output or f"report_{args.suite}.json"
            _write(out, dumps(report))
            print(f"report: {out}")
            print("ALL PASS" if report["pass"] else "SOME CHECKS FAILED")
            return 0 if report["pass"] else 1
        if args.command == "eval":
            res = run_eval(args)
            for line in res["lines"]:
                print(line)
            _write(args.out, dumps(res["json"]))
            return 0
        directory = golden_dir(args.dir)
        diff_dir = Path(args.diff_dir) if args.diff_dir else \
            Path(tempfile.gettempdir()) / "artin-iwasawa-goldens"
        for line in run_goldens(args.action, directory, args.only, diff_dir):
            print(line)
        return 0
    except GoldenMismatch as exc:
        print(exc, file=sys.stderr)
        return exc.exit_code
    except (ConfigError, ComputationError) as exc:
        print(f"{type(exc).__name__}: {exc}", file=sys.stderr)
        return exc.exit_code
    except ArtinIwasawaError as exc:
        print(f"ComputationError: {type(exc).__name__}: {exc}", file=sys.stderr)
        return ComputationError.exit_code
