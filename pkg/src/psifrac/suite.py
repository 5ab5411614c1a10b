"""Config-driven and randomized verification suites.

A suite is a list of *groups*; a group fixes ``(psi, f, alpha)`` and owns one
:class:`~psifrac.iyengar.CaputoNorms`, so every regime/variant row of the
group reuses the same Caputo-derivative norms.  Groups are independent and
may run on a thread pool; rows are always emitted in config order.
"""

from __future__ import annotations

import csv
import io
import math
import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path

import numpy as np

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

from ._common import integer_order
from .errors import HypothesisError, ParamError, PsiFracError, RegimeError
from .functions import boundary_flat, psi_monomial, psi_polynomial, random_test_functions
from .iyengar import CaputoNorms, InequalityInstance, Variant, check
from .norms import SUP_GRID, Regime, holder_conjugate, theorem_coefficient
from .psi import PsiFunction, make_psi

__all__ = [
    "ConfigError",
    "SuiteConfig",
    "RegimeSpec",
    "VariantSpec",
    "Row",
    "load_config",
    "parse_config",
    "parse_function_spec",
    "parse_psi_spec",
    "build_groups",
    "random_groups",
    "run_groups",
    "format_float",
    "write_report",
    "CSV_HEADER",
]

CSV_HEADER = ["instance_id", "theorem", "part", "regime", "psi", "function", "alpha",
              "param", "lhs", "rhs", "margin", "status"]

THEOREM_NAMES = {Regime.LINF: "sup-norm", Regime.L1PSI: "weighted-L1", Regime.LQPSI: "weighted-Lq"}


class ConfigError(PsiFracError, ValueError):
    """The suite configuration cannot be parsed or validated."""


def format_float(x: float) -> str:
    """15 significant digits, locale independent."""
    if x == 0:
        return "0"
    return format(float(x), ".15g")


def _kv(text: str) -> dict[str, str]:
    out = {}
    for part in filter(None, (p.strip() for p in text.split(";"))):
        if "=" not in part:
            raise ConfigError(f"expected key=value, got {part!r}")
        k, v = part.split("=", 1)
        out[k.strip()] = v.strip()
    return out


def _split_spec(spec: str) -> tuple[str, dict[str, str]]:
    name, _, rest = spec.partition(":")
    return name.strip().lower(), _kv(rest)


def parse_psi_spec(kind: str, params=(), domain=None) -> PsiFunction:
    defaults = {"identity": (0.0, 1.0), "affine": (0.0, 1.0), "log": (1.0, math.e),
                "power": (1.0, 2.0), "exp": (0.0, 1.0)}
    kind = kind.strip().lower()
    if kind not in defaults:
        raise ConfigError(f"unknown psi kind {kind!r}")
    try:
        return make_psi(kind, tuple(params), tuple(domain) if domain is not None else defaults[kind])
    except PsiFracError as exc:
        raise ConfigError(str(exc)) from None


def parse_function_spec(spec: str, psi: PsiFunction, rng: np.random.Generator | None = None):
    """Build test functions from ``family:key=value;...`` strings.

    Families: ``monomial:beta=B[;anchor=left|right]``,
    ``polynomial:coeffs=c0,c1,...[;anchor=left|right]``, ``flat:r=R``,
    ``constant:c=C`` and ``random:count=K`` (K random psi-polynomials drawn
    from ``rng``).  Returns a list.
    """
    family, kv = _split_spec(spec)
    try:
        anchor = psi.b if kv.get("anchor", "left").lower() == "right" else psi.a
        if family == "monomial":
            return [psi_monomial(psi, anchor, float(kv["beta"]))]
        if family == "polynomial":
            coeffs = [float(c) for c in kv["coeffs"].split(",")]
            return [psi_polynomial(psi, coeffs, anchor)]
        if family == "constant":
            return [psi_polynomial(psi, [float(kv.get("c", 1.0))], psi.a)]
        if family == "flat":
            return [boundary_flat(psi, psi.a, psi.b, int(kv.get("r", 1)))]
        if family == "random":
            if rng is None:
                raise ConfigError("random functions need a seeded generator")
            return random_test_functions(psi, rng, int(kv.get("count", 4)), flat_orders=())
    except KeyError as exc:
        raise ConfigError(f"function spec {spec!r} misses {exc.args[0]!r}") from None
    except (PsiFracError, ValueError) as exc:
        raise ConfigError(f"bad function spec {spec!r}: {exc}") from None
    raise ConfigError(f"unknown function family {family!r}")


@dataclass(frozen=True)
class RegimeSpec:
    regime: Regime
    p: float | None = None

    @property
    def label(self) -> str:
        if self.regime is Regime.LQPSI:
            return f"Lqpsi(p={self.p:g};q={holder_conjugate(self.p):g})"
        return self.regime.value

    @classmethod
    def parse(cls, text: str) -> "RegimeSpec":
        name, kv = _split_spec(text)
        try:
            regime = Regime.coerce(name)
        except ParamError as exc:
            raise ConfigError(str(exc)) from None
        if regime is not Regime.LQPSI:
            return cls(regime)
        try:
            if "p" in kv:
                p = float(kv["p"])
            elif "q" in kv:
                p = holder_conjugate(float(kv["q"]))
            else:
                p = 2.0
            holder_conjugate(p)
        except (ParamError, ValueError) as exc:
            raise ConfigError(f"bad Lqpsi spec {text!r}: {exc}") from None
        return cls(regime, p)


@dataclass(frozen=True)
class VariantSpec:
    variant: Variant
    s: float | None = None
    frac: float | None = None
    i: int | None = None
    m: int | None = None

    @classmethod
    def parse(cls, text: str) -> "VariantSpec":
        name, kv = _split_spec(text.replace(",", ";"))
        try:
            variant = Variant(name)
            if variant is Variant.SPLIT:
                if "s" in kv:
                    return cls(variant, s=float(kv["s"]))
                return cls(variant, frac=float(kv.get("frac", 0.5)))
            if variant in (Variant.PARTITION, Variant.PARTITION_FLAT):
                return cls(variant, i=int(kv["i"]), m=int(kv["m"]))
            return cls(variant)
        except (KeyError, ValueError) as exc:
            raise ConfigError(f"bad variant spec {text!r}: {exc}") from None

    def split_point(self, psi: PsiFunction) -> float:
        if self.s is not None:
            return self.s
        return psi.a + self.frac * (psi.b - psi.a)

    def param(self, psi: PsiFunction) -> str:
        if self.variant is Variant.SPLIT:
            return f"s={format_float(self.split_point(psi))}"
        if self.variant in (Variant.PARTITION, Variant.PARTITION_FLAT):
            return f"i={self.i};m={self.m}"
        if self.variant is Variant.TRAPEZOID:
            return "i=1;m=2"
        return ""


@dataclass
class SuiteConfig:
    psis: list
    functions: list[str]
    alphas: list[float]
    regimes: list[RegimeSpec]
    variants: list[VariantSpec]
    seed: int = 0
    sup_grid: int = SUP_GRID
    quad_tol: float = 1e-7
    measure: str = "dpsi"
    as_printed_l1: bool = False
    csv_name: str = "report.csv"
    summary_name: str = "summary.txt"
    name: str = "suite"


def _need(data: dict, key: str):
    if key not in data:
        raise ConfigError(f"config is missing {key!r}")
    return data[key]


def parse_config(data: dict, name: str = "suite") -> SuiteConfig:
    psis = []
    for entry in _need(data, "psi"):
        if not isinstance(entry, dict) or "kind" not in entry:
            raise ConfigError("each [[psi]] needs a kind")
        psis.append(parse_psi_spec(entry["kind"], entry.get("params", ()), entry.get("domain")))
    functions = [str(f) for f in data.get("functions", [])]
    if not functions:
        raise ConfigError("no test functions")
    alphas = [float(a) for a in _need(data, "alpha")]
    if not alphas or any(not a > 0 for a in alphas):
        raise ConfigError("alpha list must be non-empty and positive")
    regimes = [RegimeSpec.parse(r) for r in data.get("regimes", ["Linf"])]
    variants = [VariantSpec.parse(v) for v in data.get("variants", ["midpoint"])]
    tol = data.get("tolerances", {})
    out = data.get("output", {})
    measure = str(data.get("measure", "dpsi"))
    if measure not in ("dpsi", "dt"):
        raise ConfigError("measure must be 'dpsi' or 'dt'")
    try:
        return SuiteConfig(
            psis=psis, functions=functions, alphas=alphas, regimes=regimes, variants=variants,
            seed=int(data.get("seed", 0)), sup_grid=int(tol.get("sup_grid", SUP_GRID)),
            quad_tol=float(tol.get("quad", 1e-7)), measure=measure,
            as_printed_l1=bool(data.get("as_printed_l1", False)),
            csv_name=str(out.get("csv", f"{name}.csv")),
            summary_name=str(out.get("summary", f"{name}_summary.txt")), name=name)
    except (TypeError, ValueError) as exc:
        raise ConfigError(str(exc)) from None


def load_config(path: str | os.PathLike) -> SuiteConfig:
    path = Path(path)
    try:
        data = tomllib.loads(path.read_text(encoding="utf-8"))
    except OSError as exc:
        raise ConfigError(f"cannot read {path}: {exc}") from None
    except tomllib.TOMLDecodeError as exc:
        raise ConfigError(f"{path}: {exc}") from None
    return parse_config(data, path.stem)


@dataclass
class Group:
    psi: PsiFunction
    f: object
    alpha: float
    cases: list  # (RegimeSpec, VariantSpec)
    measure: str = "dpsi"
    as_printed_l1: bool = False
    sup_grid: int = SUP_GRID
    quad_tol: float = 1e-7


@dataclass
class Row:
    theorem: str
    part: str
    regime: str
    psi: str
    function: str
    alpha: float
    param: str
    lhs: float | None
    rhs: float | None
    margin: float | None
    status: str
    diagnostics: dict = field(default_factory=dict)

    @property
    def failed(self) -> bool:
        return self.status == "fail"


def build_groups(cfg: SuiteConfig) -> list[Group]:
    rng = np.random.default_rng(cfg.seed)
    cases = [(r, v) for r in cfg.regimes for v in cfg.variants]
    groups = []
    for psi in cfg.psis:
        for spec in cfg.functions:
            for f in parse_function_spec(spec, psi, rng):
                for alpha in cfg.alphas:
                    groups.append(Group(psi, f, alpha, cases, cfg.measure, cfg.as_printed_l1,
                                        cfg.sup_grid, cfg.quad_tol))
    return groups


RANDOM_PSIS = (
    ("identity", (), (0.0, 1.0)),
    ("log", (), (1.0, math.e)),
    ("power", (2.0,), (1.0, 2.0)),
    ("exp", (), (0.0, 1.0)),
    ("affine", (0.5, 2.0), (-1.0, 1.0)),
    ("power", (0.5,), (0.5, 3.0)),
)
RANDOM_ALPHAS = (0.3, 0.5, 0.9, 1.0, 1.5, 2.0, 2.5)
RANDOM_REGIMES = ("Linf", "L1psi", "Lqpsi:p=2", "Lqpsi:p=3", "Lqpsi:p=1.5")


def random_groups(seed: int = 0, psis=RANDOM_PSIS, alphas=RANDOM_ALPHAS,
                  regimes=RANDOM_REGIMES, n_poly: int = 4, split_points: int = 11,
                  flat_orders=(1, 2, 3)) -> list[Group]:
    """The randomized soundness suite: every psi x random function x alpha group
    carries all regimes and all six variants, with ``split_points`` split
    positions and a few partitions."""
    rng = np.random.default_rng(seed)
    regime_specs = [RegimeSpec.parse(r) for r in regimes]
    variants = [VariantSpec(Variant.SPLIT, frac=float(x)) for x in np.linspace(0, 1, split_points)]
    variants += [VariantSpec(Variant.MIDPOINT), VariantSpec(Variant.SHARP_MIDPOINT),
                 VariantSpec(Variant.PARTITION, i=0, m=3), VariantSpec(Variant.PARTITION, i=2, m=5),
                 VariantSpec(Variant.PARTITION_FLAT, i=1, m=3), VariantSpec(Variant.TRAPEZOID)]
    cases = [(r, v) for r in regime_specs for v in variants]
    groups = []
    for kind, params, domain in psis:
        psi = make_psi(kind, params, domain)
        for f in random_test_functions(psi, rng, n_poly, flat_orders):
            for alpha in alphas:
                groups.append(Group(psi, f, float(alpha), cases))
    return groups


def _skip_reason(regime: RegimeSpec, alpha: float) -> str | None:
    try:
        theorem_coefficient(regime.regime, alpha, regime.p)
    except RegimeError:
        if regime.regime is Regime.L1PSI:
            return "skipped: α<1"
        return "skipped: α≤1/q"
    return None


def _run_group(group: Group) -> list[Row]:
    norms = CaputoNorms(group.f, group.psi, group.alpha, group.sup_grid, group.quad_tol)
    rows = []
    for regime, variant in group.cases:
        rows.extend(_run_case(group, norms, regime, variant))
    return rows


def _run_case(group: Group, norms: CaputoNorms, regime: RegimeSpec, variant: VariantSpec):
    psi, f, alpha = group.psi, group.f, group.alpha
    base = dict(theorem=THEOREM_NAMES[regime.regime], part=variant.variant.value,
                regime=regime.label, psi=psi.label, function=f.tag, alpha=alpha,
                param=variant.param(psi))
    reason = _skip_reason(regime, alpha)
    if reason is not None:
        return [Row(**base, lhs=None, rhs=None, margin=None, status=reason)]
    kwargs = dict(regime=regime.regime, variant=variant.variant, p=regime.p, measure=group.measure)
    if variant.variant is Variant.SPLIT:
        kwargs["s"] = variant.split_point(psi)
    elif variant.variant in (Variant.PARTITION, Variant.PARTITION_FLAT):
        kwargs.update(i=variant.i, m=variant.m)
    try:
        inst = InequalityInstance(f, psi, alpha, **kwargs)
        rep = check(inst, norms)
    except HypothesisError:
        return [Row(**base, lhs=None, rhs=None, margin=None, status="skipped: not boundary-flat")]
    rows = [Row(**base, lhs=rep.lhs, rhs=rep.rhs, margin=rep.margin,
                status="pass" if rep.passed else "fail", diagnostics=rep.diagnostics)]
    if group.as_printed_l1 and regime.regime is Regime.L1PSI:
        alt = check(InequalityInstance(f, psi, alpha, as_printed=True, **kwargs), norms)
        printed = dict(base, regime=regime.label + "[printed]")
        rows.append(Row(**printed, lhs=alt.lhs, rhs=alt.rhs, margin=alt.margin,
                        status="compare: " + ("pass" if alt.passed else "fail")))
    return rows


def thread_count() -> int:
    raw = os.environ.get("PSIFRAC_THREADS", "1").strip() or "1"
    try:
        n = int(raw)
    except ValueError:
        raise ConfigError(f"PSIFRAC_THREADS must be an integer, got {raw!r}") from None
    if n < 0:
        raise ConfigError("PSIFRAC_THREADS must be >= 0")
    return n if n > 0 else (os.cpu_count() or 1)


def run_groups(groups: list[Group], threads: int | None = None) -> list[Row]:
    """Evaluate every group; rows come back in group order regardless of threading."""
    threads = thread_count() if threads is None else threads
    if threads <= 1 or len(groups) <= 1:
        results = [_run_group(g) for g in groups]
    else:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(_run_group, groups))
    return [row for rows in results for row in rows]


def _cell(x):
    if x is None:
        return ""
    if isinstance(x, float):
        return format_float(x)
    return str(x)


def render_csv(rows: list[Row]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(CSV_HEADER)
    for idx, r in enumerate(rows):
        writer.writerow([idx, r.theorem, r.part, r.regime, r.psi, r.function,
                         format_float(r.alpha), r.param, _cell(r.lhs), _cell(r.rhs),
                         _cell(r.margin), r.status])
    return buf.getvalue()


def render_summary(rows: list[Row], name: str = "suite") -> str:
    counts: dict = {}
    for r in rows:
        if r.status.startswith("compare"):
            key, col = (r.theorem + "[printed]", r.part), r.status.split(": ")[1]
        elif r.status.startswith("skipped"):
            key, col = (r.theorem, r.part), "skip"
        else:
            key, col = (r.theorem, r.part), r.status
        bucket = counts.setdefault(key, {"pass": 0, "fail": 0, "skip": 0})
        bucket[col] += 1
    lines = [f"suite: {name}", f"rows: {len(rows)}", ""]
    lines.append(f"{'theorem':<22} {'part':<16} {'pass':>6} {'fail':>6} {'skip':>6}")
    for (theorem, part), c in counts.items():
        lines.append(f"{theorem:<22} {part:<16} {c['pass']:>6} {c['fail']:>6} {c['skip']:>6}")
    tot = {k: sum(c[k] for (t, _), c in counts.items() if not t.endswith("[printed]"))
           for k in ("pass", "fail", "skip")}
    lines += ["", f"total pass={tot['pass']} fail={tot['fail']} skip={tot['skip']}"]
    worst = [r for r in rows if r.margin is not None and not r.status.startswith("compare")]
    if worst:
        w = min(worst, key=lambda r: r.margin / max(1.0, r.rhs))
        lines.append(f"smallest relative margin: {format_float(w.margin / max(1.0, w.rhs))} "
                     f"({w.theorem} {w.part} {w.psi} {w.function} alpha={format_float(w.alpha)})")
    return "\n".join(lines) + "\n"


def write_report(rows: list[Row], out_dir: str | os.PathLike, csv_name: str,
                 summary_name: str, name: str = "suite") -> tuple[Path, Path]:
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    csv_path = out_dir / csv_name
    summary_path = out_dir / summary_name
    csv_path.write_bytes(render_csv(rows).encode("utf-8"))
    summary_path.write_bytes(render_summary(rows, name).encode("utf-8"))
    return csv_path, summary_path
