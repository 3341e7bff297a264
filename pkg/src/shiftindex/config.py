"""Experiment configuration: strict TOML parsing and canonical emission.

The config format is the CLI's contract: a [group] section (which rotation
group and generating set), an [operator] section (the support window of
trigonometric-polynomial coefficient matrices per sheet), a [numerics]
section (cutoff schedule, window radius, grid, tolerances) and a [run]
section (output directory, seed).  Parsing is strict: unknown keys, type
mismatches and invariant violations are each reported with the offending
key path and its line in the source text.
"""

from __future__ import annotations

import sys
from dataclasses import dataclass

import numpy as np

if sys.version_info >= (3, 11):
    import tomllib
else:
    import tomli as tomllib

from .group_model import DENSE, FINITE, GroupModelError, GroupSpec, cf_value
from .shift_ops import PDOCoefficient, ShiftOperator
from .trig import SheetSymbol, TrigMatrixPoly


@dataclass(frozen=True)
class ConfigError:
    path: str
    line: int | None
    message: str

    def __str__(self):
        where = f" (line {self.line})" if self.line else ""
        return f"{self.path}{where}: {self.message}"


class ConfigParseError(ValueError):
    def __init__(self, errors):
        self.errors = list(errors)
        super().__init__("; ".join(str(e) for e in self.errors))


@dataclass(frozen=True)
class NumericsConfig:
    cutoffs: tuple[int, ...] = (64, 128, 256)
    window: int = 32
    grid: tuple[int, int] = (128, 128)
    sv_tol: float = 1e-7
    ellipticity_tol: float = 1e-6
    invert_tol: float = 1e-8
    idempotent_tol: float = 1e-10
    mollifier_cells: float = 3.0
    taper_fraction: float = 0.1
    quadrature_points: int = 0  # 0: resolve the grid's x bandwidth
    decay_power: float = 6.0


@dataclass(frozen=True)
class RunConfig:
    out_dir: str = "out"
    seed: int = 0


@dataclass(frozen=True)
class TermConfig:
    element: int
    row: int
    col: int
    plus: tuple  # ((freq, complex), ...)
    minus: tuple


@dataclass(frozen=True)
class OperatorConfig:
    order: int
    ranks: tuple[int, int]
    terms: tuple[TermConfig, ...]


@dataclass(frozen=True)
class GroupSection:
    kind: str
    theta: float | None
    theta_cf: tuple[int, ...] | None
    order: int | None
    generators: tuple[int, ...]
    dioph_c: float = 0.05
    dioph_n: float = 2.0
    dioph_kmax: int = 10000
    census_kmax: int = 0  # 0: pick a sensible default per group kind


@dataclass(frozen=True)
class ExperimentConfig:
    group: GroupSection
    operator: OperatorConfig
    numerics: NumericsConfig
    run: RunConfig

    def group_spec(self) -> GroupSpec:
        g = self.group
        theta = g.theta
        if theta is None and g.theta_cf is not None:
            theta = cf_value(g.theta_cf)
        if g.kind == DENSE:
            return GroupSpec(kind=DENSE, theta=float(theta), generators=g.generators)
        return GroupSpec(kind=FINITE, order=int(g.order), generators=g.generators)

    def shift_operator(self, spec: GroupSpec | None = None) -> ShiftOperator:
        spec = spec or self.group_spec()
        n_out, n_in = self.operator.ranks
        window: dict[int, PDOCoefficient] = {}
        per_element: dict[int, tuple[dict, dict]] = {}
        for t in self.operator.terms:
            plus, minus = per_element.setdefault(t.element, ({}, {}))
            for freq, val in t.plus:
                plus.setdefault(freq, np.zeros((n_out, n_in), complex))[t.row, t.col] += val
            for freq, val in t.minus:
                minus.setdefault(freq, np.zeros((n_out, n_in), complex))[t.row, t.col] += val
        for g, (plus, minus) in per_element.items():
            sym = SheetSymbol(
                TrigMatrixPoly((n_out, n_in), plus), TrigMatrixPoly((n_out, n_in), minus)
            )
            window[g] = PDOCoefficient(self.operator.order, [sym])
        return ShiftOperator(spec, window)


_SCHEMA = {
    "group": {
        "kind", "theta", "theta_cf", "order", "generators",
        "dioph_c", "dioph_n", "dioph_kmax", "census_kmax",
    },
    "operator": {"order", "ranks", "terms"},
    "numerics": {
        "cutoffs", "window", "grid", "sv_tol", "ellipticity_tol", "invert_tol",
        "idempotent_tol", "mollifier_cells", "taper_fraction",
        "quadrature_points", "decay_power",
    },
    "run": {"out_dir", "seed"},
}
_TERM_KEYS = {"element", "row", "col", "plus", "minus"}


def _find_line(text: str, *needles: str) -> int | None:
    """Best-effort line lookup: the first line containing all needles in order."""
    pos = 0
    line = None
    for needle in needles:
        idx = text.find(needle, pos)
        if idx < 0:
            return line
        pos = idx + len(needle)
        line = text.count("\n", 0, idx) + 1
    return line


class _Reader:
    def __init__(self, text: str):
        self.text = text
        self.errors: list[ConfigError] = []

    def error(self, path: str, message: str, *needles: str):
        self.errors.append(ConfigError(path, _find_line(self.text, *needles), message))

    def take(self, table: dict, path: str, key: str, kind, default=None, required=False,
             section_needle: str | None = None):
        needles = ([section_needle] if section_needle else []) + [key]
        if key not in table:
            if required:
                self.error(path + "." + key, "missing required key", *(needles[:1] or [key]))
            return default
        value = table.pop(key)
        if kind is float and isinstance(value, int) and not isinstance(value, bool):
            value = float(value)
        if not isinstance(value, kind) or isinstance(value, bool):
            self.error(path + "." + key, f"expected {kind.__name__}, got {type(value).__name__}", *needles)
            return default
        return value

    def leftovers(self, table: dict, path: str, section_needle: str | None = None):
        for key in table:
            needles = ([section_needle] if section_needle else []) + [key]
            self.error(f"{path}.{key}", "unknown key (strict mode)", *needles)


def _coeff_table(raw, reader: _Reader, path: str) -> tuple:
    out = []
    if not isinstance(raw, dict):
        reader.error(path, f"expected a table of frequency -> coefficient, got {type(raw).__name__}")
        return ()
    for key, val in raw.items():
        try:
            freq = int(key)
        except ValueError:
            reader.error(f"{path}.{key}", "frequency keys must be integers", key)
            continue
        if isinstance(val, (int, float)) and not isinstance(val, bool):
            out.append((freq, complex(float(val))))
        elif (
            isinstance(val, list) and len(val) == 2
            and all(isinstance(v, (int, float)) and not isinstance(v, bool) for v in val)
        ):
            out.append((freq, complex(float(val[0]), float(val[1]))))
        else:
            reader.error(f"{path}.{key}", "coefficient must be a number or [re, im]", key)
    return tuple(sorted(out))


def parse_config(text: str) -> ExperimentConfig:
    """Parse and validate; raises ConfigParseError carrying every error found."""
    reader = _Reader(text)
    try:
        doc = tomllib.loads(text)
    except tomllib.TOMLDecodeError as exc:
        raise ConfigParseError([ConfigError("(document)", getattr(exc, "lineno", None), str(exc))]) from exc

    known_sections = set(_SCHEMA)
    for key in list(doc):
        if key not in known_sections:
            reader.error(key, "unknown section (strict mode)", f"[{key}]")
            doc.pop(key)

    # ---- group ----
    g = dict(doc.get("group", {}))
    sect = "[group]"
    kind = reader.take(g, "group", "kind", str, required=True, section_needle=sect)
    theta = reader.take(g, "group", "theta", float, section_needle=sect)
    theta_cf_raw = reader.take(g, "group", "theta_cf", list, section_needle=sect)
    order = reader.take(g, "group", "order", int, section_needle=sect)
    gens_raw = reader.take(g, "group", "generators", list, default=[1, -1], section_needle=sect)
    dioph_c = reader.take(g, "group", "dioph_c", float, default=0.05, section_needle=sect)
    dioph_n = reader.take(g, "group", "dioph_n", float, default=2.0, section_needle=sect)
    dioph_kmax = reader.take(g, "group", "dioph_kmax", int, default=10000, section_needle=sect)
    census_kmax = reader.take(g, "group", "census_kmax", int, default=0, section_needle=sect)
    reader.leftovers(g, "group", sect)

    if kind not in (DENSE, FINITE, None):
        reader.error("group.kind", f"must be {DENSE!r} or {FINITE!r}", sect, "kind")
    theta_cf = None
    if theta_cf_raw is not None:
        if all(isinstance(v, int) for v in theta_cf_raw):
            theta_cf = tuple(theta_cf_raw)
        else:
            reader.error("group.theta_cf", "must be a list of integers", sect, "theta_cf")
    if kind == DENSE and theta is None and theta_cf is None:
        reader.error("group", "dense-rotation needs theta or theta_cf", sect)
    if kind == DENSE and theta is not None and theta_cf is not None:
        reader.error("group", "give exactly one of theta and theta_cf", sect)
    if kind == FINITE and (order is None or order < 1):
        reader.error("group.order", "finite-cyclic needs order >= 1", sect, "order")
    generators = tuple(int(v) for v in gens_raw) if all(isinstance(v, int) for v in gens_raw) else ()
    if not generators:
        reader.error("group.generators", "must be a nonempty list of nonzero integers", sect, "generators")
    for name, val in (("dioph_c", dioph_c), ("dioph_n", dioph_n)):
        if val is not None and val <= 0:
            reader.error(f"group.{name}", "must be positive", sect, name)

    group = GroupSection(kind or FINITE, theta, theta_cf, order, generators,
                         dioph_c, dioph_n, dioph_kmax, census_kmax)

    # ---- operator ----
    o = dict(doc.get("operator", {}))
    sect = "[operator]"
    if not doc.get("operator"):
        reader.error("operator", "missing [operator] section")
    op_order = reader.take(o, "operator", "order", int, default=0, section_needle=sect)
    ranks_raw = reader.take(o, "operator", "ranks", list, default=[1, 1], section_needle=sect)
    terms_raw = o.pop("terms", None)
    reader.leftovers(o, "operator", sect)
    if (
        not isinstance(ranks_raw, list) or len(ranks_raw) != 2
        or not all(isinstance(r, int) and r >= 1 for r in ranks_raw)
    ):
        reader.error("operator.ranks", "must be [target_rank, source_rank], both >= 1", sect, "ranks")
        ranks_raw = [1, 1]
    ranks = (ranks_raw[0], ranks_raw[1])
    terms = []
    if not terms_raw:
        reader.error("operator.terms", "need at least one [[operator.terms]] entry", sect)
    else:
        for i, traw in enumerate(terms_raw):
            tpath = f"operator.terms[{i}]"
            if not isinstance(traw, dict):
                reader.error(tpath, "each term must be a table")
                continue
            traw = dict(traw)
            element = reader.take(traw, tpath, "element", int, required=True)
            row = reader.take(traw, tpath, "row", int, default=0)
            col = reader.take(traw, tpath, "col", int, default=0)
            plus = _coeff_table(traw.pop("plus", {}), reader, tpath + ".plus")
            minus = _coeff_table(traw.pop("minus", {}), reader, tpath + ".minus")
            for key in traw:
                reader.error(f"{tpath}.{key}", "unknown key (strict mode)", key)
            if row is not None and not (0 <= row < ranks[0]):
                reader.error(tpath + ".row", f"row {row} outside target rank {ranks[0]}")
            if col is not None and not (0 <= col < ranks[1]):
                reader.error(tpath + ".col", f"col {col} outside source rank {ranks[1]}")
            if element is not None and row is not None and col is not None:
                terms.append(TermConfig(element, row, col, plus, minus))
    operator = OperatorConfig(op_order or 0, ranks, tuple(terms))

    # ---- numerics ----
    n = dict(doc.get("numerics", {}))
    sect = "[numerics]"
    defaults = NumericsConfig()
    cutoffs_raw = reader.take(n, "numerics", "cutoffs", list, default=list(defaults.cutoffs), section_needle=sect)
    window = reader.take(n, "numerics", "window", int, default=defaults.window, section_needle=sect)
    grid_raw = reader.take(n, "numerics", "grid", list, default=list(defaults.grid), section_needle=sect)
    tols = {}
    for key in ("sv_tol", "ellipticity_tol", "invert_tol", "idempotent_tol",
                "mollifier_cells", "taper_fraction", "decay_power"):
        tols[key] = reader.take(n, "numerics", key, float, default=getattr(defaults, key), section_needle=sect)
        if tols[key] is not None and tols[key] <= 0:
            reader.error(f"numerics.{key}", "must be positive", sect, key)
    qpts = reader.take(n, "numerics", "quadrature_points", int, default=0, section_needle=sect)
    reader.leftovers(n, "numerics", sect)
    if (
        not isinstance(cutoffs_raw, list) or not cutoffs_raw
        or not all(isinstance(c, int) and c > 0 for c in cutoffs_raw)
        or any(a >= b for a, b in zip(cutoffs_raw, cutoffs_raw[1:]))
    ):
        reader.error("numerics.cutoffs", "must be a strictly increasing list of positive integers", sect, "cutoffs")
        cutoffs_raw = list(defaults.cutoffs)
    if (
        not isinstance(grid_raw, list) or len(grid_raw) != 2
        or not all(isinstance(v, int) and v >= 8 for v in grid_raw)
    ):
        reader.error("numerics.grid", "must be [grid_x, grid_beta] with entries >= 8", sect, "grid")
        grid_raw = list(defaults.grid)
    if window is not None and window < 1:
        reader.error("numerics.window", "must be >= 1", sect, "window")
    if qpts is not None and qpts not in (0,) and qpts < 4:
        reader.error("numerics.quadrature_points", "must be 0 (auto) or >= 4", sect, "quadrature_points")
    numerics = NumericsConfig(
        tuple(cutoffs_raw), window or defaults.window, (grid_raw[0], grid_raw[1]),
        tols["sv_tol"], tols["ellipticity_tol"], tols["invert_tol"], tols["idempotent_tol"],
        tols["mollifier_cells"], tols["taper_fraction"], qpts or 0, tols["decay_power"],
    )

    # ---- run ----
    r = dict(doc.get("run", {}))
    sect = "[run]"
    out_dir = reader.take(r, "run", "out_dir", str, default="out", section_needle=sect)
    seed = reader.take(r, "run", "seed", int, default=0, section_needle=sect)
    reader.leftovers(r, "run", sect)
    run = RunConfig(out_dir or "out", seed or 0)

    config = ExperimentConfig(group, operator, numerics, run)
    if not reader.errors:
        # structural validation done; let the group model cross-check its
        # own invariants (irrationality, generator symmetry, ...)
        try:
            spec = config.group_spec()
            config.shift_operator(spec)
        except (GroupModelError, ValueError) as exc:
            reader.error("group", str(exc))
    if reader.errors:
        raise ConfigParseError(reader.errors)
    return config


def load_config(path) -> ExperimentConfig:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_config(fh.read())


def _fmt(value) -> str:
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return repr(value)
    if isinstance(value, int):
        return str(value)
    if isinstance(value, str):
        return '"' + value.replace("\\", "\\\\").replace('"', '\\"') + '"'
    if isinstance(value, (list, tuple)):
        return "[" + ", ".join(_fmt(v) for v in value) + "]"
    raise TypeError(f"cannot format {value!r}")


def emit_config(config: ExperimentConfig) -> str:
    """Canonical TOML for a config; emit(parse(text)) reparses equal."""
    lines = ["[group]", f'kind = "{config.group.kind}"']
    if config.group.theta is not None:
        lines.append(f"theta = {_fmt(config.group.theta)}")
    if config.group.theta_cf is not None:
        lines.append(f"theta_cf = {_fmt(list(config.group.theta_cf))}")
    if config.group.order is not None:
        lines.append(f"order = {config.group.order}")
    lines.append(f"generators = {_fmt(list(config.group.generators))}")
    for key in ("dioph_c", "dioph_n", "dioph_kmax", "census_kmax"):
        lines.append(f"{key} = {_fmt(getattr(config.group, key))}")
    lines += ["", "[operator]", f"order = {config.operator.order}",
              f"ranks = {_fmt(list(config.operator.ranks))}"]
    for t in config.operator.terms:
        lines += ["", "[[operator.terms]]", f"element = {t.element}",
                  f"row = {t.row}", f"col = {t.col}"]
        for name, coeffs in (("plus", t.plus), ("minus", t.minus)):
            if coeffs:
                inner = ", ".join(
                    f'"{freq}" = [{_fmt(v.real)}, {_fmt(v.imag)}]' for freq, v in coeffs
                )
                lines.append(f"{name} = {{ {inner} }}")
    nc = config.numerics
    lines += ["", "[numerics]", f"cutoffs = {_fmt(list(nc.cutoffs))}",
              f"window = {nc.window}", f"grid = {_fmt(list(nc.grid))}"]
    for key in ("sv_tol", "ellipticity_tol", "invert_tol", "idempotent_tol",
                "mollifier_cells", "taper_fraction"):
        lines.append(f"{key} = {_fmt(getattr(nc, key))}")
    lines.append(f"quadrature_points = {nc.quadrature_points}")
    lines.append(f"decay_power = {_fmt(nc.decay_power)}")
    lines += ["", "[run]", f'out_dir = {_fmt(config.run.out_dir)}', f"seed = {config.run.seed}", ""]
    return "\n".join(lines)
