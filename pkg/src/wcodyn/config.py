"""Declarative scenario configs: parsing, validation, and object construction.

A scenario is a single JSON document (a key-value tree).  Validation errors
name the offending field, e.g. ``norm.q: must satisfy 1 <= q < p``.
"""

from __future__ import annotations

import csv
import json
import math
from dataclasses import dataclass
from pathlib import Path
from typing import Optional

from .criteria import DisjointSystem, OperatorFamily, Scenario
from .domain import AffineLatticeMap, DomainError, Region
from .operators import OperatorError, WeightedCompositionOperator
from .spaces import (
    ConstantWeight,
    EllPNorm,
    ExpYoung,
    MorreyNorm,
    OrliczNorm,
    PowerYoung,
    ProductWeight,
    RadialPowerWeight,
    SpaceError,
    TableWeight,
    Weight,
    WeightError,
)

MODES = ("transitive", "disjoint", "semi")


class ConfigError(ValueError):
    """A malformed config; the message names the offending field."""

    def __init__(self, field: str, message: str):
        super().__init__(f"{field}: {message}")
        self.field = field


def _need(d: dict, key: str, path: str):
    if key not in d:
        raise ConfigError(f"{path}.{key}" if path else key, "missing required field")
    return d[key]


def _as_number(v, path: str) -> float:
    if not isinstance(v, (int, float)) or isinstance(v, bool):
        raise ConfigError(path, f"expected a number, got {v!r}")
    return float(v)


def _as_int(v, path: str) -> int:
    if not isinstance(v, int) or isinstance(v, bool):
        raise ConfigError(path, f"expected an integer, got {v!r}")
    return v


def _parse_young(d: dict, path: str):
    kind = _need(d, "kind", path)
    if kind == "power":
        return PowerYoung(_as_number(d.get("p", 2), f"{path}.p"))
    if kind == "exp":
        return ExpYoung()
    raise ConfigError(f"{path}.kind", f"unknown young function {kind!r}")


def parse_norm(d: dict, path: str = "norm"):
    kind = _need(d, "kind", path)
    try:
        if kind == "ell_p":
            p = d.get("p", 1)
            p = math.inf if p in ("inf", "infinity") else _as_number(p, f"{path}.p")
            return EllPNorm(p)
        if kind == "orlicz":
            young = _parse_young(d.get("young", {"kind": "power", "p": 2}), f"{path}.young")
            return OrliczNorm(young, _as_number(d.get("tol", 1e-10), f"{path}.tol"))
        if kind == "morrey":
            return MorreyNorm(
                _as_number(_need(d, "p", path), f"{path}.p"),
                _as_number(_need(d, "q", path), f"{path}.q"),
                _as_int(_need(d, "max_radius", path), f"{path}.max_radius"),
            )
    except SpaceError as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(f"{path}.kind", f"unknown norm kind {kind!r}")


def _load_table_csv(path: Path, field: str) -> dict:
    table = {}
    try:
        with open(path, newline="") as fh:
            for i, row in enumerate(csv.reader(fh)):
                if not row:
                    continue
                try:
                    nums = [float(c) for c in row]
                except ValueError:
                    if i == 0:
                        continue  # header row
                    raise ConfigError(field, f"non-numeric row {i + 1} in {path}")
                table[tuple(int(c) for c in nums[:-1])] = nums[-1]
    except OSError as exc:
        raise ConfigError(field, f"cannot read weight table: {exc}") from exc
    return table


def parse_weight(d: dict, path: str, scale: float = 1.0, base_dir: Optional[Path] = None) -> Weight:
    kind = _need(d, "kind", path)
    try:
        if kind == "constant":
            return ConstantWeight(_as_number(d.get("value", 1.0), f"{path}.value"))
        if kind == "radial_power":
            return RadialPowerWeight(
                _as_number(d.get("p", 1.0), f"{path}.p"), scale=scale
            )
        if kind == "table":
            default = d.get("default")
            if default is not None:
                default = _as_number(default, f"{path}.default")
            if "csv" in d:
                base = base_dir or Path.cwd()
                table = _load_table_csv(base / d["csv"], f"{path}.csv")
            else:
                raw = _need(d, "values", path)
                table = {tuple(int(c) for c in row[:-1]): float(row[-1]) for row in raw}
            return TableWeight(table, default=default)
        if kind == "product":
            factors = tuple(
                parse_weight(fd, f"{path}.factors[{i}]", scale, base_dir)
                for i, fd in enumerate(_need(d, "factors", path))
            )
            return ProductWeight(factors)
    except WeightError as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(f"{path}.kind", f"unknown weight kind {kind!r}")


def parse_map(d: dict, path: str, dimension: int) -> AffineLatticeMap:
    offset = _need(d, "offset", path)
    if len(offset) != dimension:
        raise ConfigError(f"{path}.offset", f"expected {dimension} entries")
    linear = d.get("linear")
    try:
        if linear is None:
            return AffineLatticeMap.translation(offset)
        return AffineLatticeMap(tuple(tuple(r) for r in linear), tuple(offset))
    except DomainError as exc:
        raise ConfigError(path, str(exc)) from exc


def parse_region(d: dict, path: str, dimension: int) -> Region:
    try:
        if "box" in d:
            box = d["box"]
            if len(box) != dimension:
                raise ConfigError(f"{path}.box", f"expected {dimension} bound pairs")
            return Region.box(box)
        if "points" in d:
            pts = d["points"]
            if any(len(p) != dimension for p in pts):
                raise ConfigError(f"{path}.points", f"points must have dimension {dimension}")
            return Region.of(pts)
    except DomainError as exc:
        raise ConfigError(path, str(exc)) from exc
    raise ConfigError(path, "need either 'box' or 'points'")


def _is_signed_permutation(m: AffineLatticeMap) -> bool:
    for row in m.linear:
        nz = [abs(v) for v in row if v != 0]
        if nz != [1]:
            return False
    cols = list(zip(*m.linear))
    return all([abs(v) for v in col if v != 0] == [1] for col in cols)


@dataclass
class ScenarioConfig:
    """A validated scenario: everything needed to run one check."""

    name: str
    mode: str
    dimension: int
    scale: float
    norm: object
    eta: Weight
    K: Region
    region: Region
    horizon: Optional[int]
    tol: Optional[float]
    epsilon: Optional[float]
    operators: tuple  # (map, symbol) pairs for transitive/disjoint modes
    powers: tuple
    n_ops: int
    family_direction: Optional[tuple]
    family_symbol: Optional[Weight]
    index_range: Optional[tuple]
    raw: dict

    def warnings(self) -> list:
        out = []
        if isinstance(self.norm, MorreyNorm):
            for mp, _ in self.operators:
                if not _is_signed_permutation(mp):
                    out.append(
                        "morrey norm: map is not a signed permutation plus shift, "
                        "so norm invariance under the map is not guaranteed"
                    )
        return out

    def build(self):
        """Construct the system under test: Scenario, DisjointSystem, or family."""
        if self.mode == "transitive":
            mp, sym = self.operators[0]
            op = WeightedCompositionOperator(mp, sym, self.region)
            return Scenario(self.norm, self.eta, op, self.region)
        if self.mode == "disjoint":
            ops = tuple(
                WeightedCompositionOperator(mp, sym, self.region)
                for mp, sym in self.operators
            )
            return DisjointSystem(self.norm, self.eta, ops, self.powers)
        direction = self.family_direction
        symbol = self.family_symbol
        lo, hi = self.index_range
        return OperatorFamily(
            norm=self.norm,
            eta=self.eta,
            n_ops=self.n_ops,
            index_set=range(lo, hi + 1),
            map_for=lambda t, l: AffineLatticeMap.translation(
                tuple(t * (l + 1) * c for c in direction)
            ),
            symbol_for=lambda t, l: symbol,
        )


def parse_config(doc: dict, base_dir: Optional[Path] = None) -> ScenarioConfig:
    if not isinstance(doc, dict):
        raise ConfigError("", "config must be a JSON object")
    name = doc.get("name", "scenario")
    mode = _need(doc, "mode", "")
    if mode not in MODES:
        raise ConfigError("mode", f"must be one of {MODES}, got {mode!r}")
    dom = doc.get("domain", {})
    dimension = _as_int(dom.get("dimension", 1), "domain.dimension")
    if dimension < 1:
        raise ConfigError("domain.dimension", "must be >= 1")
    scale = _as_number(dom.get("scale", 1.0), "domain.scale")
    if scale <= 0:
        raise ConfigError("domain.scale", "must be positive")
    norm_spec = parse_norm(_need(doc, "norm", ""), "norm")
    eta = parse_weight(_need(doc, "eta", ""), "eta", scale, base_dir)
    K = parse_region(_need(doc, "K", ""), "K", dimension)
    if "region" in doc:
        region = parse_region(doc["region"], "region", dimension)
    else:
        pts = K.sorted_points()
        lo = [min(p[i] for p in pts) - 1 for i in range(dimension)]
        hi = [max(p[i] for p in pts) + 1 for i in range(dimension)]
        region = Region.box(list(zip(lo, hi)))

    horizon = tol = epsilon = None
    operators: tuple = ()
    powers: tuple = ()
    n_ops = 1
    family_direction = family_symbol = index_range = None

    if mode in ("transitive", "disjoint"):
        horizon = _as_int(_need(doc, "horizon", ""), "horizon")
        if horizon < 1:
            raise ConfigError("horizon", "must be >= 1")
        tol = _as_number(_need(doc, "tol", ""), "tol")
        if not (0 < tol < 1):
            raise ConfigError("tol", "must lie in (0, 1)")
    if mode == "transitive":
        od = _need(doc, "operator", "")
        operators = (
            (
                parse_map(_need(od, "map", "operator"), "operator.map", dimension),
                parse_weight(_need(od, "symbol", "operator"), "operator.symbol", scale, base_dir),
            ),
        )
        n_ops = 1
    elif mode == "disjoint":
        ods = _need(doc, "operators", "")
        if not isinstance(ods, list) or len(ods) < 2:
            raise ConfigError("operators", "need a list of at least two operators")
        operators = tuple(
            (
                parse_map(_need(od, "map", f"operators[{i}]"), f"operators[{i}].map", dimension),
                parse_weight(
                    _need(od, "symbol", f"operators[{i}]"),
                    f"operators[{i}].symbol",
                    scale,
                    base_dir,
                ),
            )
            for i, od in enumerate(ods)
        )
        powers = tuple(_as_int(p, "powers") for p in _need(doc, "powers", ""))
        if len(powers) != len(operators):
            raise ConfigError("powers", "must match the number of operators")
        n_ops = len(operators)
    else:  # semi
        epsilon = _as_number(_need(doc, "epsilon", ""), "epsilon")
        if not (0 < epsilon < 1):
            raise ConfigError("epsilon", "must lie in (0, 1)")
        fd = _need(doc, "family", "")
        if fd.get("kind", "scaled_translation") != "scaled_translation":
            raise ConfigError("family.kind", "only 'scaled_translation' is supported")
        direction = _need(fd, "direction", "family")
        if len(direction) != dimension:
            raise ConfigError("family.direction", f"expected {dimension} entries")
        family_direction = tuple(int(c) for c in direction)
        family_symbol = parse_weight(
            fd.get("symbol", {"kind": "constant", "value": 1.0}),
            "family.symbol",
            scale,
            base_dir,
        )
        n_ops = _as_int(_need(doc, "n_ops", ""), "n_ops")
        if n_ops < 1:
            raise ConfigError("n_ops", "must be >= 1")
        rng = _need(doc, "index_range", "")
        if len(rng) != 2:
            raise ConfigError("index_range", "expected [lo, hi]")
        index_range = (_as_int(rng[0], "index_range"), _as_int(rng[1], "index_range"))
        if index_range[1] < index_range[0]:
            raise ConfigError("index_range", "hi must be >= lo")

    cfg = ScenarioConfig(
        name=name,
        mode=mode,
        dimension=dimension,
        scale=scale,
        norm=norm_spec,
        eta=eta,
        K=K,
        region=region,
        horizon=horizon,
        tol=tol,
        epsilon=epsilon,
        operators=operators,
        powers=powers,
        n_ops=n_ops,
        family_direction=family_direction,
        family_symbol=family_symbol,
        index_range=index_range,
        raw=doc,
    )
    try:
        cfg.build()  # surface operator/system construction errors as config errors
    except (OperatorError, WeightError, DomainError) as exc:
        raise ConfigError("operator", str(exc)) from exc
    return cfg


def load_config(path: str | Path) -> ScenarioConfig:
    path = Path(path)
    try:
        doc = json.loads(path.read_text())
    except OSError as exc:
        raise ConfigError("", f"cannot read config: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise ConfigError("", f"invalid JSON: {exc}") from exc
    return parse_config(doc, base_dir=path.parent)
