"""Solid norms, weights, and finitely supported sample functions on the lattice.

Three norm families are provided: counting ``l^p``, Orlicz with a Luxemburg
gauge computed by bisection, and a discrete Morrey norm built from cubes
(``l^inf`` balls).  A weighted space is obtained by pairing any of them with
a strictly positive weight ``eta``: the weighted norm of ``f`` is the plain
norm of the pointwise product ``f * eta``.

Weights are functions on the lattice; radial weights take an optional real
``scale`` that maps lattice units to real coordinates before evaluating.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Mapping, Sequence

import numpy as np

from .domain import AffineLatticeMap, Point, Region

_LOG_MAX = math.log(np.finfo(np.float64).max)  # ~709.78


class SpaceError(ValueError):
    """Raised for invalid norm parameters or malformed sample functions."""


class WeightError(ValueError):
    """Violation report for a weight: non-positive or missing values.

    Carries the offending points so callers can show where the weight fails.
    """

    def __init__(self, message: str, points: Sequence[Point] = ()):
        super().__init__(message)
        self.points = tuple(points)


# ---------------------------------------------------------------------------
# Sample functions


class SampleFunction:
    """A finitely supported complex-valued function on the lattice.

    Zero values are pruned, so equality is support-wise.  Instances are
    immutable by convention; all arithmetic returns new objects.
    """

    __slots__ = ("_data",)

    def __init__(self, data: Mapping[Point, complex] | Iterable = ()):
        items = data.items() if isinstance(data, Mapping) else data
        d = {}
        dim = None
        for pt, val in items:
            pt = tuple(int(c) for c in pt)
            if dim is None:
                dim = len(pt)
            elif len(pt) != dim:
                raise SpaceError("sample function mixes point dimensions")
            val = complex(val)
            if val != 0:
                d[pt] = d.get(pt, 0) + val
                if d[pt] == 0:
                    del d[pt]
        self._data = d

    @classmethod
    def indicator(cls, points: Iterable[Sequence[int]] | Region) -> "SampleFunction":
        pts = points.points if isinstance(points, Region) else points
        return cls({tuple(int(c) for c in p): 1.0 for p in pts})

    @classmethod
    def zero(cls) -> "SampleFunction":
        return cls({})

    @property
    def support(self) -> frozenset:
        return frozenset(self._data)

    def items(self) -> list:
        """Support/value pairs in sorted point order (deterministic)."""
        return sorted(self._data.items())

    def __getitem__(self, pt) -> complex:
        return self._data.get(tuple(int(c) for c in pt), 0j)

    def __len__(self) -> int:
        return len(self._data)

    def __bool__(self) -> bool:
        return bool(self._data)

    def __eq__(self, other) -> bool:
        return isinstance(other, SampleFunction) and self._data == other._data

    def __hash__(self):
        return hash(frozenset(self._data.items()))

    def __add__(self, other: "SampleFunction") -> "SampleFunction":
        out = dict(self._data)
        for pt, v in other._data.items():
            s = out.get(pt, 0) + v
            if s == 0:
                out.pop(pt, None)
            else:
                out[pt] = s
        f = SampleFunction.zero()
        f._data = out
        return f

    def __sub__(self, other: "SampleFunction") -> "SampleFunction":
        return self + (-1) * other

    def __rmul__(self, scalar) -> "SampleFunction":
        return SampleFunction({pt: scalar * v for pt, v in self._data.items()})

    def __neg__(self) -> "SampleFunction":
        return (-1) * self

    def restrict(self, points: Iterable[Point] | Region) -> "SampleFunction":
        """The product ``f * chi_E`` for a finite set ``E``."""
        keep = points.points if isinstance(points, Region) else set(map(tuple, points))
        return SampleFunction({pt: v for pt, v in self._data.items() if pt in keep})

    def scaled_by(self, weight: "Weight") -> "SampleFunction":
        """Pointwise product ``f * w`` on the support."""
        return SampleFunction(
            {pt: v * weight.value_at(pt) for pt, v in self._data.items()}
        )

    def compose(self, m: AffineLatticeMap) -> "SampleFunction":
        """The pullback ``f ∘ m``, supported on ``m^{-1}(supp f)``."""
        inv = m.inverse
        return SampleFunction({inv.apply(pt): v for pt, v in self._data.items()})

    def sup_abs(self) -> float:
        return max((abs(v) for v in self._data.values()), default=0.0)

    def __repr__(self) -> str:
        inner = ", ".join(f"{pt}: {v:g}" for pt, v in self.items())
        return f"SampleFunction({{{inner}}})"


# ---------------------------------------------------------------------------
# Young functions and norms


@dataclass(frozen=True)
class PowerYoung:
    """Young function ``t -> t^p`` with ``p >= 1``."""

    p: float = 2.0

    def __post_init__(self):
        if self.p < 1:
            raise SpaceError(f"young.p: must be >= 1, got {self.p}")

    def __call__(self, t: float) -> float:
        return t**self.p

    def inverse_at_one(self) -> float:
        return 1.0

    def describe(self) -> dict:
        return {"kind": "power", "p": self.p}


@dataclass(frozen=True)
class ExpYoung:
    """Young function ``t -> e^t - 1``."""

    def __call__(self, t: float) -> float:
        return math.expm1(t) if t < _LOG_MAX else math.inf

    def inverse_at_one(self) -> float:
        return math.log(2.0)

    def describe(self) -> dict:
        return {"kind": "exp"}


@dataclass(frozen=True)
class EllPNorm:
    """Counting-measure ``l^p`` norm, ``p in [1, inf]``."""

    p: float = 1.0

    def __post_init__(self):
        if not (self.p >= 1):
            raise SpaceError(f"norm.p: must be >= 1 (or inf), got {self.p}")

    def value(self, f: SampleFunction) -> float:
        mags = [abs(v) for _, v in f.items()]
        if not mags:
            return 0.0
        if math.isinf(self.p):
            return max(mags)
        if self.p == 1:
            return math.fsum(mags)
        return math.fsum(m**self.p for m in mags) ** (1.0 / self.p)

    def describe(self) -> dict:
        return {"kind": "ell_p", "p": self.p}


@dataclass(frozen=True)
class OrliczNorm:
    """Luxemburg gauge ``inf{lam > 0 : sum Phi(|f|/lam) <= 1}`` by bisection.

    ``tol`` is the guaranteed bracket width; the bisection actually runs to
    machine precision so that the norm is monotone in ``|f|`` to ~1e-15,
    which the solidity axiom relies on.
    """

    young: object = PowerYoung(2.0)
    tol: float = 1e-10

    def __post_init__(self):
        if self.tol <= 0:
            raise SpaceError("norm.tol: must be positive")

    def value(self, f: SampleFunction) -> float:
        mags = [abs(v) for _, v in f.items()]
        if not mags:
            return 0.0
        phi = self.young
        inv1 = phi.inverse_at_one()

        def modular(lam: float) -> float:
            return math.fsum(phi(m / lam) for m in mags)

        lo = max(mags) / inv1  # modular(lo) >= Phi(max/lo) = 1
        hi = math.fsum(mags) / inv1  # modular(hi) <= Phi(sum/hi) = 1 by convexity
        if modular(lo) <= 1.0:
            return lo
        for _ in range(200):
            mid = 0.5 * (lo + hi)
            if mid == lo or mid == hi:
                break
            if modular(mid) <= 1.0:
                hi = mid
            else:
                lo = mid
            if hi - lo <= 1e-16 * hi:
                break
        return hi

    def describe(self) -> dict:
        return {"kind": "orlicz", "young": self.young.describe(), "tol": self.tol}


@dataclass(frozen=True)
class MorreyNorm:
    """Discrete Morrey norm: sup over lattice cubes ``B`` of
    ``|B|^(1/p - 1/q) * (sum_{x in B} |f(x)|^q)^(1/q)``.

    Cubes are ``l^inf`` balls with radius ``0..max_radius`` and centers in the
    support bounding box dilated by ``max_radius``, which makes the supremum
    finite, reproducible, and translation invariant.
    """

    p: float = 2.0
    q: float = 1.0
    max_radius: int = 10

    def __post_init__(self):
        if not (1 <= self.q < self.p):
            raise SpaceError(
                f"norm.q: must satisfy 1 <= q < p, got q={self.q}, p={self.p}"
            )
        if math.isinf(self.p):
            raise SpaceError("norm.p: must be finite for the morrey norm")
        if self.max_radius < 0:
            raise SpaceError("norm.max_radius: must be >= 0")

    def value(self, f: SampleFunction) -> float:
        items = f.items()
        if not items:
            return 0.0
        pts = np.array([pt for pt, _ in items], dtype=np.int64)
        mags_q = np.array([abs(v) ** self.q for _, v in items])
        d = pts.shape[1]
        r_max = self.max_radius
        lo = pts.min(axis=0) - r_max
        hi = pts.max(axis=0) + r_max
        sizes = np.array(
            [(2 * r + 1) ** d for r in range(r_max + 1)], dtype=np.float64
        )
        weights = sizes ** (1.0 / self.p - 1.0 / self.q)
        best = 0.0
        # Enumerate centers; per center, bucket support mass by l^inf distance
        # and take a cumulative sum over radii.
        for center in np.ndindex(*(hi - lo + 1)):
            c = np.asarray(center, dtype=np.int64) + lo
            dist = np.abs(pts - c).max(axis=1)
            mask = dist <= r_max
            if not mask.any():
                continue
            buckets = np.zeros(r_max + 1)
            np.add.at(buckets, dist[mask], mags_q[mask])
            cum = np.cumsum(buckets)
            vals = weights * cum ** (1.0 / self.q)
            m = float(vals.max())
            if m > best:
                best = m
        return best

    def describe(self) -> dict:
        return {
            "kind": "morrey",
            "p": self.p,
            "q": self.q,
            "max_radius": self.max_radius,
        }


def norm(spec, f: SampleFunction) -> float:
    """The solid norm ``||f||_F`` for any of the norm specs."""
    return spec.value(f)


# ---------------------------------------------------------------------------
# Weights


class Weight:
    """A strictly positive function on the lattice.

    Subclasses implement scalar ``value_at`` and may override the vectorized
    ``values``/``log_values`` (used heavily by the criterion scanners).
    """

    def value_at(self, pt: Point) -> float:
        raise NotImplementedError

    def log_value_at(self, pt: Point) -> float:
        return math.log(self.value_at(pt))

    def values(self, pts: np.ndarray) -> np.ndarray:
        return np.array([self.value_at(tuple(int(c) for c in row)) for row in pts])

    def log_values(self, pts: np.ndarray) -> np.ndarray:
        return np.log(self.values(pts))

    def describe(self) -> dict:
        raise NotImplementedError


@dataclass(frozen=True)
class ConstantWeight(Weight):
    c: float = 1.0

    def __post_init__(self):
        if not (self.c > 0 and math.isfinite(self.c)):
            raise WeightError(f"constant weight must be positive, got {self.c}")

    def value_at(self, pt: Point) -> float:
        return self.c

    def values(self, pts: np.ndarray) -> np.ndarray:
        return np.full(len(pts), self.c)

    def log_values(self, pts: np.ndarray) -> np.ndarray:
        return np.full(len(pts), math.log(self.c))

    def describe(self) -> dict:
        return {"kind": "constant", "value": self.c}


@dataclass(frozen=True)
class RadialPowerWeight(Weight):
    """``w(x) = 1`` inside the unit ball and ``||x*scale||^{-p}`` outside.

    ``scale`` converts lattice units to real coordinates before taking the
    Euclidean norm, so the same formula serves any lattice resolution.
    """

    p: float = 1.0
    scale: float = 1.0

    def __post_init__(self):
        if self.p <= 0:
            raise WeightError("radial power weight needs p > 0")
        if self.scale <= 0:
            raise WeightError("scale must be positive")

    def value_at(self, pt: Point) -> float:
        r = self.scale * math.sqrt(sum(float(c) * float(c) for c in pt))
        return 1.0 if r <= 1.0 else r**-self.p

    def values(self, pts: np.ndarray) -> np.ndarray:
        r = self.scale * np.sqrt((pts.astype(np.float64) ** 2).sum(axis=1))
        out = np.ones(len(pts))
        m = r > 1.0
        out[m] = r[m] ** -self.p
        return out

    def log_values(self, pts: np.ndarray) -> np.ndarray:
        r = self.scale * np.sqrt((pts.astype(np.float64) ** 2).sum(axis=1))
        out = np.zeros(len(pts))
        m = r > 1.0
        out[m] = -self.p * np.log(r[m])
        return out

    def describe(self) -> dict:
        return {"kind": "radial_power", "p": self.p, "scale": self.scale}


class TableWeight(Weight):
    """Explicit point -> value table, optionally with a default off-table value."""

    def __init__(self, values: Mapping[Point, float], default: float | None = None):
        tbl = {}
        bad = []
        for pt, v in values.items():
            pt = tuple(int(c) for c in pt)
            v = float(v)
            if not (v > 0 and math.isfinite(v)):
                bad.append(pt)
            tbl[pt] = v
        if bad:
            raise WeightError("table weight has non-positive entries", bad)
        if default is not None and not (default > 0 and math.isfinite(default)):
            raise WeightError("table default must be positive")
        self._table = tbl
        self.default = default

    def value_at(self, pt: Point) -> float:
        pt = tuple(int(c) for c in pt)
        v = self._table.get(pt)
        if v is None:
            if self.default is None:
                raise WeightError(f"weight table has no value at {pt}", [pt])
            return self.default
        return v

    def __eq__(self, other):
        return (
            isinstance(other, TableWeight)
            and self._table == other._table
            and self.default == other.default
        )

    def describe(self) -> dict:
        return {
            "kind": "table",
            "entries": len(self._table),
            "default": self.default,
        }


@dataclass(frozen=True)
class ProductWeight(Weight):
    factors: tuple

    def __post_init__(self):
        if not self.factors:
            raise WeightError("product weight needs at least one factor")
        object.__setattr__(self, "factors", tuple(self.factors))

    def value_at(self, pt: Point) -> float:
        out = 1.0
        for w in self.factors:
            out *= w.value_at(pt)
        return out

    def values(self, pts: np.ndarray) -> np.ndarray:
        out = np.ones(len(pts))
        for w in self.factors:
            out *= w.values(pts)
        return out

    def log_values(self, pts: np.ndarray) -> np.ndarray:
        out = np.zeros(len(pts))
        for w in self.factors:
            out += w.log_values(pts)
        return out

    def describe(self) -> dict:
        return {"kind": "product", "factors": [w.describe() for w in self.factors]}


# ---------------------------------------------------------------------------
# Operations pairing norms and weights


def weighted_norm(spec, eta: Weight, f: SampleFunction) -> float:
    """``||f||_{F_eta} = ||f * eta||_F``, exactly by construction."""
    return spec.value(f.scaled_by(eta))


def validate_weight(eta: Weight, m: AffineLatticeMap, region: Region) -> float:
    """Estimated admissibility constant ``K`` on the region.

    Returns the largest of ``eta(m(x))/eta(x)`` and ``eta(m^{-1}(x))/eta(x)``
    over the region.  Raises :class:`WeightError` (the violation report) when
    eta is non-positive or non-finite anywhere sampled.
    """
    inv = m.inverse
    bad = []
    k = 0.0
    for x in region.sorted_points():
        triple = [x, m.apply(x), inv.apply(x)]
        vals = []
        for pt in triple:
            v = eta.value_at(pt)
            if not (v > 0 and math.isfinite(v)):
                bad.append(pt)
            vals.append(v)
        if bad:
            raise WeightError("weight is non-positive on sampled points", bad)
        k = max(k, vals[1] / vals[0], vals[2] / vals[0])
    return k


def inf_weight_on(eta: Weight, region: Region) -> float:
    """``m_K``: the minimum of the weight over the finite set ``K``."""
    vals = [eta.value_at(x) for x in region.sorted_points()]
    m = min(vals)
    if not (m > 0 and math.isfinite(m)):
        raise WeightError("weight is non-positive on the region")
    return m


def sup_weight_on(w: Weight, region: Region) -> float:
    vals = [w.value_at(x) for x in region.sorted_points()]
    return max(vals)
