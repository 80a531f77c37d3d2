"""Vietoris-Rips filtrations and persistent homology over Z2 for planar block clouds.

The scale parameter (called the connected radius in the barcode outputs) is
measured in the same length units as the input coordinates; no normalization
is applied. Only dimensions 0 and 1 are reported: block clouds are planar, so
components and line-bounded holes carry all the structure of interest.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from itertools import combinations
from typing import Iterable, NamedTuple

import numpy as np

from .errors import InputError

DEFAULT_MAX_FILTRATION = 30.0


@dataclass(frozen=True)
class PointCloud:
    """Labeled 2-D block centroids, one snapshot of the surrounding rock.

    ids are unique block labels; xy is an (n, 2) float array in meters.
    """

    ids: tuple[str, ...]
    xy: np.ndarray

    def __post_init__(self):
        xy = np.asarray(self.xy, dtype=float)
        xy.setflags(write=False)
        object.__setattr__(self, "xy", xy)
        if len(self.ids) == 0:
            raise InputError("point cloud must contain at least one point")
        if xy.shape != (len(self.ids), 2):
            raise InputError(f"coordinate array has shape {xy.shape}, expected ({len(self.ids)}, 2)")
        if len(set(self.ids)) != len(self.ids):
            dupes = sorted({b for b in self.ids if self.ids.count(b) > 1})
            raise InputError(f"duplicate block ids: {dupes}")
        if not np.all(np.isfinite(xy)):
            raise InputError("coordinates must be finite")

    def __len__(self) -> int:
        return len(self.ids)

    @classmethod
    def from_rows(cls, rows: Iterable[tuple[str, float, float]]) -> "PointCloud":
        rows = list(rows)
        ids = tuple(str(r[0]) for r in rows)
        xy = np.array([[r[1], r[2]] for r in rows], dtype=float).reshape(len(rows), 2)
        return cls(ids, xy)

    def diameter(self) -> float:
        return float(compute_distance_matrix(self).d.max())


@dataclass(frozen=True)
class DistanceMatrix:
    """Symmetric pairwise Euclidean distances with zero diagonal."""

    d: np.ndarray

    def __post_init__(self):
        d = np.asarray(self.d, dtype=float)
        d.setflags(write=False)
        object.__setattr__(self, "d", d)
        if d.ndim != 2 or d.shape[0] != d.shape[1]:
            raise InputError(f"distance matrix must be square, got shape {d.shape}")
        if not np.all(np.isfinite(d)):
            raise InputError("distances must be finite")
        if np.any(np.diag(d) != 0.0):
            raise InputError("distance matrix diagonal must be zero")
        if np.any(d < 0.0) or not np.array_equal(d, d.T):
            raise InputError("distance matrix must be symmetric and non-negative")

    @property
    def n(self) -> int:
        return self.d.shape[0]


@dataclass(frozen=True)
class FiltSimplex:
    """A vertex, edge or triangle with the scale at which it enters the complex.

    Under the Vietoris-Rips rule the value equals the largest pairwise
    distance among the vertices, so every face enters no later than the
    simplex itself.
    """

    vertices: tuple[int, ...]
    value: float

    def __post_init__(self):
        if not 1 <= len(self.vertices) <= 3:
            raise InputError(f"simplex must have 1-3 vertices, got {len(self.vertices)}")
        if tuple(sorted(self.vertices)) != self.vertices:
            raise InputError(f"simplex vertices must be sorted: {self.vertices}")
        if len(set(self.vertices)) != len(self.vertices):
            raise InputError(f"simplex vertices must be distinct: {self.vertices}")

    @property
    def dim(self) -> int:
        return len(self.vertices) - 1

    def sort_key(self) -> tuple[float, int, tuple[int, ...]]:
        # Deterministic filtration order: scale, then dimension, then vertex labels.
        return (self.value, self.dim, self.vertices)


@dataclass(frozen=True)
class Chain:
    """A Z2 chain: the set of simplices carrying coefficient 1.

    Addition is symmetric difference, so c + c = 0 for every chain.
    """

    simplices: frozenset[tuple[int, ...]] = frozenset()

    def __add__(self, other: "Chain") -> "Chain":
        return Chain(self.simplices ^ other.simplices)

    def __bool__(self) -> bool:
        return bool(self.simplices)

    def __len__(self) -> int:
        return len(self.simplices)


@dataclass(frozen=True)
class Filtration:
    """Simplices sorted so that every face precedes its cofaces."""

    simplices: tuple[FiltSimplex, ...]
    max_filtration: float
    max_dim: int = 2

    def __post_init__(self):
        keys = [s.sort_key() for s in self.simplices]
        if keys != sorted(keys):
            raise InputError("filtration simplices are not in sorted order")
        for s in self.simplices:
            if s.value > self.max_filtration:
                raise InputError(
                    f"simplex {s.vertices} has value {s.value} above the cap {self.max_filtration}"
                )

    def __len__(self) -> int:
        return len(self.simplices)


class PersistencePair(NamedTuple):
    dim: int
    birth: float
    death: float  # math.inf when the class survives the whole filtration


@dataclass(frozen=True)
class Barcode:
    """Persistence intervals for dimensions 0 and 1.

    A dim-1 pair with infinite death was still open at the filtration cap
    (censored); feature extraction clamps such deaths to the cap.
    """

    pairs: tuple[PersistencePair, ...]
    max_filtration: float

    def __post_init__(self):
        for p in self.pairs:
            if p.birth < 0 or p.birth > p.death:
                raise InputError(f"invalid persistence pair {p}")

    def __len__(self) -> int:
        return len(self.pairs)

    def in_dim(self, dim: int) -> tuple[PersistencePair, ...]:
        return tuple(p for p in self.pairs if p.dim == dim)


def compute_distance_matrix(pc: PointCloud) -> DistanceMatrix:
    """Pairwise Euclidean distances between block centroids."""
    diff = pc.xy[:, None, :] - pc.xy[None, :, :]
    d = np.sqrt((diff ** 2).sum(axis=-1))
    d = (d + d.T) / 2.0  # exact symmetry despite rounding
    np.fill_diagonal(d, 0.0)
    return DistanceMatrix(d)


def build_vr_filtration(
    dm: DistanceMatrix,
    max_filtration: float = DEFAULT_MAX_FILTRATION,
    max_dim: int = 2,
) -> Filtration:
    """Vietoris-Rips filtration up to triangles, capped at max_filtration.

    Vertices enter at scale 0; an edge enters at the distance between its
    endpoints; a triangle enters at its longest edge. Simplices whose value
    exceeds the cap are omitted.
    """
    if not max_filtration > 0:
        raise InputError(f"max_filtration must be positive, got {max_filtration}")
    if max_dim != 2:
        raise InputError("only max_dim=2 is supported")
    n = dm.n
    d = dm.d
    simplices = [FiltSimplex((i,), 0.0) for i in range(n)]
    edge_ok = d <= max_filtration
    for i, j in combinations(range(n), 2):
        if edge_ok[i, j]:
            simplices.append(FiltSimplex((i, j), float(d[i, j])))
    for i, j, k in combinations(range(n), 3):
        if edge_ok[i, j] and edge_ok[i, k] and edge_ok[j, k]:
            value = max(d[i, j], d[i, k], d[j, k])
            simplices.append(FiltSimplex((i, j, k), float(value)))
    simplices.sort(key=FiltSimplex.sort_key)
    return Filtration(tuple(simplices), float(max_filtration), max_dim)


def boundary(s: FiltSimplex) -> Chain:
    """Boundary of a simplex over Z2: each facet with coefficient 1.

    Vertices have empty boundary. Signs vanish modulo 2, so the boundary is
    just the set of faces obtained by dropping one vertex.
    """
    if s.dim == 0:
        return Chain()
    faces = [s.vertices[:i] + s.vertices[i + 1:] for i in range(len(s.vertices))]
    return Chain(frozenset(faces))


def boundary_of_chain(c: Chain) -> Chain:
    """Z2-linear extension of the boundary operator to chains."""
    total = Chain()
    for verts in c.simplices:
        total = total + boundary(FiltSimplex(verts, 0.0))
    return total


def compute_persistence(f: Filtration, keep_zero_bars: bool = False) -> Barcode:
    """Barcode of a filtration by column reduction of the Z2 boundary matrix.

    Columns are processed in filtration order with sparse sets of row
    indices; a column is repeatedly reduced by the column sharing its lowest
    row until its pivot is fresh or it vanishes. A vanishing column creates a
    class, a surviving pivot kills the class created at its lowest row.
    Classes still open at the cap get infinite death. Pairs with zero
    persistence are dropped unless keep_zero_bars is set.
    """
    order = {s.vertices: idx for idx, s in enumerate(f.simplices)}
    columns: dict[int, set[int]] = {}
    pivot_of_row: dict[int, int] = {}  # creator row -> column that kills it

    for j, s in enumerate(f.simplices):
        col = {order[face] for face in boundary(s).simplices}
        while col:
            low = max(col)
            other = pivot_of_row.get(low)
            if other is None:
                break
            col ^= columns[other]
        if col:
            columns[j] = col
            pivot_of_row[max(col)] = j

    pairs = []
    for idx, s in enumerate(f.simplices):
        if s.dim > 1 or idx in columns:
            continue  # not a creator, or creates in a dimension we do not report
        killer = pivot_of_row.get(idx)
        death = math.inf if killer is None else f.simplices[killer].value
        if not keep_zero_bars and death == s.value:
            continue
        pairs.append(PersistencePair(s.dim, s.value, death))
    pairs.sort()
    return Barcode(tuple(pairs), f.max_filtration)


def betti_numbers(b: Barcode, eps: float) -> tuple[int, int]:
    """Betti numbers (components, holes) at one scale.

    A pair counts at eps when birth <= eps < death: intervals are half-open
    on the right.
    """
    if not 0 <= eps <= b.max_filtration:
        raise InputError(f"scale {eps} outside [0, {b.max_filtration}]")
    counts = [0, 0]
    for p in b.pairs:
        if p.birth <= eps < p.death:
            counts[p.dim] += 1
    return counts[0], counts[1]


def persistent_betti(b: Barcode, eps_i: float, p: float) -> tuple[int, int]:
    """Number of classes alive over the whole window [eps_i, eps_i + p]."""
    if p < 0:
        raise InputError(f"persistence window must be non-negative, got {p}")
    if eps_i < 0 or eps_i + p > b.max_filtration:
        raise InputError(f"window [{eps_i}, {eps_i + p}] outside [0, {b.max_filtration}]")
    counts = [0, 0]
    for pair in b.pairs:
        if pair.birth <= eps_i and pair.death > eps_i + p:
            counts[pair.dim] += 1
    return counts[0], counts[1]


def barcode_from_cloud(
    pc: PointCloud,
    max_filtration: float = DEFAULT_MAX_FILTRATION,
    keep_zero_bars: bool = False,
) -> Barcode:
    """Convenience: distance matrix -> VR filtration -> barcode."""
    dm = compute_distance_matrix(pc)
    f = build_vr_filtration(dm, max_filtration)
    return compute_persistence(f, keep_zero_bars=keep_zero_bars)
