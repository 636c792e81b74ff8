"""Vietoris-Rips persistent homology in degrees 0 and 1 over Z/2.

A simplex enters the filtration at its longest pairwise distance (closed
convention: at scale epsilon the complex contains every simplex whose
edges all have length <= epsilon).  Simplices are ordered by
(filtration value, dimension, lexicographic vertex tuple), which fixes
the output exactly even in the presence of ties.

Two interchangeable backends implement the matrix reduction: a compiled
Cython kernel (``_kernel``) and a pure-Python fallback (``_fallback``).
The compiled one is picked when importable; set the environment
variable ``BUBBLETDA_BACKEND`` to ``python`` or ``cython`` to force a
choice (forcing ``cython`` raises if the extension is missing).
"""

from __future__ import annotations

import os
from collections import Counter
from dataclasses import dataclass

import numpy as np

__all__ = [
    "BACKEND",
    "PersistenceDiagram",
    "RipsConfig",
    "pairwise_distances",
    "validate_distance_matrix",
    "enclosing_radius",
    "rips_persistence",
]

_requested = os.environ.get("BUBBLETDA_BACKEND", "").strip().lower()
if _requested == "python":
    from . import _fallback as _backend
elif _requested == "cython":
    from . import _kernel as _backend  # type: ignore[no-redef]
elif _requested == "":
    try:
        from . import _kernel as _backend  # type: ignore[no-redef]
    except ImportError:
        from . import _fallback as _backend
else:
    raise ImportError(
        f"BUBBLETDA_BACKEND={_requested!r} not recognized; use 'python' or 'cython'"
    )

#: Name of the backend actually in use ("cython" or "python").
BACKEND: str = _backend.BACKEND_NAME


@dataclass(frozen=True)
class PersistenceDiagram:
    """Multiset of (birth, death) pairs in one homology degree.

    ``pairs`` holds finite-persistence classes as (birth, death,
    multiplicity) with birth < death, sorted by (birth, death);
    ``essential`` holds the births of classes that never die within
    the filtration.  Zero-persistence pairs are never stored.
    """

    dimension: int
    pairs: tuple[tuple[float, float, int], ...] = ()
    essential: tuple[float, ...] = ()

    def __post_init__(self) -> None:
        if self.dimension < 0:
            raise ValueError("dimension must be nonnegative")
        for birth, death, mult in self.pairs:
            if not birth < death:
                raise ValueError(f"pair ({birth}, {death}) must have birth < death")
            if mult < 1:
                raise ValueError(f"multiplicity must be at least 1, got {mult}")

    @classmethod
    def from_births_deaths(
        cls, dimension: int, births, deaths, essential=()
    ) -> "PersistenceDiagram":
        """Aggregate parallel birth/death arrays into a diagram,
        merging repeated pairs into multiplicities."""
        counts = Counter(zip(map(float, births), map(float, deaths)))
        pairs = tuple(
            (b, d, counts[(b, d)]) for (b, d) in sorted(counts)
        )
        return cls(dimension, pairs, tuple(sorted(float(b) for b in essential)))

    def expanded(self) -> list[tuple[float, float]]:
        """Finite pairs repeated according to multiplicity."""
        out: list[tuple[float, float]] = []
        for birth, death, mult in self.pairs:
            out.extend([(birth, death)] * mult)
        return out

    @property
    def n_finite(self) -> int:
        return sum(mult for _, _, mult in self.pairs)

    def total_persistence(self) -> float:
        """Sum of (death - birth) over finite pairs, with multiplicity."""
        return float(sum(mult * (d - b) for b, d, mult in self.pairs))


@dataclass(frozen=True)
class RipsConfig:
    """Filtration settings.

    ``max_filtration`` caps the scale; ``None`` means the enclosing
    radius of the input (the smallest scale at which the complex is a
    cone, past which no degree-0/1 feature can change), ``math.inf``
    disables the cap.  Only ``max_homology_dim == 1`` is supported.
    """

    max_homology_dim: int = 1
    max_filtration: float | None = None

    def __post_init__(self) -> None:
        if self.max_homology_dim != 1:
            raise ValueError(
                f"only homology through degree 1 is implemented, "
                f"got max_homology_dim={self.max_homology_dim}"
            )
        if self.max_filtration is not None and self.max_filtration < 0:
            raise ValueError("max_filtration must be nonnegative")


def pairwise_distances(cloud) -> np.ndarray:
    """Dense Euclidean distance matrix of a point cloud.

    The result is exactly symmetric (the lower triangle mirrors the
    upper) with an exactly zero diagonal.
    """
    pts = np.asarray(cloud, dtype=float)
    if pts.ndim != 2 or len(pts) == 0:
        raise ValueError("cloud must be a nonempty 2-d array of point coordinates")
    diff = pts[:, None, :] - pts[None, :, :]
    dist = np.sqrt(np.einsum("ijk,ijk->ij", diff, diff))
    iu, ju = np.triu_indices(len(pts), k=1)
    dist[ju, iu] = dist[iu, ju]
    np.fill_diagonal(dist, 0.0)
    return dist


def validate_distance_matrix(dist: np.ndarray) -> np.ndarray:
    """Check symmetry, zero diagonal and nonnegativity; return the
    matrix as a C-contiguous float array."""
    d = np.ascontiguousarray(dist, dtype=float)
    if d.ndim != 2 or d.shape[0] != d.shape[1] or d.shape[0] == 0:
        raise ValueError("distance matrix must be square and nonempty")
    if not np.array_equal(d, d.T):
        raise ValueError("distance matrix must be symmetric")
    if np.any(np.diag(d) != 0.0):
        raise ValueError("distance matrix must have a zero diagonal")
    if np.any(d < 0.0):
        raise ValueError("distances must be nonnegative")
    return d


def enclosing_radius(dist: np.ndarray) -> float:
    """min over points of the farthest distance from that point.

    Capping the filtration here loses nothing in degrees 0 and 1: at
    this scale some vertex is joined to every other, so the complex
    contains a cone and all cycles present are already dead or doomed
    at values <= the radius.
    """
    d = np.asarray(dist, dtype=float)
    if d.shape[0] == 1:
        return 0.0
    return float(np.min(np.max(d, axis=1)))


def rips_persistence(
    dist: np.ndarray, config: RipsConfig = RipsConfig()
) -> dict[int, PersistenceDiagram]:
    """Persistence diagrams in degrees 0 and 1 of the Rips filtration.

    Vertices are born at 0; degree-0 classes die at the merge times of
    the minimum spanning forest, and one class per final component is
    essential.  Degree-1 classes are read off a column reduction of the
    triangle boundary matrix over Z/2.
    """
    d = validate_distance_matrix(dist)
    cap = config.max_filtration
    if cap is None:
        cap = enclosing_radius(d)
    h0_deaths, n_components, h1_births, h1_deaths, h1_essential = _backend.rips_h0_h1(
        d, float(cap)
    )
    h0 = PersistenceDiagram.from_births_deaths(
        0,
        np.zeros(len(h0_deaths)),
        h0_deaths,
        essential=np.zeros(n_components),
    )
    h1 = PersistenceDiagram.from_births_deaths(
        1, h1_births, h1_deaths, essential=h1_essential
    )
    return {0: h0, 1: h1}
