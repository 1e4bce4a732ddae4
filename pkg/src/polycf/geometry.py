"""Reference solids: exact metrics, containment, uniform interior sampling.

Canonical placements (shared by every module):

* tetrahedron: vertices at ``lam*(1,1,1), lam*(1,-1,-1), lam*(-1,1,-1),
  lam*(-1,-1,1)`` with ``lam = edge / (2*sqrt(2))``;
* octahedron: ``|x| + |y| + |z| <= edge / sqrt(2)``;
* sphere: centered at the origin, ``edge`` is the diameter;
* cube: axis-aligned, centered at the origin;
* cylinder: axis along z, height equal to diameter equal to ``edge``.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, replace
from enum import Enum

import numpy as np


class SolidKind(Enum):
    TETRAHEDRON = "tetrahedron"
    OCTAHEDRON = "octahedron"
    SPHERE = "sphere"
    CUBE = "cube"
    CYLINDER = "cylinder"


#: kinds whose autocorrelation function has an exact closed form here
ANALYTIC_KINDS = (SolidKind.TETRAHEDRON, SolidKind.OCTAHEDRON, SolidKind.SPHERE)

# Monte-Carlo defaults for the cached gyration radii of the polyhedra.
RG2_MC_SAMPLES = 10_000_000
RG2_MC_SEED = 173_040_911

_SQRT2 = math.sqrt(2.0)
_SQRT3 = math.sqrt(3.0)


@dataclass(frozen=True)
class SolidSpec:
    """Geometric description of one reference solid.

    ``edge`` is the edge length for the polyhedra, the diameter for the
    sphere and the height (= diameter) for the cylinder.  ``rg2`` is the
    squared gyration radius; for the tetrahedron and octahedron it comes
    from a cached Monte-Carlo estimate and carries a standard error.
    """

    kind: SolidKind
    edge: float
    surface: float
    volume: float
    dmax: float
    rg2: float
    rg2_stderr: float = 0.0
    rg2_samples: int = 0
    rg2_seed: int | None = None


# cache of unit-edge (rg2, stderr) for kinds without a trivial closed form
_RG2_CACHE: dict[SolidKind, tuple[float, float]] = {}


def solid_metrics(kind: SolidKind, edge: float) -> SolidSpec:
    """Exact surface, volume and maximal chord for ``kind`` at size ``edge``.

    The gyration radius uses the classical closed forms for the sphere,
    cube and cylinder; for the two target polyhedra it is estimated once
    by Monte-Carlo integration (see :func:`polycf.mc_oracle.estimate_rg2`)
    and cached at unit edge.
    """
    if not (edge > 0.0) or not math.isfinite(edge):
        raise ValueError(f"edge must be positive and finite, got {edge}")

    e = float(edge)
    rg2_stderr = 0.0
    rg2_samples = 0
    rg2_seed: int | None = None
    if kind is SolidKind.TETRAHEDRON:
        surface = _SQRT3 * e**2
        volume = e**3 / (6.0 * _SQRT2)
        dmax = e
        rg2_unit, err_unit = _cached_rg2(kind)
        rg2 = rg2_unit * e**2
        rg2_stderr = err_unit * e**2
        rg2_samples, rg2_seed = RG2_MC_SAMPLES, RG2_MC_SEED
    elif kind is SolidKind.OCTAHEDRON:
        surface = 2.0 * _SQRT3 * e**2
        volume = _SQRT2 / 3.0 * e**3
        dmax = _SQRT2 * e
        rg2_unit, err_unit = _cached_rg2(kind)
        rg2 = rg2_unit * e**2
        rg2_stderr = err_unit * e**2
        rg2_samples, rg2_seed = RG2_MC_SAMPLES, RG2_MC_SEED
    elif kind is SolidKind.SPHERE:
        radius = e / 2.0
        surface = 4.0 * math.pi * radius**2
        volume = 4.0 / 3.0 * math.pi * radius**3
        dmax = e
        rg2 = 0.6 * radius**2
    elif kind is SolidKind.CUBE:
        surface = 6.0 * e**2
        volume = e**3
        dmax = _SQRT3 * e
        rg2 = e**2 / 4.0
    elif kind is SolidKind.CYLINDER:
        radius = e / 2.0
        surface = 2.0 * math.pi * radius**2 + 2.0 * math.pi * radius * e
        volume = math.pi * radius**2 * e
        dmax = _SQRT2 * e
        rg2 = radius**2 / 2.0 + e**2 / 12.0
    else:  # pragma: no cover
        raise ValueError(f"unknown solid kind {kind!r}")

    return SolidSpec(
        kind=kind,
        edge=e,
        surface=surface,
        volume=volume,
        dmax=dmax,
        rg2=rg2,
        rg2_stderr=rg2_stderr,
        rg2_samples=rg2_samples,
        rg2_seed=rg2_seed,
    )


def _cached_rg2(kind: SolidKind) -> tuple[float, float]:
    if kind not in _RG2_CACHE:
        # local import: mc_oracle depends on this module
        from . import mc_oracle

        spec = SolidSpec(
            kind=kind, edge=1.0, surface=1.0, volume=1.0, dmax=_dmax_unit(kind), rg2=0.0
        )
        est = mc_oracle.estimate_rg2(spec, n=RG2_MC_SAMPLES, seed=RG2_MC_SEED)
        _RG2_CACHE[kind] = (est.mean, est.stderr)
    return _RG2_CACHE[kind]


def _dmax_unit(kind: SolidKind) -> float:
    return {
        SolidKind.TETRAHEDRON: 1.0,
        SolidKind.OCTAHEDRON: _SQRT2,
        SolidKind.SPHERE: 1.0,
        SolidKind.CUBE: _SQRT3,
        SolidKind.CYLINDER: _SQRT2,
    }[kind]


def scale_to_unit_dmax(solid: SolidSpec) -> SolidSpec:
    """Rescale ``solid`` so that its maximal chord equals one."""
    lam = 1.0 / solid.dmax
    if lam == 1.0:
        return solid
    return replace(
        solid,
        edge=solid.edge * lam,
        surface=solid.surface * lam**2,
        volume=solid.volume * lam**3,
        dmax=1.0,
        rg2=solid.rg2 * lam**2,
        rg2_stderr=solid.rg2_stderr * lam**2,
    )


def vertices(solid: SolidSpec) -> np.ndarray:
    """Canonical vertex set of a polyhedron (tetrahedron, octahedron, cube)."""
    e = solid.edge
    if solid.kind is SolidKind.TETRAHEDRON:
        lam = e / (2.0 * _SQRT2)
        return lam * np.array(
            [[1, 1, 1], [1, -1, -1], [-1, 1, -1], [-1, -1, 1]], dtype=float
        )
    if solid.kind is SolidKind.OCTAHEDRON:
        a = e / _SQRT2
        return a * np.array(
            [[1, 0, 0], [-1, 0, 0], [0, 1, 0], [0, -1, 0], [0, 0, 1], [0, 0, -1]],
            dtype=float,
        )
    if solid.kind is SolidKind.CUBE:
        h = e / 2.0
        signs = np.array(np.meshgrid([-1, 1], [-1, 1], [-1, 1])).T.reshape(-1, 3)
        return h * signs.astype(float)
    raise ValueError(f"{solid.kind.value} has no canonical vertex set")


def contains(solid: SolidSpec, p) -> bool | np.ndarray:
    """True iff ``p`` lies in the closed solid.

    ``p`` may be a single point (length-3 sequence) or an ``(n, 3)`` array,
    in which case a boolean array is returned.
    """
    pts = np.asarray(p, dtype=float)
    single = pts.ndim == 1
    pts = np.atleast_2d(pts)
    x, y, z = pts[:, 0], pts[:, 1], pts[:, 2]
    e = solid.edge
    kind = solid.kind
    if kind is SolidKind.TETRAHEDRON:
        lam = e / (2.0 * _SQRT2)
        # intersection of the four half-spaces through the canonical faces
        inside = (
            (x + y + z >= -lam)
            & (x - y - z >= -lam)
            & (-x + y - z >= -lam)
            & (-x - y + z >= -lam)
        )
    elif kind is SolidKind.OCTAHEDRON:
        inside = np.abs(x) + np.abs(y) + np.abs(z) <= e / _SQRT2
    elif kind is SolidKind.SPHERE:
        inside = x**2 + y**2 + z**2 <= (e / 2.0) ** 2
    elif kind is SolidKind.CUBE:
        h = e / 2.0
        inside = (np.abs(x) <= h) & (np.abs(y) <= h) & (np.abs(z) <= h)
    elif kind is SolidKind.CYLINDER:
        r = e / 2.0
        inside = (x**2 + y**2 <= r**2) & (np.abs(z) <= r)
    else:  # pragma: no cover
        raise ValueError(f"unknown solid kind {kind!r}")
    return bool(inside[0]) if single else inside


def sample_points(solid: SolidSpec, n: int, rng: np.random.Generator) -> np.ndarray:
    """Draw ``n`` points uniformly from the interior, shape ``(n, 3)``.

    Deterministic given the state of ``rng``.  The tetrahedron uses the
    sorted-spacings simplex map; the octahedron uses rejection from its
    bounding cube (acceptance 1/6); the remaining solids have direct maps.
    """
    e = solid.edge
    kind = solid.kind
    if kind is SolidKind.TETRAHEDRON:
        v = vertices(solid)
        u = np.sort(rng.random((n, 3)), axis=1)
        bary = np.empty((n, 4))
        bary[:, 0] = u[:, 0]
        bary[:, 1] = u[:, 1] - u[:, 0]
        bary[:, 2] = u[:, 2] - u[:, 1]
        bary[:, 3] = 1.0 - u[:, 2]
        return bary @ v
    if kind is SolidKind.OCTAHEDRON:
        a = e / _SQRT2
        out = np.empty((n, 3))
        filled = 0
        while filled < n:
            m = max(int((n - filled) * 6.5) + 64, 256)
            cand = rng.uniform(-a, a, size=(m, 3))
            keep = cand[np.abs(cand).sum(axis=1) <= a]
            take = min(len(keep), n - filled)
            out[filled : filled + take] = keep[:take]
            filled += take
        return out
    if kind is SolidKind.SPHERE:
        radius = e / 2.0
        u = sample_directions(n, rng)
        r = radius * np.cbrt(rng.random(n))
        return u * r[:, None]
    if kind is SolidKind.CUBE:
        h = e / 2.0
        return rng.uniform(-h, h, size=(n, 3))
    if kind is SolidKind.CYLINDER:
        radius = e / 2.0
        rr = radius * np.sqrt(rng.random(n))
        phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
        z = rng.uniform(-radius, radius, size=n)
        return np.column_stack([rr * np.cos(phi), rr * np.sin(phi), z])
    raise ValueError(f"unknown solid kind {kind!r}")  # pragma: no cover


def sample_point(solid: SolidSpec, rng: np.random.Generator) -> np.ndarray:
    """Single uniform interior point (convenience wrapper)."""
    return sample_points(solid, 1, rng)[0]


def sample_directions(n: int, rng: np.random.Generator) -> np.ndarray:
    """``n`` unit vectors, isotropic: cos(theta) uniform, azimuth uniform."""
    ct = rng.uniform(-1.0, 1.0, size=n)
    phi = rng.uniform(0.0, 2.0 * math.pi, size=n)
    st = np.sqrt(np.maximum(1.0 - ct**2, 0.0))
    return np.column_stack([st * np.cos(phi), st * np.sin(phi), ct])
