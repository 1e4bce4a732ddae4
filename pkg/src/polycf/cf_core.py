"""Exact piecewise autocorrelation functions of the regular tetrahedron and
octahedron (unit edge), plus the classical sphere CF.

Each CF is a set of algebraic pieces built from arctangents and rational
functions of r and sqrt(4r^2-3) or sqrt(r^2-1).  Pieces are selected by
binary search over closed-form breakpoints; the arctangent terms that
diverge at r=1 (tetrahedron) and r=sqrt(2) (octahedron) are replaced by
their one-sided limits +-pi/2 inside a 1e-9 guard band, where direct
evaluation would pick up the wrong sign of the vanishing denominator.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .geometry import ANALYTIC_KINDS, SolidKind, SolidSpec

PI = math.pi
SQ2 = math.sqrt(2.0)
SQ3 = math.sqrt(3.0)
SQ6 = math.sqrt(6.0)
SQ32 = math.sqrt(1.5)  # sqrt(3/2)

ALPHA_T = math.acos(1.0 / 3.0)
ALPHA_O = math.acos(-1.0 / 3.0)

S_T = SQ3
V_T = 1.0 / (6.0 * SQ2)
S_O = 2.0 * SQ3
V_O = SQ2 / 3.0

#: guard band half-width around the singular abscissae
SINGULAR_BAND = 1e-9
#: slightly negative sqrt arguments from breakpoint rounding are clamped
SQRT_CLAMP = 1e-12

# unit-edge breakpoints
TETRA_BREAKPOINTS = (0.0, 1.0 / SQ2, math.sqrt(2.0 / 3.0), SQ3 / 2.0, 1.0)
OCTA_BREAKPOINTS = (0.0, math.sqrt(2.0 / 3.0), SQ3 / 2.0, 1.0, SQ2)
SPHERE_BREAKPOINTS = (0.0, 1.0)


@dataclass(frozen=True)
class CFConstants:
    alpha_t: float = ALPHA_T
    alpha_o: float = ALPHA_O
    s_t: float = S_T
    v_t: float = V_T
    s_o: float = S_O
    v_o: float = V_O


CF_CONSTANTS = CFConstants()


class HelperDomainError(ValueError):
    """Raised when a helper function is evaluated outside its real domain."""

    def __init__(self, helper_id, r):
        self.helper_id = helper_id
        super().__init__(f"helper {helper_id} undefined at r={r}")


# ---------------------------------------------------------------------------
# helper functions


def _sqrt_clamped(arg):
    return np.sqrt(np.maximum(arg, 0.0))


def _d34(r):
    return _sqrt_clamped(4.0 * r * r - 3.0)


def _d11(r):
    return _sqrt_clamped(r * r - 1.0)


def _t1(r):
    r2 = r * r
    return (4.0 * r2 * r2 - 12.0 * r2 + 7.0) / (4.0 * (1.0 - r2) * _d34(r))


def _t2(r):
    r2 = r * r
    return (9.0 * r2 - 7.0) / (3.0 * SQ3 * (1.0 - r2) * _d34(r))


def _t3(r):
    return (2.0 * SQ2 * r + 3.0) / _d34(r)


def _t4(r):
    return SQ2 * r / _d34(r)


def _t5(r):
    return _d34(r) / (2.0 * (1.0 - r * r))


def _t6(r):
    return _d34(r) / SQ3


def _t7(r):
    return (6.0 * r * r - 5.0) / (SQ3 * _d34(r))


def _t8(r):
    return r * (6.0 * r * r - 5.0) / (SQ2 * _d34(r))


def _t9(r):
    r2 = r * r
    return (2.0 * r2 * r2 + r2 - 2.0) / (2.0 * SQ2 * r * (1.0 - r2) * _d34(r))


def _t10(r):
    return SQ3 * _d34(r) / (2.0 * r * r - 3.0)


def _t11(r):
    d = _d34(r)
    return (d + 1.0) / (d - 1.0)


def _t12(r):
    return (2.0 * r * r - 3.0) / (SQ3 * _d34(r))


def _t13(r):
    r2 = r * r
    return (-2.0 * r2 * r2 + 12.0 * r2 - 9.0) / (SQ3 * (2.0 * r2 - 3.0) * _d34(r))


def _t14(r):
    r2 = r * r
    num = SQ3 * (2.0 * r2**4 - 34.0 * r2**3 + 96.0 * r2**2 - 90.0 * r2 + 27.0)
    den = (10.0 * r2**3 - 54.0 * r2**2 + 72.0 * r2 - 27.0) * _d34(r)
    return num / den


def _t15(r):
    return SQ3 * _d11(r)


def _t16(r):
    return r / (SQ2 * _d11(r))


def _t17(r):
    r2 = r * r
    return (7.0 * r2 * r2 - 4.0 * r2 - 4.0) / (4.0 * SQ2 * r * (r2 - 2.0) * _d11(r))


def _t18(r):
    return (9.0 * r * r - 10.0) / (3.0 * SQ3 * (r * r - 2.0) * _d11(r))


def _t19(r):
    r2 = r * r
    d = _d11(r)
    return (r2 + 2.0 * d - 2.0) / (2.0 - r2 + 2.0 * d)


_HELPERS = {i + 1: f for i, f in enumerate(
    [_t1, _t2, _t3, _t4, _t5, _t6, _t7, _t8, _t9, _t10,
     _t11, _t12, _t13, _t14, _t15, _t16, _t17, _t18, _t19]
)}
_HELPERS["d34"] = _d34
_HELPERS["d11"] = _d11

# helpers built on sqrt(r^2 - 1) rather than sqrt(4 r^2 - 3)
_D11_BASED = {15, 16, 17, 18, 19, "d11"}


def eval_helper(helper_id, r: float) -> float:
    """Evaluate one helper function with domain checking.

    ``helper_id`` is 1..19 for the arctangent arguments or ``"d34"``/``"d11"``
    for the two square roots.  Square-root arguments within 1e-12 below zero
    are clamped; anything lower raises :class:`HelperDomainError`.
    """
    if helper_id not in _HELPERS:
        raise KeyError(f"unknown helper id {helper_id!r}")
    arg = r * r - 1.0 if helper_id in _D11_BASED else 4.0 * r * r - 3.0
    if arg < -SQRT_CLAMP:
        raise HelperDomainError(helper_id, r)
    with np.errstate(divide="ignore", invalid="ignore"):
        return float(_HELPERS[helper_id](np.float64(r)))


# ---------------------------------------------------------------------------
# tetrahedron pieces (unit edge)


def _gamma_t_a(r):
    return (
        1.0
        - 3.0 * SQ32 * r
        + 3.0 * (2.0**1.5 + PI - ALPHA_T) * r**2 / PI
        - (6.0 + 5.0 * SQ3 * PI) * r**3 / (2.0**2.5 * PI)
    )


def _gamma_t_b(r):
    return (
        3.0 / (2.0**2.5 * r)
        - 2.0
        - 3.0 * (SQ3 - 3.0) * r / SQ2
        + 3.0 * (2.0**1.5 - ALPHA_T - PI) * r**2 / PI
        - (6.0 - 12.0 * PI + 5.0 * SQ3 * PI) * r**3 / (2.0**2.5 * PI)
    )


def _gamma_t_c(r):
    return (
        (9.0 + 8.0 * SQ3) / (12.0 * SQ2 * r)
        - 6.0
        + 3.0 * (3.0 + SQ3) * r / SQ2
        + 3.0 * (2.0**1.5 - ALPHA_T - 3.0 * PI) * r**2 / PI
        + (12.0 * PI - 6.0 + SQ3 * PI) * r**3 / (2.0**2.5 * PI)
    )


def _gamma_t_d(r):
    d34 = _d34(r)
    at1 = np.arctan(_t1(r))
    at2 = np.arctan(_t2(r))
    at3 = np.arctan(_t3(r))
    at4 = np.arctan(_t4(r))
    at4h = np.arctan(_t4(r) / 2.0)
    at5 = np.arctan(_t5(r))
    at6 = np.arctan(_t6(r))
    at7 = np.arctan(_t7(r))
    at8 = np.arctan(_t8(r))
    at9 = np.arctan(_t9(r))
    at10 = np.arctan(_t10(r))
    at11 = np.arctan(_t11(r))

    # one-sided limits of the terms singular at r -> 1^- (1 - r^2 -> 0^+,
    # d34 - 1 -> 0^-); direct evaluation flips signs inside the band
    band = np.abs(r - 1.0) < SINGULAR_BAND
    at1 = np.where(band, -PI / 2.0, at1)
    at2 = np.where(band, PI / 2.0, at2)
    at5 = np.where(band, PI / 2.0, at5)
    at9 = np.where(band, PI / 2.0, at9)
    at11 = np.where(band, -PI / 2.0, at11)

    return (
        (9.0 + 8.0 * SQ3) / (24.0 * SQ2 * r)
        + 3.0
        + 9.0 * (4.0 + SQ3) * r / 2.0**2.5
        + 3.0 * r**2 * (2.0**1.5 - PI - ALPHA_T) / PI
        - (3.0 - 12.0 * PI + SQ3 * PI) * r**3 / (2.0**1.5 * PI)
        - 21.0 * r * d34 / (2.0**1.5 * PI)
        + 9.0 / (12.0 * SQ2 * PI * r) * (at1 - 8.0 * SQ3 / 9.0 * at2)
        + 3.0 / PI * (at3 - 3.0 * at4 - 4.0 * at4h + 0.5 * at5)
        - 3.0 * r / (SQ2 * PI) * (
            10.0 * np.arctan(d34)
            + 5.0 * SQ3 * np.arctan(SQ3 * d34)
            + at5
            - 6.0 * SQ3 * at6
            + SQ3 / 2.0 * at7
        )
        + 6.0 * r**2 / PI * (at8 + at9)
        - 3.0 * r**3 / (2.0 * PI) * SQ32 * (at2 - at6 + 2.0 * at10 - 8.0 / SQ3 * at11)
    )


# ---------------------------------------------------------------------------
# octahedron pieces (unit edge)


def _gamma_o_a(r):
    return (
        1.0
        - 1.5**1.5 * r
        + 3.0 * (ALPHA_O - PI + 2.0 * SQ2) * r**2 / (2.0 * PI)
        - (3.0 - 3.0 * PI + SQ3 * PI) * r**3 / (4.0 * SQ2 * PI)
    )


def _gamma_o_b(r):
    return (
        2.0 / r * math.sqrt(2.0 / 3.0)
        - 3.0
        - r / 2.0 * SQ32
        + 3.0 * r**2 * (ALPHA_O + PI + 2.0 * SQ2) / (2.0 * PI)
        - (3.0 - 3.0 * PI + 7.0 * SQ3 * PI) * r**3 / (4.0 * SQ2 * PI)
    )


def _gamma_o_c(r):
    d34 = _d34(r)
    t6 = _t6(r)
    at6 = np.arctan(t6)
    return (
        2.0 / r * math.sqrt(2.0 / 3.0)
        - 3.0
        - r / 2.0 * SQ32
        + 3.0 * r**2 * (ALPHA_O + 2.0 * SQ2) / (2.0 * PI)
        - (36.0 * (1.0 - PI) + 5.0 * SQ3 * PI) * r**3 / (48.0 * SQ2 * PI)
        - (17.0 * r**2 + 3.0) * d34 / (2.0 * SQ2 * PI * r)
        + r / PI * SQ32 * (9.0 * at6 + np.arctan(3.0 * t6))
        + 3.0 * r**2 / PI * np.arctan(_t4(r) / 2.0)
        - r**3 / (8.0 * SQ6 * PI) * (
            18.0 * at6
            + 90.0 * np.arctan(1.0 / (3.0 * t6))
            + 24.0 * np.arctan(_t7(r))
            - 8.0 * np.arctan(_t12(r))
            - np.arctan(_t13(r))
            - 6.0 * np.arctan(_t14(r))
        )
    )


def _gamma_o_d(r):
    d11 = _d11(r)
    at15 = np.arctan(_t15(r))
    at16 = np.arctan(_t16(r))
    at17 = np.arctan(_t17(r))
    at18 = np.arctan(_t18(r))
    at19 = np.arctan(_t19(r))

    # r^2 - 2 -> 0^- as r -> sqrt(2)^-; the float representation of
    # sqrt(2) squares to slightly above 2, flipping the sign
    band = np.abs(r - SQ2) < SINGULAR_BAND
    at17 = np.where(band, -PI / 2.0, at17)
    at18 = np.where(band, -PI / 2.0, at18)

    return (
        (4.0 * SQ3 * PI - 3.0) / (3.0 * SQ2 * PI * r)
        + 3.0
        + (4.0 * SQ3 * PI - 9.0) * r / (3.0 * SQ2 * PI)
        + 3.0 * r**2 / 4.0
        - (6.0 - 3.0 * PI + 4.0 * SQ3 * PI) * r**3 / (8.0 * SQ2 * PI)
        + SQ2 / (PI * r) * (1.0 + 2.0 * r**2) * d11
        - 2.0 * SQ6 / (PI * r) * at15
        - 12.0 / PI * at16
        - 2.0 * SQ6 * r / PI * at15
        + 3.0 * r**2 / (2.0 * PI) * at17
        - r**3 / (2.0 * SQ2 * PI) * (2.0 * SQ3 * at18 + 3.0 * at19)
    )


def _gamma_sphere(r):
    return 1.0 - 1.5 * r + 0.5 * r**3


_UNIT_PIECES = {
    SolidKind.TETRAHEDRON: (
        TETRA_BREAKPOINTS,
        (_gamma_t_a, _gamma_t_b, _gamma_t_c, _gamma_t_d),
    ),
    SolidKind.OCTAHEDRON: (
        OCTA_BREAKPOINTS,
        (_gamma_o_a, _gamma_o_b, _gamma_o_c, _gamma_o_d),
    ),
    SolidKind.SPHERE: (SPHERE_BREAKPOINTS, (_gamma_sphere,)),
}


# ---------------------------------------------------------------------------
# piecewise evaluators


@dataclass(frozen=True)
class PiecewiseCF:
    """Piecewise analytic CF of one solid, rescaled to its edge length.

    ``gamma_edge(r) = gamma_unit(r / edge)``; breakpoints are the unit-size
    breakpoints times ``edge``, and the support endpoint is ``dmax``.
    """

    kind: SolidKind
    edge: float
    dmax: float
    breakpoints: tuple = field(repr=False)
    _unit_breakpoints: tuple = field(repr=False)
    _pieces: tuple = field(repr=False)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        if np.any(r < 0):
            raise ValueError("r must be non-negative")
        x = r / self.edge
        ub = np.asarray(self._unit_breakpoints)
        idx = np.searchsorted(ub, x, side="right") - 1
        # last interval closed at dmax; beyond it the CF vanishes
        idx = np.minimum(idx, len(self._pieces) - 1)
        out = np.zeros_like(x)
        with np.errstate(divide="ignore", invalid="ignore"):
            for i, piece in enumerate(self._pieces):
                mask = idx == i
                if np.any(mask):
                    out[mask] = piece(x[mask])
        out[x > ub[-1]] = 0.0
        return float(out[0]) if scalar else out

    def eval_piece(self, i: int, r):
        """Evaluate piece ``i`` directly (no interval selection)."""
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        with np.errstate(divide="ignore", invalid="ignore"):
            out = self._pieces[i](np.atleast_1d(r) / self.edge)
        return float(out[0]) if scalar else out

    @property
    def n_pieces(self) -> int:
        return len(self._pieces)


@dataclass(frozen=True)
class TabulatedCF:
    """Monte-Carlo CF table with linear interpolation (cube/cylinder path)."""

    kind: SolidKind
    edge: float
    dmax: float
    grid: np.ndarray = field(repr=False)
    values: np.ndarray = field(repr=False)
    stderrs: np.ndarray = field(repr=False)
    breakpoints: tuple = field(default=(), repr=False)

    def __call__(self, r):
        r = np.asarray(r, dtype=float)
        scalar = r.ndim == 0
        r = np.atleast_1d(r)
        if np.any(r < 0):
            raise ValueError("r must be non-negative")
        out = np.interp(r, self.grid, self.values, right=0.0)
        out[r > self.dmax] = 0.0
        return float(out[0]) if scalar else out


def _piecewise(kind: SolidKind, edge: float) -> PiecewiseCF:
    ub, pieces = _UNIT_PIECES[kind]
    return PiecewiseCF(
        kind=kind,
        edge=edge,
        dmax=ub[-1] * edge,
        breakpoints=tuple(b * edge for b in ub),
        _unit_breakpoints=ub,
        _pieces=pieces,
    )


_UNIT_TETRA = _piecewise(SolidKind.TETRAHEDRON, 1.0)
_UNIT_OCTA = _piecewise(SolidKind.OCTAHEDRON, 1.0)
_UNIT_SPHERE = _piecewise(SolidKind.SPHERE, 1.0)


def cf_tetrahedron(r):
    """CF of the unit-edge regular tetrahedron."""
    return _UNIT_TETRA(r)


def cf_octahedron(r):
    """CF of the unit-edge regular octahedron."""
    return _UNIT_OCTA(r)


def cf_sphere(r):
    """CF of the unit-diameter sphere: 1 - (3/2) r + (1/2) r^3 on [0, 1]."""
    return _UNIT_SPHERE(r)


def cf_for(
    solid: SolidSpec,
    *,
    mc_samples: int = 100_000,
    mc_grid_points: int = 101,
    mc_seed: int = 0,
    n_workers: int = 1,
):
    """CF evaluator for ``solid``, rescaled to its edge length.

    Tetrahedron, octahedron and sphere get the exact piecewise CF; cube and
    cylinder fall back to a Monte-Carlo table (raw estimates with stderr).
    """
    if solid.kind in ANALYTIC_KINDS:
        return _piecewise(solid.kind, solid.edge)
    from . import mc_oracle

    grid = np.linspace(0.0, solid.dmax, mc_grid_points)
    table = mc_oracle.tabulate_cf(solid, grid, mc_samples, mc_seed, n_workers)
    return TabulatedCF(
        kind=solid.kind,
        edge=solid.edge,
        dmax=solid.dmax,
        grid=np.array([p.x for p in table]),
        values=np.array([p.value for p in table]),
        stderrs=np.array([p.stderr for p in table]),
    )
