"""Numerical derivatives of the piecewise CFs, moment integrals, and the
six-constraint validation suite (gamma(0), gamma'(0), both endpoint values,
and the r^2 / r^4 moment identities).
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np
from numpy.polynomial.legendre import leggauss

from .cf_core import PiecewiseCF, cf_for
from .geometry import SolidSpec

# stencil steps relative to dmax; the second-derivative step is larger to
# keep the eps/h^2 roundoff amplification below the 1e-6 target
H1_REL = 1e-5
H2_REL = 1e-4

_GAUSS_NODES = 64
_XG, _WG = leggauss(_GAUSS_NODES)


def _nearest_breakpoint(cf: PiecewiseCF, r: float) -> float:
    bs = np.asarray(cf.breakpoints)
    return float(bs[np.argmin(np.abs(bs - r))])


def cf_derivative(cf: PiecewiseCF, r: float, order: int, side: str | None = None):
    """First or second derivative of ``cf`` at ``r`` by finite differences.

    Central 5-point stencils away from breakpoints; one-sided stencils
    within 10h of a breakpoint, or when ``side`` ("left"/"right") is given.
    """
    if order not in (1, 2):
        raise ValueError("order must be 1 or 2")
    if not (0.0 < r < cf.dmax):
        raise ValueError(f"r={r} outside the open support (0, {cf.dmax})")
    h = (H1_REL if order == 1 else H2_REL) * cf.dmax
    if side is None:
        b = _nearest_breakpoint(cf, r)
        if abs(r - b) < 10.0 * h:
            side = "left" if r <= b else "right"
    if side is None:
        k = np.arange(-2, 3)
        f = cf(r + k * h)
        if order == 1:
            return float((f[0] - 8 * f[1] + 8 * f[3] - f[4]) / (12 * h))
        return float((-f[0] + 16 * f[1] - 30 * f[2] + 16 * f[3] - f[4]) / (12 * h**2))

    sgn = -1.0 if side == "left" else 1.0
    if order == 1:
        f = cf(r + sgn * h * np.arange(4))
        return float(sgn * (-11 * f[0] + 18 * f[1] - 9 * f[2] + 2 * f[3]) / (6 * h))
    f = cf(r + sgn * h * np.arange(5))
    return float(
        (35 * f[0] - 104 * f[1] + 114 * f[2] - 56 * f[3] + 11 * f[4]) / (12 * h**2)
    )


def moment_integral(cf: PiecewiseCF, power: int) -> float:
    """4 pi * integral of r^power * gamma(r) over [0, dmax].

    64-node Gauss-Legendre per piece; panels never straddle breakpoints, so
    the rule is exact for the polynomial pieces.
    """
    if power not in (2, 4):
        raise ValueError("power must be 2 or 4")
    total = 0.0
    bs = cf.breakpoints
    for i, (a, b) in enumerate(zip(bs[:-1], bs[1:])):
        r = 0.5 * (b - a) * _XG + 0.5 * (a + b)
        w = 0.5 * (b - a) * _WG
        total += float(np.sum(w * r**power * cf.eval_piece(i, r)))
    return 4.0 * math.pi * total


def slope_at_zero(cf: PiecewiseCF) -> float:
    """Exact derivative of the first (cubic) piece at r=0.

    Four samples determine the cubic exactly, so the one-sided 4-point
    stencil is exact up to roundoff even with a large step.
    """
    h = cf.breakpoints[1] / 4.0
    f = cf.eval_piece(0, h * np.arange(4))
    return float((-11 * f[0] + 18 * f[1] - 9 * f[2] + 2 * f[3]) / (6 * h))


@dataclass(frozen=True)
class ConstraintRecord:
    name: str
    expected: float
    actual: float
    abs_error: float
    tolerance: float
    passed: bool


@dataclass(frozen=True)
class ConstraintReport:
    solid: SolidSpec
    records: list[ConstraintRecord] = field(default_factory=list)

    @property
    def all_pass(self) -> bool:
        return all(rec.passed for rec in self.records)


CONSTRAINT_NAMES = (
    "gamma_at_0",
    "slope_at_0",
    "gamma_at_dmax",
    "slope_at_dmax",
    "volume_moment",
    "gyration_moment",
)

DEFAULT_TOLERANCES = {
    "gamma_at_0": 1e-15,
    "slope_at_0": 1e-12,
    "gamma_at_dmax": 1e-9,
    "slope_at_dmax": 1e-5,
    "volume_moment": 1e-8,  # relative
    "gyration_moment": 1e-4,  # relative floor; 3 sigma of the MC rg2 also folded in
}


def validate_constraints(
    solid: SolidSpec, tolerances: dict | None = None, cf: PiecewiseCF | None = None
) -> ConstraintReport:
    """Check the six analytic constraints for ``solid``.

    Failures are reported, never raised.  The gyration comparison is against
    2*rg2*V with the Monte-Carlo rg2 of the solid; three standard errors of
    that estimate widen the tolerance.
    """
    tol = dict(DEFAULT_TOLERANCES)
    if tolerances:
        tol.update(tolerances)
    if cf is None:
        cf = cf_for(solid)

    records = []

    def add(name, expected, actual, tolerance):
        err = abs(actual - expected)
        records.append(
            ConstraintRecord(name, expected, actual, err, tolerance, err <= tolerance)
        )

    add("gamma_at_0", 1.0, float(cf(0.0)), tol["gamma_at_0"])
    add(
        "slope_at_0",
        -solid.surface / (4.0 * solid.volume),
        slope_at_zero(cf),
        tol["slope_at_0"],
    )
    add("gamma_at_dmax", 0.0, float(cf(cf.dmax)), tol["gamma_at_dmax"])
    # one-sided stencil just inside the support: gamma == 0 beyond dmax
    # would bias anything that crosses the endpoint
    h = H1_REL * cf.dmax
    add(
        "slope_at_dmax",
        0.0,
        cf_derivative(cf, cf.dmax - 10.0 * h, order=1, side="left"),
        tol["slope_at_dmax"],
    )
    add(
        "volume_moment",
        solid.volume,
        moment_integral(cf, 2),
        tol["volume_moment"] * solid.volume,
    )
    expected_gyr = 2.0 * solid.rg2 * solid.volume
    gyr_tol = max(
        tol["gyration_moment"] * expected_gyr,
        3.0 * 2.0 * solid.rg2_stderr * solid.volume,
    )
    add("gyration_moment", expected_gyr, moment_integral(cf, 4), gyr_tol)

    return ConstraintReport(solid=solid, records=records)
