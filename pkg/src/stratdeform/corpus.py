"""Named example systems, chain inputs, and patches for tests and trials."""

from __future__ import annotations

from functools import lru_cache

from .polyalg import MultiPoly, variables
from .stratification import PolynomialSystem, complete_system


@lru_cache(maxsize=None)
def system_two_level() -> PolynomialSystem:
    """(x1^2, x2^2 - x1 x2): the smallest nontrivial valid chain."""
    x1, x2 = variables(2)
    return PolynomialSystem(polys=(x1 ** 2, x2 ** 2 - x1 * x2))


@lru_cache(maxsize=None)
def system_three_level() -> PolynomialSystem:
    """Completion of x3 (x3 - x1)(x3 - x2); exercises the shear path."""
    x1, x2, x3 = variables(3)
    return complete_system(x3 * (x3 - x1) * (x3 - x2)).system


@lru_cache(maxsize=None)
def system_projective_trial() -> PolynomialSystem:
    """Low-degree chain over 3 homogeneous variables whose chart variety
    ({x2 = 0} union {x2 = 4 x3} in the chart x3 = 1: the x-axis and the line
    y = 4) stays away from the unit circle's upper arc and the line y = 1,
    so the tangent pair below sits in the dense stratum."""
    x1, x2, x3 = variables(3)
    top = x3 ** 2 - (x2 * x3).scale("1/4")
    return complete_system(top).system


def unit_circle_patch(*, lower_bound: str | None = "1/20") -> "ImplicitPatch":
    """x^2 + y^2 = 1 in the chart plane, optionally restricted to y > bound
    so sampling stays off the chart variety {y = 0}."""
    from .geometry import ImplicitPatch

    u, v = variables(2)
    ineqs = ()
    if lower_bound is not None:
        ineqs = (v - MultiPoly.constant(2, lower_bound),)
    return ImplicitPatch(
        ambient_dim=2,
        equations=(u ** 2 + v ** 2 - MultiPoly.constant(2, 1),),
        inequalities=ineqs,
        expected_dim=1,
        param_box=((-1.3, 1.3), (-1.3, 1.3)),
    )


def horizontal_line_patch(height: str, half_width: float = 2.0
                          ) -> "ImplicitPatch":
    """The line y = height, boxed to a segment of the given half width."""
    from .geometry import ImplicitPatch
    from fractions import Fraction

    u, v = variables(2)
    h = float(Fraction(height))
    return ImplicitPatch(
        ambient_dim=2,
        equations=(v - MultiPoly.constant(2, height),),
        expected_dim=1,
        param_box=((-half_width, half_width), (h - 0.2, h + 0.2)),
    )


def point_patch(px: str, py: str) -> "ImplicitPatch":
    from .geometry import ImplicitPatch
    from fractions import Fraction

    u, v = variables(2)
    fx = float(Fraction(px))
    fy = float(Fraction(py))
    return ImplicitPatch(
        ambient_dim=2,
        equations=(u - MultiPoly.constant(2, px), v - MultiPoly.constant(2, py)),
        expected_dim=0,
        param_box=((fx - 0.3, fx + 0.3), (fy - 0.3, fy + 0.3)),
    )


def chain_corpus() -> list[MultiPoly]:
    """Twenty homogeneous tops (n <= 3, degree <= 6) for completion tests:
    pure powers, products of distinct and repeated linear forms, complex
    root pairs, cases needing the extra main-variable factor, and cases
    forcing a shear."""
    x1a, = variables(1)
    x1, x2 = variables(2)
    y1, y2, y3 = variables(3)
    return [
        x1a,
        x1a ** 2,
        x1a ** 3,
        x2 * (x2 - x1),
        x2 ** 2 - x1 * x2,
        x2 * (x2 - x1) * (x2 + x1),
        x2 * (x2 - x1) * (x2 - x1.scale(2)),
        x2 * (x2 - x1) ** 2,
        x2 ** 2 * (x2 - x1),
        x2 * (x2 ** 2 + x1 ** 2),
        (x2 - x1) * (x2 - x1.scale(2)),            # needs the x2 factor
        x2 * (x2 - x1) * (x2 - x1.scale(2)) * (x2 - x1.scale(3)),
        x2 * (x2 - x1) * (x2 + x1) * (x2 - x1.scale(2)) * (x2 + x1.scale(2)),
        x2 ** 3 - x1 ** 2 * x2,
        y3 * (y3 - y1) * (y3 - y2),                 # forces a shear below
        y3 * (y3 - y1) * (y3 + y2),
        y3 * (y3 - y1 - y2),
        y3 ** 2 - y2 * y3,
        y3 * (y3 - y2) * (y3 - y2.scale(2)),
        (y3 - y1) * (y3 - y2),                      # needs the x3 factor
    ]
