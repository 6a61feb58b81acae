"""Chains of homogeneous polynomials and the pointwise stratum classifier.

A system over variables x_1..x_n is a chain F_1, ..., F_n where each F_i is
homogeneous and monic of degree d_i in x_i with coefficients in the earlier
variables, x_i divides F_i whenever d_i > 0, and the discriminant of the
squarefree part of F_i divides F_{i-1} exactly.  If some d_i = 0 then F_i
and every F_j below it are the constant 1.

The induced filtration K^i = X^i_i > X^i_{i-1} > ... > X^i_0 is defined by
X^1_0 = V(F_1) and X^i_j = (pi^{-1}(X^{i-1}_j) n V(F_i)) u pi^{-1}(X^{i-1}_{j-1});
the edge cases j = 0 and j = i use X^{i-1}_{-1} = {} and X^i_i = K^i.
Unfolding the membership rule, the depth of a point simply increments at
every level where F_i does not vanish, which is how filtration_depth
computes it.  Labels (depth plus the per-level vanishing pattern) are a
computable surrogate for strata: equal labels are necessary for two points
to share a stratum; connected components are never enumerated.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction

from . import config as cfg
from .errors import (
    AmbiguousZeroTestError,
    CapExceededError,
    DimensionError,
    SystemInvalidError,
    ValidationError,
)
from .polyalg import (
    GaussianRational,
    MultiPoly,
    UniPolyView,
    discriminant_in_var,
    exact_div,
    linear_coordinate_change,
    squarefree_part,
)


@dataclass(frozen=True)
class PolynomialSystem:
    """Validated chain F_1..F_n, all sharing the ambient variable count n."""

    polys: tuple[MultiPoly, ...]

    @property
    def n(self) -> int:
        return len(self.polys)

    @property
    def degrees(self) -> tuple[int, ...]:
        return tuple(p.total_degree() for p in self.polys)

    def view(self, level: int) -> UniPolyView:
        """F_level viewed in its main variable (level is 1-based)."""
        return UniPolyView.from_poly(self.polys[level - 1], level - 1)

    def to_json(self) -> dict:
        return {"n": self.n, "polys": [p.to_json() for p in self.polys]}

    @staticmethod
    def from_json(doc: dict) -> "PolynomialSystem":
        try:
            n = int(doc["n"])
            polys = tuple(MultiPoly.from_json(p) for p in doc["polys"])
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed system document: {exc}") from exc
        if len(polys) != n:
            raise ValidationError("system lists a different number of polynomials")
        report = validate_system(polys)
        if not report.valid:
            raise SystemInvalidError(
                "system conditions violated: "
                + "; ".join(i.message for i in report.issues)
            )
        return PolynomialSystem(polys=polys)


@dataclass(frozen=True)
class ValidationIssue:
    level: int
    condition: str
    message: str

    def to_json(self) -> dict:
        return {"level": self.level, "condition": self.condition,
                "message": self.message}


@dataclass(frozen=True)
class ValidationReport:
    issues: tuple[ValidationIssue, ...]

    @property
    def valid(self) -> bool:
        return not self.issues

    def to_json(self) -> dict:
        return {"valid": self.valid,
                "issues": [i.to_json() for i in self.issues]}


def _is_constant_one(p: MultiPoly) -> bool:
    return p.is_constant() and not p.is_zero() and \
        p.constant_value() == GaussianRational.one()


def validate_system(polys) -> ValidationReport:
    """Check every structural condition; failures are report entries, never
    exceptions."""
    polys = list(polys)
    n = len(polys)
    issues: list[ValidationIssue] = []

    def bad(level, condition, message):
        issues.append(ValidationIssue(level, condition, message))

    if n == 0:
        bad(0, "shape", "empty system")
        return ValidationReport(tuple(issues))
    for idx, p in enumerate(polys):
        level = idx + 1
        if not isinstance(p, MultiPoly) or p.num_vars != polys[0].num_vars:
            bad(level, "shape", "polynomials must share one ambient ring")
            return ValidationReport(tuple(issues))
    if polys[0].num_vars != n:
        bad(0, "shape", f"expected {n} ambient variables, got {polys[0].num_vars}")
        return ValidationReport(tuple(issues))

    last_trivial = None
    for idx, p in enumerate(polys):
        level = idx + 1
        if p.is_zero():
            bad(level, "nonzero", f"F_{level} is identically zero")
            continue
        deg = p.homogeneous_degree()
        if deg is None:
            bad(level, "homogeneous", f"F_{level} is not homogeneous")
            continue
        if not p.used_vars() <= set(range(level)):
            bad(level, "variables",
                f"F_{level} involves variables beyond x{level}")
            continue
        if deg == 0:
            if not _is_constant_one(p):
                bad(level, "monic", f"constant F_{level} must equal 1")
            last_trivial = level
            continue
        view = UniPolyView.from_poly(p, idx)
        if view.degree() != deg or not view.is_monic():
            bad(level, "monic",
                f"F_{level} is not monic of its total degree in x{level}")
            continue
        # constant-in-main-variable term must vanish so x_level is a root
        tail = view.coeffs[-1]
        if not tail.is_zero():
            bad(level, "zero_root",
                f"x{level} = 0 is not a root of F_{level}")
    if issues:
        return ValidationReport(tuple(issues))

    if last_trivial is not None:
        for idx in range(last_trivial - 1):
            if not _is_constant_one(polys[idx]):
                bad(idx + 1, "trivial_convention",
                    f"F_{last_trivial} = 1 forces F_{idx + 1} = 1")

    for idx in range(1, n):
        level = idx + 1
        p = polys[idx]
        if p.total_degree() == 0:
            continue
        view = UniPolyView.from_poly(p, idx)
        red = squarefree_part(view)
        disc = discriminant_in_var(red)
        if disc.is_zero():
            bad(level, "disc_divides",
                f"discriminant of the reduced F_{level} vanishes")
            continue
        if exact_div(polys[idx - 1], disc) is None:
            bad(level, "disc_divides",
                f"disc of reduced F_{level} does not divide F_{level - 1}")
    return ValidationReport(tuple(issues))


@dataclass(frozen=True)
class CompletionResult:
    system: PolynomialSystem
    coordinate_change: tuple | None   # rows of the composite exact matrix
    extra_root_factors: tuple[int, ...]  # exponent of x_i multiplied in per level

    def to_json(self) -> dict:
        change = None
        if self.coordinate_change is not None:
            change = [[str(Fraction(v)) for v in row]
                      for row in self.coordinate_change]
        return {
            "system": self.system.to_json(),
            "coordinate_change": change,
            "extra_root_factors": list(self.extra_root_factors),
        }


def _identity_rows(n: int):
    return [[Fraction(1) if i == j else Fraction(0) for j in range(n)]
            for i in range(n)]


def _matmul_rows(a, b):
    n = len(a)
    return [[sum(a[i][k] * b[k][j] for k in range(n)) for j in range(n)]
            for i in range(n)]


def _monicizing_shear(p: MultiPoly, var: int):
    """Rows of a shear x_j -> x_j + c_j x_var (j < var) making the pure
    x_var power of p nonzero, or None when p is already monicizable."""
    n = p.num_vars
    deg = p.total_degree()
    pure = (0,) * var + (deg,) + (0,) * (n - var - 1)
    if pure in p.terms:
        return None
    for t in range(1, 64):
        coeffs = [Fraction(t) ** (j + 1) for j in range(var)]
        point = coeffs + [Fraction(1)] + [Fraction(0)] * (n - var - 1)
        value = GaussianRational.zero()
        for e, c in p.terms.items():
            factor = Fraction(1)
            for i, k in enumerate(e):
                if k:
                    factor *= point[i] ** k
            value = value + c * GaussianRational.of(factor)
        if not value.is_zero():
            rows = _identity_rows(n)
            for j in range(var):
                rows[j][var] = coeffs[j]
            return rows
    raise ValidationError("no small shear renders the polynomial monic")


def complete_system(top: MultiPoly, n: int | None = None) -> CompletionResult:
    """Extend a homogeneous polynomial downward to a full chain: each lower
    entry is the discriminant of the reduced part above, sheared monic when
    needed, normalized, and multiplied by at most one factor of its main
    variable so zero stays a root.  The same rule fixes up the top."""
    if n is None:
        n = top.num_vars
    if n != top.num_vars:
        raise DimensionError("n must equal the ambient variable count")
    if top.is_zero():
        raise ValidationError("cannot complete the zero polynomial")
    if top.homogeneous_degree() is None:
        raise ValidationError("top polynomial must be homogeneous")
    one = MultiPoly.constant(n, 1)
    polys: list[MultiPoly] = [one] * n
    extra = [0] * n
    change = None
    current = top
    for level in range(n, 0, -1):
        var = level - 1
        if current.is_constant():
            # a unit: this level and everything below is trivially 1
            for j in range(level):
                polys[j] = one
            break
        if not current.used_vars() <= set(range(level)):
            raise ValidationError(
                f"completion candidate at level {level} uses later variables"
            )
        shear = _monicizing_shear(current, var)
        if shear is not None:
            current = linear_coordinate_change(current, shear)
            for j in range(level, n):
                polys[j] = linear_coordinate_change(polys[j], shear)
            change = shear if change is None else _matmul_rows(change, shear)
        deg = current.total_degree()
        view = UniPolyView.from_poly(current, var)
        lead = view.leading().constant_value()
        if lead != GaussianRational.one():
            current = current.scale(GaussianRational.one() / lead)
            view = UniPolyView.from_poly(current, var)
        if not view.coeffs[-1].is_zero():
            current = current * MultiPoly.variable(var, n)
            extra[var] = 1
            deg += 1
            view = UniPolyView.from_poly(current, var)
        if deg > cfg.DEGREE_CAP or current.term_count() > cfg.TERM_CAP:
            raise CapExceededError(
                f"completion exceeded caps at level {level} (degree {deg})"
            )
        polys[var] = current
        if level == 1:
            break
        red = squarefree_part(view)
        current = discriminant_in_var(red)
        if current.is_zero():
            raise ValidationError(
                f"discriminant at level {level} vanished identically"
            )
    report = validate_system(polys)
    if not report.valid:
        raise SystemInvalidError(
            "completion produced an invalid chain: "
            + "; ".join(i.message for i in report.issues)
        )
    rows = tuple(tuple(row) for row in change) if change is not None else None
    return CompletionResult(
        system=PolynomialSystem(polys=tuple(polys)),
        coordinate_change=rows,
        extra_root_factors=tuple(extra),
    )


# -- pointwise classification ---------------------------------------------------


@dataclass(frozen=True)
class StratumLabel:
    """Filtration depth plus the per-level vanishing pattern.  Equal labels
    are necessary (not sufficient) for two points to share a stratum."""

    depth: int
    zero_pattern: tuple[bool, ...]
    margins: tuple[float, ...]

    def to_json(self) -> dict:
        return {
            "depth": self.depth,
            "pattern": ["zero" if z else "nonzero" for z in self.zero_pattern],
            "margins": list(self.margins),
        }


def _zero_margins(x, system: PolynomialSystem, tol: float):
    """(flags, margins): flag i says F_i vanishes at x; margin is the ratio
    |F_i(x)| / threshold, so values near 1 are ambiguous.

    The threshold tol * |coeffs|_1 * (sup of the first i coordinates)^deg is
    exactly invariant under x -> lambda*x, so homogeneous scaling can never
    flip a label."""
    if len(x) != system.n:
        raise DimensionError(f"point must have {system.n} coordinates")
    point = [complex(v) for v in x]
    flags = []
    margins = []
    for idx, p in enumerate(system.polys):
        deg = p.total_degree()
        sup = max((abs(v) for v in point[: idx + 1]), default=0.0)
        thr = tol * max(p.coefficient_norm(), 1.0) * sup ** deg
        val = abs(p.evaluate(point))
        if thr > 0.0:
            flags.append(val <= thr)
            margins.append(val / thr)
        else:
            flags.append(val == 0.0)
            margins.append(0.0 if val == 0.0 else float("inf"))
    return tuple(flags), tuple(margins)


def filtration_depth(x, system: PolynomialSystem, *, tol: float = 1e-9,
                     strict: bool = True) -> int:
    """The unique j with x in X^n_j minus X^n_{j-1}: unwinding the recursive
    membership rule, depth starts at 0 and increments at each level whose
    polynomial does not vanish at x."""
    flags, margins = _zero_margins(x, system, tol)
    if strict:
        for idx, m in enumerate(margins):
            if 1.0 / 3.0 <= m <= 3.0:
                raise AmbiguousZeroTestError(
                    f"zero test at level {idx + 1} has margin {m:.3f}",
                    margin=m, level=idx + 1,
                )
    depth = 0
    for is_zero in flags:
        if not is_zero:
            depth += 1
    return depth


def stratum_label(x, system: PolynomialSystem, *, tol: float = 1e-9,
                  strict: bool = True) -> StratumLabel:
    flags, margins = _zero_margins(x, system, tol)
    if strict:
        for idx, m in enumerate(margins):
            if 1.0 / 3.0 <= m <= 3.0:
                raise AmbiguousZeroTestError(
                    f"zero test at level {idx + 1} has margin {m:.3f}",
                    margin=m, level=idx + 1,
                )
    depth = sum(1 for z in flags if not z)
    return StratumLabel(depth=depth, zero_pattern=flags, margins=margins)
