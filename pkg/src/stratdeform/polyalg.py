"""Exact multivariate polynomial arithmetic and the univariate root engine.

Coefficients are Gaussian rationals (pairs of fractions.Fraction), so the
symbolic operations here (products, resultants, discriminants, squarefree
parts, coordinate changes) never round.  Numerical evaluation converts to
complex floats once per polynomial and sums with math.fsum.

Conventions frozen here:

* Resultants are Sylvester determinants with the first argument's
  coefficients in the top rows, computed by fraction-free (Bareiss)
  elimination over the polynomial ring.
* discriminant_in_var(p) = (-1)^(m(m-1)/2) * Res(p, dp/dx) for monic p of
  degree m; degree-1 polynomials get discriminant 1.
* roots_univariate returns all roots with multiplicity, cluster-merged and
  sorted lexicographically by (re, im).
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .errors import (
    DimensionError,
    RootFindingError,
    SingularMatrixError,
    ValidationError,
)

Rational = Fraction


def as_fraction(value) -> Fraction:
    """Coerce ints, Fractions, and 'p/q' strings to an exact Fraction."""
    if isinstance(value, Fraction):
        return value
    if isinstance(value, int):
        return Fraction(value)
    if isinstance(value, str):
        return Fraction(value)
    raise ValidationError(f"cannot interpret {value!r} as an exact rational")


@dataclass(frozen=True)
class GaussianRational:
    """Exact complex number with rational real and imaginary parts."""

    re: Fraction
    im: Fraction = Fraction(0)

    @staticmethod
    def of(value) -> "GaussianRational":
        if isinstance(value, GaussianRational):
            return value
        return GaussianRational(as_fraction(value))

    @staticmethod
    def zero() -> "GaussianRational":
        return GaussianRational(Fraction(0))

    @staticmethod
    def one() -> "GaussianRational":
        return GaussianRational(Fraction(1))

    def is_zero(self) -> bool:
        return self.re == 0 and self.im == 0

    def __add__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re + other.re, self.im + other.im)

    def __sub__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(self.re - other.re, self.im - other.im)

    def __neg__(self) -> "GaussianRational":
        return GaussianRational(-self.re, -self.im)

    def __mul__(self, other: "GaussianRational") -> "GaussianRational":
        return GaussianRational(
            self.re * other.re - self.im * other.im,
            self.re * other.im + self.im * other.re,
        )

    def __truediv__(self, other: "GaussianRational") -> "GaussianRational":
        norm = other.re * other.re + other.im * other.im
        if norm == 0:
            raise ZeroDivisionError("division by zero GaussianRational")
        return GaussianRational(
            (self.re * other.re + self.im * other.im) / norm,
            (self.im * other.re - self.re * other.im) / norm,
        )

    def conjugate(self) -> "GaussianRational":
        return GaussianRational(self.re, -self.im)

    def to_complex(self) -> complex:
        return complex(float(self.re), float(self.im))

    def __str__(self) -> str:
        if self.im == 0:
            return str(self.re)
        return f"({self.re})+({self.im})i"


_ZERO = GaussianRational.zero()
_ONE = GaussianRational.one()


def _coeff(value) -> GaussianRational:
    if isinstance(value, GaussianRational):
        return value
    if isinstance(value, (int, Fraction, str)):
        return GaussianRational.of(value)
    raise ValidationError(f"cannot interpret {value!r} as an exact coefficient")


class MultiPoly:
    """Sparse exact polynomial: exponent tuple -> nonzero GaussianRational."""

    __slots__ = ("num_vars", "terms", "_numeric")

    def __init__(self, num_vars: int, terms=None):
        self.num_vars = num_vars
        clean = {}
        if terms:
            for exps, c in terms.items():
                c = _coeff(c)
                if c.is_zero():
                    continue
                exps = tuple(int(e) for e in exps)
                if len(exps) != num_vars or any(e < 0 for e in exps):
                    raise ValidationError(f"bad exponent vector {exps}")
                clean[exps] = c
        self.terms = clean
        self._numeric = None

    # -- constructors -------------------------------------------------------

    @staticmethod
    def zero(num_vars: int) -> "MultiPoly":
        return MultiPoly(num_vars, {})

    @staticmethod
    def constant(num_vars: int, value) -> "MultiPoly":
        return MultiPoly(num_vars, {(0,) * num_vars: _coeff(value)})

    @staticmethod
    def variable(index: int, num_vars: int) -> "MultiPoly":
        if not 0 <= index < num_vars:
            raise DimensionError(f"variable index {index} out of range")
        exps = tuple(1 if i == index else 0 for i in range(num_vars))
        return MultiPoly(num_vars, {exps: _ONE})

    @staticmethod
    def monomial(num_vars: int, exps, value) -> "MultiPoly":
        return MultiPoly(num_vars, {tuple(exps): _coeff(value)})

    # -- ring operations ----------------------------------------------------

    def _check_same_ring(self, other: "MultiPoly") -> None:
        if self.num_vars != other.num_vars:
            raise DimensionError("polynomials live in different variable counts")

    def __add__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_same_ring(other)
        terms = dict(self.terms)
        for e, c in other.terms.items():
            s = terms.get(e, _ZERO) + c
            if s.is_zero():
                terms.pop(e, None)
            else:
                terms[e] = s
        return MultiPoly(self.num_vars, terms)

    def __sub__(self, other: "MultiPoly") -> "MultiPoly":
        return self + (-other)

    def __neg__(self) -> "MultiPoly":
        return MultiPoly(self.num_vars, {e: -c for e, c in self.terms.items()})

    def __mul__(self, other: "MultiPoly") -> "MultiPoly":
        self._check_same_ring(other)
        terms: dict = {}
        for e1, c1 in self.terms.items():
            for e2, c2 in other.terms.items():
                e = tuple(a + b for a, b in zip(e1, e2))
                s = terms.get(e)
                p = c1 * c2
                s = p if s is None else s + p
                if s.is_zero():
                    terms.pop(e, None)
                else:
                    terms[e] = s
        return MultiPoly(self.num_vars, terms)

    def __pow__(self, k: int) -> "MultiPoly":
        if k < 0:
            raise ValidationError("negative polynomial power")
        result = MultiPoly.constant(self.num_vars, 1)
        base = self
        while k:
            if k & 1:
                result = result * base
            base = base * base if k > 1 else base
            k >>= 1
        return result

    def scale(self, value) -> "MultiPoly":
        c = _coeff(value)
        if c.is_zero():
            return MultiPoly.zero(self.num_vars)
        return MultiPoly(self.num_vars, {e: k * c for e, k in self.terms.items()})

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, MultiPoly)
            and self.num_vars == other.num_vars
            and self.terms == other.terms
        )

    __hash__ = None

    # -- structure ----------------------------------------------------------

    def is_zero(self) -> bool:
        return not self.terms

    def is_constant(self) -> bool:
        return all(sum(e) == 0 for e in self.terms)

    def constant_value(self) -> GaussianRational:
        if self.is_zero():
            return _ZERO
        if not self.is_constant():
            raise ValidationError("polynomial is not constant")
        return next(iter(self.terms.values()))

    def total_degree(self) -> int:
        if self.is_zero():
            return 0
        return max(sum(e) for e in self.terms)

    def degree_in(self, var: int) -> int:
        if self.is_zero():
            return 0
        return max(e[var] for e in self.terms)

    def homogeneous_degree(self):
        """Total degree if homogeneous, else None.  Zero counts as degree 0."""
        if self.is_zero():
            return 0
        degs = {sum(e) for e in self.terms}
        return degs.pop() if len(degs) == 1 else None

    def used_vars(self) -> set:
        used = set()
        for e in self.terms:
            for i, k in enumerate(e):
                if k:
                    used.add(i)
        return used

    def derivative(self, var: int) -> "MultiPoly":
        terms = {}
        for e, c in self.terms.items():
            k = e[var]
            if k == 0:
                continue
            e2 = tuple(v - 1 if i == var else v for i, v in enumerate(e))
            add = c * GaussianRational(Fraction(k))
            cur = terms.get(e2)
            terms[e2] = add if cur is None else cur + add
        return MultiPoly(self.num_vars, terms)

    def term_count(self) -> int:
        return len(self.terms)

    # -- numeric evaluation -------------------------------------------------

    def _compiled(self):
        if self._numeric is None:
            items = sorted(self.terms.items())
            exps = np.array([e for e, _ in items], dtype=np.int64).reshape(
                len(items), self.num_vars
            )
            coeffs = np.array([c.to_complex() for _, c in items], dtype=complex)
            self._numeric = (exps, coeffs)
        return self._numeric

    def evaluate(self, point) -> complex:
        """Evaluate at a complex point with compensated summation."""
        if len(point) != self.num_vars:
            raise DimensionError(
                f"point has {len(point)} coordinates, expected {self.num_vars}"
            )
        if not self.terms:
            return 0.0 + 0.0j
        exps, coeffs = self._compiled()
        pt = np.asarray(point, dtype=complex)
        vals = coeffs * np.prod(np.power(pt[None, :], exps), axis=1)
        return complex(math.fsum(vals.real), math.fsum(vals.imag))

    def coefficient_norm(self) -> float:
        """1-norm of the coefficients as floats."""
        return float(
            sum(abs(c.to_complex()) for c in self.terms.values())
        )

    # -- serialization ------------------------------------------------------

    def to_json(self) -> dict:
        terms = []
        for e, c in sorted(self.terms.items()):
            terms.append({"exp": list(e), "re": str(c.re), "im": str(c.im)})
        return {
            "vars": [f"x{i + 1}" for i in range(self.num_vars)],
            "terms": terms,
        }

    @staticmethod
    def from_json(doc: dict) -> "MultiPoly":
        try:
            n = len(doc["vars"])
            terms = {}
            for t in doc["terms"]:
                c = GaussianRational(as_fraction(t["re"]), as_fraction(t.get("im", "0")))
                exps = tuple(int(e) for e in t["exp"])
                if exps in terms:
                    raise ValidationError(f"duplicate exponent vector {exps}")
                terms[exps] = c
            return MultiPoly(n, terms)
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed polynomial document: {exc}") from exc

    def __repr__(self) -> str:
        if self.is_zero():
            return "0"
        parts = []
        for e, c in sorted(self.terms.items(), key=lambda t: (-sum(t[0]), t[0])):
            mono = "*".join(
                f"x{i + 1}" + (f"^{k}" if k > 1 else "")
                for i, k in enumerate(e)
                if k
            )
            parts.append(f"({c}){'*' + mono if mono else ''}")
        return " + ".join(parts)


def variables(num_vars: int) -> list[MultiPoly]:
    """Convenience: the list [x1, ..., xn] as polynomials."""
    return [MultiPoly.variable(i, num_vars) for i in range(num_vars)]


def poly_eval(p: MultiPoly, point) -> complex:
    return p.evaluate(point)


# -- exact division ----------------------------------------------------------


def _order_key(exps):
    # degree-lexicographic; any admissible monomial order works here
    return (sum(exps), exps)


def _leading_term(p: MultiPoly):
    return max(p.terms, key=_order_key)


def exact_div(p: MultiPoly, q: MultiPoly):
    """Exact quotient p/q in the polynomial ring, or None if q does not
    divide p.  Greedy leading-term elimination in deglex order; for p = q*h
    the leading monomials multiply, so the loop either terminates with zero
    remainder or proves indivisibility."""
    p._check_same_ring(q)
    if q.is_zero():
        raise ZeroDivisionError("division by zero polynomial")
    if p.is_zero():
        return MultiPoly.zero(p.num_vars)
    if q.is_constant():
        return p.scale(_ONE / q.constant_value())
    quotient: dict = {}
    lt_q = _leading_term(q)
    c_q = q.terms[lt_q]
    rem = p
    while not rem.is_zero():
        lt_r = _leading_term(rem)
        diff = tuple(a - b for a, b in zip(lt_r, lt_q))
        if any(d < 0 for d in diff):
            return None
        c = rem.terms[lt_r] / c_q
        quotient[diff] = c
        rem = rem - MultiPoly.monomial(p.num_vars, diff, c) * q
    return MultiPoly(p.num_vars, quotient)


def divides(q: MultiPoly, p: MultiPoly) -> bool:
    return exact_div(p, q) is not None


# -- univariate views --------------------------------------------------------


class UniPolyView:
    """A polynomial viewed as univariate in one variable, with coefficients
    that are polynomials in the remaining variables (main-variable exponent
    zero).  coeffs[0] is the leading coefficient."""

    __slots__ = ("var", "coeffs", "num_vars")

    def __init__(self, var: int, coeffs: list, num_vars: int):
        # strip leading zero coefficients
        i = 0
        while i < len(coeffs) - 1 and coeffs[i].is_zero():
            i += 1
        self.var = var
        self.coeffs = coeffs[i:]
        self.num_vars = num_vars

    @staticmethod
    def from_poly(p: MultiPoly, var: int) -> "UniPolyView":
        if not 0 <= var < p.num_vars:
            raise DimensionError(f"variable index {var} out of range")
        d = p.degree_in(var)
        buckets: list[dict] = [dict() for _ in range(d + 1)]
        for e, c in p.terms.items():
            k = e[var]
            e2 = tuple(v if i != var else 0 for i, v in enumerate(e))
            buckets[k][e2] = c
        coeffs = [MultiPoly(p.num_vars, buckets[d - j]) for j in range(d + 1)]
        return UniPolyView(var, coeffs, p.num_vars)

    def degree(self) -> int:
        return len(self.coeffs) - 1

    def leading(self) -> MultiPoly:
        return self.coeffs[0]

    def is_monic(self) -> bool:
        lead = self.coeffs[0]
        return lead.is_constant() and lead.constant_value() == _ONE

    def to_poly(self) -> MultiPoly:
        d = self.degree()
        acc = MultiPoly.zero(self.num_vars)
        xv = MultiPoly.variable(self.var, self.num_vars)
        for j, c in enumerate(self.coeffs):
            acc = acc + c * xv ** (d - j)
        return acc

    def derivative(self) -> "UniPolyView":
        d = self.degree()
        if d == 0:
            return UniPolyView(self.var, [MultiPoly.zero(self.num_vars)], self.num_vars)
        coeffs = [
            self.coeffs[j].scale(d - j) for j in range(d)
        ]
        return UniPolyView(self.var, coeffs, self.num_vars)

    def is_zero(self) -> bool:
        return all(c.is_zero() for c in self.coeffs)


def _view_from_coeffs(var, coeffs, num_vars) -> UniPolyView:
    if not coeffs:
        coeffs = [MultiPoly.zero(num_vars)]
    return UniPolyView(var, coeffs, num_vars)


def _pseudo_rem(a: UniPolyView, b: UniPolyView) -> UniPolyView:
    """prem(a, b): remainder of lc(b)^(deg a - deg b + 1) * a modulo b,
    computed without fractions."""
    da, db = a.degree(), b.degree()
    if da < db:
        raise ValidationError("pseudo-remainder needs deg a >= deg b")
    lb = b.leading()
    r = list(a.coeffs)
    steps = 0
    while True:
        while len(r) > 1 and r[0].is_zero():
            r.pop(0)
        if len(r) - 1 < db or all(c.is_zero() for c in r):
            break
        lr = r[0]
        r = [c * lb for c in r]
        for j, bc in enumerate(b.coeffs):
            r[j] = r[j] - lr * bc
        steps += 1
        r.pop(0)
    # match the prem normalization lc(b)^(delta+1)
    remaining = da - db + 1 - steps
    if remaining > 0:
        f = lb ** remaining
        r = [c * f for c in r]
    return _view_from_coeffs(a.var, r, a.num_vars)


def _subresultant_gcd_monic(a: UniPolyView, b: UniPolyView) -> UniPolyView:
    """Monic gcd of a and b in the main variable via the subresultant
    pseudo-remainder sequence.  Assumes a is monic, so the monic gcd has
    polynomial coefficients and the final content division is exact."""
    n = a.num_vars
    one = MultiPoly.constant(n, 1)
    if b.is_zero():
        return a
    if b.degree() == 0:
        return _view_from_coeffs(a.var, [one], n)
    if a.degree() < b.degree():
        a, b = b, a
    g = one
    h = one
    while True:
        if b.is_zero():
            result = a
            break
        delta = a.degree() - b.degree()
        r = _pseudo_rem(a, b)
        if r.is_zero():
            result = b
            break
        if r.degree() == 0:
            # nonzero remainder of main-degree 0: coprime in the main variable
            return _view_from_coeffs(a.var, [one], n)
        denom = g * h ** delta
        new_coeffs = []
        for c in r.coeffs:
            q = exact_div(c, denom)
            if q is None:
                raise ValidationError("subresultant division failed (internal)")
            new_coeffs.append(q)
        a, b = b, _view_from_coeffs(a.var, new_coeffs, n)
        g = a.leading()
        if delta > 0:
            h = exact_div(g ** delta, h ** (delta - 1))
            if h is None:
                raise ValidationError("subresultant h-update failed (internal)")
    # monicize: each coefficient is (leading coefficient) * (monic gcd coeff)
    lead = result.leading()
    if lead.is_constant():
        inv = _ONE / lead.constant_value()
        coeffs = [c.scale(inv) for c in result.coeffs]
        return _view_from_coeffs(a.var, coeffs, n)
    coeffs = []
    for c in result.coeffs:
        q = exact_div(c, lead)
        if q is None:
            raise ValidationError("gcd monicization failed (internal)")
        coeffs.append(q)
    return _view_from_coeffs(a.var, coeffs, n)


def _div_by_monic(a: UniPolyView, b: UniPolyView) -> UniPolyView:
    """Exact long division of a by a monic divisor b in the main variable."""
    if not b.is_monic():
        raise ValidationError("divisor must be monic")
    r = list(a.coeffs)
    db = b.degree()
    q: list[MultiPoly] = []
    while len(r) - 1 >= db:
        lr = r[0]
        q.append(lr)
        for j in range(1, db + 1):
            r[j] = r[j] - lr * b.coeffs[j]
        r.pop(0)
    if any(not c.is_zero() for c in r):
        raise ValidationError("division by monic factor left a remainder")
    return _view_from_coeffs(a.var, q, a.num_vars)


def squarefree_part(p: UniPolyView) -> UniPolyView:
    """p / gcd(p, dp/dx_main): same distinct roots, each simple.  Requires a
    monic input; constants come back unchanged."""
    if p.degree() == 0:
        return p
    if not p.is_monic():
        raise ValidationError("squarefree_part needs a monic polynomial")
    if p.degree() == 1:
        return p
    g = _subresultant_gcd_monic(p, p.derivative())
    if g.degree() == 0:
        return p
    return _div_by_monic(p, g)


# -- resultants and discriminants --------------------------------------------


def _bareiss_det(mat: list[list[MultiPoly]], num_vars: int) -> MultiPoly:
    """Fraction-free determinant; every division below is exact by
    Sylvester's identity."""
    n = len(mat)
    if n == 0:
        return MultiPoly.constant(num_vars, 1)
    m = [row[:] for row in mat]
    sign = 1
    prev = MultiPoly.constant(num_vars, 1)
    for k in range(n - 1):
        if m[k][k].is_zero():
            pivot_row = None
            for i in range(k + 1, n):
                if not m[i][k].is_zero():
                    pivot_row = i
                    break
            if pivot_row is None:
                return MultiPoly.zero(num_vars)
            m[k], m[pivot_row] = m[pivot_row], m[k]
            sign = -sign
        pivot = m[k][k]
        for i in range(k + 1, n):
            for j in range(k + 1, n):
                num = pivot * m[i][j] - m[i][k] * m[k][j]
                q = exact_div(num, prev)
                if q is None:
                    raise ValidationError("Bareiss division failed (internal)")
                m[i][j] = q
            m[i][k] = MultiPoly.zero(num_vars)
        prev = pivot
    det = m[n - 1][n - 1]
    return det if sign == 1 else -det


def resultant(p: UniPolyView, q: UniPolyView) -> MultiPoly:
    """Sylvester resultant in the shared main variable; p's coefficient rows
    sit on top, a convention the tests freeze."""
    if p.var != q.var or p.num_vars != q.num_vars:
        raise DimensionError("resultant arguments must share variables")
    dp, dq = p.degree(), q.degree()
    if dp == 0 and dq == 0:
        raise ValidationError("resultant of two constants is undefined")
    if dp == 0:
        return p.leading() ** dq
    if dq == 0:
        return q.leading() ** dp
    n = dp + dq
    zero = MultiPoly.zero(p.num_vars)
    mat = []
    for i in range(dq):
        row = [zero] * n
        for j, c in enumerate(p.coeffs):
            row[i + j] = c
        mat.append(row)
    for i in range(dp):
        row = [zero] * n
        for j, c in enumerate(q.coeffs):
            row[i + j] = c
        mat.append(row)
    return _bareiss_det(mat, p.num_vars)


def discriminant_in_var(p: UniPolyView) -> MultiPoly:
    """Discriminant of a monic polynomial in its main variable."""
    d = p.degree()
    if d == 0:
        raise ValidationError("discriminant needs degree >= 1")
    if not p.is_monic():
        raise ValidationError("discriminant_in_var needs a monic polynomial")
    if d == 1:
        return MultiPoly.constant(p.num_vars, 1)
    res = resultant(p, p.derivative())
    if (d * (d - 1) // 2) % 2 == 1:
        res = -res
    return res


# -- exact linear coordinate changes ------------------------------------------


def _exact_matrix(matrix) -> list[list[GaussianRational]]:
    rows = [[_coeff(v) for v in row] for row in matrix]
    n = len(rows)
    if any(len(r) != n for r in rows):
        raise DimensionError("coordinate-change matrix must be square")
    return rows


def _exact_det(rows: list[list[GaussianRational]]) -> GaussianRational:
    n = len(rows)
    m = [row[:] for row in rows]
    det = _ONE
    for k in range(n):
        pivot = None
        for i in range(k, n):
            if not m[i][k].is_zero():
                pivot = i
                break
        if pivot is None:
            return _ZERO
        if pivot != k:
            m[k], m[pivot] = m[pivot], m[k]
            det = -det
        det = det * m[k][k]
        inv = _ONE / m[k][k]
        for i in range(k + 1, n):
            f = m[i][k] * inv
            for j in range(k, n):
                m[i][j] = m[i][j] - f * m[k][j]
    return det


def linear_coordinate_change(p: MultiPoly, matrix) -> MultiPoly:
    """Exact composition (p o M)(x) = p(M x) for an invertible exact M."""
    rows = _exact_matrix(matrix)
    if len(rows) != p.num_vars:
        raise DimensionError("matrix size must equal the variable count")
    if _exact_det(rows).is_zero():
        raise SingularMatrixError("coordinate-change matrix is singular")
    n = p.num_vars
    forms = []
    for i in range(n):
        f = MultiPoly.zero(n)
        for j, c in enumerate(rows[i]):
            if not c.is_zero():
                f = f + MultiPoly.variable(j, n).scale(c)
        forms.append(f)
    result = MultiPoly.zero(n)
    for e, c in p.terms.items():
        term = MultiPoly.constant(n, 1)
        for i, k in enumerate(e):
            if k:
                term = term * forms[i] ** k
        result = result + term.scale(c)
    return result


# -- univariate numeric roots --------------------------------------------------


def _quadratic_roots(b: complex, c: complex) -> list[complex]:
    s = cmath.sqrt(b * b - 4.0 * c)
    # pick the sign that avoids cancellation in -b -/+ s
    if (b.conjugate() * s).real >= 0.0:
        s = -s
    r1 = (-b + s) / 2.0
    r2 = c / r1 if r1 != 0 else (-b - s) / 2.0
    return [r1, r2]


def _aberth(coeffs: np.ndarray, tol_step: float, max_iter: int):
    """Simultaneous (Ehrlich-Aberth) iteration for a monic polynomial given
    by descending coefficients.  Returns the root array or None on stall."""
    d = len(coeffs) - 1
    bounds = [abs(coeffs[k]) ** (1.0 / k) for k in range(1, d + 1) if coeffs[k] != 0]
    radius = 2.0 * max(bounds) if bounds else 1.0
    radius = max(radius * 0.5, 1e-3)
    angles = 2.0 * np.pi * (np.arange(d) + 0.37) / d + 0.5 / d
    z = radius * np.exp(1j * angles)
    dcoeffs = coeffs[:-1] * np.arange(d, 0, -1)
    for _ in range(max_iter):
        p = np.zeros_like(z)
        for c in coeffs:
            p = p * z + c
        dp = np.zeros_like(z)
        for c in dcoeffs:
            dp = dp * z + c
        dp = np.where(dp == 0, 1e-300, dp)
        newton = p / dp
        diff = z[:, None] - z[None, :]
        np.fill_diagonal(diff, 1.0)
        s = np.sum(1.0 / diff, axis=1) - 1.0  # drop the diagonal fill-in
        denom = 1.0 - newton * s
        denom = np.where(denom == 0, 1e-300, denom)
        w = newton / denom
        z = z - w
        if not np.all(np.isfinite(z)):
            return None
        if np.max(np.abs(w) / (1.0 + np.abs(z))) < tol_step:
            return z
    return None


def _companion_roots(coeffs: np.ndarray) -> np.ndarray:
    d = len(coeffs) - 1
    comp = np.zeros((d, d), dtype=complex)
    comp[1:, :-1] = np.eye(d - 1)
    comp[:, -1] = -coeffs[:0:-1]
    return np.linalg.eigvals(comp)


def _cluster_roots(roots, tol_abs: float):
    """Union-find merge of roots closer than tol_abs; members are replaced
    by the cluster mean, which recovers accuracy at multiple roots."""
    n = len(roots)
    parent = list(range(n))

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i in range(n):
        for j in range(i + 1, n):
            if abs(roots[i] - roots[j]) <= tol_abs:
                ri, rj = find(i), find(j)
                if ri != rj:
                    parent[rj] = ri
    groups: dict = {}
    for i in range(n):
        groups.setdefault(find(i), []).append(i)
    out = [0j] * n
    for members in groups.values():
        zero_members = [i for i in members if roots[i] == 0]
        if zero_members:
            mean = 0.0 + 0.0j
        else:
            mean = sum(roots[i] for i in members) / len(members)
        for i in members:
            out[i] = mean
    return out


def roots_univariate(
    coeffs,
    *,
    cluster_tol: float = 1e-9,
    residual_tol: float = 1e-8,
    step_tol: float = 1e-13,
    max_iter: int = 160,
) -> list[complex]:
    """All roots (with multiplicity) of a monic polynomial, descending
    coefficients.  Trailing zero coefficients give exact roots at 0;
    degrees 1 and 2 use closed forms; the rest run Ehrlich-Aberth with a
    companion-matrix fallback.  Output is cluster-merged and sorted by
    (re, im)."""
    c = [complex(v) for v in coeffs]
    if len(c) < 2:
        raise ValidationError("roots_univariate needs degree >= 1")
    if abs(c[0] - 1.0) > 1e-12:
        raise ValidationError("leading coefficient must be 1")
    c[0] = 1.0 + 0.0j
    m0 = 0
    while len(c) > 1 and c[-1] == 0:
        c.pop()
        m0 += 1
    d = len(c) - 1
    found: list[complex] = []
    if d == 1:
        found = [-c[1]]
    elif d == 2:
        found = _quadratic_roots(c[1], c[2])
    elif d >= 3:
        arr = np.asarray(c, dtype=complex)
        z = _aberth(arr, step_tol, max_iter)
        if z is None:
            z = _companion_roots(arr)
        found = [complex(v) for v in z]
    # residual check against the zero-stripped polynomial
    for r in found:
        val = 0.0 + 0.0j
        scale = 0.0
        for ck in c:
            val = val * r + ck
            scale = scale * abs(r) + abs(ck)
        scale = max(scale, 1.0)
        if abs(val) > residual_tol * scale:
            raise RootFindingError(
                f"root residual {abs(val):.3e} exceeds "
                f"{residual_tol:.1e} * {scale:.3e}",
                achieved_residual=abs(val),
            )
    roots = found + [0.0 + 0.0j] * m0
    scale = 1.0 + max((abs(r) for r in roots), default=0.0)
    roots = _cluster_roots(roots, cluster_tol * scale)
    roots.sort(key=lambda w: (w.real, w.imag))
    return roots
