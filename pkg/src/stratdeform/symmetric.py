"""Symmetric-function machinery behind the interpolation kernel.

Root vectors xi of length N feed a family of homogeneous kernels: with
sigma_k the elementary symmetric values and P_k = sigma_k^(N!/k) (all of
degree N!), the per-slot components are

    g_j(xi) = (1/N!) * sum_k xi_j * dP_k/dxi_j * conj(P_k),

and their sum g = sum_k |P_k|^2 is real, nonnegative, homogeneous of degree
2*N! under real scaling, and vanishes only at xi = 0.  Because P_k magnitudes
overflow doubles for modest N, the kernels are computed on the rescaled
vector xi / max|xi_i| and carried as log-domain values.

The module also provides generalized discriminants (subset sums of squared
differences) and multiplicity-type detection; together they classify root
vectors by their pattern of coincidences.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

from .errors import AmbiguousClusterError, ValidationError
from .logdomain import LogComplex
from .polyalg import GaussianRational

DEFAULT_N_CAP = 8


def _check_cap(n: int, n_cap: int | None) -> None:
    cap = DEFAULT_N_CAP if n_cap is None else n_cap
    if n > cap:
        raise ValidationError(
            f"root vector length {n} exceeds the configured cap {cap}"
        )
    if n < 1:
        raise ValidationError("root vector must have at least one entry")


def elementary_symmetric(xi) -> list[complex]:
    """sigma_1..sigma_N by the stable product recurrence for prod(u + xi_i)."""
    xs = [complex(v) for v in xi]
    n = len(xs)
    e = [0.0 + 0.0j] * (n + 1)
    e[0] = 1.0 + 0.0j
    top = 0
    for x in xs:
        top += 1
        for j in range(top, 0, -1):
            e[j] = e[j] + x * e[j - 1]
    return e[1:]


def _elementary_all_deletions(xs: list[complex]) -> list[list[complex]]:
    """For each j, the values sigma_0..sigma_{N-1} of xs with slot j removed."""
    n = len(xs)
    out = []
    for j in range(n):
        rest = xs[:j] + xs[j + 1:]
        e = [0.0 + 0.0j] * n
        e[0] = 1.0 + 0.0j
        top = 0
        for x in rest:
            top += 1
            for k in range(top, 0, -1):
                e[k] = e[k] + x * e[k - 1]
        out.append(e)
    return out


def kernel_term_logs(xi, *, n_cap: int | None = None):
    """Log-domain building blocks of the kernel sums at the true scale of xi.

    Returns (p_logs, term_logs) with p_logs[k-1] = P_k(xi) and
    term_logs[k-1][j] = xi_j * dP_k/dxi_j (xi) * conj(P_k(xi)).
    """
    xs = [complex(v) for v in xi]
    n = len(xs)
    _check_cap(n, n_cap)
    nfact = math.factorial(n)
    d = 2 * nfact
    rho = max(abs(x) for x in xs)
    zero = LogComplex.zero()
    if rho == 0.0:
        return [zero] * n, [[zero] * n for _ in range(n)]
    xh = [x / rho for x in xs]
    log_rho = math.log(rho)
    sig = elementary_symmetric(xh)
    deletions = _elementary_all_deletions(xh)
    p_logs = []
    term_logs = []
    for k in range(1, n + 1):
        alpha = nfact // k
        s_log = LogComplex.from_complex(sig[k - 1])
        p_k = s_log.pow_int(alpha).scale_log(nfact * log_rho)
        p_logs.append(p_k)
        p_conj = p_k.conjugate()
        row = []
        for j in range(n):
            # dP_k/dxi_j = alpha * sigma_k^(alpha-1) * sigma_{k-1}(xi without j)
            term = (
                LogComplex.from_complex(xh[j])
                * LogComplex.from_real(float(alpha))
                * s_log.pow_int(alpha - 1)
                * LogComplex.from_complex(deletions[j][k - 1])
                * p_conj
            )
            # rescale the xi-hat pieces back to true scale: the product above
            # carries rho-degree k*(alpha-1) + (k-1) + 1 = N!, and the
            # conjugate factor already holds its own N! * log_rho.
            row.append(term.scale_log(nfact * log_rho))
        term_logs.append(row)
    return p_logs, term_logs


def kernel_components_log(xi, *, n_cap: int | None = None):
    """(g_j as LogComplex list, g_total as real-positive LogComplex)."""
    xs = [complex(v) for v in xi]
    n = len(xs)
    _check_cap(n, n_cap)
    nfact = math.factorial(n)
    p_logs, term_logs = kernel_term_logs(xs, n_cap=n_cap)
    log_nfact = math.log(nfact)
    comps = []
    for j in range(n):
        total = LogComplex.sum(term_logs[k][j] for k in range(n))
        comps.append(total.scale_log(-log_nfact))
    g_total = LogComplex.sum(p.squared_magnitude() for p in p_logs)
    return comps, g_total


def f_components(xi, *, n_cap: int | None = None):
    """Kernel components as ordinary floats: (list of complex g_j, real g).

    Raises RangeOverflowError when the log-domain values do not fit in a
    double, which only happens for very large inputs relative to the cap.
    """
    comps, total = kernel_components_log(xi, n_cap=n_cap)
    values = [c.to_complex() for c in comps]
    g = total.to_complex().real
    return values, g


# -- multiplicity types --------------------------------------------------------


@dataclass(frozen=True)
class MultiplicityType:
    """Coincidence pattern of a root vector: m0 entries equal to zero, and
    the remaining indices partitioned into classes of equal values; parts
    lists the class sizes in ascending order."""

    m0: int
    parts: tuple[int, ...]
    zero_class: tuple[int, ...]
    classes: tuple[tuple[int, ...], ...]

    @property
    def distinct_value_count(self) -> int:
        """Number of distinct values, counting 0 as a value when present."""
        return len(self.classes) + (1 if self.m0 > 0 else 0)

    @property
    def size(self) -> int:
        return self.m0 + sum(self.parts)

    def to_json(self) -> dict:
        return {
            "m0": self.m0,
            "parts": list(self.parts),
            "zero_class": [i + 1 for i in self.zero_class],
            "classes": [[i + 1 for i in cls] for cls in self.classes],
        }


def multiplicity_type(a, tol: float | None = 1e-9) -> MultiplicityType:
    """Group the entries of a by equality: the zero class, then equivalence
    classes under |a_i - a_j| <= tol * (1 + max|a_i|); tol = 0 compares
    exactly.  Raises AmbiguousClusterError when a second clustering fits in
    the tolerance band (gaps between 1x and 3x the threshold)."""
    xs = [complex(v) for v in a]
    n = len(xs)
    if n < 1:
        raise ValidationError("root vector must have at least one entry")
    if tol is None:
        tol = 1e-9
    if tol < 0:
        raise ValidationError("tolerance must be >= 0")
    thr = tol * (1.0 + max(abs(x) for x in xs))
    zero_class = tuple(i for i in range(n) if abs(xs[i]) <= thr)
    rest = [i for i in range(n) if abs(xs[i]) > thr]
    parent = {i: i for i in rest}

    def find(i):
        while parent[i] != i:
            parent[i] = parent[parent[i]]
            i = parent[i]
        return i

    for i, j in itertools.combinations(rest, 2):
        if abs(xs[i] - xs[j]) <= thr:
            ri, rj = find(i), find(j)
            if ri != rj:
                parent[rj] = ri
    groups: dict = {}
    for i in rest:
        groups.setdefault(find(i), []).append(i)
    classes = [tuple(sorted(g)) for g in groups.values()]
    classes.sort(key=lambda cls: (len(cls), cls))
    if thr > 0.0:
        band = 3.0 * thr
        reps = {cls: [xs[i] for i in cls] for cls in classes}
        for ca, cb in itertools.combinations(classes, 2):
            gap = min(abs(u - v) for u in reps[ca] for v in reps[cb])
            if gap <= band:
                raise AmbiguousClusterError(
                    f"clusters {ca} and {cb} are separated by {gap:.3e}, "
                    f"inside the ambiguity band {band:.3e}"
                )
        for cls in classes:
            vals = reps[cls]
            diam = max(
                (abs(u - v) for u, v in itertools.combinations(vals, 2)),
                default=0.0,
            )
            if diam > 2.0 * thr:
                raise AmbiguousClusterError(
                    f"cluster {cls} has diameter {diam:.3e} beyond 2x threshold"
                )
        if zero_class:
            for cls in classes:
                m = min(abs(xs[i]) for i in cls)
                if m <= band:
                    raise AmbiguousClusterError(
                        f"cluster {cls} sits {m:.3e} from zero, inside the band"
                    )
    parts = tuple(sorted(len(cls) for cls in classes))
    return MultiplicityType(
        m0=len(zero_class), parts=parts, zero_class=zero_class, classes=tuple(classes)
    )


# -- generalized discriminants --------------------------------------------------


@dataclass(frozen=True)
class DiscriminantVector:
    """Values D_1..D_N; D_j sums, over index subsets S of size j, the product
    of squared differences over pairs in S.  Exactly l values are distinct in
    the input iff D_l != 0 and D_{l+1} = ... = D_N = 0."""

    values: tuple

    def distinct_value_count(self) -> int:
        last = 0
        for j, v in enumerate(self.values, start=1):
            if not _is_zero_value(v):
                last = j
        return last

    def to_json(self) -> list:
        out = []
        for v in self.values:
            c = _to_complex_value(v)
            out.append([c.real, c.imag])
        return out


def _is_zero_value(v) -> bool:
    if isinstance(v, GaussianRational):
        return v.is_zero()
    if isinstance(v, Fraction):
        return v == 0
    return v == 0


def _to_complex_value(v) -> complex:
    if isinstance(v, GaussianRational):
        return v.to_complex()
    return complex(v)


def generalized_discriminants(a) -> DiscriminantVector:
    """Exact when every entry is an int, Fraction, or GaussianRational;
    floating complex otherwise."""
    entries = list(a)
    n = len(entries)
    if n < 1:
        raise ValidationError("root vector must have at least one entry")
    exact = all(isinstance(v, (int, Fraction, GaussianRational)) for v in entries)
    if exact:
        xs = [GaussianRational.of(v) if not isinstance(v, GaussianRational) else v
              for v in entries]
        zero, one = GaussianRational.zero(), GaussianRational.one()
    else:
        xs = [complex(v) for v in entries]
        zero, one = 0.0 + 0.0j, 1.0 + 0.0j
    values = []
    for j in range(1, n + 1):
        total = zero
        for subset in itertools.combinations(range(n), j):
            prod = one
            for u, v in itertools.combinations(subset, 2):
                diff = xs[u] - xs[v]
                prod = prod * diff * diff
                if _is_zero_value(prod):
                    break
            total = total + prod
        values.append(total)
    return DiscriminantVector(values=tuple(values))
