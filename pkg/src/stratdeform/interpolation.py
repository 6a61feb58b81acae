"""Parametrized interpolation of root configurations in the complex line.

Given root vectors a, b of equal length N with the merging compatibility
(a_i = a_j implies b_i = b_j, a_i = 0 implies b_i = 0) and a parameter eta,
the map

    psi(z) = z + [ sum_i mu_i(z) (b_i - a_i) |z|^d + eta z ]
                 / [ mu(z) |z|^d + 1 ],            d = 2 * N!,

with mu_i(z), mu(z) the symmetric kernels evaluated at (1/(z-a_1), ...,
1/(z-a_N)), extends continuously by psi(a_i) = b_i and psi(0) = 0.  It is
jointly homogeneous (psi(l z, l a, l b, eta) = l psi(z, a, b, eta)), affine
in (b, eta), and bi-Lipschitz when gamma + |eta| is small, with

    gamma = max over a_i != a_j of |D_i - D_j| / |a_i - a_j|,  D_i = b_i - a_i.

Evaluation strategy: inputs are jointly rescaled so max(|z|, |a|, |b|) = 1,
then every kernel quantity is carried in the log domain; the final ratio is
the only exponentiation.  Points inside a snap radius of 0 or a root return
the formal values exactly.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np

from . import config as cfg
from .errors import (
    ContractionError,
    ConvergenceError,
    ValidationError,
    XiViolationError,
)
from .logdomain import LogComplex
from .symmetric import (
    MultiplicityType,
    kernel_components_log,
    kernel_term_logs,
    multiplicity_type,
)

SNAP = 1e-12
XI_TOL = 1e-9


@dataclass(frozen=True)
class InterpolationInput:
    """One evaluation request: point, root vectors, parameter."""

    z: complex
    a: tuple[complex, ...]
    b: tuple[complex, ...]
    eta: complex

    def validate(self, tol: float = XI_TOL) -> None:
        check_pair_compatible(self.a, self.b, tol=tol)


def _scale_of(a, b, z=None) -> float:
    vals = [abs(v) for v in a] + [abs(v) for v in b]
    if z is not None:
        vals.append(abs(z))
    return max(vals) if vals else 0.0


def check_pair_compatible(a, b, *, tol: float = XI_TOL) -> None:
    """Merging compatibility: equal a-entries carry equal b-entries, zero
    a-entries carry zero b-entries.  Equality is tested at tol * scale."""
    if len(a) != len(b) or len(a) == 0:
        raise XiViolationError("a and b must have equal positive length")
    scale = _scale_of(a, b)
    thr = tol * (1.0 + scale)
    n = len(a)
    for i in range(n):
        if abs(a[i]) <= thr and abs(b[i]) > thr:
            raise XiViolationError(
                f"a[{i}] = 0 requires b[{i}] = 0, got {b[i]!r}"
            )
        for j in range(i + 1, n):
            if abs(a[i] - a[j]) <= thr and abs(b[i] - b[j]) > thr:
                raise XiViolationError(
                    f"a[{i}] = a[{j}] requires b[{i}] = b[{j}]"
                )


def gamma(a, b, *, tol: float = XI_TOL) -> float:
    """Largest ratio |D_i - D_j| / |a_i - a_j| over pairs with a_i != a_j;
    zero when every pair of entries coincides (the maximum over an empty
    set is defined as 0)."""
    check_pair_compatible(a, b, tol=tol)
    scale = _scale_of(a, b)
    thr = tol * (1.0 + scale)
    best = 0.0
    n = len(a)
    for i in range(n):
        di = b[i] - a[i]
        for j in range(i + 1, n):
            gap = abs(a[i] - a[j])
            if gap <= thr:
                continue
            best = max(best, abs(di - (b[j] - a[j])) / gap)
    return best


def gamma_anchored(a, b, *, tol: float = XI_TOL) -> float:
    """gamma of the configuration with the origin adjoined as a fixed root.

    The map pins 0 in place, so its displacement field has a zero anchor
    whether or not 0 appears among the roots; slope bounds of the form
    1 +/- C * (gamma + |eta|) hold against this quantity, not against the
    pair-only gamma (take b = a + const with no zero root: gamma = 0, yet
    the stretch between 0 and a_1 is |const| / |a_1|).  When 0 already
    appears in a, the two values coincide."""
    a = tuple(a) + (0.0 + 0.0j,)
    b = tuple(b) + (0.0 + 0.0j,)
    return gamma(a, b, tol=tol)


def _snap_value(z, a, b, snap_radius):
    """Formal values inside the snap radius: 0 at the origin, b_i at a_i.
    Returns None when z is clear of all snap targets."""
    if abs(z) <= snap_radius:
        return 0.0 + 0.0j
    best = None
    best_d = snap_radius
    for ai, bi in zip(a, b):
        dist = abs(z - ai)
        if dist <= best_d:
            best_d = dist
            best = bi
    return best


def psi(z, a, b, eta, *, snap: float = SNAP, xi_tol: float = XI_TOL,
        n_cap: int | None = None) -> complex:
    """Interpolation value at z for root vectors (a, b) and parameter eta."""
    a = tuple(complex(v) for v in a)
    b = tuple(complex(v) for v in b)
    z = complex(z)
    eta = complex(eta)
    check_pair_compatible(a, b, tol=xi_tol)
    scale = _scale_of(a, b, z)
    if scale == 0.0:
        return 0.0 + 0.0j
    snapped = _snap_value(z, a, b, snap * scale)
    if snapped is not None:
        return complex(snapped)
    inv = 1.0 / scale
    zz = z * inv
    aa = [v * inv for v in a]
    bb = [v * inv for v in b]
    frac = _interp_fraction(zz, aa, bb, eta, n_cap)
    if frac == 0:
        return z  # exact identity when b = a and eta = 0
    return (zz + frac) * scale


def _interp_fraction(zz, aa, bb, eta, n_cap) -> complex:
    n = len(aa)
    d = 2 * math.factorial(n)
    xi = [1.0 / (zz - ai) for ai in aa]
    comps, total = kernel_components_log(xi, n_cap=n_cap)
    shift = d * math.log(abs(zz))
    terms = [
        comp * LogComplex.from_complex(bi - ai)
        for comp, ai, bi in zip(comps, aa, bb)
    ]
    moved = LogComplex.sum(terms).scale_log(shift)
    num = moved + LogComplex.from_complex(eta * zz)
    den = total.scale_log(shift) + LogComplex.one()
    return (num / den).to_complex()


def psi_stratified(z, a, b, eta, mtype: MultiplicityType, *,
                   snap: float = SNAP, xi_tol: float = XI_TOL,
                   n_cap: int | None = None) -> complex:
    """Interpolation through the per-stratum form: both numerator and
    denominator are multiplied by Q * conj(Q) with Q the product of
    (z - a_r)^(N!) over one representative root r per coincidence class
    (including the zero class), which clears every pole on the stratum.
    Numerically the factors ride along in the log domain; the value agrees
    with psi and is affine in (b, eta) for fixed (z, a)."""
    a = tuple(complex(v) for v in a)
    b = tuple(complex(v) for v in b)
    z = complex(z)
    eta = complex(eta)
    check_pair_compatible(a, b, tol=xi_tol)
    observed = multiplicity_type(a, tol=xi_tol)
    if (observed.m0 != mtype.m0 or observed.zero_class != mtype.zero_class
            or observed.classes != mtype.classes):
        raise ValidationError("multiplicity type is inconsistent with a")
    scale = _scale_of(a, b, z)
    if scale == 0.0:
        return 0.0 + 0.0j
    snapped = _snap_value(z, a, b, snap * scale)
    if snapped is not None:
        return complex(snapped)
    inv = 1.0 / scale
    zz = z * inv
    aa = [v * inv for v in a]
    bb = [v * inv for v in b]
    n = len(aa)
    nfact = math.factorial(n)
    d = 2 * nfact
    reps = []
    if mtype.m0 > 0:
        reps.append(mtype.zero_class[0])
    reps.extend(cls[0] for cls in mtype.classes)
    q_log = LogComplex.one()
    for r in reps:
        q_log = q_log * LogComplex.from_complex(zz - aa[r]).pow_int(nfact)
    q_sq = q_log.squared_magnitude()
    xi = [1.0 / (zz - ai) for ai in aa]
    p_logs, term_logs = kernel_term_logs(xi, n_cap=n_cap)
    shift = d * math.log(abs(zz))
    inner_terms = []
    for k in range(n):
        for j in range(n):
            inner_terms.append(
                term_logs[k][j] * LogComplex.from_complex(bb[j] - aa[j])
            )
    inner = LogComplex.sum(inner_terms).scale_log(shift)
    inner = inner + LogComplex.from_complex(nfact * eta * zz)
    numerator = q_sq * inner
    kernel_total = LogComplex.sum(p.squared_magnitude() for p in p_logs)
    denominator = (
        q_sq
        * (kernel_total.scale_log(shift) + LogComplex.one())
        * LogComplex.from_real(float(nfact))
    )
    frac = (numerator / denominator).to_complex()
    if frac == 0:
        return z
    return (zz + frac) * scale


def dpsi_deta(z, a, b=None, eta=0.0, *, snap: float = SNAP,
              xi_tol: float = XI_TOL, n_cap: int | None = None) -> complex:
    """Derivative of psi in the parameter: z / (|z|^d mu(z) + 1), exactly 0
    at z = 0 and at every root a_i."""
    a = tuple(complex(v) for v in a)
    z = complex(z)
    if b is not None:
        check_pair_compatible(a, tuple(complex(v) for v in b), tol=xi_tol)
    scale = max([abs(z)] + [abs(v) for v in a])
    if scale == 0.0:
        return 0.0 + 0.0j
    radius = snap * scale
    if abs(z) <= radius or any(abs(z - ai) <= radius for ai in a):
        return 0.0 + 0.0j
    inv = 1.0 / scale
    zz = z * inv
    aa = [v * inv for v in a]
    n = len(aa)
    d = 2 * math.factorial(n)
    xi = [1.0 / (zz - ai) for ai in aa]
    _, total = kernel_components_log(xi, n_cap=n_cap)
    den = total.scale_log(d * math.log(abs(zz))) + LogComplex.one()
    value = (LogComplex.from_complex(zz) / den).to_complex()
    return value * scale


def psi_inverse(w, a, b, eta, *, fitted_c: float | None = None,
                tol: float = 1e-9, max_iter: int = 200,
                xi_tol: float = XI_TOL, n_cap: int | None = None) -> complex:
    """Solve psi(z) = w by the fixed-point iteration z <- w - (psi(z) - z),
    which contracts because z -> psi(z) - z has Lipschitz constant
    C * (gamma + |eta|).  Refuses when the contraction gate fails."""
    a = tuple(complex(v) for v in a)
    b = tuple(complex(v) for v in b)
    w = complex(w)
    eta = complex(eta)
    g = gamma_anchored(a, b, tol=xi_tol)
    if fitted_c is None:
        fitted_c = cfg.FITTED_C.get(len(a), max(cfg.FITTED_C.values()))
    gate = fitted_c * (g + abs(eta))
    if gate >= 1.0:
        raise ContractionError(
            f"contraction gate C*(gamma+|eta|) = {gate:.3f} >= 1; refusing"
        )
    scale = max(_scale_of(a, b, w), 1e-300)
    z = w
    # aim a factor below tol so the round-trip error, which is bounded by
    # residual / (1 - gate), also lands under tol * scale
    target = 0.2 * tol * scale
    for _ in range(max_iter):
        value = psi(z, a, b, eta, xi_tol=xi_tol, n_cap=n_cap)
        residual = value - w
        if abs(residual) <= target:
            return z
        z = z - residual
    raise ConvergenceError(
        f"psi_inverse did not reach {tol:.1e} * scale in {max_iter} iterations "
        f"(residual {abs(residual):.3e})"
    )


# -- empirical Lipschitz probing -------------------------------------------------


@dataclass(frozen=True)
class LipschitzReport:
    gamma: float
    eta_abs: float
    empirical_lipschitz: float
    empirical_colipschitz: float
    fitted_C: float
    bound_satisfied: bool
    samples: int

    def to_json(self) -> dict:
        return {
            "gamma": self.gamma,
            "eta_abs": self.eta_abs,
            "empirical_lipschitz": self.empirical_lipschitz,
            "empirical_colipschitz": self.empirical_colipschitz,
            "fitted_C": self.fitted_C,
            "bound_satisfied": self.bound_satisfied,
            "samples": self.samples,
        }


def _disk_point(rng, radius: float) -> complex:
    r = radius * math.sqrt(rng.uniform())
    th = rng.uniform(0.0, 2.0 * math.pi)
    return r * cmath.exp(1j * th)


def sample_pairs(a, b, samples: int, seed: int):
    """Deterministic evaluation pairs: uniform draws in a disk covering
    {0} and the roots, plus adversarial pairs near each distinct root.
    Pair k draws from its own stream, and the adversarial roots are visited
    in sorted order, so jointly permuting (a, b) leaves the sample set
    unchanged."""
    scale = max(1.0, _scale_of(a, b))
    radius = 2.0 * scale
    pairs = []
    for k in range(samples):
        rng = cfg.make_rng(seed, 0x706C, k)
        pairs.append((_disk_point(rng, radius), _disk_point(rng, radius)))
    distinct = sorted(set(a), key=lambda w: (w.real, w.imag))
    per_root = max(2, samples // (4 * max(1, len(distinct))))
    for r_idx, root in enumerate(distinct):
        for j in range(per_root):
            rng = cfg.make_rng(seed, 0xADF5, r_idx, j)
            eps1 = 10.0 ** rng.uniform(-7.0, -2.0) * scale
            eps2 = 10.0 ** rng.uniform(-7.0, -2.0) * scale
            z1 = root + eps1 * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            z2 = root + eps2 * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
            pairs.append((z1, z2))
            pairs.append((z1, _disk_point(rng, radius)))
    return pairs


def lipschitz_probe(a, b, eta, samples: int, seed: int, *,
                    fitted_c: float | None = None, slack: float = 1e-6,
                    xi_tol: float = XI_TOL) -> LipschitzReport:
    """Max and min difference quotients of psi over sampled pairs.

    The reported gamma is the pair-only quantity; bound_satisfied compares
    the quotients against 1 +/- C * (gamma_anchored + |eta|), since the
    origin-pinning makes the anchored value the one the slope bound actually
    controls (the two agree whenever 0 is among the roots)."""
    if samples < 2:
        raise ValidationError("lipschitz_probe needs samples >= 2")
    a = tuple(complex(v) for v in a)
    b = tuple(complex(v) for v in b)
    eta = complex(eta)
    g = gamma(a, b, tol=xi_tol)
    g_anchor = gamma_anchored(a, b, tol=xi_tol)
    if fitted_c is None:
        fitted_c = cfg.FITTED_C.get(len(a), max(cfg.FITTED_C.values()))
    scale = max(1.0, _scale_of(a, b))
    lo, hi = math.inf, 0.0
    used = 0
    for z1, z2 in sample_pairs(a, b, samples, seed):
        sep = abs(z1 - z2)
        if sep <= 1e-9 * scale:
            continue
        q = abs(psi(z1, a, b, eta, xi_tol=xi_tol)
                - psi(z2, a, b, eta, xi_tol=xi_tol)) / sep
        lo = min(lo, q)
        hi = max(hi, q)
        used += 1
    gate = fitted_c * (g_anchor + abs(eta))
    ok = hi <= 1.0 + gate + slack
    if gate <= 0.5:
        ok = ok and lo >= 1.0 - gate - slack
    return LipschitzReport(
        gamma=g,
        eta_abs=abs(eta),
        empirical_lipschitz=hi,
        empirical_colipschitz=lo,
        fitted_C=fitted_c,
        bound_satisfied=ok,
        samples=used,
    )


def sample_compatible_pair(n_roots: int, rng, *, spread: float | None = None,
                           allow_zero: bool = True):
    """Draw a merging-compatible (a, b, eta) for probing: distinct cluster
    values separated in an annulus, one perturbation per cluster (the zero
    cluster, when present, stays pinned at 0)."""
    k = int(rng.integers(1, n_roots + 1))
    use_zero = allow_zero and k >= 1 and rng.uniform() < 0.3
    values: list[complex] = []
    guard = 0
    while len(values) < k:
        guard += 1
        if guard > 500:
            raise ConvergenceError("cluster sampling stalled")
        w = _disk_point(rng, 1.6)
        if abs(w) < 0.4:
            continue
        if all(abs(w - v) >= 0.35 for v in values):
            values.append(w)
    if use_zero:
        values[0] = 0.0 + 0.0j
    # split N slots over the k clusters
    sizes = [1] * k
    for _ in range(n_roots - k):
        sizes[int(rng.integers(0, k))] += 1
    if spread is None:
        spread = 10.0 ** rng.uniform(-4.0, -0.8)
    a: list[complex] = []
    b: list[complex] = []
    for v, size in zip(values, sizes):
        if v == 0:
            target = 0.0 + 0.0j
        else:
            target = v + spread * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
        a.extend([v] * size)
        b.extend([target] * size)
    eta = 0.5 * spread * cmath.exp(1j * rng.uniform(0, 2 * math.pi))
    return tuple(a), tuple(b), eta


def estimate_fitted_c(n_roots: int, *, configs: int = 160, samples: int = 64,
                      seed: int = 0, safety: float = 1.25) -> float:
    """Empirical slope constant: the largest (L - 1) / (gamma_anchored +
    |eta|) and (1 - colipschitz) / (gamma_anchored + |eta|) over a sweep of
    sampled compatible configurations, inflated by the safety factor."""
    worst = 0.0
    for c_idx in range(configs):
        rng = cfg.make_rng(seed, 0xF17C, n_roots, c_idx)
        a, b, eta = sample_compatible_pair(n_roots, rng)
        g = gamma_anchored(a, b) + abs(eta)
        if g < 1e-8:
            continue
        report = lipschitz_probe(a, b, eta, samples, seed + c_idx,
                                 fitted_c=1.0)
        worst = max(worst, (report.empirical_lipschitz - 1.0) / g)
        worst = max(worst, (1.0 - report.empirical_colipschitz) / g)
    return safety * worst
