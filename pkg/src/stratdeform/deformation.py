"""Inductive deformation of a polynomial chain via root interpolation.

For a validated system F_1..F_n the family

    Psi_i(t, x) = psi(x_i, roots of F_i at x', roots of F_i at the deformed
                      prefix Psi'(t', x'), t_i)

moves each coordinate by interpolating between the root configuration over
the undeformed prefix and the one over the deformed prefix.  Levels with
F_i = 1 carry no roots; there the interpolation degenerates to
x_i * (1 + t_i).  The family satisfies Psi(0, x) = x exactly, scales
equivariantly (Psi(t, l x) = l Psi(t, x)), and preserves the vanishing
pattern of the chain, so stratum labels ride along unchanged.

Roots over the deformed prefix are matched to the base roots by
continuation along s -> Psi'(s t', x'): steps are halved until every root
cluster moves less than half the minimal gap between clusters, and the
multiplicity structure must survive the walk (TypeDriftError otherwise).
The neighborhood radius for t is certified by sampling: starting from 0.1
it is halved until a batch of random (x, t) passes tracking and the
contraction gates.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field

import numpy as np

from . import config as cfg
from .errors import (
    DimensionError,
    NumericalError,
    PathTooWildError,
    StratdeformError,
    TypeDriftError,
    ValidationError,
)
from .interpolation import gamma, psi
from .polyalg import UniPolyView, roots_univariate
from .stratification import PolynomialSystem, validate_system


@dataclass(frozen=True)
class TrackingPolicy:
    initial_step: float = 1.0
    shrink: float = 0.5
    min_step: float = 1e-6


@dataclass
class DeformationContext:
    """A validated system plus the numerical policy needed to evaluate the
    deformation.  Immutable after construction; deform calls are pure."""

    system: PolynomialSystem
    t_radius: float
    tracking: TrackingPolicy = field(default_factory=TrackingPolicy)
    tolerances: dict = field(default_factory=dict)
    fitted_c: dict = field(default_factory=lambda: dict(cfg.FITTED_C))

    def tol(self, name: str) -> float:
        if name in self.tolerances:
            return self.tolerances[name]
        return cfg.DEFAULT_TOLERANCES[name]

    def gate_constant(self, n_roots: int) -> float:
        if n_roots in self.fitted_c:
            return self.fitted_c[n_roots]
        return max(self.fitted_c.values())

    @classmethod
    def create(cls, system: PolynomialSystem, *, t_radius: float | None = None,
               tracking: TrackingPolicy | None = None,
               tolerances: dict | None = None,
               calibration_samples: int = 1000, seed: int = 0,
               ) -> "DeformationContext":
        report = validate_system(system.polys)
        if not report.valid:
            raise ValidationError(
                "cannot deform an invalid system: "
                + "; ".join(i.message for i in report.issues)
            )
        ctx = cls(
            system=system,
            t_radius=t_radius if t_radius is not None else 0.1,
            tracking=tracking or TrackingPolicy(),
            tolerances=dict(tolerances or {}),
        )
        if t_radius is None:
            ctx.t_radius = calibrate_t_radius(
                ctx, samples=calibration_samples, seed=seed
            )
        return ctx


@dataclass(frozen=True)
class TrackedRoots:
    """Index-aligned root vectors over the undeformed and deformed base;
    equal base entries stay equal after tracking, zeros stay zero."""

    base: tuple[complex, ...]
    deformed: tuple[complex, ...]

    def to_json(self) -> dict:
        return {
            "base": [[v.real, v.imag] for v in self.base],
            "deformed": [[v.real, v.imag] for v in self.deformed],
        }


def _specialize_coeffs(view: UniPolyView, point) -> list[complex]:
    return [c.evaluate(point) for c in view.coeffs]


def roots_at_level(ctx: DeformationContext, level: int, base_point):
    """Roots of x_level -> F_level(base_point, x_level), clustered and in
    the deterministic solver order."""
    if not 1 <= level <= ctx.system.n:
        raise DimensionError(f"level {level} out of range")
    poly = ctx.system.polys[level - 1]
    d = poly.total_degree()
    if d == 0:
        raise ValidationError(f"level {level} is trivial (degree 0)")
    if len(base_point) != level - 1:
        raise DimensionError(
            f"base point needs {level - 1} coordinates, got {len(base_point)}"
        )
    view = ctx.system.view(level)
    full = list(base_point) + [0.0] * (ctx.system.n - (level - 1))
    coeffs = _specialize_coeffs(view, full)
    return tuple(roots_univariate(
        coeffs,
        cluster_tol=ctx.tol("track_cluster"),
        residual_tol=ctx.tol("root_residual"),
        step_tol=ctx.tol("root_step"),
    ))


def _distinct_clusters(roots):
    """Distinct values with multiplicities, plus the per-index cluster id.
    Root lists arrive cluster-merged, so exact equality groups them."""
    values: list[complex] = []
    mult: list[int] = []
    owner: list[int] = []
    for r in roots:
        for idx, v in enumerate(values):
            if v == r:
                mult[idx] += 1
                owner.append(idx)
                break
        else:
            values.append(r)
            mult.append(1)
            owner.append(len(values) - 1)
    return values, mult, owner


def _min_gap(values) -> float:
    best = math.inf
    for i in range(len(values)):
        for j in range(i + 1, len(values)):
            best = min(best, abs(values[i] - values[j]))
    return best


class _DeformJob:
    """One deformation evaluation: caches prefix values and tracking states
    per level, keyed by the path parameter s in [0, 1] (t is s * t_full)."""

    def __init__(self, ctx: DeformationContext, t, x):
        self.ctx = ctx
        self.t = [complex(v) for v in t]
        self.x = [complex(v) for v in x]
        n = ctx.system.n
        if len(self.t) != n or len(self.x) != n:
            raise DimensionError(f"t and x must have {n} coordinates")
        self._prefix_cache: dict = {(0, 0.0): ()}
        self._base: dict = {}
        self._tracks: dict = {}
        self.max_gate = 0.0

    # -- base data ---------------------------------------------------------

    def base_clusters(self, level: int):
        if level not in self._base:
            roots = roots_at_level(self.ctx, level, self.x[: level - 1])
            self._base[level] = (roots,) + _distinct_clusters(roots)
        return self._base[level]

    # -- prefix evaluation ---------------------------------------------------

    def prefix(self, level: int, s: float):
        if level == 0:
            return ()
        key = (level, s)
        if key in self._prefix_cache:
            return self._prefix_cache[key]
        value = self.prefix(level - 1, s) + (self.level_value(level, s),)
        self._prefix_cache[key] = value
        return value

    def level_value(self, level: int, s: float) -> complex:
        xi = self.x[level - 1]
        eta = s * self.t[level - 1]
        if s == 0.0:
            return xi
        poly = self.ctx.system.polys[level - 1]
        if poly.total_degree() == 0:
            # no roots to interpolate; the kernel-free limit of the map
            return xi * (1.0 + eta)
        roots, values, mult, owner = self.base_clusters(level)
        tracked = self.track_to(level, s)
        deformed = tuple(tracked[c] for c in owner)
        gate = self.ctx.gate_constant(len(roots)) * (
            gamma(roots, deformed, tol=self.ctx.tol("xi_check")) + abs(eta)
        )
        self.max_gate = max(self.max_gate, gate)
        return psi(
            xi, roots, deformed, eta,
            snap=self.ctx.tol("snap"),
            xi_tol=self.ctx.tol("xi_check"),
        )

    # -- tracking ------------------------------------------------------------

    def track_to(self, level: int, s_target: float):
        """Cluster values of F_level over the deformed prefix at s_target,
        aligned with the base clusters, reached by adaptive continuation."""
        roots, values, mult, owner = self.base_clusters(level)
        states = self._tracks.setdefault(level, {0.0: list(values)})
        if s_target in states:
            return states[s_target]
        cur_s = max(s for s in states if s <= s_target)
        cur_vals = states[cur_s]
        policy = self.ctx.tracking
        cluster_tol = self.ctx.tol("track_cluster")
        while cur_s < s_target:
            step = min(policy.initial_step, s_target - cur_s)
            last_reason = None
            while True:
                trial_s = min(cur_s + step, s_target)
                try:
                    new_vals = self._match_step(level, cur_vals, mult, trial_s)
                except _StepRejected as rej:
                    last_reason = rej
                    step *= policy.shrink
                    if step < policy.min_step:
                        gap = _min_gap(cur_vals)
                        scale = 1.0 + max(abs(v) for v in cur_vals)
                        if rej.collision or gap <= 8.0 * cluster_tol * scale:
                            raise TypeDriftError(
                                f"root clusters collided at level {level}, "
                                f"s = {trial_s:.6f}: {rej}"
                            ) from rej
                        raise PathTooWildError(
                            f"tracking step underflow at level {level}, "
                            f"s = {trial_s:.6f}: {rej}"
                        ) from rej
                    continue
                cur_s, cur_vals = trial_s, new_vals
                states[cur_s] = cur_vals
                break
        return states[s_target]

    def _match_step(self, level, cur_vals, mult, trial_s):
        base_pt = self.prefix(level - 1, trial_s)
        roots = roots_at_level(self.ctx, level, base_pt)
        new_values, new_mult, _ = _distinct_clusters(roots)
        if len(new_values) != len(cur_vals):
            raise _StepRejected(
                f"cluster count changed {len(cur_vals)} -> {len(new_values)}",
                collision=len(new_values) < len(cur_vals),
            )
        gap = _min_gap(cur_vals)
        limit = 0.5 * gap
        taken = [False] * len(new_values)
        matched = [0j] * len(cur_vals)
        for ci, cv in enumerate(cur_vals):
            best, best_d = None, math.inf
            for ni, nv in enumerate(new_values):
                dist = abs(nv - cv)
                if dist < best_d:
                    best, best_d = ni, dist
            if taken[best]:
                raise _StepRejected("two clusters matched one target",
                                    collision=True)
            if best_d >= limit:
                raise _StepRejected(
                    f"cluster moved {best_d:.3e}, above half-gap {limit:.3e}",
                    collision=False,
                )
            if new_mult[best] != mult[ci]:
                raise _StepRejected(
                    f"multiplicity changed {mult[ci]} -> {new_mult[best]}",
                    collision=True,
                )
            taken[best] = True
            matched[ci] = new_values[best]
            # the zero cluster must stay pinned at zero
            if cv == 0:
                if abs(matched[ci]) > 0:
                    raise _StepRejected("zero cluster left the origin",
                                        collision=True)
        return matched


class _StepRejected(StratdeformError):
    def __init__(self, message, collision: bool):
        super().__init__(message)
        self.collision = collision


def track_roots(ctx: DeformationContext, level: int, x_prime, t_prime
                ) -> TrackedRoots:
    """Roots of F_level over the deformed prefix, index-aligned with the
    base roots by continuation along s -> s * t_prime."""
    n = ctx.system.n
    if len(x_prime) != level - 1 or len(t_prime) != level - 1:
        raise DimensionError(
            f"level {level} tracking needs {level - 1}-dim x' and t'"
        )
    t_full = list(t_prime) + [0.0] * (n - len(t_prime))
    x_full = list(x_prime) + [0.0] * (n - len(x_prime))
    job = _DeformJob(ctx, t_full, x_full)
    roots, values, mult, owner = job.base_clusters(level)
    tracked = job.track_to(level, 1.0)
    # final separation check: distinct clusters must remain distinct
    scale = 1.0 + max(abs(v) for v in tracked)
    if len(tracked) > 1 and _min_gap(tracked) <= 2.0 * ctx.tol("track_cluster") * scale:
        raise TypeDriftError(
            f"tracked clusters at level {level} ended closer than the "
            "cluster tolerance"
        )
    deformed = tuple(tracked[c] for c in owner)
    return TrackedRoots(base=roots, deformed=deformed)


def deform(ctx: DeformationContext, t, x):
    """Psi(t, x) level by level; t = 0 short-circuits to x exactly."""
    n = ctx.system.n
    if len(t) != n or len(x) != n:
        raise DimensionError(f"t and x must have {n} coordinates")
    t = [complex(v) for v in t]
    x = [complex(v) for v in x]
    if all(v == 0 for v in t):
        return tuple(x)
    job = _DeformJob(ctx, t, x)
    return job.prefix(n, 1.0)


def deform_projective(ctx: DeformationContext, t, x_hom):
    """Deform a class in projective space: the output representative has
    unit norm and its first significant coordinate rotated real-positive,
    so representatives of one class agree up to float noise."""
    x = [complex(v) for v in x_hom]
    norm = math.sqrt(sum(abs(v) ** 2 for v in x))
    if norm == 0.0:
        raise ValidationError("homogeneous coordinates must not all vanish")
    y = deform(ctx, t, [v / norm for v in x])
    return normalize_projective(y)


def normalize_projective(y):
    y = [complex(v) for v in y]
    norm = math.sqrt(sum(abs(v) ** 2 for v in y))
    if norm == 0.0:
        raise NumericalError("projective representative collapsed to zero")
    y = [v / norm for v in y]
    pivot = None
    for v in y:
        if abs(v) > 1e-9:
            pivot = v
            break
    if pivot is None:
        raise NumericalError("no significant coordinate after normalization")
    rot = pivot.conjugate() / abs(pivot)
    return tuple(v * rot for v in y)


@dataclass(frozen=True)
class OrbitJacobian:
    """Finite-difference matrix d Psi_i / d t_j with its triangularity
    defect (largest entry above the diagonal) and smallest diagonal
    magnitude."""

    matrix: np.ndarray
    triangular_defect: float
    min_diagonal: float

    def to_json(self) -> dict:
        return {
            "matrix": [[[v.real, v.imag] for v in row] for row in self.matrix],
            "triangular_defect": self.triangular_defect,
            "min_diagonal": self.min_diagonal,
        }


def orbit_jacobian(ctx: DeformationContext, t, x, *, step: float | None = None
                   ) -> OrbitJacobian:
    """Central differences of the orbit map t -> Psi(t, x)."""
    n = ctx.system.n
    t = [complex(v) for v in t]
    x = [complex(v) for v in x]
    if step is None:
        scale = max([1.0] + [abs(v) for v in t] + [abs(v) for v in x])
        step = ctx.tol("fd_step") * scale
    cols = []
    for j in range(n):
        tp = list(t)
        tm = list(t)
        tp[j] += step
        tm[j] -= step
        yp = deform(ctx, tp, x)
        ym = deform(ctx, tm, x)
        cols.append([(a - b) / (2.0 * step) for a, b in zip(yp, ym)])
    mat = np.array(cols, dtype=complex).T  # mat[i, j] = dPsi_i / dt_j
    defect = 0.0
    for i in range(n):
        for j in range(i + 1, n):
            defect = max(defect, abs(mat[i, j]))
    min_diag = min(abs(mat[i, i]) for i in range(n))
    return OrbitJacobian(matrix=mat, triangular_defect=defect,
                         min_diagonal=min_diag)


def _polydisk_point(rng, n: int, radius: float):
    out = []
    for _ in range(n):
        r = radius * math.sqrt(rng.uniform())
        th = rng.uniform(0.0, 2.0 * math.pi)
        out.append(r * cmath.exp(1j * th))
    return out


def calibrate_t_radius(ctx: DeformationContext, *, samples: int = 1000,
                       seed: int = 0, start: float = 0.1,
                       min_radius: float = 1e-4, shrink: float = 0.5) -> float:
    """Halve the candidate radius until a batch of random (x, t) samples
    survives type-preserving tracking with every contraction gate below 1."""
    n = ctx.system.n
    radius = start
    while radius >= min_radius:
        ok = True
        for k in range(samples):
            rng = cfg.make_rng(seed, 0xCA1, k)
            x = [complex(v[0], v[1]) for v in rng.normal(size=(n, 2))]
            t = _polydisk_point(rng, n, radius)
            try:
                job = _DeformJob(ctx, t, x)
                job.prefix(n, 1.0)
                if job.max_gate >= 1.0:
                    ok = False
            except NumericalError:
                ok = False
            if not ok:
                break
        if ok:
            return radius
        radius *= shrink
    raise NumericalError(
        f"no radius above {min_radius} certified by {samples} samples"
    )
