"""Empirical transversality and general-position trials in an affine chart.

Patches are real semialgebraic pieces cut out by polynomial equations and
strict inequalities in R^m.  For a deformation context over m+1 homogeneous
variables, a chart map sends p in R^m to the dehomogenized image of the
deformed lift (p, 1); trials sample the deformation parameter t in the
calibrated polydisk, locate intersection points of Z with the preimage of W
under that map (grid seeding plus damped Gauss-Newton), and test tangent
spaces at each located point.

Transversality of two orthonormal tangent bases A, B in R^m is decided by
the smallest eigenvalue of A^T A + B^T B: the spans fill the ambient space
iff that matrix is positive definite, and the square root of its smallest
eigenvalue (clipped to 1) is the reported measure.  Building the Gram sum
the same way for both orders makes the check exactly symmetric.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass

import numpy as np

from . import config as cfg
from .deformation import DeformationContext, deform
from .errors import (
    DimensionError,
    NumericalError,
    RankDeficiencyError,
    ValidationError,
)
from .polyalg import MultiPoly
from .stratification import stratum_label


@dataclass(frozen=True)
class ImplicitPatch:
    """Smooth semialgebraic piece: common zeros of the equations where all
    inequalities are strictly positive.  param_box bounds the ambient
    region used for seeding and filtering."""

    ambient_dim: int
    equations: tuple[MultiPoly, ...]
    inequalities: tuple[MultiPoly, ...] = ()
    expected_dim: int | None = None
    param_box: tuple[tuple[float, float], ...] | None = None

    def __post_init__(self):
        for p in self.equations + self.inequalities:
            if p.num_vars != self.ambient_dim:
                raise DimensionError("patch polynomials must match ambient_dim")
            for c in p.terms.values():
                if c.im != 0:
                    raise ValidationError("patch polynomials must be real")

    def residual(self, x) -> float:
        if not self.equations:
            return 0.0
        return max(abs(eq.evaluate(x).real) for eq in self.equations)

    def admits(self, x, *, margin: float = 0.0) -> bool:
        """Strict inequalities and (slightly enlarged) box membership."""
        for q in self.inequalities:
            if q.evaluate(x).real <= margin:
                return False
        if self.param_box is not None:
            for v, (lo, hi) in zip(x, self.param_box):
                pad = 0.1 * (hi - lo)
                if not (lo - pad <= float(v.real if isinstance(v, complex) else v)
                        <= hi + pad):
                    return False
        return True

    def to_json(self) -> dict:
        doc = {
            "dim": self.ambient_dim,
            "equations": [p.to_json() for p in self.equations],
            "inequalities": [p.to_json() for p in self.inequalities],
            "expected_dim": self.expected_dim,
        }
        if self.param_box is not None:
            doc["param_box"] = [list(b) for b in self.param_box]
        return doc

    @staticmethod
    def from_json(doc: dict) -> "ImplicitPatch":
        try:
            box = doc.get("param_box")
            return ImplicitPatch(
                ambient_dim=int(doc["dim"]),
                equations=tuple(MultiPoly.from_json(p) for p in doc["equations"]),
                inequalities=tuple(
                    MultiPoly.from_json(p) for p in doc.get("inequalities", [])
                ),
                expected_dim=doc.get("expected_dim"),
                param_box=tuple((float(lo), float(hi)) for lo, hi in box)
                if box is not None else None,
            )
        except (KeyError, TypeError) as exc:
            raise ValidationError(f"malformed patch document: {exc}") from exc


def tangent_basis(patch: ImplicitPatch, x, *, tol: float = 1e-7) -> np.ndarray:
    """Orthonormal rows spanning the tangent space at x: the null space of
    the equation Jacobian.  Requires x on the patch and full-rank gradients."""
    pt = np.asarray([complex(v) for v in x])
    if len(pt) != patch.ambient_dim:
        raise DimensionError("point dimension mismatch")
    scale = 1.0 + float(np.max(np.abs(pt)))
    for eq in patch.equations:
        if abs(eq.evaluate(pt)) > tol * max(1.0, eq.coefficient_norm()) * scale ** max(1, eq.total_degree()):
            raise ValidationError("point does not satisfy the patch equations")
    if not patch.equations:
        return np.eye(patch.ambient_dim)
    rows = []
    for eq in patch.equations:
        rows.append([eq.derivative(j).evaluate(pt).real
                     for j in range(patch.ambient_dim)])
    jac = np.asarray(rows, dtype=float)
    u, s, vt = np.linalg.svd(jac)
    rank = int(np.sum(s > max(s[0], 1e-300) * 1e-10)) if s.size else 0
    if rank < len(patch.equations):
        raise RankDeficiencyError(
            f"equation gradients have rank {rank} < {len(patch.equations)}"
        )
    basis = vt[rank:]
    if patch.expected_dim is not None and basis.shape[0] != patch.expected_dim:
        raise ValidationError(
            f"tangent dimension {basis.shape[0]} != expected {patch.expected_dim}"
        )
    return basis


def is_transverse(basis_a: np.ndarray, basis_b: np.ndarray, ambient_dim: int,
                  tol: float = 1e-3):
    """(flag, measure): do the two spans fill R^ambient_dim, and how far
    from failing; measure is sqrt(min eigenvalue of the Gram sum), in [0, 1]."""
    a = np.atleast_2d(np.asarray(basis_a, dtype=float))
    b = np.atleast_2d(np.asarray(basis_b, dtype=float))
    if a.shape[1] != ambient_dim or b.shape[1] != ambient_dim:
        raise DimensionError("basis row length must equal ambient_dim")
    gram = a.T @ a + b.T @ b
    lam = np.linalg.eigvalsh(gram)[0]
    measure = float(min(1.0, math.sqrt(max(0.0, lam))))
    return measure > tol, measure


# -- chart-level deformation -----------------------------------------------------


def chart_map(ctx: DeformationContext, t, *, imag_tol: float = 1e-6):
    """The deformation read in the affine chart x_(m+1) = 1 of projective
    space: p -> dehomogenized Psi_t(p, 1).  Real t keeps real points real;
    residual imaginary parts above imag_tol raise."""
    m = ctx.system.n - 1
    t = [complex(v) for v in t]

    def apply(p):
        lift = [complex(v) for v in p] + [1.0 + 0.0j]
        y = deform(ctx, t, lift)
        w = y[-1]
        if abs(w) < 1e-12:
            raise NumericalError("deformed point escaped the chart")
        out = [y[i] / w for i in range(m)]
        scale = 1.0 + max(abs(v) for v in out)
        if any(abs(v.imag) > imag_tol * scale for v in out):
            raise NumericalError("deformed real point drifted off the real slice")
        return np.asarray([v.real for v in out], dtype=float)

    return apply


def _grid_seeds(box, per_axis: int):
    axes = [np.linspace(lo, hi, per_axis) for lo, hi in box]
    return [np.asarray(p, dtype=float) for p in itertools.product(*axes)]


def _project_to_patch(patch: ImplicitPatch, seed, *, max_iter: int = 40,
                      tol: float = 1e-11):
    """Gauss-Newton onto the patch equations alone (no deformation)."""
    x = np.asarray(seed, dtype=float)
    if not patch.equations:
        return x
    for _ in range(max_iter):
        r = np.asarray([eq.evaluate(x).real for eq in patch.equations])
        if np.max(np.abs(r)) < tol * (1.0 + float(np.max(np.abs(x)))):
            return x
        jac = np.asarray([[eq.derivative(j).evaluate(x).real
                           for j in range(patch.ambient_dim)]
                          for eq in patch.equations])
        try:
            step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
        except np.linalg.LinAlgError:
            return None
        if not np.all(np.isfinite(step)):
            return None
        x = x + step
    return None


def _dedupe(points, radius: float):
    out = []
    for p in points:
        if all(np.linalg.norm(p - q) > radius for q in out):
            out.append(p)
    return out


def _stacked_residual(z_patch, w_patch, g, x):
    vals = [eq.evaluate(x).real for eq in z_patch.equations]
    gx = g(x)
    vals += [eq.evaluate(gx).real for eq in w_patch.equations]
    return np.asarray(vals, dtype=float), gx


def _solve_intersections(z_patch: ImplicitPatch, w_patch: ImplicitPatch, g,
                         *, per_axis: int, newton_tol: float,
                         cluster_radius: float, max_iter: int = 30):
    """Locate p with eqs_Z(p) = 0 and eqs_W(g(p)) = 0.  Returns (points,
    non_converged_count)."""
    if z_patch.param_box is None:
        raise ValidationError("the first patch needs a param_box for seeding")
    m = z_patch.ambient_dim
    h = 1e-6
    seeds = []
    for raw in _grid_seeds(z_patch.param_box, per_axis):
        proj = _project_to_patch(z_patch, raw)
        if proj is not None:
            seeds.append(proj)
    seeds = _dedupe(seeds, 10.0 * cluster_radius)
    solutions = []
    failures = 0
    coeff_scale = max(
        [1.0]
        + [eq.coefficient_norm() for eq in z_patch.equations]
        + [eq.coefficient_norm() for eq in w_patch.equations]
    )
    for seed in seeds:
        x = np.array(seed, dtype=float)
        converged = False
        try:
            r, _ = _stacked_residual(z_patch, w_patch, g, x)
            for _ in range(max_iter):
                if np.max(np.abs(r)) < newton_tol * coeff_scale:
                    converged = True
                    break
                jac = np.zeros((len(r), m))
                for j in range(m):
                    xp = x.copy()
                    xp[j] += h
                    rp, _ = _stacked_residual(z_patch, w_patch, g, xp)
                    jac[:, j] = (rp - r) / h
                step, *_ = np.linalg.lstsq(jac, -r, rcond=None)
                if not np.all(np.isfinite(step)):
                    break
                # damping: keep the residual from growing
                lam = 1.0
                for _ in range(6):
                    cand = x + lam * step
                    rc, _ = _stacked_residual(z_patch, w_patch, g, cand)
                    if np.max(np.abs(rc)) <= np.max(np.abs(r)) or lam < 0.05:
                        x, r = cand, rc
                        break
                    lam *= 0.5
        except NumericalError:
            failures += 1
            continue
        if not converged:
            failures += 1
            continue
        gx = g(x)
        if z_patch.admits(x) and w_patch.admits(gx):
            solutions.append(x)
    pts = _dedupe(solutions, cluster_radius)
    return pts, failures


def _pullback_basis(w_basis: np.ndarray, g, x, *, h: float):
    """Tangent basis of the preimage at x: rows v with Dg(x) v in span(W)."""
    m = len(x)
    jac = np.zeros((m, m))
    for j in range(m):
        xp = np.array(x, dtype=float)
        xm = np.array(x, dtype=float)
        xp[j] += h
        xm[j] -= h
        jac[:, j] = (g(xp) - g(xm)) / (2.0 * h)
    try:
        pulled = np.linalg.solve(jac, w_basis.T).T
    except np.linalg.LinAlgError as exc:
        raise NumericalError("chart Jacobian is singular") from exc
    # re-orthonormalize
    q, _ = np.linalg.qr(pulled.T)
    return q.T


def check_common_stratum(z_patch: ImplicitPatch, w_patch: ImplicitPatch,
                         ctx: DeformationContext, *, samples: int = 4,
                         seed: int = 0) -> None:
    """Both patches must classify into one stratum label (sampled check)."""
    labels = []
    for patch in (z_patch, w_patch):
        if patch.param_box is None:
            continue
        rng = cfg.make_rng(seed, 0x57A7)
        found = 0
        guard = 0
        while found < samples and guard < 50 * samples:
            guard += 1
            raw = np.asarray([rng.uniform(lo, hi) for lo, hi in patch.param_box])
            pt = _project_to_patch(patch, raw)
            if pt is None or not patch.admits(pt):
                continue
            lift = list(pt) + [1.0]
            lab = stratum_label(lift, ctx.system, strict=False)
            labels.append((lab.depth, lab.zero_pattern))
            found += 1
    if len(set(labels)) > 1:
        raise ValidationError(
            "patches do not sample into a common stratum: "
            f"labels {sorted(set(labels))}"
        )


@dataclass(frozen=True)
class TransversalityReport:
    trials: int
    transverse_count: int
    min_measure: float
    failures: tuple
    non_converged: int

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "transverse_count": self.transverse_count,
            "min_measure": self.min_measure,
            "failures": [
                {"t": [[v.real, v.imag] for v in t],
                 "point": list(map(float, p)),
                 "measure": m}
                for (t, p, m) in self.failures
            ],
            "non_converged": self.non_converged,
        }


def _draw_t(rng, n: int, radius: float):
    """Real parameter draws: the chart trials run over the real numbers."""
    return [float(v) for v in rng.uniform(-radius, radius, size=n)]


def transversality_trial(z_patch: ImplicitPatch, w_patch: ImplicitPatch,
                         ctx: DeformationContext, trials: int, seed: int, *,
                         t_override=None, per_axis: int = 9,
                         tol: float | None = None,
                         newton_tol: float = 1e-9,
                         cluster_radius: float = 1e-6,
                         precheck: bool = True) -> TransversalityReport:
    """For each sampled t: intersect Z with the preimage of W under the
    chart deformation and test tangent transversality at every located
    point.  A trial with no intersection points is vacuously transverse."""
    if trials < 1:
        raise ValidationError("trials >= 1 required")
    if tol is None:
        tol = cfg.DEFAULT_TOLERANCES["transversality"]
    if precheck:
        check_common_stratum(z_patch, w_patch, ctx, seed=seed)
    m = z_patch.ambient_dim
    if w_patch.ambient_dim != m or ctx.system.n != m + 1:
        raise DimensionError("patches and context disagree on the ambient chart")
    transverse = 0
    min_measure = math.inf
    failures = []
    non_conv = 0
    for k in range(trials):
        if t_override is not None:
            t = [complex(v) for v in t_override]
        else:
            rng = cfg.make_rng(seed, 0x7123, k)
            t = _draw_t(rng, m + 1, ctx.t_radius)
        g = chart_map(ctx, t)
        points, fails = _solve_intersections(
            z_patch, w_patch, g, per_axis=per_axis,
            newton_tol=newton_tol, cluster_radius=cluster_radius,
        )
        non_conv += fails
        ok = True
        for p in points:
            try:
                basis_z = tangent_basis(z_patch, p)
                basis_w = tangent_basis(w_patch, g(p))
                pulled = _pullback_basis(basis_w, g, p, h=1e-6 * (1.0 + float(np.max(np.abs(p)))))
                flag, measure = is_transverse(basis_z, pulled, m, tol)
            except NumericalError:
                non_conv += 1
                continue
            min_measure = min(min_measure, measure)
            if not flag:
                ok = False
                failures.append((tuple(t), tuple(map(float, p)), measure))
        if ok:
            transverse += 1
    return TransversalityReport(
        trials=trials,
        transverse_count=transverse,
        min_measure=min_measure if min_measure < math.inf else float("nan"),
        failures=tuple(failures),
        non_converged=non_conv,
    )


@dataclass(frozen=True)
class GeneralPositionReport:
    trials: int
    regime: str
    success_count: int
    records: tuple

    def to_json(self) -> dict:
        return {
            "trials": self.trials,
            "regime": self.regime,
            "success_count": self.success_count,
            "records": [
                {"t": [[v.real, v.imag] for v in t],
                 "clusters_coarse": a, "clusters_fine": b, "success": s}
                for (t, a, b, s) in self.records
            ],
        }


def general_position_trial(z_patch: ImplicitPatch, w_patch: ImplicitPatch,
                           ctx: DeformationContext, trials: int, seed: int, *,
                           resolutions: tuple[int, int] = (7, 11),
                           newton_tol: float = 1e-9,
                           cluster_radius: float = 1e-6,
                           t_override=None,
                           precheck: bool = True) -> GeneralPositionReport:
    """Dimension-count checks in the two desk regimes: expected dimension
    -1 (intersection empty) and 0 (finite set, cluster count stable when
    the seeding grid refines)."""
    if trials < 1:
        raise ValidationError("trials >= 1 required")
    if z_patch.expected_dim is None or w_patch.expected_dim is None:
        raise ValidationError("general position trials need expected dims")
    m = z_patch.ambient_dim
    excess = z_patch.expected_dim + w_patch.expected_dim - m
    if excess not in (-1, 0):
        raise ValidationError(
            f"expected intersection dimension {excess} is outside the desk "
            "regimes (-1 for emptiness, 0 for finiteness)"
        )
    if precheck:
        check_common_stratum(z_patch, w_patch, ctx, seed=seed)
    regime = "empty" if excess < 0 else "finite"
    successes = 0
    records = []
    for k in range(trials):
        if t_override is not None:
            t = [complex(v) for v in t_override]
        else:
            rng = cfg.make_rng(seed, 0x69E0, k)
            t = _draw_t(rng, m + 1, ctx.t_radius)
        g = chart_map(ctx, t)
        coarse, _ = _solve_intersections(
            z_patch, w_patch, g, per_axis=resolutions[0],
            newton_tol=newton_tol, cluster_radius=cluster_radius,
        )
        fine, _ = _solve_intersections(
            z_patch, w_patch, g, per_axis=resolutions[1],
            newton_tol=newton_tol, cluster_radius=cluster_radius,
        )
        if regime == "empty":
            success = len(coarse) == 0 and len(fine) == 0
        else:
            success = len(coarse) == len(fine)
        successes += success
        records.append((tuple(t), len(coarse), len(fine), bool(success)))
    return GeneralPositionReport(
        trials=trials, regime=regime, success_count=successes,
        records=tuple(records),
    )
