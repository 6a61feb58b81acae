"""The acceptance battery: twelve property-based criteria with pinned
tolerances, runnable from the CLI (`suite`) and from pytest.

Every criterion draws its randomness from the run seed via counter-based
streams, so a fixed configuration produces a byte-identical report.  Each
criterion returns a CriterionResult carrying the pass flag, the measured
extremes, and the runtime against its budget.
"""

from __future__ import annotations

import cmath
import math
import time
from dataclasses import dataclass

from . import corpus
from .config import RunConfig
from .deformation import DeformationContext, deform, orbit_jacobian, roots_at_level
from .errors import StratdeformError
from .geometry import general_position_trial, transversality_trial
from .interpolation import (
    dpsi_deta,
    gamma_anchored,
    psi,
    psi_inverse,
    sample_compatible_pair,
    sample_pairs,
)
from .polyalg import roots_univariate
from .stratification import complete_system, stratum_label, validate_system
from .symmetric import generalized_discriminants


@dataclass(frozen=True)
class CriterionResult:
    index: int
    name: str
    passed: bool
    runtime_s: float
    runtime_limit_s: float
    details: dict

    def line(self) -> str:
        status = "PASS" if self.passed else "FAIL"
        return (f"[{status}] criterion {self.index:2d} {self.name}: "
                f"{self.details.get('summary', '')} "
                f"({self.runtime_s:.2f}s / limit {self.runtime_limit_s:.0f}s)")

    def to_json(self) -> dict:
        return {
            "index": self.index,
            "name": self.name,
            "passed": self.passed,
            "runtime_s": self.runtime_s,
            "runtime_limit_s": self.runtime_limit_s,
            "details": self.details,
        }


def _finish(index, name, limit, t0, ok, details) -> CriterionResult:
    runtime = time.perf_counter() - t0
    passed = bool(ok) and runtime < limit
    if runtime >= limit:
        details = dict(details)
        details["runtime_exceeded"] = True
    return CriterionResult(index=index, name=name, passed=passed,
                           runtime_s=runtime, runtime_limit_s=limit,
                           details=details)


def _unit(rng) -> complex:
    return cmath.exp(1j * rng.uniform(0.0, 2.0 * math.pi))


def _cplx(rng, scale=1.0) -> complex:
    re, im = rng.normal(size=2)
    return scale * complex(re, im)


def _scale_abc(z, a, b) -> float:
    return max([abs(z)] + [abs(v) for v in a] + [abs(v) for v in b])


def criterion_01_identity(config: RunConfig) -> CriterionResult:
    """b = a, eta = 0 reproduces the identity within 1e-12 * scale."""
    t0 = time.perf_counter()
    tol = config.tol("acc_identity")
    worst = 0.0
    count = 10_000
    for k in range(count):
        rng = config.rng(1, k)
        n = int(rng.integers(1, 6))
        a = [_cplx(rng) for _ in range(n)]
        if rng.uniform() < 0.2 and n >= 2:
            a[1] = a[0]
        if rng.uniform() < 0.2:
            a[0] = 0.0
        z = _cplx(rng, 1.5)
        scale = _scale_abc(z, a, a)
        if scale == 0.0:
            continue
        err = abs(psi(z, a, a, 0.0) - z) / scale
        worst = max(worst, err)
    ok = worst <= tol
    return _finish(1, "interpolation identity", 10.0, t0, ok,
                   {"summary": f"max |psi(z)-z|/scale = {worst:.3e} <= {tol:.0e}",
                    "max_error": worst, "samples": count})


def criterion_02_root_interpolation(config: RunConfig) -> CriterionResult:
    """psi(a_i + delta) is within 1e-5 * scale of b_i at |delta| = 1e-8."""
    t0 = time.perf_counter()
    tol = config.tol("acc_root_interp")
    worst = 0.0
    count = 1_000
    for k in range(count):
        rng = config.rng(2, k)
        n = int(rng.integers(1, 5))
        a, b, eta = sample_compatible_pair(n, rng)
        scale = max(1e-9, _scale_abc(0.0, a, b))
        delta = 1e-8 * scale
        for ai, bi in zip(a, b):
            z = ai + delta * _unit(rng)
            err = abs(psi(z, a, b, eta) - bi) / scale
            worst = max(worst, err)
    ok = worst <= tol
    return _finish(2, "root interpolation and continuity", 30.0, t0, ok,
                   {"summary": f"max |psi(a_i+d)-b_i|/scale = {worst:.3e} <= {tol:.0e}",
                    "max_error": worst, "configs": count})


def criterion_03_homogeneity(config: RunConfig) -> CriterionResult:
    """psi(l z, l a, l b, eta) = l psi(z, a, b, eta) within 1e-9 |l| scale."""
    t0 = time.perf_counter()
    tol = config.tol("acc_homogeneity")
    worst = 0.0
    count = 1_000
    for k in range(count):
        rng = config.rng(3, k)
        n = int(rng.integers(1, 5))
        a, b, eta = sample_compatible_pair(n, rng)
        z = _cplx(rng, 1.5)
        lam = 10.0 ** rng.uniform(-3.0, 3.0) * _unit(rng)
        scale = max(1e-9, _scale_abc(z, a, b))
        lhs = psi(lam * z, [lam * v for v in a], [lam * v for v in b], eta)
        rhs = lam * psi(z, a, b, eta)
        worst = max(worst, abs(lhs - rhs) / (abs(lam) * scale))
    ok = worst <= tol
    return _finish(3, "joint homogeneity", 10.0, t0, ok,
                   {"summary": f"max defect = {worst:.3e} <= {tol:.0e}",
                    "max_error": worst, "samples": count})


def criterion_04_closed_form(config: RunConfig) -> CriterionResult:
    """Single-root case agrees with the explicit rational expression."""
    t0 = time.perf_counter()
    tol = config.tol("acc_closed_form")
    worst = 0.0
    count = 10_000
    for k in range(count):
        rng = config.rng(4, k)
        zero_root = rng.uniform() < 0.2
        a = 0.0 + 0.0j if zero_root else _cplx(rng)
        b = 0.0 + 0.0j if zero_root else a + 0.3 * _cplx(rng)
        eta = 0.3 * _cplx(rng)
        z = _cplx(rng, 1.5)
        scale = _scale_abc(z, [a], [b])
        if scale == 0.0 or abs(z) < 1e-9 or abs(z - a) < 1e-9:
            continue
        denom = abs(z) ** 2 + abs(z - a) ** 2
        expected = z + (abs(z) ** 2 * (b - a) + eta * z * abs(z - a) ** 2) / denom
        got = psi(z, [a], [b], eta)
        worst = max(worst, abs(got - expected) / scale)
    ok = worst <= tol
    return _finish(4, "single-root closed form", 5.0, t0, ok,
                   {"summary": f"max |psi - closed form|/scale = {worst:.3e} <= {tol:.0e}",
                    "max_error": worst, "samples": count})


def criterion_05_lipschitz(config: RunConfig) -> CriterionResult:
    """Difference quotients respect 1 +/- C (gamma + |eta|) under the gate
    C (gamma + |eta|) <= 0.5, and the inverse round-trips.

    gamma here is the origin-anchored value: the map pins 0, so on
    configurations without a zero root the pair-only gamma does not control
    the stretch between 0 and the roots (no constant can make that bound
    true); with a zero root present the two definitions agree exactly."""
    t0 = time.perf_counter()
    slack = config.tol("acc_lipschitz_slack")
    inv_tol = config.tol("acc_inverse")
    worst_upper = -math.inf
    worst_lower = math.inf
    worst_round = 0.0
    checked = 0
    round_trips = 0
    per_n = 340
    for n in (2, 3, 4):
        c_n = config.fitted_c(n)
        for k in range(per_n):
            rng = config.rng(5, n, k)
            a, b, eta = sample_compatible_pair(n, rng)
            gate = c_n * (gamma_anchored(a, b) + abs(eta))
            if gate > 0.5:
                continue
            checked += 1
            scale = max(1.0, _scale_abc(0.0, a, b))
            for z1, z2 in sample_pairs(a, b, 12, config.seed + k):
                sep = abs(z1 - z2)
                if sep <= 1e-9 * scale:
                    continue
                q = abs(psi(z1, a, b, eta) - psi(z2, a, b, eta)) / sep
                worst_upper = max(worst_upper, q - (1.0 + gate))
                worst_lower = min(worst_lower, q - (1.0 - gate))
            if k % 8 == 0:
                z = _cplx(rng, 1.2)
                w = psi(z, a, b, eta)
                z_back = psi_inverse(w, a, b, eta, fitted_c=c_n, tol=inv_tol)
                worst_round = max(worst_round,
                                  abs(psi(z_back, a, b, eta) - w) / scale,
                                  abs(z_back - z) / scale)
                round_trips += 1
    ok = (worst_upper <= slack and worst_lower >= -slack
          and worst_round <= inv_tol and checked > 100)
    return _finish(5, "bi-Lipschitz bounds and inversion", 60.0, t0, ok,
                   {"summary": (f"upper excess {worst_upper:.2e}, lower deficit "
                                f"{-worst_lower:.2e}, round-trip {worst_round:.2e}"),
                    "configs_checked": checked, "round_trips": round_trips})


def criterion_06_eta_derivative(config: RunConfig) -> CriterionResult:
    """Parameter derivative matches central differences and vanishes
    exactly at z = 0 and z = a_i.

    Away from the origin the kernel denominator grows like
    (|z| / root distance)^(2 N!), so the derivative underflows what a
    float difference of psi values can resolve; the comparison therefore
    samples z across the visible range near the origin, where the
    derivative magnitude stays above 1e-4 * scale."""
    t0 = time.perf_counter()
    tol = config.tol("acc_eta_deriv")
    worst = 0.0
    exact_ok = True
    checked = 0
    skipped = 0
    count = 1_000
    for k in range(count):
        rng = config.rng(6, k)
        n = int(rng.integers(1, 5))
        a, b, eta = sample_compatible_pair(n, rng)
        scale = max(1.0, _scale_abc(0.0, a, b))
        nonzero = [abs(v) for v in a if abs(v) > 1e-9]
        reach = min(nonzero) if nonzero else 1.0
        hi = 0.5 if n >= 3 else 1.0
        r = 10.0 ** rng.uniform(math.log10(0.05), math.log10(hi))
        z = r * reach * _unit(rng)
        de = dpsi_deta(z, a, b, eta)
        if abs(de) < 1e-4 * scale:
            skipped += 1
            continue
        checked += 1
        h = 1e-6 * scale
        fd = (psi(z, a, b, eta + h) - psi(z, a, b, eta - h)) / (2.0 * h)
        worst = max(worst, abs(fd - de) / abs(de))
        if k % 50 == 0:
            exact_ok = exact_ok and dpsi_deta(0.0, a, b, eta) == 0
            exact_ok = exact_ok and all(
                dpsi_deta(v, a, b, eta) == 0 for v in a
            )
    ok = worst <= tol and exact_ok and checked >= count // 2
    return _finish(6, "parameter derivative", 10.0, t0, ok,
                   {"summary": f"max rel FD defect {worst:.3e} <= {tol:.0e} "
                               f"({checked} checked, {skipped} below the FD "
                               f"floor), exact zeros {'ok' if exact_ok else 'BROKEN'}",
                    "max_error": worst, "checked": checked,
                    "skipped": skipped})


def _partitions(total: int):
    if total == 0:
        yield ()
        return
    def rec(remaining, smallest):
        if remaining == 0:
            yield ()
            return
        for part in range(smallest, remaining + 1):
            for rest in rec(remaining - part, part):
                yield (part,) + rest
    yield from rec(total, 1)


def criterion_07_discriminants(config: RunConfig) -> CriterionResult:
    """Exact vanishing pattern D_l != 0, D_{l+1} = ... = D_N = 0 matches the
    planted number of distinct values over every multiplicity vector, N <= 7."""
    t0 = time.perf_counter()
    from fractions import Fraction

    cases = 0
    failures = []
    for n in range(1, 8):
        for m0 in range(0, n + 1):
            for parts in _partitions(n - m0):
                k = len(parts)
                for variant in range(2):
                    if variant == 0:
                        values = [Fraction(j + 1) for j in range(k)]
                    else:
                        values = [Fraction(2 * j + 1, 2) for j in range(k)]
                    vec = [Fraction(0)] * m0
                    for size, val in zip(parts, values):
                        vec.extend([val] * size)
                    planted = k + (1 if m0 > 0 else 0)
                    dv = generalized_discriminants(vec)
                    cases += 1
                    if dv.distinct_value_count() != planted:
                        failures.append((n, m0, parts, variant))
                    vals = dv.values
                    if planted < n and any(
                        not v.is_zero() for v in vals[planted:]
                    ):
                        failures.append((n, m0, parts, variant, "tail"))
                    if planted >= 1 and vals[planted - 1].is_zero():
                        failures.append((n, m0, parts, variant, "head"))
    ok = not failures
    return _finish(7, "generalized discriminants characterize types", 30.0,
                   t0, ok,
                   {"summary": f"{cases} planted cases, {len(failures)} failures",
                    "cases": cases, "failures": failures[:10]})


def criterion_08_completion(config: RunConfig) -> CriterionResult:
    """complete_system output passes validate_system on the 20-case corpus."""
    t0 = time.perf_counter()
    tops = corpus.chain_corpus()
    failures = []
    for idx, top in enumerate(tops):
        try:
            result = complete_system(top)
        except StratdeformError as exc:
            failures.append((idx, f"completion raised: {exc}"))
            continue
        report = validate_system(result.system.polys)
        if not report.valid:
            failures.append((idx, "; ".join(i.message for i in report.issues)))
    ok = not failures and len(tops) == 20
    return _finish(8, "system completion validates", 60.0, t0, ok,
                   {"summary": f"{len(tops)} chains completed, "
                               f"{len(failures)} failures",
                    "failures": failures})


_CONTEXT_CACHE: dict = {}


def _cached_context(name: str, system, seed: int, t_radius) -> DeformationContext:
    key = (name, seed, t_radius)
    if key not in _CONTEXT_CACHE:
        _CONTEXT_CACHE[key] = DeformationContext.create(
            system, t_radius=t_radius, calibration_samples=200, seed=seed,
        )
    return _CONTEXT_CACHE[key]


def _acceptance_contexts(config: RunConfig):
    return [
        _cached_context("two_level", corpus.system_two_level(),
                        config.seed, config.t_radius),
        _cached_context("three_level", corpus.system_three_level(),
                        config.seed + 1, config.t_radius),
        _cached_context("projective", corpus.system_projective_trial(),
                        config.seed + 2, config.t_radius),
    ]


def _sample_point(ctx, rng, planted_prob=0.4):
    """Random point, sometimes planted on a root sheet of a random level."""
    n = ctx.system.n
    x = [_cplx(rng) for _ in range(n)]
    if rng.uniform() < planted_prob:
        choices = [lv for lv in range(1, n + 1)
                   if ctx.system.polys[lv - 1].total_degree() > 0]
        if choices:
            level = choices[int(rng.integers(0, len(choices)))]
            roots = roots_at_level(ctx, level, x[: level - 1])
            x[level - 1] = roots[int(rng.integers(0, len(roots)))]
    return x


def criterion_09_deformation(config: RunConfig) -> CriterionResult:
    """Identity at t = 0 (exact), equivariance, and stratum-label
    preservation over 10^4 samples on the corpus systems."""
    t0 = time.perf_counter()
    tol = config.tol("acc_equivariance")
    contexts = _acceptance_contexts(config)
    total = 10_000
    per_ctx = total // len(contexts)
    label_mismatches = 0
    identity_ok = True
    worst_equi = 0.0
    errors = 0
    for ci, ctx in enumerate(contexts):
        n = ctx.system.n
        for k in range(per_ctx):
            rng = config.rng(9, ci, k)
            x = _sample_point(ctx, rng)
            t = [ctx.t_radius * math.sqrt(rng.uniform()) * _unit(rng)
                 for _ in range(n)]
            if k % 37 == 0:
                if deform(ctx, [0.0] * n, x) != tuple(x):
                    identity_ok = False
            try:
                y = deform(ctx, t, x)
                before = stratum_label(x, ctx.system, strict=False)
                after = stratum_label(y, ctx.system, strict=False)
                if (before.depth, before.zero_pattern) != (after.depth,
                                                           after.zero_pattern):
                    label_mismatches += 1
                if k % 20 == 0:
                    lam = 10.0 ** rng.uniform(-1.0, 1.0) * _unit(rng)
                    ylam = deform(ctx, t, [lam * v for v in x])
                    scale = max(1.0, max(abs(v) for v in x))
                    worst_equi = max(worst_equi, max(
                        abs(u - lam * v) for u, v in zip(ylam, y)
                    ) / (abs(lam) * scale))
            except StratdeformError:
                errors += 1
    ok = (identity_ok and label_mismatches == 0 and worst_equi <= tol
          and errors <= total // 200)
    return _finish(9, "deformation identity, equivariance, strata", 120.0,
                   t0, ok,
                   {"summary": (f"labels preserved on {total} samples "
                                f"({label_mismatches} mismatches), equivariance "
                                f"defect {worst_equi:.2e}, identity "
                                f"{'exact' if identity_ok else 'BROKEN'}, "
                                f"{errors} numerical errors"),
                    "label_mismatches": label_mismatches,
                    "equivariance_defect": worst_equi,
                    "numerical_errors": errors})


def criterion_10_submersivity(config: RunConfig) -> CriterionResult:
    """Orbit Jacobian: exactly triangular, nonzero diagonal off the
    varieties, and no t_n-dependence on root sheets.

    Runs on the chains whose per-level root counts stay at or below 2: the
    orbit diagonal scales like (root distance / |z|)^(2 N!), so levels with
    N >= 4 roots push it below double precision and no finite difference
    can certify "nonzero" there."""
    t0 = time.perf_counter()
    defect_tol = config.tol("acc_jacobian_defect")
    all_contexts = _acceptance_contexts(config)
    contexts = [all_contexts[0], all_contexts[2]]
    worst_defect = 0.0
    min_diag = math.inf
    worst_sheet = 0.0
    samples = 0
    for ci, ctx in enumerate(contexts):
        n = ctx.system.n
        count = 0
        k = 0
        while count < 60 and k < 600:
            rng = config.rng(10, ci, k)
            k += 1
            x = [_cplx(rng) for _ in range(n)]
            lab = stratum_label(x, ctx.system, strict=False)
            if lab.depth != n:
                continue  # want the dense stratum: off every variety
            t = [0.3 * ctx.t_radius * _cplx(rng, 0.5) for _ in range(n)]
            scale = max(1.0, max(abs(v) for v in x))
            oj = orbit_jacobian(ctx, t, x)
            worst_defect = max(worst_defect, oj.triangular_defect / scale)
            min_diag = min(min_diag, oj.min_diagonal)
            count += 1
            samples += 1
        # root sheets: Psi_n there cannot depend on t_n
        for k in range(20):
            rng = config.rng(10, ci, 7000 + k)
            x = [_cplx(rng) for _ in range(n)]
            roots = roots_at_level(ctx, n, x[: n - 1])
            x[n - 1] = roots[int(rng.integers(0, len(roots)))]
            t = [0.3 * ctx.t_radius * _cplx(rng, 0.5) for _ in range(n)]
            scale = max(1.0, max(abs(v) for v in x))
            oj = orbit_jacobian(ctx, t, x)
            worst_sheet = max(worst_sheet, abs(oj.matrix[n - 1, n - 1]) / scale)
            samples += 1
    ok = (worst_defect <= defect_tol and min_diag > 1e-12
          and worst_sheet <= defect_tol)
    return _finish(10, "submersivity surrogate", 60.0, t0, ok,
                   {"summary": (f"triangularity defect {worst_defect:.2e}, "
                                f"min diagonal {min_diag:.3e}, sheet "
                                f"t_n-dependence {worst_sheet:.2e}"),
                    "samples": samples})


def criterion_11_transversality(config: RunConfig) -> CriterionResult:
    """Tangent line/circle pair: non-transverse at t = 0, transverse for at
    least 95 of 100 sampled t."""
    t0 = time.perf_counter()
    ctx = _cached_context("projective", corpus.system_projective_trial(),
                          config.seed + 2, config.t_radius)
    circle = corpus.unit_circle_patch()
    line = corpus.horizontal_line_patch("1")
    base = transversality_trial(line, circle, ctx, 1, config.seed,
                                t_override=[0.0, 0.0, 0.0])
    tangency_found = base.transverse_count == 0 and len(base.failures) > 0
    rep = transversality_trial(line, circle, ctx, 100, config.seed)
    ok = tangency_found and rep.transverse_count >= 95
    return _finish(11, "transversality Monte-Carlo", 120.0, t0, ok,
                   {"summary": (f"t=0 tangency {'detected' if tangency_found else 'MISSED'}; "
                                f"{rep.transverse_count}/100 random t transverse, "
                                f"min measure {rep.min_measure:.2e}"),
                    "transverse_count": rep.transverse_count,
                    "non_converged": rep.non_converged})


def criterion_12_general_position(config: RunConfig) -> CriterionResult:
    """Dimension counts: negative-excess pair empty, zero-excess pair finite
    with refinement-stable cluster counts, 95/100 each."""
    t0 = time.perf_counter()
    ctx = _cached_context("projective", corpus.system_projective_trial(),
                          config.seed + 2, config.t_radius)
    circle = corpus.unit_circle_patch()
    point = corpus.point_patch("3/10", "7/10")
    empty = general_position_trial(point, circle, ctx, 100, config.seed)
    line = corpus.horizontal_line_patch("1/2")
    finite = general_position_trial(line, circle, ctx, 100, config.seed + 1)
    ok = empty.success_count >= 95 and finite.success_count >= 95
    return _finish(12, "general position Monte-Carlo", 120.0, t0, ok,
                   {"summary": (f"empty regime {empty.success_count}/100, "
                                f"finite regime {finite.success_count}/100"),
                    "empty_success": empty.success_count,
                    "finite_success": finite.success_count})


ALL_CRITERIA = [
    criterion_01_identity,
    criterion_02_root_interpolation,
    criterion_03_homogeneity,
    criterion_04_closed_form,
    criterion_05_lipschitz,
    criterion_06_eta_derivative,
    criterion_07_discriminants,
    criterion_08_completion,
    criterion_09_deformation,
    criterion_10_submersivity,
    criterion_11_transversality,
    criterion_12_general_position,
]


@dataclass(frozen=True)
class SuiteReport:
    results: tuple[CriterionResult, ...]

    @property
    def all_passed(self) -> bool:
        return all(r.passed for r in self.results)

    def to_json(self) -> dict:
        return {
            "all_passed": self.all_passed,
            "results": [r.to_json() for r in self.results],
        }


def run_suite(config: RunConfig, *, emit=None) -> SuiteReport:
    """Run every criterion; failures are report entries, never exceptions."""
    results = []
    for criterion in ALL_CRITERIA:
        try:
            result = criterion(config)
        except StratdeformError as exc:
            # a controlled failure (e.g. absurd tolerance overrides)
            result = CriterionResult(
                index=len(results) + 1,
                name=criterion.__name__,
                passed=False,
                runtime_s=0.0,
                runtime_limit_s=0.0,
                details={"summary": f"aborted: {exc}", "error": str(exc)},
            )
        results.append(result)
        if emit is not None:
            emit(result.line())
    return SuiteReport(results=tuple(results))
